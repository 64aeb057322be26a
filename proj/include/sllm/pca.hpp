#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sllm/model.hpp"

namespace sllm {

struct Projection2D {
  std::vector<std::string> user_ids;
  Matrix coords;               // N x 2
  double explained_variance[2] = {0.0, 0.0};  // fractions of total variance
  Vec components[2];           // principal directions, for inspection
};

namespace detail {

// Power iteration for the dominant eigenpair of a symmetric PSD matrix.
// Starts from the basis vector of the largest diagonal entry, which cannot
// lie in the null space while the matrix is nonzero.
inline std::pair<double, Vec> power_iteration(const Matrix& c, double tol, std::size_t max_iters) {
  const std::size_t d = c.rows();
  std::size_t start = 0;
  for (std::size_t i = 1; i < d; ++i)
    if (c(i, i) > c(start, start)) start = i;
  Vec v(d, 0.0);
  v[start] = 1.0;
  if (c(start, start) <= 0.0) return {0.0, v};  // zero matrix after deflation

  Vec next(d);
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    matvec(c, v, next);
    const double n = norm2(next);
    if (n == 0.0) return {0.0, v};
    double diff = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      next[i] /= n;
      diff = std::max(diff, std::fabs(next[i] - v[i]));
      sum = std::max(sum, std::fabs(next[i] + v[i]));
    }
    v = next;
    if (std::min(diff, sum) < tol) break;
  }
  matvec(c, v, next);
  return {dot(v, next), v};
}

inline void fix_sign(Vec& v) {
  std::size_t k = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::fabs(v[i]) > std::fabs(v[k])) k = i;
  if (v[k] < 0.0)
    for (auto& x : v) x = -x;
}

}  // namespace detail

// Mean-centered projection onto the top two principal directions, computed
// by power iteration with deflation. Component signs are fixed so the
// largest-magnitude loading is positive.
inline Projection2D pca_project(const EmbeddingMatrix& em, double tol = 1e-10,
                                std::size_t max_iters = 100000) {
  const std::size_t n = em.values.rows();
  const std::size_t d = em.values.cols();
  if (n < 3) throw Error("pca_project: need at least 3 points, have " + std::to_string(n));
  if (d < 2) throw Error("pca_project: need at least 2 dimensions, have " + std::to_string(d));

  Vec mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) axpy(1.0, em.values.row(i), mean);
  for (auto& m : mean) m /= static_cast<double>(n);

  Matrix centered(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) centered(i, j) = em.values(i, j) - mean[j];

  Matrix cov(d, d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = centered.row(i);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = a; b < d; ++b) cov(a, b) += row[a] * row[b];
  }
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      cov(a, b) /= static_cast<double>(n);
      cov(b, a) = cov(a, b);
    }

  double trace = 0.0;
  for (std::size_t a = 0; a < d; ++a) trace += cov(a, a);
  if (trace <= 0.0) throw Error("pca_project: input has zero variance (rank 0)");

  Projection2D proj;
  proj.user_ids = em.user_ids;
  proj.coords = Matrix(n, 2);

  Matrix work = cov;
  for (int k = 0; k < 2; ++k) {
    auto [lambda, v] = detail::power_iteration(work, tol, max_iters);
    if (lambda < 0.0) lambda = 0.0;
    detail::fix_sign(v);
    proj.explained_variance[k] = lambda / trace;
    proj.components[k] = v;
    for (std::size_t i = 0; i < n; ++i) proj.coords(i, k) = dot(centered.row(i), v);
    // Deflate: work -= lambda v v^T
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) work(a, b) -= lambda * v[a] * v[b];
  }
  return proj;
}

}  // namespace sllm
