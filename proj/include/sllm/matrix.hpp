#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sllm/errors.hpp"

namespace sllm {

using Vec = std::vector<double>;

// Dense row-major matrix of 64-bit floats.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  void fill(double v) { data_.assign(data_.size(), v); }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  Vec data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  // Four accumulators; plain reduction chains stall on FP add latency.
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  const std::size_t n4 = a.size() & ~std::size_t{3};
  for (; i < n4; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < a.size(); ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// y = M x
inline void matvec(const Matrix& m, std::span<const double> x, std::span<double> y) {
  if (x.size() != m.cols() || y.size() != m.rows())
    throw ShapeError("matvec: matrix is " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + ", input length " + std::to_string(x.size()));
  for (std::size_t i = 0; i < m.rows(); ++i) y[i] = dot(m.row(i), x);
}

// y += M^T x  (accumulating; used on the backward path)
inline void matvec_transposed_add(const Matrix& m, std::span<const double> x, std::span<double> y) {
  if (x.size() != m.rows() || y.size() != m.cols())
    throw ShapeError("matvec_transposed_add: matrix is " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + ", input length " + std::to_string(x.size()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    auto r = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) y[j] += xi * r[j];
  }
}

// G += x y^T
inline void outer_add(Matrix& g, std::span<const double> x, std::span<const double> y) {
  if (x.size() != g.rows() || y.size() != g.cols())
    throw ShapeError("outer_add: matrix is " + std::to_string(g.rows()) + "x" +
                     std::to_string(g.cols()) + ", operands " + std::to_string(x.size()) + "," +
                     std::to_string(y.size()));
  for (std::size_t i = 0; i < g.rows(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    auto r = g.row(i);
    for (std::size_t j = 0; j < g.cols(); ++j) r[j] += xi * y[j];
  }
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

}  // namespace sllm
