#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>

#include "sllm/matrix.hpp"

namespace sllm {

// Cosine of the angle between a and b. A zero-norm operand yields 0 and sets
// the degenerate flag instead of dividing by zero; users with empty content
// must not crash training.
inline double cosine_similarity(std::span<const double> a, std::span<const double> b,
                                bool* degenerate = nullptr) {
  if (a.size() != b.size())
    throw ShapeError("cosine_similarity: lengths differ, " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  const double na = norm2(a);
  const double nb = norm2(b);
  if (degenerate) *degenerate = false;
  if (na == 0.0 || nb == 0.0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  double c = dot(a, b) / (na * nb);
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return c;
}

struct MnrlResult {
  double loss = 0.0;
  Matrix score_gradients;  // dL/dS, same shape as the score matrix
};

constexpr double kMaskedScore = -std::numeric_limits<double>::infinity();

// Multiple negatives ranking loss over a BxB score matrix: row m is scored
// against every column, with column m as the positive target. Entries equal
// to kMaskedScore are excluded (false negatives). The loss is the weighted
// mean over rows of softmax cross-entropy; weighting is invariant to a
// positive rescaling of the weight vector.
inline MnrlResult mnrl_loss(const Matrix& scores,
                            std::span<const double> example_weights = {}) {
  const std::size_t n = scores.rows();
  if (n != scores.cols())
    throw ShapeError("mnrl_loss: score matrix must be square, got " + std::to_string(n) + "x" +
                     std::to_string(scores.cols()));
  if (n < 2) throw Error("mnrl_loss: batch of " + std::to_string(n) + " has no in-batch negatives");
  if (!example_weights.empty() && example_weights.size() != n)
    throw ShapeError("mnrl_loss: weights length " + std::to_string(example_weights.size()) +
                     " does not match batch size " + std::to_string(n));

  // Equal weights are mathematically a no-op; dropping them keeps the result
  // bit-identical to the unweighted path instead of off by rounding.
  if (!example_weights.empty()) {
    bool all_equal = true;
    for (double w : example_weights) all_equal = all_equal && w == example_weights[0];
    if (all_equal) example_weights = {};
  }

  double weight_sum = 0.0;
  for (std::size_t m = 0; m < n; ++m)
    weight_sum += example_weights.empty() ? 1.0 : example_weights[m];
  if (weight_sum <= 0.0) throw Error("mnrl_loss: example weights must have positive sum");

  MnrlResult res;
  res.score_gradients = Matrix(n, n);
  for (std::size_t m = 0; m < n; ++m) {
    const auto row = scores.row(m);
    // The diagonal is never masked, so the row max is finite.
    double mx = row[m];
    for (std::size_t j = 0; j < n; ++j)
      if (row[j] > mx) mx = row[j];
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      z += (row[j] == kMaskedScore) ? 0.0 : std::exp(row[j] - mx);
    const double log_z = std::log(z);
    const double w = (example_weights.empty() ? 1.0 : example_weights[m]) / weight_sum;
    res.loss += w * (log_z - (row[m] - mx));
    auto g = res.score_gradients.row(m);
    for (std::size_t j = 0; j < n; ++j) {
      const double p = (row[j] == kMaskedScore) ? 0.0 : std::exp(row[j] - mx) / z;
      g[j] = w * (p - (j == m ? 1.0 : 0.0));
    }
  }
  return res;
}

}  // namespace sllm
