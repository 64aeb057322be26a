#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sllm/errors.hpp"
#include "sllm/matrix.hpp"

namespace sllm {

struct MacroF1Result {
  double macro_f1 = 0.0;
  Vec per_class_f1;
};

// Unweighted mean of per-class F1. A class with no true or predicted
// occurrences contributes F1 = 0, which penalizes collapsed predictors.
inline MacroF1Result macro_f1_detailed(std::span<const int> predicted, std::span<const int> actual,
                                       std::size_t n_classes) {
  if (predicted.empty()) throw Error("macro_f1: empty input");
  if (predicted.size() != actual.size())
    throw ShapeError("macro_f1: " + std::to_string(predicted.size()) + " predictions vs " +
                     std::to_string(actual.size()) + " actuals");
  if (n_classes < 2) throw Error("macro_f1: need at least 2 classes");
  std::vector<std::size_t> tp(n_classes, 0), fp(n_classes, 0), fn(n_classes, 0);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const int p = predicted[i], a = actual[i];
    if (p < 0 || a < 0 || p >= static_cast<int>(n_classes) || a >= static_cast<int>(n_classes))
      throw Error("macro_f1: label outside [0, " + std::to_string(n_classes) + ") at row " +
                  std::to_string(i));
    if (p == a) {
      tp[static_cast<std::size_t>(p)] += 1;
    } else {
      fp[static_cast<std::size_t>(p)] += 1;
      fn[static_cast<std::size_t>(a)] += 1;
    }
  }
  MacroF1Result res;
  res.per_class_f1.resize(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    const double precision =
        tp[c] + fp[c] == 0 ? 0.0 : static_cast<double>(tp[c]) / static_cast<double>(tp[c] + fp[c]);
    const double recall =
        tp[c] + fn[c] == 0 ? 0.0 : static_cast<double>(tp[c]) / static_cast<double>(tp[c] + fn[c]);
    res.per_class_f1[c] =
        precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
    res.macro_f1 += res.per_class_f1[c];
  }
  res.macro_f1 /= static_cast<double>(n_classes);
  return res;
}

inline double macro_f1(std::span<const int> predicted, std::span<const int> actual,
                       std::size_t n_classes) {
  return macro_f1_detailed(predicted, actual, n_classes).macro_f1;
}

struct PearsonResult {
  double mean = 0.0;
  Vec per_label;
  std::vector<bool> degenerate;  // zero variance on either side
};

// Per-label Pearson correlation averaged across labels. A zero-variance
// label on either side contributes 0 and is flagged.
inline PearsonResult mean_pearson_detailed(const Matrix& predicted, const Matrix& actual) {
  if (predicted.rows() != actual.rows() || predicted.cols() != actual.cols())
    throw ShapeError("mean_pearson: shape " + std::to_string(predicted.rows()) + "x" +
                     std::to_string(predicted.cols()) + " vs " + std::to_string(actual.rows()) +
                     "x" + std::to_string(actual.cols()));
  const std::size_t n = predicted.rows();
  const std::size_t L = predicted.cols();
  if (n < 3) throw Error("mean_pearson: need at least 3 rows, have " + std::to_string(n));
  if (L == 0) throw Error("mean_pearson: no labels");

  PearsonResult res;
  res.per_label.resize(L, 0.0);
  res.degenerate.resize(L, false);
  for (std::size_t l = 0; l < L; ++l) {
    double mp = 0, ma = 0;
    for (std::size_t i = 0; i < n; ++i) {
      mp += predicted(i, l);
      ma += actual(i, l);
    }
    mp /= static_cast<double>(n);
    ma /= static_cast<double>(n);
    double spp = 0, saa = 0, spa = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dp = predicted(i, l) - mp;
      const double da = actual(i, l) - ma;
      spp += dp * dp;
      saa += da * da;
      spa += dp * da;
    }
    if (spp == 0.0 || saa == 0.0) {
      res.degenerate[l] = true;
      res.per_label[l] = 0.0;
    } else {
      double r = spa / std::sqrt(spp * saa);
      if (r > 1.0) r = 1.0;
      if (r < -1.0) r = -1.0;
      res.per_label[l] = r;
    }
    res.mean += res.per_label[l];
  }
  res.mean /= static_cast<double>(L);
  return res;
}

inline double mean_pearson(const Matrix& predicted, const Matrix& actual) {
  return mean_pearson_detailed(predicted, actual).mean;
}

// Per-seed metric values with their aggregate.
struct MetricsReport {
  std::string metric_name;
  std::vector<std::uint64_t> seeds;
  Vec per_seed;
  std::vector<Vec> per_seed_breakdown;  // per-class F1 or per-label Pearson
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation

  void aggregate() {
    mean = 0.0;
    sd = 0.0;
    if (per_seed.empty()) return;
    for (double v : per_seed) mean += v;
    mean /= static_cast<double>(per_seed.size());
    if (per_seed.size() < 2) return;
    double ss = 0.0;
    for (double v : per_seed) ss += (v - mean) * (v - mean);
    sd = std::sqrt(ss / static_cast<double>(per_seed.size() - 1));
  }
};

// Student-t tail via the regularized incomplete beta function.
namespace detail {

inline double betacf(double a, double b, double x) {
  const int max_iter = 200;
  const double eps = 3e-14, fpmin = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

inline double reg_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double front = std::exp(a * std::log(x) + b * std::log(1.0 - x) - ln_beta);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace detail

// P(T_nu > t) for Student's t.
inline double t_tail_prob(double t, double nu) {
  const double x = nu / (nu + t * t);
  const double half = 0.5 * detail::reg_incomplete_beta(nu / 2.0, 0.5, x);
  return t >= 0.0 ? half : 1.0 - half;
}

// One-sided paired t-test of mean(a) > mean(b).
inline double paired_t_test_p(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2)
    throw Error("paired_t_test: need equal-length samples of size >= 2");
  const std::size_t n = a.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i] - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0) return mean > 0.0 ? 0.0 : 1.0;
  const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
  return t_tail_prob(t, static_cast<double>(n - 1));
}

}  // namespace sllm
