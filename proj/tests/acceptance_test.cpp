// Acceptance suite: one test per criterion, each printing a CRITERION
// pass/fail line.

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstdio>

#include "sllm/sllm.hpp"
#include "sllm/config.hpp"
#include "sllm/model_gradcheck.hpp"
#include "test_util.hpp"

using namespace sllm;

namespace {

void criterion_line(int id, bool pass, const std::string& detail) {
  std::printf("[CRITERION %02d] %s %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TEST(Acceptance, C01_GradientCorrectness) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto battery = run_model_gradcheck_battery(10, 1e-4, 20240501);
  const double elapsed = seconds_since(t0);
  bool pass = elapsed < 60.0;
  double worst = 0.0;
  for (const auto& c : battery) {
    pass = pass && c.report.pass;
    worst = std::max(worst, c.report.max_rel_error);
  }
  criterion_line(1, pass,
                 "10 configurations, max rel err " + fmt_g17(worst) + ", " +
                     std::to_string(elapsed) + " s");
  for (const auto& c : battery) EXPECT_TRUE(c.report.pass) << c.description;
  EXPECT_LT(elapsed, 60.0);
}

TEST(Acceptance, C02_LossIdentities) {
  bool pass = true;
  for (std::size_t B : {2, 4, 16, 64}) {
    const Matrix scores(B, B, 0.37);
    const double loss = mnrl_loss(scores).loss;
    const double err = std::fabs(loss - std::log(static_cast<double>(B)));
    pass = pass && err <= 1e-9;
    EXPECT_NEAR(loss, std::log(static_cast<double>(B)), 1e-9);
  }
  // equal weights match unweighted bit for bit, at the op and the batch level
  Rng rng(42);
  Matrix scores(8, 8);
  for (std::size_t i = 0; i < scores.size(); ++i) scores.data()[i] = rng.normal();
  const Vec w(8, 2.25);
  const MnrlResult a = mnrl_loss(scores, w);
  const MnrlResult b = mnrl_loss(scores);
  pass = pass && a.loss == b.loss;
  EXPECT_EQ(a.loss, b.loss);
  for (std::size_t i = 0; i < a.score_gradients.size(); ++i) {
    pass = pass && a.score_gradients.data()[i] == b.score_gradients.data()[i];
    EXPECT_EQ(a.score_gradients.data()[i], b.score_gradients.data()[i]);
  }
  criterion_line(2, pass, "ln(B) within 1e-9 for B in {2,4,16,64}; equal weights bit-identical");
}

TEST(Acceptance, C09_MetricCorrectness) {
  // independent oracles: full confusion matrix for Macro-F1, raw-sums formula
  // for Pearson
  Rng rng(909);
  bool pass = true;
  for (int it = 0; it < 20; ++it) {
    const std::size_t C = 2 + rng.below(4);
    const std::size_t n = 4 + rng.below(27);
    std::vector<int> pred(n), actual(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = static_cast<int>(rng.below(C));
      actual[i] = static_cast<int>(rng.below(C));
    }
    std::vector<std::vector<double>> cm(C, std::vector<double>(C, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      cm[static_cast<std::size_t>(actual[i])][static_cast<std::size_t>(pred[i])] += 1.0;
    double oracle = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
      double tp = cm[c][c], row = 0, col = 0;
      for (std::size_t k = 0; k < C; ++k) {
        row += cm[c][k];
        col += cm[k][c];
      }
      const double p = col > 0 ? tp / col : 0.0;
      const double r = row > 0 ? tp / row : 0.0;
      oracle += (p + r) > 0 ? 2 * p * r / (p + r) : 0.0;
    }
    oracle /= static_cast<double>(C);
    const double got = macro_f1(pred, actual, C);
    pass = pass && std::fabs(got - oracle) <= 1e-9;
    EXPECT_NEAR(got, oracle, 1e-9);

    const std::size_t rows = 3 + rng.below(27);
    const std::size_t L = 1 + rng.below(3);
    Matrix mp(rows, L), ma(rows, L);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t l = 0; l < L; ++l) {
        mp(i, l) = rng.normal();
        ma(i, l) = rng.normal();
      }
    double oracle_mean = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
      for (std::size_t i = 0; i < rows; ++i) {
        const double x = mp(i, l), y = ma(i, l);
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
      }
      const double nn = static_cast<double>(rows);
      const double den = std::sqrt(nn * sxx - sx * sx) * std::sqrt(nn * syy - sy * sy);
      oracle_mean += den == 0 ? 0.0 : (nn * sxy - sx * sy) / den;
    }
    oracle_mean /= static_cast<double>(L);
    const double got_p = mean_pearson(mp, ma);
    pass = pass && std::fabs(got_p - oracle_mean) <= 1e-9;
    EXPECT_NEAR(got_p, oracle_mean, 1e-9);
  }
  criterion_line(9, pass, "20 randomized cases against confusion-matrix and raw-sums oracles");
}
