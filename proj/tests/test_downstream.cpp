#include <gtest/gtest.h>

#include <cmath>

#include "sllm/experiment.hpp"
#include "sllm/heads.hpp"
#include "sllm/metrics.hpp"
#include "sllm/synthgen.hpp"

using namespace sllm;

namespace {

// Independent confusion-matrix oracle, organized differently from the
// implementation: builds the full C x C matrix first.
double oracle_macro_f1(const std::vector<int>& pred, const std::vector<int>& actual,
                       std::size_t C) {
  std::vector<std::vector<double>> cm(C, std::vector<double>(C, 0.0));
  for (std::size_t i = 0; i < pred.size(); ++i)
    cm[static_cast<std::size_t>(actual[i])][static_cast<std::size_t>(pred[i])] += 1.0;
  double total = 0.0;
  for (std::size_t c = 0; c < C; ++c) {
    double tp = cm[c][c], row = 0, col = 0;
    for (std::size_t k = 0; k < C; ++k) {
      row += cm[c][k];
      col += cm[k][c];
    }
    const double p = col > 0 ? tp / col : 0.0;
    const double r = row > 0 ? tp / row : 0.0;
    total += (p + r) > 0 ? 2 * p * r / (p + r) : 0.0;
  }
  return total / static_cast<double>(C);
}

// Independent Pearson oracle via the raw-sums formula.
double oracle_pearson(const Vec& x, const Vec& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  const double num = n * sxy - sx * sy;
  const double den = std::sqrt(n * sxx - sx * sx) * std::sqrt(n * syy - sy * sy);
  return den == 0.0 ? 0.0 : num / den;
}

}  // namespace

TEST(MacroF1, PerfectPredictionsScoreOne) {
  const std::vector<int> y = {0, 1, 2, 1, 0, 2};
  EXPECT_DOUBLE_EQ(macro_f1(y, y, 3), 1.0);
}

TEST(MacroF1, CollapsedPredictorHandConfusionMatrix) {
  // balanced binary, everything predicted class 0:
  // class 0: P=1/2, R=1 -> F1=2/3; class 1: F1=0 -> macro 1/3
  const std::vector<int> pred = {0, 0, 0, 0};
  const std::vector<int> actual = {0, 0, 1, 1};
  EXPECT_NEAR(macro_f1(pred, actual, 2), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(macro_f1(pred, actual, 2), 0.3333, 1e-4);
}

TEST(MacroF1, InvertedBinaryScoresZero) {
  const std::vector<int> actual = {0, 1, 0, 1};
  const std::vector<int> pred = {1, 0, 1, 0};
  EXPECT_DOUBLE_EQ(macro_f1(pred, actual, 2), 0.0);
}

TEST(MacroF1, AbsentClassContributesZero) {
  // class 2 never appears anywhere; macro over 3 classes
  const std::vector<int> y = {0, 1, 0, 1};
  EXPECT_NEAR(macro_f1(y, y, 3), 2.0 / 3.0, 1e-12);
}

TEST(MacroF1, EmptyAndOutOfRangeRejected) {
  const std::vector<int> empty;
  EXPECT_THROW(macro_f1(empty, empty, 2), Error);
  const std::vector<int> a = {0, 5}, b = {0, 1};
  EXPECT_THROW(macro_f1(a, b, 2), Error);
}

TEST(MacroF1, MatchesOracleOnRandomCasesAndIsClassSymmetric) {
  Rng rng(101);
  for (int it = 0; it < 30; ++it) {
    const std::size_t C = 2 + rng.below(4);
    const std::size_t n = 5 + rng.below(25);
    std::vector<int> pred(n), actual(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = static_cast<int>(rng.below(C));
      actual[i] = static_cast<int>(rng.below(C));
    }
    const double got = macro_f1(pred, actual, C);
    EXPECT_NEAR(got, oracle_macro_f1(pred, actual, C), 1e-12);
    EXPECT_GE(got, 0.0);
    EXPECT_LE(got, 1.0);

    // consistent relabeling permutation leaves the macro average unchanged
    std::vector<int> perm(C);
    for (std::size_t c = 0; c < C; ++c) perm[c] = static_cast<int>(c);
    rng.shuffle(perm);
    std::vector<int> pred_p(n), actual_p(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred_p[i] = perm[static_cast<std::size_t>(pred[i])];
      actual_p[i] = perm[static_cast<std::size_t>(actual[i])];
    }
    EXPECT_NEAR(macro_f1(pred_p, actual_p, C), got, 1e-12);
  }
}

TEST(Pearson, ExactAndInverted) {
  Matrix a(3, 1), b(3, 1);
  for (std::size_t i = 0; i < 3; ++i) {
    a(i, 0) = static_cast<double>(i) + 1;
    b(i, 0) = -a(i, 0);
  }
  EXPECT_NEAR(mean_pearson(a, a), 1.0, 1e-12);
  EXPECT_NEAR(mean_pearson(b, a), -1.0, 1e-12);
}

TEST(Pearson, HandComputedValue) {
  Matrix actual(3, 1), pred(3, 1);
  actual(0, 0) = 1;
  actual(1, 0) = 2;
  actual(2, 0) = 3;
  pred(0, 0) = 1;
  pred(1, 0) = 2;
  pred(2, 0) = 4;
  const double got = mean_pearson(pred, actual);
  EXPECT_NEAR(got, oracle_pearson({1, 2, 4}, {1, 2, 3}), 1e-12);
  EXPECT_NEAR(got, 0.981981, 1e-6);
}

TEST(Pearson, ZeroVarianceFlagged) {
  Matrix pred(4, 2), actual(4, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    pred(i, 0) = 1.0;  // constant prediction on label 0
    pred(i, 1) = static_cast<double>(i);
    actual(i, 0) = static_cast<double>(i);
    actual(i, 1) = static_cast<double>(i) * 2;
  }
  const PearsonResult r = mean_pearson_detailed(pred, actual);
  EXPECT_TRUE(r.degenerate[0]);
  EXPECT_FALSE(r.degenerate[1]);
  EXPECT_DOUBLE_EQ(r.per_label[0], 0.0);
  EXPECT_NEAR(r.per_label[1], 1.0, 1e-12);
  EXPECT_NEAR(r.mean, 0.5, 1e-12);
}

TEST(Pearson, AffineInvarianceProperty) {
  Rng rng(103);
  for (int it = 0; it < 20; ++it) {
    const std::size_t n = 5 + rng.below(20);
    Matrix pred(n, 2), actual(n, 2);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < 2; ++l) {
        pred(i, l) = rng.normal();
        actual(i, l) = rng.normal();
      }
    const double base = mean_pearson(pred, actual);
    const double a = 0.1 + rng.uniform() * 5, b = rng.normal(0, 3);
    Matrix scaled = pred;
    for (std::size_t i = 0; i < scaled.size(); ++i) scaled.data()[i] = a * pred.data()[i] + b;
    EXPECT_NEAR(mean_pearson(scaled, actual), base, 1e-9);
  }
}

TEST(Pearson, TooFewRowsRejected) {
  Matrix a(2, 1), b(2, 1);
  EXPECT_THROW(mean_pearson(a, b), Error);
}

TEST(Predict, ArgmaxAndTieRule) {
  HeadModel head;
  head.task = LabelKind::kClassification;
  head.n_outputs = 2;
  DenseLayer out(2, 2, Activation::kIdentity);
  out.weight = Matrix::identity(2);
  head.layers.push_back(out);
  EXPECT_EQ(predict_class(head, Vec{0.2, 0.9}), 1);
  EXPECT_EQ(predict_class(head, Vec{0.5, 0.5}), 0);  // exact tie -> lowest index
  EXPECT_EQ(predict_class(head, Vec{0.9, 0.2}), 0);
}

TEST(Predict, RegressionPassthroughNoClipping) {
  HeadModel head;
  head.task = LabelKind::kRegression;
  head.n_outputs = 2;
  DenseLayer out(2, 2, Activation::kIdentity);
  out.weight = Matrix::identity(2);
  out.weight(0, 0) = 3.0;
  head.layers.push_back(out);
  const Vec v = predict_values(head, Vec{-10.0, 42.0});
  EXPECT_DOUBLE_EQ(v[0], -30.0);
  EXPECT_DOUBLE_EQ(v[1], 42.0);
}

namespace {

struct ToyTask {
  Matrix inputs;
  HeadTargets targets;
  std::vector<std::size_t> train, val;
};

// linearly separable two-class points in 2-D
ToyTask separable_task(std::size_t n, std::uint64_t seed) {
  ToyTask t;
  t.inputs = Matrix(n, 2);
  t.targets.task = LabelKind::kClassification;
  t.targets.n_outputs = 2;
  t.targets.class_of_row.assign(n, -1);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const int cls = static_cast<int>(i % 2);
    t.inputs(i, 0) = rng.normal(cls == 0 ? -2.0 : 2.0, 0.3);
    t.inputs(i, 1) = rng.normal(0, 1);
    t.targets.class_of_row[i] = cls;
    (i % 8 < 6 ? t.train : t.val).push_back(i);  // val keeps both classes
  }
  return t;
}

}  // namespace

TEST(TrainHead, SeparableDataReachesPerfectValidationF1) {
  const ToyTask t = separable_task(80, 107);
  HeadConfig cfg;
  cfg.hidden = {};
  cfg.epochs = 200;
  cfg.lr = 0.05;
  cfg.patience = 50;
  cfg.seed = 1;
  const HeadModel head = train_head(t.inputs, t.targets, t.train, t.val, cfg);
  EXPECT_DOUBLE_EQ(head_val_metric(head, t.inputs, t.targets, t.val), 1.0);
}

TEST(TrainHead, LinearRegressionRecoversExactTargets) {
  Rng rng(109);
  const std::size_t n = 60;
  Matrix inputs(n, 3);
  HeadTargets targets;
  targets.task = LabelKind::kRegression;
  targets.n_outputs = 1;
  targets.class_of_row.assign(n, 0);
  targets.values_of_row = Matrix(n, 1);
  std::vector<std::size_t> train, val;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 3; ++j) inputs(i, j) = rng.normal();
    targets.values_of_row(i, 0) = 2.0 * inputs(i, 0) - inputs(i, 1) + 0.5 * inputs(i, 2) + 1.0;
    (i % 4 < 3 ? train : val).push_back(i);
  }
  HeadConfig cfg;
  cfg.hidden = {};
  cfg.epochs = 2000;
  cfg.lr = 0.05;
  cfg.patience = 400;
  cfg.seed = 2;
  const HeadModel head = train_head(inputs, targets, train, val, cfg);
  EXPECT_GT(head_val_metric(head, inputs, targets, val), 0.999);
}

TEST(TrainHead, DeterministicPerSeed) {
  const ToyTask t = separable_task(40, 113);
  HeadConfig cfg;
  cfg.hidden = {8};
  cfg.epochs = 30;
  cfg.lr = 0.02;
  cfg.seed = 3;
  const HeadModel a = train_head(t.inputs, t.targets, t.train, t.val, cfg);
  const HeadModel b = train_head(t.inputs, t.targets, t.train, t.val, cfg);
  ASSERT_EQ(a.layers.size(), b.layers.size());
  for (std::size_t l = 0; l < a.layers.size(); ++l)
    for (std::size_t i = 0; i < a.layers[l].weight.size(); ++i)
      EXPECT_EQ(a.layers[l].weight.data()[i], b.layers[l].weight.data()[i]);
}

TEST(TrainHead, SingleClassTrainingRejected) {
  ToyTask t = separable_task(20, 127);
  for (auto& c : t.targets.class_of_row) c = 0;
  HeadConfig cfg;
  EXPECT_THROW(train_head(t.inputs, t.targets, t.train, t.val, cfg), Error);
}

TEST(TrainHead, TestLabelsNeverInfluenceTraining) {
  // corrupting labels outside train/val leaves the trained head bit-identical
  ToyTask t = separable_task(60, 131);
  std::vector<std::size_t> test_ids;
  for (std::size_t i = 0; i < 60; ++i)
    if (std::find(t.train.begin(), t.train.end(), i) == t.train.end() &&
        std::find(t.val.begin(), t.val.end(), i) == t.val.end())
      test_ids.push_back(i);
  // carve a test set out of val to make the check meaningful
  while (t.val.size() > 5) {
    test_ids.push_back(t.val.back());
    t.val.pop_back();
  }
  ASSERT_FALSE(test_ids.empty());

  HeadConfig cfg;
  cfg.hidden = {4};
  cfg.epochs = 40;
  cfg.seed = 4;
  const HeadModel clean = train_head(t.inputs, t.targets, t.train, t.val, cfg);
  HeadTargets corrupted = t.targets;
  for (std::size_t id : test_ids)
    corrupted.class_of_row[id] = 1 - corrupted.class_of_row[id];
  const HeadModel dirty = train_head(t.inputs, corrupted, t.train, t.val, cfg);
  for (std::size_t l = 0; l < clean.layers.size(); ++l)
    for (std::size_t i = 0; i < clean.layers[l].weight.size(); ++i)
      EXPECT_EQ(clean.layers[l].weight.data()[i], dirty.layers[l].weight.data()[i]);
}

namespace {

SocialDataset experiment_dataset(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.n_users = 90;
  cfg.n_blocks = 2;
  cfg.p_in = 0.10;
  cfg.p_out = 0.01;
  cfg.content_dim = 6;
  cfg.content_noise_sd = 0.8;
  cfg.edge_types = {{"retweet", {}, {}}, {"mention", 0.06, 0.006}};
  cfg.seed = seed;
  return generate_sbm_dataset(cfg);
}

TrainConfig fast_train_config() {
  TrainConfig t;
  t.batch_size = 16;
  t.epochs = 2;
  t.patience = 2;
  t.val_edge_fraction = 0.1;
  return t;
}

HeadConfig fast_head_config() {
  HeadConfig h;
  h.hidden = {};
  h.epochs = 60;
  h.lr = 0.05;
  h.patience = 20;
  return h;
}

}  // namespace

TEST(RunExperiment, TenSeedsAggregateConsistently) {
  const SocialDataset ds = experiment_dataset(211);
  RepresentationConfig rep;
  rep.d = 6;
  ExperimentConfig exp;  // default ten seeds
  VariantSpec variant;
  variant.inputs = {true, true, false, false};
  const MetricsReport report =
      run_experiment(ds, rep, fast_train_config(), fast_head_config(), exp, variant);
  ASSERT_EQ(report.per_seed.size(), 10u);
  double mean = 0;
  for (double v : report.per_seed) mean += v;
  mean /= 10.0;
  EXPECT_NEAR(report.mean, mean, 1e-12);
  double ss = 0;
  for (double v : report.per_seed) ss += (v - mean) * (v - mean);
  EXPECT_NEAR(report.sd, std::sqrt(ss / 9.0), 1e-12);
  EXPECT_EQ(report.metric_name, "macro_f1");
  for (double v : report.per_seed) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(RunExperiment, ContentOnlyCompositionSkipsStepOne) {
  const SocialDataset ds = experiment_dataset(223);
  RepresentationConfig rep;
  rep.d = 6;
  ExperimentConfig exp;
  exp.seeds = {1, 2};
  VariantSpec variant;
  variant.inputs = {false, true, false, false};  // content only
  const MetricsReport report =
      run_experiment(ds, rep, fast_train_config(), fast_head_config(), exp, variant);
  EXPECT_EQ(report.per_seed.size(), 2u);
}

TEST(RunExperiment, ParallelSeedsMatchSerial) {
  const SocialDataset ds = experiment_dataset(227);
  RepresentationConfig rep;
  rep.d = 6;
  ExperimentConfig serial;
  serial.seeds = {1, 2, 3, 4};
  serial.jobs = 1;
  ExperimentConfig parallel = serial;
  parallel.jobs = 2;
  VariantSpec variant;
  variant.inputs = {true, false, false, false};
  const MetricsReport a =
      run_experiment(ds, rep, fast_train_config(), fast_head_config(), serial, variant);
  const MetricsReport b =
      run_experiment(ds, rep, fast_train_config(), fast_head_config(), parallel, variant);
  ASSERT_EQ(a.per_seed.size(), b.per_seed.size());
  for (std::size_t i = 0; i < a.per_seed.size(); ++i) EXPECT_EQ(a.per_seed[i], b.per_seed[i]);
}

TEST(AblationGrid, EdgeTypeGridEmitsFourLabeledRows) {
  const SocialDataset ds = experiment_dataset(229);
  RepresentationConfig rep;
  rep.d = 6;
  ExperimentConfig exp;
  exp.seeds = {1, 2};
  std::vector<VariantSpec> grid(4);
  grid[0].edge_type_mode = EdgeTypeMode::kSingle;
  grid[0].single_type = "retweet";
  grid[1].edge_type_mode = EdgeTypeMode::kSingle;
  grid[1].single_type = "mention";
  grid[2].edge_type_mode = EdgeTypeMode::kDistinct;
  grid[3].edge_type_mode = EdgeTypeMode::kMerged;
  for (auto& v : grid) v.inputs = {true, true, false, false};

  const auto cells = run_ablation_grid(ds, rep, fast_train_config(), fast_head_config(), exp, grid);
  ASSERT_EQ(cells.size(), 4u);
  EXPECT_EQ(cells[0].label, "retweet");
  EXPECT_EQ(cells[1].label, "mention");
  EXPECT_EQ(cells[2].label, "distinct");
  EXPECT_EQ(cells[3].label, "merged");
  const std::string csv = metrics_table_csv(cells);
  EXPECT_NE(csv.find("variant,seed,metric,value"), std::string::npos);
  EXPECT_NE(csv.find("merged,mean,macro_f1,"), std::string::npos);
}

TEST(AblationGrid, DirectionWeightGridUsesPaperNaming) {
  std::vector<VariantSpec> grid(4);
  grid[1].directed = true;
  grid[2].weighted = true;
  grid[3].directed = true;
  grid[3].weighted = true;
  for (auto& v : grid) v.inputs = {true, false, false, false};
  // label derivation only; no runs needed
  EXPECT_EQ(variant_label(grid[0], false, true, false, false), "base");
  EXPECT_EQ(variant_label(grid[1], false, true, false, false), "+d");
  EXPECT_EQ(variant_label(grid[2], false, true, false, false), "+w");
  EXPECT_EQ(variant_label(grid[3], false, true, false, false), "+d+w");
}

TEST(PairedTTest, KnownCases) {
  // constant positive differences: sd = 0 -> p = 0
  const Vec a = {1.0, 1.0, 1.0};
  const Vec b = {0.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(paired_t_test_p(a, b), 0.0);
  // frozen oracle: diffs {1,2,3,4,5}, t = 4.24264; one-sided p from
  // scipy.stats.ttest_rel(..., alternative='greater') = 0.00661779978
  const Vec x = {2, 4, 6, 8, 10};
  const Vec y = {1, 2, 3, 4, 5};
  EXPECT_NEAR(paired_t_test_p(x, y), 0.0066177997818, 1e-9);
  // symmetric case: p near 0.5
  const Vec u = {1.0, 2.0, 3.0, 4.0};
  const Vec v = {2.0, 1.0, 4.0, 3.0};
  EXPECT_NEAR(paired_t_test_p(u, v), 0.5, 0.35);
}
