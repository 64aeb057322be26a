#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <tuple>

#include "sllm/synthgen.hpp"
#include "test_util.hpp"

using namespace sllm;

TEST(SynthSbm, ZeroNoiseZeroCrossOnlyConnectsSameLabels) {
  SynthConfig cfg;
  cfg.n_users = 100;
  cfg.n_blocks = 2;
  cfg.p_in = 0.1;
  cfg.p_out = 0.0;
  cfg.content_dim = 4;
  cfg.content_noise_sd = 0.0;
  cfg.seed = 5;
  const SocialDataset ds = generate_sbm_dataset(cfg);
  ASSERT_GT(ds.edges.size(), 0u);
  for (const auto& e : ds.edges)
    EXPECT_EQ(ds.users[e.src].label->class_index, ds.users[e.dst].label->class_index);
  // noiseless content sits exactly on the one-hot centroid
  for (const auto& u : ds.users) {
    const auto cls = static_cast<std::size_t>(u.label->class_index);
    EXPECT_DOUBLE_EQ(u.content_vec[cls], 1.0);
  }
}

TEST(SynthSbm, WithinBlockEdgeCountMatchesExpectation) {
  SynthConfig cfg;
  cfg.n_users = 1000;
  cfg.n_blocks = 2;
  cfg.p_in = 0.01;
  cfg.p_out = 0.001;
  cfg.content_dim = 4;
  cfg.seed = 11;
  const SocialDataset ds = generate_sbm_dataset(cfg);
  std::size_t within = 0;
  for (const auto& e : ds.edges)
    if (ds.users[e.src].label->class_index == ds.users[e.dst].label->class_index) ++within;
  // 2 blocks of 500: 2 * 500*499 ordered pairs at p=0.01, 4-sd binomial band
  const double n_pairs = 2.0 * 500.0 * 499.0;
  const double expect = n_pairs * 0.01;
  const double sd = std::sqrt(n_pairs * 0.01 * 0.99);
  EXPECT_NEAR(static_cast<double>(within), expect, 4.0 * sd);
}

TEST(SynthSbm, DeterministicPerSeed) {
  SynthConfig cfg;
  cfg.n_users = 200;
  cfg.p_in = 0.05;
  cfg.p_out = 0.005;
  cfg.seed = 17;
  const SocialDataset a = generate_sbm_dataset(cfg);
  const SocialDataset b = generate_sbm_dataset(cfg);
  ASSERT_EQ(a.edges.size(), b.edges.size());
  for (std::size_t i = 0; i < a.edges.size(); ++i) {
    EXPECT_EQ(a.edges[i].src, b.edges[i].src);
    EXPECT_EQ(a.edges[i].dst, b.edges[i].dst);
    EXPECT_EQ(a.edges[i].weight, b.edges[i].weight);
  }
  for (std::size_t i = 0; i < a.users.size(); ++i)
    EXPECT_EQ(a.users[i].content_vec, b.users[i].content_vec);
}

TEST(SynthSbm, HomophilyInvariant) {
  SynthConfig cfg;
  cfg.n_users = 600;
  cfg.n_blocks = 3;
  cfg.p_in = 0.02;
  cfg.p_out = 0.004;
  cfg.content_dim = 4;
  cfg.seed = 23;
  const SocialDataset ds = generate_sbm_dataset(cfg);
  std::size_t same = 0;
  for (const auto& e : ds.edges)
    if (ds.users[e.src].label->class_index == ds.users[e.dst].label->class_index) ++same;
  const double frac = static_cast<double>(same) / static_cast<double>(ds.edges.size());
  // random pairing matches labels 1/3 of the time; homophily must beat it by 4 sd
  const double base = 1.0 / 3.0;
  const double sd = std::sqrt(base * (1 - base) / static_cast<double>(ds.edges.size()));
  EXPECT_GT(frac, base + 4.0 * sd);
}

TEST(SynthSbm, NearestCentroidAccuracyMonotoneInNoise) {
  const double noise_levels[3] = {0.2, 0.8, 2.0};
  double acc[3];
  for (int k = 0; k < 3; ++k) {
    SynthConfig cfg;
    cfg.n_users = 900;
    cfg.n_blocks = 3;
    cfg.p_in = 0.01;
    cfg.p_out = 0.001;
    cfg.content_dim = 6;
    cfg.content_noise_sd = noise_levels[k];
    cfg.seed = 31;
    const SocialDataset ds = generate_sbm_dataset(cfg);
    std::size_t correct = 0;
    for (const auto& u : ds.users) {
      // nearest one-hot centroid == largest coordinate among the first n_blocks
      std::size_t best = 0;
      for (std::size_t c = 1; c < cfg.n_blocks; ++c)
        if (u.content_vec[c] > u.content_vec[best]) best = c;
      if (static_cast<int>(best) == u.label->class_index) ++correct;
    }
    acc[k] = static_cast<double>(correct) / static_cast<double>(ds.users.size());
  }
  EXPECT_GT(acc[0], acc[1]);
  EXPECT_GT(acc[1], acc[2]);
}

TEST(SynthSbm, GeometricWeightsAreIntegersAtLeastOne) {
  SynthConfig cfg;
  cfg.n_users = 120;
  cfg.p_in = 0.05;
  cfg.p_out = 0.005;
  cfg.weight_law.kind = WeightLaw::Kind::kGeometric;
  cfg.weight_law.p = 0.4;
  cfg.seed = 37;
  const SocialDataset ds = generate_sbm_dataset(cfg);
  bool any_above_one = false;
  for (const auto& e : ds.edges) {
    EXPECT_GE(e.weight, 1.0);
    EXPECT_DOUBLE_EQ(e.weight, std::floor(e.weight));
    any_above_one = any_above_one || e.weight > 1.0;
  }
  EXPECT_TRUE(any_above_one);
}

TEST(SynthSbm, RejectsNonHomophilousConfig) {
  SynthConfig cfg;
  cfg.p_in = 0.01;
  cfg.p_out = 0.02;
  EXPECT_THROW(generate_sbm_dataset(cfg), ConfigError);
}

TEST(SynthSbm, PerTypeOverrides) {
  SynthConfig cfg;
  cfg.n_users = 300;
  cfg.p_in = 0.02;
  cfg.p_out = 0.002;
  cfg.edge_types = {{"retweet", {}, {}}, {"mention", 0.05, 0.005}};
  cfg.seed = 41;
  const SocialDataset ds = generate_sbm_dataset(cfg);
  EXPECT_EQ(ds.edge_types.size(), 2u);
  std::size_t rt = 0, mn = 0;
  const int rt_id = ds.edge_types.id_of("retweet");
  for (const auto& e : ds.edges) (static_cast<int>(e.edge_type) == rt_id ? rt : mn) += 1;
  EXPECT_GT(mn, rt);  // mention probabilities are higher
}

TEST(SynthDirection, FullSignalOrientsAllCrossEdgesForward) {
  SynthConfig cfg;
  cfg.n_users = 300;
  cfg.n_blocks = 2;
  cfg.p_in = 0.02;
  cfg.p_out = 0.01;
  cfg.direction_signal = 1.0;
  cfg.seed = 43;
  const SocialDataset ds = generate_direction_signal_dataset(cfg);
  std::size_t cross = 0;
  for (const auto& e : ds.edges) {
    const int bs = ds.users[e.src].label->class_index;
    const int bd = ds.users[e.dst].label->class_index;
    if (bs != bd) {
      ++cross;
      EXPECT_EQ(bs, 0);
      EXPECT_EQ(bd, 1);
    }
  }
  EXPECT_GT(cross, 0u);
}

TEST(SynthDirection, ZeroSignalIsUniform) {
  SynthConfig cfg;
  cfg.n_users = 1000;
  cfg.n_blocks = 2;
  cfg.p_in = 0.02;
  cfg.p_out = 0.012;
  cfg.direction_signal = 0.0;
  cfg.seed = 47;
  const SocialDataset ds = generate_direction_signal_dataset(cfg);
  std::size_t cross = 0, forward = 0;
  for (const auto& e : ds.edges) {
    const int bs = ds.users[e.src].label->class_index;
    const int bd = ds.users[e.dst].label->class_index;
    if (bs != bd) {
      ++cross;
      if (bs == 0) ++forward;
    }
  }
  ASSERT_GT(cross, 100u);
  const double frac = static_cast<double>(forward) / static_cast<double>(cross);
  const double sd = std::sqrt(0.25 / static_cast<double>(cross));
  EXPECT_NEAR(frac, 0.5, 4.0 * sd);
}

TEST(SynthDirection, GeneratedDatasetValidatesThroughFileRoundTrip) {
  SynthConfig cfg;
  cfg.n_users = 80;
  cfg.n_blocks = 2;
  cfg.p_in = 0.05;
  cfg.p_out = 0.02;
  cfg.direction_signal = 0.8;
  cfg.seed = 53;
  const SocialDataset ds = generate_direction_signal_dataset(cfg);
  testutil::TempDir dir("synth_roundtrip");
  save_dataset(ds, dir.file("edges.tsv"), dir.file("features.csv"), dir.file("labels.tsv"));
  const SocialDataset ds2 =
      load_dataset(dir.file("edges.tsv"), dir.file("features.csv"), dir.file("labels.tsv"));
  EXPECT_EQ(ds2.users.size(), ds.users.size());
  EXPECT_EQ(ds2.edges.size(), ds.edges.size());
}

TEST(SynthDirection, AtMostOneEdgePerPairPerType) {
  SynthConfig cfg;
  cfg.n_users = 150;
  cfg.n_blocks = 2;
  cfg.p_in = 0.2;
  cfg.p_out = 0.1;
  cfg.direction_signal = 0.5;
  cfg.seed = 59;
  const SocialDataset ds = generate_direction_signal_dataset(cfg);
  std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> seen;
  for (const auto& e : ds.edges) {
    const auto lo = std::min(e.src, e.dst);
    const auto hi = std::max(e.src, e.dst);
    EXPECT_TRUE(seen.emplace(lo, hi, e.edge_type).second);
  }
}
