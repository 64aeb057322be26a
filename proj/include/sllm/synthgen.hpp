#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sllm/dataset.hpp"
#include "sllm/rng.hpp"

namespace sllm {

struct EdgeTypeSpec {
  std::string name = "edge";
  std::optional<double> p_in;   // overrides SynthConfig::p_in
  std::optional<double> p_out;  // overrides SynthConfig::p_out
};

struct WeightLaw {
  enum class Kind { kUnit, kGeometric } kind = Kind::kUnit;
  double p = 0.5;  // geometric success probability, support {1,2,...}
};

struct SynthConfig {
  std::size_t n_users = 1000;
  std::size_t n_blocks = 2;
  double p_in = 0.01;
  double p_out = 0.001;
  std::size_t content_dim = 16;
  double content_noise_sd = 0.5;
  std::vector<EdgeTypeSpec> edge_types = {{"edge", {}, {}}};
  double direction_signal = 0.0;  // in [0,1]; used by the directional generator
  WeightLaw weight_law;
  std::uint64_t seed = 0;
};

namespace detail {

inline void check_synth_config(const SynthConfig& cfg) {
  if (cfg.n_users < 2) throw ConfigError("synth: n_users must be at least 2");
  if (cfg.n_blocks < 1 || cfg.n_blocks > cfg.n_users)
    throw ConfigError("synth: n_blocks must be in [1, n_users]");
  if (cfg.content_dim < cfg.n_blocks)
    throw ConfigError("synth: content_dim must be at least n_blocks for one-hot centroids");
  if (cfg.content_noise_sd < 0.0) throw ConfigError("synth: content_noise_sd must be nonnegative");
  if (cfg.edge_types.empty()) throw ConfigError("synth: at least one edge type required");
  if (cfg.direction_signal < 0.0 || cfg.direction_signal > 1.0)
    throw ConfigError("synth: direction_signal must be in [0,1]");
  double expected_edges = 0.0;
  for (const auto& t : cfg.edge_types) {
    const double pi = t.p_in.value_or(cfg.p_in);
    const double po = t.p_out.value_or(cfg.p_out);
    if (pi < 0.0 || pi > 1.0 || po < 0.0 || po > 1.0)
      throw ConfigError("synth: edge probabilities must be in [0,1]");
    if (!(pi > po))
      throw ConfigError("synth: homophily requires p_in > p_out (type '" + t.name + "' has " +
                        fmt_g17(pi) + " <= " + fmt_g17(po) + ")");
    const double n = static_cast<double>(cfg.n_users);
    expected_edges += n * (n - 1) * (pi + po) / 2.0;
  }
  if (expected_edges <= 0.0) throw ConfigError("synth: expected edge count is zero");
}

inline std::string synth_user_id(std::size_t i, std::size_t n_users) {
  std::size_t width = 1;
  for (std::size_t v = n_users - 1; v >= 10; v /= 10) ++width;
  std::string digits = std::to_string(i);
  return "u" + std::string(width - digits.size(), '0') + digits;
}

inline SocialDataset synth_users(const SynthConfig& cfg) {
  SocialDataset ds;
  ds.content_dim = cfg.content_dim;
  ds.label_spec.kind = LabelKind::kClassification;
  ds.label_spec.n_classes = cfg.n_blocks;
  Rng rng(derive_seed(cfg.seed, "synth-content"));
  ds.users.reserve(cfg.n_users);
  for (std::size_t i = 0; i < cfg.n_users; ++i) {
    UserRecord u;
    u.user_id = synth_user_id(i, cfg.n_users);
    const std::size_t block = i % cfg.n_blocks;
    u.content_vec.assign(cfg.content_dim, 0.0);
    u.content_vec[block] = 1.0;
    for (auto& v : u.content_vec) v += rng.normal(0.0, cfg.content_noise_sd);
    Label label;
    label.kind = LabelKind::kClassification;
    label.class_index = static_cast<int>(block);
    u.label = label;
    ds.users.push_back(std::move(u));
  }
  return ds;
}

inline double sample_weight(const WeightLaw& law, Rng& rng) {
  if (law.kind == WeightLaw::Kind::kUnit) return 1.0;
  return static_cast<double>(rng.geometric(law.p));
}

}  // namespace detail

// Homophilous stochastic block model: every ordered pair (i,j), i != j, gains
// a directed edge with probability p_in when the users share a block and
// p_out otherwise, independently per edge type. The block index is the label.
inline SocialDataset generate_sbm_dataset(const SynthConfig& cfg) {
  detail::check_synth_config(cfg);
  SocialDataset ds = detail::synth_users(cfg);

  std::vector<std::string> names;
  for (const auto& t : cfg.edge_types) names.push_back(t.name);
  std::sort(names.begin(), names.end());
  ds.edge_types = EdgeTypeRegistry(names);

  for (const auto& t : cfg.edge_types) {
    const double pi = t.p_in.value_or(cfg.p_in);
    const double po = t.p_out.value_or(cfg.p_out);
    const auto type_id = static_cast<std::uint32_t>(ds.edge_types.id_of(t.name));
    Rng rng(derive_seed(cfg.seed, "synth-edges", type_id));
    for (std::size_t i = 0; i < cfg.n_users; ++i) {
      const std::size_t bi = i % cfg.n_blocks;
      for (std::size_t j = 0; j < cfg.n_users; ++j) {
        if (i == j) continue;
        const double p = (bi == j % cfg.n_blocks) ? pi : po;
        if (rng.bernoulli(p))
          ds.edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), type_id,
                              detail::sample_weight(cfg.weight_law, rng)});
      }
    }
  }

  detail::canonicalize(ds);
  detail::validate(ds);
  return ds;
}

// Two-block variant where edge direction carries label information: each
// unordered pair gains at most one edge, and cross-block edges are oriented
// block0 -> block1 with probability (1 + direction_signal) / 2. Within-block
// edges are oriented uniformly, so only the cross-block flow is informative.
inline SocialDataset generate_direction_signal_dataset(const SynthConfig& cfg) {
  detail::check_synth_config(cfg);
  if (cfg.n_blocks != 2)
    throw ConfigError("direction-signal generator requires exactly 2 blocks");
  SocialDataset ds = detail::synth_users(cfg);

  std::vector<std::string> names;
  for (const auto& t : cfg.edge_types) names.push_back(t.name);
  std::sort(names.begin(), names.end());
  ds.edge_types = EdgeTypeRegistry(names);

  const double p_forward = (1.0 + cfg.direction_signal) / 2.0;
  for (const auto& t : cfg.edge_types) {
    const double pi = t.p_in.value_or(cfg.p_in);
    const double po = t.p_out.value_or(cfg.p_out);
    const auto type_id = static_cast<std::uint32_t>(ds.edge_types.id_of(t.name));
    Rng rng(derive_seed(cfg.seed, "synth-dir-edges", type_id));
    for (std::size_t i = 0; i < cfg.n_users; ++i) {
      const std::size_t bi = i % 2;
      for (std::size_t j = i + 1; j < cfg.n_users; ++j) {
        const std::size_t bj = j % 2;
        const bool same = bi == bj;
        if (!rng.bernoulli(same ? pi : po)) continue;
        std::uint32_t src, dst;
        if (same) {
          const bool flip = rng.bernoulli(0.5);
          src = static_cast<std::uint32_t>(flip ? j : i);
          dst = static_cast<std::uint32_t>(flip ? i : j);
        } else {
          const std::uint32_t lo = static_cast<std::uint32_t>(bi == 0 ? i : j);  // block-0 user
          const std::uint32_t hi = static_cast<std::uint32_t>(bi == 0 ? j : i);  // block-1 user
          if (rng.bernoulli(p_forward)) {
            src = lo;
            dst = hi;
          } else {
            src = hi;
            dst = lo;
          }
        }
        ds.edges.push_back({src, dst, type_id, detail::sample_weight(cfg.weight_law, rng)});
      }
    }
  }

  detail::canonicalize(ds);
  detail::validate(ds);
  return ds;
}

}  // namespace sllm
