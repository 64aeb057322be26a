#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sllm/gradcheck.hpp"
#include "sllm/model.hpp"
#include "sllm/train.hpp"

namespace sllm {

struct ModelGradCheckCase {
  std::string description;
  GradCheckReport report;
};

namespace detail {

// Small random graph with every feature group populated.
inline SocialDataset toy_graph(std::size_t n_users, std::size_t content_dim,
                               std::size_t metadata_dim, std::size_t tweet_dim,
                               std::size_t n_types, std::size_t n_edges, Rng& rng) {
  SocialDataset ds;
  ds.content_dim = content_dim;
  ds.metadata_dim = metadata_dim;
  ds.tweet_dim = tweet_dim;
  std::vector<std::string> names;
  for (std::size_t t = 0; t < n_types; ++t) names.push_back("t" + std::to_string(t));
  ds.edge_types = EdgeTypeRegistry(names);
  for (std::size_t i = 0; i < n_users; ++i) {
    UserRecord u;
    u.user_id = "u" + std::to_string(i);
    u.content_vec.resize(content_dim);
    u.metadata_vec.resize(metadata_dim);
    u.tweet_vec.resize(tweet_dim);
    for (auto& v : u.content_vec) v = rng.normal();
    for (auto& v : u.metadata_vec) v = rng.normal();
    for (auto& v : u.tweet_vec) v = rng.normal();
    ds.users.push_back(std::move(u));
  }
  for (std::size_t e = 0; e < n_edges; ++e) {
    EdgeRecord edge;
    edge.src = static_cast<std::uint32_t>(rng.below(n_users));
    edge.dst = static_cast<std::uint32_t>(rng.below(n_users));
    while (edge.dst == edge.src) edge.dst = static_cast<std::uint32_t>(rng.below(n_users));
    edge.edge_type = static_cast<std::uint32_t>(e % n_types);
    edge.weight = 0.5 + rng.uniform() * 3.0;
    ds.edges.push_back(edge);
  }
  return ds;
}

}  // namespace detail

// Finite-difference verification of the full batch loss across model modes:
// each optional branch present/absent, directed/undirected, weighted and
// unweighted, one and two edge types, trainable and frozen tau.
inline std::vector<ModelGradCheckCase> run_model_gradcheck_battery(std::size_t n_cases,
                                                                   double tolerance,
                                                                   std::uint64_t seed) {
  struct CaseSpec {
    bool metadata, tweet, directed, weighted, tau_trainable;
    std::size_t n_types;
    EdgeTypeMode mode;
  };
  static const CaseSpec specs[] = {
      {false, false, false, false, true, 1, EdgeTypeMode::kMerged},
      {true, false, false, true, true, 1, EdgeTypeMode::kMerged},
      {false, true, true, false, true, 1, EdgeTypeMode::kMerged},
      {true, true, true, true, true, 2, EdgeTypeMode::kDistinct},
      {false, false, true, true, false, 2, EdgeTypeMode::kDistinct},
      {true, false, true, false, true, 2, EdgeTypeMode::kMerged},
      {false, true, false, true, false, 2, EdgeTypeMode::kSingle},
      {true, true, false, false, true, 1, EdgeTypeMode::kMerged},
      {false, false, true, false, true, 2, EdgeTypeMode::kDistinct},
      {true, true, true, true, true, 1, EdgeTypeMode::kMerged},
  };

  std::vector<ModelGradCheckCase> cases;
  for (std::size_t c = 0; c < n_cases; ++c) {
    const CaseSpec& spec = specs[c % (sizeof(specs) / sizeof(specs[0]))];
    Rng rng(derive_seed(seed, "gradcheck-case", c));

    const std::size_t metadata_dim = spec.metadata ? 2 : 0;
    const std::size_t tweet_dim = spec.tweet ? 2 : 0;
    SocialDataset ds = detail::toy_graph(6, 3, metadata_dim, tweet_dim, spec.n_types, 8, rng);

    RepresentationConfig rep;
    rep.d = 4;
    rep.content_layers = {4};
    rep.metadata_layers = {3, 4};
    rep.tweet_layers = {4};
    rep.content_dim = 3;
    rep.metadata_dim = metadata_dim;
    rep.tweet_dim = tweet_dim;

    const RelationMap relations = make_relation_map(
        ds.edge_types, spec.mode, spec.mode == EdgeTypeMode::kSingle ? "t0" : "");
    ModelParams params = init_params(
        rep, relations, {spec.directed, 5.0, spec.tau_trainable, 0.05},
        derive_seed(seed, "gradcheck-init", c));
    // Check at a generic point: with freshly zeroed biases, a fully dead relu
    // layer parks the next layer's pre-activations exactly on the kink, where
    // central differences and the subgradient legitimately disagree.
    {
      Rng jitter(derive_seed(seed, "gradcheck-jitter", c));
      for (auto& block : param_blocks(params, /*trainable_only=*/true))
        for (std::size_t i = 0; i < block.size(); ++i)
          block.data[i] += jitter.normal(0.0, 0.02);
    }

    // All edges of one class as a single batch.
    EdgeBatch batch;
    batch.relation_class = 0;
    for (std::size_t i = 0; i < ds.edges.size(); ++i)
      if (relations.class_of_type[ds.edges[i].edge_type] == 0) batch.edge_indices.push_back(i);

    Vec flat(param_count(params, /*trainable_only=*/true));
    copy_to_flat(params, flat, true);
    ModelParams shell = params;
    const LossGradFn fn = [&](std::span<const double> x, std::span<double> grads_out) {
      copy_from_flat(shell, x, true);
      if (grads_out.empty()) return edge_batch_loss(ds, shell, batch, spec.weighted);
      ModelParams grads = zeros_like(shell);
      const double loss = edge_batch_loss(ds, shell, batch, spec.weighted, &grads);
      copy_to_flat(grads, grads_out, true);
      return loss;
    };

    ModelGradCheckCase out;
    out.description = std::string("case ") + std::to_string(c) +
                      (spec.metadata ? " +meta" : "") + (spec.tweet ? " +tweet" : "") +
                      (spec.directed ? " directed" : " undirected") +
                      (spec.weighted ? " weighted" : " unweighted") + " types=" +
                      std::to_string(spec.n_types) + " mode=" + edge_type_mode_name(spec.mode) +
                      (spec.tau_trainable ? "" : " tau-frozen");
    out.report = gradient_check(fn, flat, tolerance);
    cases.push_back(std::move(out));
  }
  return cases;
}

}  // namespace sllm
