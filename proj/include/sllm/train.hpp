#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sllm/adam.hpp"
#include "sllm/dataset.hpp"
#include "sllm/loss.hpp"
#include "sllm/model.hpp"

namespace sllm {

struct TrainConfig {
  std::size_t batch_size = 64;
  std::size_t epochs = 30;
  std::size_t patience = 3;  // early-stop strikes allowed
  double lr = 1e-3;
  bool directed = false;
  bool weighted = false;
  EdgeTypeMode edge_type_mode = EdgeTypeMode::kMerged;
  std::string single_type;  // used when edge_type_mode == kSingle
  double val_edge_fraction = 0.1;
  double tau_init = 20.0;
  bool tau_trainable = true;
  std::uint64_t seed = 0;
};

inline void check_train_config(const TrainConfig& cfg) {
  if (cfg.batch_size < 2) throw ConfigError("train: batch_size must be at least 2");
  if (cfg.val_edge_fraction < 0.0 || cfg.val_edge_fraction >= 0.5)
    throw ConfigError("train: val_edge_fraction must be in [0, 0.5)");
  if (!(cfg.lr > 0.0)) throw ConfigError("train: learning rate must be positive");
  if (!(cfg.tau_init > 0.0)) throw ConfigError("train: tau_init must be positive");
}

struct EdgeBatch {
  std::size_t relation_class = 0;
  std::vector<std::size_t> edge_indices;  // into SocialDataset::edges
};

namespace detail {

// Chunks a pool into batches of `B`. A trailing single edge joins the final
// full batch rather than forming an invalid 1-edge batch.
inline std::vector<std::vector<std::size_t>> chunk_batches(std::span<const std::size_t> pool,
                                                           std::size_t B) {
  std::vector<std::vector<std::size_t>> out;
  if (pool.size() < 2) return out;
  std::size_t i = 0;
  while (i < pool.size()) {
    std::size_t take = std::min(B, pool.size() - i);
    if (pool.size() - i - take == 1) take += 1;  // absorb the would-be singleton
    out.emplace_back(pool.begin() + static_cast<std::ptrdiff_t>(i),
                     pool.begin() + static_cast<std::ptrdiff_t>(i + take));
    i += take;
  }
  return out;
}

}  // namespace detail

// One epoch of single-type batches, alternating relation classes in fixed
// order. The epoch length is set by the class with the most batches; smaller
// classes cycle through reshuffles. Deterministic per (seed, epoch).
inline std::vector<EdgeBatch> make_round_robin_schedule(
    const std::vector<std::vector<std::size_t>>& pools_by_class, std::size_t batch_size,
    std::uint64_t seed, std::size_t epoch = 0) {
  if (batch_size < 2) throw ConfigError("schedule: batch size must be at least 2");
  std::vector<std::size_t> active;
  std::size_t rounds = 0;
  for (std::size_t c = 0; c < pools_by_class.size(); ++c) {
    if (pools_by_class[c].size() >= 2) {
      active.push_back(c);
      const std::size_t n_batches =
          detail::chunk_batches(pools_by_class[c], batch_size).size();
      rounds = std::max(rounds, n_batches);
    }
  }
  if (active.empty()) throw Error("schedule: no relation class has at least 2 edges");

  struct Stream {
    std::vector<std::vector<std::size_t>> batches;
    std::size_t next = 0;
    std::size_t cycle = 0;
  };
  std::vector<Stream> streams(pools_by_class.size());
  auto refill = [&](std::size_t c, Stream& s) {
    std::vector<std::size_t> order = pools_by_class[c];
    Rng rng(derive_seed(seed, "shuffle", static_cast<std::uint64_t>(c),
                        epoch * 1000003ULL + s.cycle));
    rng.shuffle(order);
    s.batches = detail::chunk_batches(order, batch_size);
    s.next = 0;
    s.cycle += 1;
  };

  std::vector<EdgeBatch> schedule;
  for (std::size_t r = 0; r < rounds; ++r) {
    for (std::size_t c : active) {
      Stream& s = streams[c];
      if (s.next >= s.batches.size()) refill(c, s);
      schedule.push_back({c, s.batches[s.next++]});
    }
  }
  return schedule;
}

// --- batch loss and gradients ---------------------------------------------------

// Forward (and optionally backward) pass for one single-class batch. Builds
// the BxB score matrix via the shared representation module and the class
// transforms, applies false-negative masking, and evaluates the multiple
// negatives ranking loss. In undirected mode the loss is averaged with the
// role-swapped matrix so that edge orientation is irrelevant. When `grads`
// is given, exact analytic gradients for every parameter are accumulated
// into it.
inline double edge_batch_loss(const SocialDataset& ds, const ModelParams& params,
                              const EdgeBatch& batch, bool weighted,
                              ModelParams* grads = nullptr) {
  const std::size_t B = batch.edge_indices.size();
  if (B < 2) throw Error("edge_batch_loss: batch must contain at least 2 edges");
  if (batch.relation_class >= params.transforms.size())
    throw RegistryError("edge_batch_loss: relation class " + std::to_string(batch.relation_class) +
                        " out of range");
  const auto& tr = params.transforms[batch.relation_class];
  const std::size_t d = params.embedding_dim();

  std::vector<std::uint32_t> src(B), dst(B);
  Vec weights;
  for (std::size_t m = 0; m < B; ++m) {
    const EdgeRecord& e = ds.edges[batch.edge_indices[m]];
    src[m] = e.src;
    dst[m] = e.dst;
    if (weighted) weights.push_back(e.weight);
  }

  // Unique endpoints; every user is forwarded and transformed exactly once.
  std::vector<std::uint32_t> users(src);
  users.insert(users.end(), dst.begin(), dst.end());
  std::sort(users.begin(), users.end());
  users.erase(std::unique(users.begin(), users.end()), users.end());
  const std::size_t U = users.size();
  auto slot_of = [&](std::uint32_t user) {
    return static_cast<std::size_t>(
        std::lower_bound(users.begin(), users.end(), user) - users.begin());
  };
  std::vector<std::size_t> src_slot(B), dst_slot(B);
  for (std::size_t m = 0; m < B; ++m) {
    src_slot[m] = slot_of(src[m]);
    dst_slot[m] = slot_of(dst[m]);
  }

  std::vector<UserForwardCache> caches(U);
  std::vector<Vec> emb(U);
  for (std::size_t s = 0; s < U; ++s)
    emb[s] = user_forward(params, ds.users[users[s]], &caches[s]);

  const bool directed = params.directed;
  std::vector<Vec> t_out(U), t_in;
  Vec n_out(U), n_in;
  for (std::size_t s = 0; s < U; ++s) {
    t_out[s].resize(d);
    matvec(tr.out_transform, emb[s], t_out[s]);
    n_out[s] = norm2(t_out[s]);
  }
  if (directed) {
    t_in.resize(U);
    n_in.resize(U);
    for (std::size_t s = 0; s < U; ++s) {
      t_in[s].resize(d);
      matvec(tr.in_transform, emb[s], t_in[s]);
      n_in[s] = norm2(t_in[s]);
    }
  }
  const std::vector<Vec>& t_col = directed ? t_in : t_out;
  const Vec& n_col = directed ? n_in : n_out;

  auto cosine_of = [](const Vec& x, double nx, const Vec& y, double ny) {
    return (nx == 0.0 || ny == 0.0) ? 0.0 : dot(x, y) / (nx * ny);
  };

  // Pass 1: rows anchor the edge source, columns hold candidate targets.
  Matrix cos1(B, B), scores1(B, B);
  for (std::size_t m = 0; m < B; ++m)
    for (std::size_t n = 0; n < B; ++n) {
      cos1(m, n) = cosine_of(t_out[src_slot[m]], n_out[src_slot[m]], t_col[dst_slot[n]],
                             n_col[dst_slot[n]]);
      const bool masked = m != n && (dst[n] == dst[m] || dst[n] == src[m]);
      scores1(m, n) = masked ? kMaskedScore : params.tau * cos1(m, n);
    }
  const MnrlResult r1 = mnrl_loss(scores1, weights);

  // Pass 2 anchors the target side and ranks candidate sources, making the
  // supervision two-sided in both modes. Undirected, this is the role-swapped
  // matrix and the loss becomes symmetric in (src, dst); directed, each role
  // keeps its own transform, so orientation still matters.
  Matrix cos2(B, B);
  MnrlResult r2;
  {
    Matrix scores2(B, B);
    for (std::size_t m = 0; m < B; ++m)
      for (std::size_t n = 0; n < B; ++n) {
        cos2(m, n) = cosine_of(t_col[dst_slot[m]], n_col[dst_slot[m]], t_out[src_slot[n]],
                               n_out[src_slot[n]]);
        const bool masked = m != n && (src[n] == src[m] || src[n] == dst[m]);
        scores2(m, n) = masked ? kMaskedScore : params.tau * cos2(m, n);
      }
    r2 = mnrl_loss(scores2, weights);
  }
  const double loss = 0.5 * (r1.loss + r2.loss);
  if (!grads) return loss;

  // Backward. dt accumulates per (user, role); masked pairs carry zero
  // gradient already.
  std::vector<Vec> dt_out(U, Vec(d, 0.0));
  std::vector<Vec> dt_in;
  if (directed) dt_in.assign(U, Vec(d, 0.0));
  double dtau = 0.0;

  auto backward_pair = [&](const Vec& x, double nx, const Vec& y, double ny, double c, double dS,
                           Vec& dx, Vec& dy) {
    if (nx == 0.0 || ny == 0.0) return;
    dtau += c * dS;
    const double dc = params.tau * dS;
    const double inv = 1.0 / (nx * ny);
    axpy(dc * inv, y, dx);
    axpy(-dc * c / (nx * nx), x, dx);
    axpy(dc * inv, x, dy);
    axpy(-dc * c / (ny * ny), y, dy);
  };

  std::vector<Vec>& dt_col = directed ? dt_in : dt_out;
  for (std::size_t m = 0; m < B; ++m)
    for (std::size_t n = 0; n < B; ++n) {
      const double g1 = 0.5 * r1.score_gradients(m, n);
      if (g1 != 0.0) {
        const std::size_t a = src_slot[m], b = dst_slot[n];
        backward_pair(t_out[a], n_out[a], t_col[b], n_col[b], cos1(m, n), g1, dt_out[a],
                      dt_col[b]);
      }
      const double g2 = 0.5 * r2.score_gradients(m, n);
      if (g2 != 0.0) {
        const std::size_t a = dst_slot[m], b = src_slot[n];
        backward_pair(t_col[a], n_col[a], t_out[b], n_out[b], cos2(m, n), g2, dt_col[a],
                      dt_out[b]);
      }
    }

  auto& gtr = grads->transforms[batch.relation_class];
  for (std::size_t s = 0; s < U; ++s) {
    Vec du(d, 0.0);
    outer_add(gtr.out_transform, dt_out[s], emb[s]);
    matvec_transposed_add(tr.out_transform, dt_out[s], du);
    if (directed) {
      outer_add(gtr.in_transform, dt_in[s], emb[s]);
      matvec_transposed_add(tr.in_transform, dt_in[s], du);
    }
    user_backward(params, caches[s], du, *grads);
  }
  grads->tau += dtau;
  return loss;
}

// --- train step and loop ----------------------------------------------------------

// One optimizer step over a single-class batch: loss, analytic gradients,
// Adam update on every trainable parameter (edge transforms included).
inline double train_step(const SocialDataset& ds, ModelParams& params, const EdgeBatch& batch,
                         bool weighted, AdamState& adam, Vec& flat_params, Vec& flat_grads) {
  ModelParams grads = zeros_like(params);
  const double loss = edge_batch_loss(ds, params, batch, weighted, &grads);
  copy_to_flat(params, flat_params, /*trainable_only=*/true);
  copy_to_flat(grads, flat_grads, /*trainable_only=*/true);
  adam_step(flat_params, flat_grads, adam);
  copy_from_flat(params, flat_params, /*trainable_only=*/true);
  return loss;
}

struct TrainHistory {
  std::vector<double> train_loss;  // per epoch, edge-weighted batch mean
  std::vector<double> val_loss;    // empty when val_edge_fraction == 0
  std::size_t best_epoch = 0;
};

struct TrainResult {
  ModelParams params;
  TrainHistory history;
  RelationMap relations;
};

namespace detail {

inline double eval_pools_loss(const SocialDataset& ds, const ModelParams& params,
                              const std::vector<std::vector<std::size_t>>& pools, std::size_t B,
                              bool weighted) {
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t c = 0; c < pools.size(); ++c) {
    for (auto& chunk : chunk_batches(pools[c], B)) {
      EdgeBatch batch{c, chunk};
      total += edge_batch_loss(ds, params, batch, weighted) * static_cast<double>(chunk.size());
      count += chunk.size();
    }
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

}  // namespace detail

// Step-1 training: round-robin contrastive optimization over the edge list
// with a held-out edge fraction for validation and early stopping. Returns
// the parameters from the best validation epoch.
inline TrainResult train(const SocialDataset& ds, RepresentationConfig rep, const TrainConfig& cfg) {
  check_train_config(cfg);
  if (rep.content_dim == 0) rep.content_dim = ds.content_dim;
  if (rep.metadata_dim == 0) rep.metadata_dim = ds.metadata_dim;
  if (rep.tweet_dim == 0) rep.tweet_dim = ds.tweet_dim;
  if (rep.content_dim != ds.content_dim)
    throw ShapeError("train: config content_dim " + std::to_string(rep.content_dim) +
                     " does not match dataset " + std::to_string(ds.content_dim));

  const RelationMap relations =
      make_relation_map(ds.edge_types, cfg.edge_type_mode, cfg.single_type);

  std::vector<std::vector<std::size_t>> train_pools(relations.n_classes());
  std::vector<std::vector<std::size_t>> val_pools(relations.n_classes());
  for (std::size_t c = 0; c < relations.n_classes(); ++c) {
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < ds.edges.size(); ++i)
      if (relations.class_of_type[ds.edges[i].edge_type] == static_cast<int>(c)) pool.push_back(i);
    if (cfg.val_edge_fraction > 0.0 && pool.size() >= 4) {
      Rng rng(derive_seed(cfg.seed, "val-split", c));
      rng.shuffle(pool);
      const auto n_val = static_cast<std::size_t>(
          std::floor(cfg.val_edge_fraction * static_cast<double>(pool.size())));
      val_pools[c].assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_val));
      train_pools[c].assign(pool.begin() + static_cast<std::ptrdiff_t>(n_val), pool.end());
      std::sort(val_pools[c].begin(), val_pools[c].end());
      std::sort(train_pools[c].begin(), train_pools[c].end());
    } else {
      std::sort(pool.begin(), pool.end());
      train_pools[c] = std::move(pool);
    }
  }
  std::size_t n_train_edges = 0;
  for (const auto& p : train_pools) n_train_edges += p.size();
  if (n_train_edges < 2) throw Error("train: no trainable edges after pooling");

  TrainResult result;
  result.relations = relations;
  ModelParams params = init_params(
      rep, relations, {cfg.directed, cfg.tau_init, cfg.tau_trainable}, cfg.seed);

  AdamState adam(param_count(params, /*trainable_only=*/true), cfg.lr);
  Vec flat_params(adam.m.size()), flat_grads(adam.m.size());

  bool has_val = false;
  for (const auto& p : val_pools) has_val = has_val || p.size() >= 2;

  ModelParams best = params;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t strikes = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto schedule = make_round_robin_schedule(train_pools, cfg.batch_size, cfg.seed, epoch);
    double loss_sum = 0.0;
    std::size_t edge_count = 0;
    for (const auto& batch : schedule) {
      const double loss = train_step(ds, params, batch, cfg.weighted, adam, flat_params, flat_grads);
      loss_sum += loss * static_cast<double>(batch.edge_indices.size());
      edge_count += batch.edge_indices.size();
    }
    const double train_loss = loss_sum / static_cast<double>(edge_count);
    if (!std::isfinite(train_loss))
      throw Error("train: loss diverged at epoch " + std::to_string(epoch));
    result.history.train_loss.push_back(train_loss);

    if (has_val) {
      const double val_loss =
          detail::eval_pools_loss(ds, params, val_pools, cfg.batch_size, cfg.weighted);
      result.history.val_loss.push_back(val_loss);
      if (val_loss < best_val) {
        best_val = val_loss;
        best = params;
        result.history.best_epoch = epoch;
        strikes = 0;
      } else {
        strikes += 1;
        if (strikes > cfg.patience) break;
      }
    }
  }

  result.params = has_val ? std::move(best) : std::move(params);
  if (!has_val && !result.history.train_loss.empty())
    result.history.best_epoch = result.history.train_loss.size() - 1;
  return result;
}

}  // namespace sllm
