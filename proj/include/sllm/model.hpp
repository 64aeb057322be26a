#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sllm/dataset.hpp"
#include "sllm/dense.hpp"
#include "sllm/loss.hpp"
#include "sllm/matrix.hpp"
#include "sllm/rng.hpp"

namespace sllm {

// How dataset edge types map onto trained relation classes.
enum class EdgeTypeMode { kDistinct, kMerged, kSingle };

inline std::string edge_type_mode_name(EdgeTypeMode m) {
  switch (m) {
    case EdgeTypeMode::kDistinct: return "distinct";
    case EdgeTypeMode::kMerged: return "merged";
    case EdgeTypeMode::kSingle: return "single";
  }
  return "merged";
}

struct RelationMap {
  EdgeTypeMode mode = EdgeTypeMode::kMerged;
  std::vector<int> class_of_type;        // per registry id; -1 excludes the type
  std::vector<std::string> class_names;  // per relation class

  std::size_t n_classes() const { return class_names.size(); }
};

inline RelationMap make_relation_map(const EdgeTypeRegistry& registry, EdgeTypeMode mode,
                                     const std::string& single_type = "") {
  if (registry.size() == 0) throw RegistryError("edge type registry is empty");
  RelationMap map;
  map.mode = mode;
  map.class_of_type.assign(registry.size(), -1);
  switch (mode) {
    case EdgeTypeMode::kDistinct:
      for (std::size_t t = 0; t < registry.size(); ++t) map.class_of_type[t] = static_cast<int>(t);
      map.class_names = registry.names();
      break;
    case EdgeTypeMode::kMerged:
      for (std::size_t t = 0; t < registry.size(); ++t) map.class_of_type[t] = 0;
      map.class_names = {"merged"};
      break;
    case EdgeTypeMode::kSingle: {
      const int id = registry.id_of(single_type);
      if (id < 0) throw RegistryError("edge type '" + single_type + "' is not registered");
      map.class_of_type[static_cast<std::size_t>(id)] = 0;
      map.class_names = {single_type};
      break;
    }
  }
  return map;
}

// Architecture of the user representation module. Branch entries are layer
// output sizes; input dimensions come from the dataset. Branch layers use
// relu, the combine layer is linear.
struct RepresentationConfig {
  std::size_t d = 256;
  std::vector<std::size_t> content_layers;   // empty: single layer content_dim -> d
  std::vector<std::size_t> metadata_layers;  // empty: metadata_dim -> d -> d
  std::vector<std::size_t> tweet_layers;     // empty: tweet_dim -> d -> d
  bool use_metadata = true;
  bool use_tweet = true;
  std::size_t content_dim = 0;
  std::size_t metadata_dim = 0;  // 0 means the branch is absent
  std::size_t tweet_dim = 0;

  std::vector<std::size_t> resolved_content_layers() const {
    return content_layers.empty() ? std::vector<std::size_t>{d} : content_layers;
  }
  std::vector<std::size_t> resolved_metadata_layers() const {
    return metadata_layers.empty() ? std::vector<std::size_t>{d, d} : metadata_layers;
  }
  std::vector<std::size_t> resolved_tweet_layers() const {
    return tweet_layers.empty() ? std::vector<std::size_t>{d, d} : tweet_layers;
  }
  bool has_metadata_branch() const { return use_metadata && metadata_dim > 0; }
  bool has_tweet_branch() const { return use_tweet && tweet_dim > 0; }
};

// One matrix per relation class in undirected mode; a source/target pair in
// directed mode.
struct EdgeTransforms {
  Matrix out_transform;
  Matrix in_transform;  // empty when undirected
};

struct ModelParams {
  std::vector<DenseLayer> content_branch;
  std::vector<DenseLayer> metadata_branch;
  std::vector<DenseLayer> tweet_branch;
  DenseLayer combine;
  std::vector<EdgeTransforms> transforms;
  double tau = 20.0;
  bool directed = false;
  bool tau_trainable = true;

  std::size_t embedding_dim() const { return combine.out_dim(); }
};

struct ModelInit {
  bool directed = false;
  double tau_init = 20.0;
  bool tau_trainable = true;
  double transform_noise_sd = 0.01;
};

namespace detail {

inline std::vector<DenseLayer> init_branch(std::size_t input_dim,
                                           const std::vector<std::size_t>& sizes, Rng& rng) {
  std::vector<DenseLayer> layers;
  std::size_t in = input_dim;
  for (std::size_t out : sizes) {
    DenseLayer layer(out, in, Activation::kRelu);
    const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    for (std::size_t i = 0; i < layer.weight.size(); ++i)
      layer.weight.data()[i] = rng.uniform(-bound, bound);
    layers.push_back(std::move(layer));
    in = out;
  }
  return layers;
}

inline Matrix init_transform(std::size_t d, double noise_sd, Rng& rng) {
  Matrix m = Matrix::identity(d);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] += rng.normal(0.0, noise_sd);
  return m;
}

}  // namespace detail

inline ModelParams init_params(const RepresentationConfig& rep, const RelationMap& relations,
                               const ModelInit& init, std::uint64_t seed) {
  if (rep.content_dim == 0) throw ShapeError("init_params: content_dim must be positive");
  if (rep.d == 0) throw ShapeError("init_params: embedding dimension must be positive");
  Rng rng(derive_seed(seed, "init-params"));

  ModelParams p;
  p.directed = init.directed;
  p.tau = init.tau_init;
  p.tau_trainable = init.tau_trainable;
  if (!(p.tau > 0.0)) throw ConfigError("init_params: tau must be positive");

  p.content_branch = detail::init_branch(rep.content_dim, rep.resolved_content_layers(), rng);
  std::size_t concat_dim = p.content_branch.back().out_dim();
  if (rep.has_metadata_branch()) {
    p.metadata_branch = detail::init_branch(rep.metadata_dim, rep.resolved_metadata_layers(), rng);
    concat_dim += p.metadata_branch.back().out_dim();
  }
  if (rep.has_tweet_branch()) {
    p.tweet_branch = detail::init_branch(rep.tweet_dim, rep.resolved_tweet_layers(), rng);
    concat_dim += p.tweet_branch.back().out_dim();
  }
  p.combine = DenseLayer(rep.d, concat_dim, Activation::kIdentity);
  {
    const double bound = std::sqrt(6.0 / static_cast<double>(concat_dim + rep.d));
    for (std::size_t i = 0; i < p.combine.weight.size(); ++i)
      p.combine.weight.data()[i] = rng.uniform(-bound, bound);
  }
  for (std::size_t c = 0; c < relations.n_classes(); ++c) {
    EdgeTransforms t;
    t.out_transform = detail::init_transform(rep.d, init.transform_noise_sd, rng);
    if (init.directed) t.in_transform = detail::init_transform(rep.d, init.transform_noise_sd, rng);
    p.transforms.push_back(std::move(t));
  }
  return p;
}

// Same shapes, zero values; used as a gradient accumulator.
inline ModelParams zeros_like(const ModelParams& p) {
  ModelParams g = p;
  for (auto* branch : {&g.content_branch, &g.metadata_branch, &g.tweet_branch})
    for (auto& layer : *branch) {
      layer.weight.fill(0.0);
      for (auto& b : layer.bias) b = 0.0;
    }
  g.combine.weight.fill(0.0);
  for (auto& b : g.combine.bias) b = 0.0;
  for (auto& t : g.transforms) {
    t.out_transform.fill(0.0);
    if (!t.in_transform.empty()) t.in_transform.fill(0.0);
  }
  g.tau = 0.0;
  return g;
}

// --- flat parameter views ----------------------------------------------------

struct ParamBlock {
  std::string name;
  double* data;
  std::size_t rows, cols;

  std::size_t size() const { return rows * cols; }
};

// Declared, named parameter order; also the checkpoint block order. `tau` is
// listed last and omitted when frozen and `trainable_only` is set.
inline std::vector<ParamBlock> param_blocks(ModelParams& p, bool trainable_only = false) {
  std::vector<ParamBlock> blocks;
  auto add_branch = [&](const char* prefix, std::vector<DenseLayer>& branch) {
    for (std::size_t i = 0; i < branch.size(); ++i) {
      auto& layer = branch[i];
      const std::string base = std::string(prefix) + "." + std::to_string(i);
      blocks.push_back({base + ".weight", layer.weight.data(), layer.weight.rows(), layer.weight.cols()});
      blocks.push_back({base + ".bias", layer.bias.data(), layer.bias.size(), 1});
    }
  };
  add_branch("content", p.content_branch);
  add_branch("metadata", p.metadata_branch);
  add_branch("tweet", p.tweet_branch);
  blocks.push_back({"combine.weight", p.combine.weight.data(), p.combine.weight.rows(), p.combine.weight.cols()});
  blocks.push_back({"combine.bias", p.combine.bias.data(), p.combine.bias.size(), 1});
  for (std::size_t c = 0; c < p.transforms.size(); ++c) {
    auto& t = p.transforms[c];
    const std::string base = "transform." + std::to_string(c);
    blocks.push_back({base + ".out", t.out_transform.data(), t.out_transform.rows(), t.out_transform.cols()});
    if (!t.in_transform.empty())
      blocks.push_back({base + ".in", t.in_transform.data(), t.in_transform.rows(), t.in_transform.cols()});
  }
  if (!trainable_only || p.tau_trainable) blocks.push_back({"tau", &p.tau, 1, 1});
  return blocks;
}

inline std::size_t param_count(const ModelParams& p, bool trainable_only = false) {
  std::size_t n = 0;
  for (const auto& b : param_blocks(const_cast<ModelParams&>(p), trainable_only)) n += b.size();
  return n;
}

inline void copy_to_flat(const ModelParams& p, std::span<double> flat, bool trainable_only = false) {
  std::size_t off = 0;
  for (const auto& b : param_blocks(const_cast<ModelParams&>(p), trainable_only)) {
    std::copy(b.data, b.data + b.size(), flat.begin() + static_cast<std::ptrdiff_t>(off));
    off += b.size();
  }
  if (off != flat.size()) throw ShapeError("copy_to_flat: buffer size mismatch");
}

inline void copy_from_flat(ModelParams& p, std::span<const double> flat, bool trainable_only = false) {
  std::size_t off = 0;
  for (auto& b : param_blocks(p, trainable_only)) {
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(off),
              flat.begin() + static_cast<std::ptrdiff_t>(off + b.size()), b.data);
    off += b.size();
  }
  if (off != flat.size()) throw ShapeError("copy_from_flat: buffer size mismatch");
}

// --- user representation forward/backward ------------------------------------

struct BranchCache {
  std::vector<DenseCache> layers;
  Vec out;
};

struct UserForwardCache {
  BranchCache content, metadata, tweet;
  DenseCache combine;
  Vec concat;
};

namespace detail {

inline void branch_forward(const std::vector<DenseLayer>& branch, std::span<const double> input,
                           BranchCache& cache) {
  cache.layers.resize(branch.size());
  Vec cur(input.begin(), input.end());
  for (std::size_t i = 0; i < branch.size(); ++i) {
    Vec next(branch[i].out_dim());
    dense_forward_cached(branch[i], cur, cache.layers[i], next);
    cur = std::move(next);
  }
  cache.out = std::move(cur);
}

// Walks the layers in reverse, accumulating into `grads`.
inline void branch_backward(const std::vector<DenseLayer>& branch, const BranchCache& cache,
                            std::span<const double> dout, std::vector<DenseLayer>& grads) {
  Vec cur(dout.begin(), dout.end());
  for (std::size_t i = branch.size(); i-- > 0;) {
    Vec dinput(branch[i].in_dim());
    dense_backward(branch[i], cache.layers[i], cur, grads[i], dinput);
    cur = std::move(dinput);
  }
}

}  // namespace detail

// Produces the d-dimensional user embedding from that user's features alone.
inline Vec user_forward(const ModelParams& p, std::span<const double> content,
                        std::span<const double> metadata, std::span<const double> tweet,
                        UserForwardCache* cache = nullptr) {
  UserForwardCache local;
  UserForwardCache& c = cache ? *cache : local;

  if (content.size() != p.content_branch.front().in_dim())
    throw FeatureError("user_forward: content branch expects input of length " +
                       std::to_string(p.content_branch.front().in_dim()) + ", got " +
                       std::to_string(content.size()));
  detail::branch_forward(p.content_branch, content, c.content);
  std::size_t concat_dim = c.content.out.size();

  if (!p.metadata_branch.empty()) {
    if (metadata.size() != p.metadata_branch.front().in_dim())
      throw FeatureError("user_forward: metadata branch expects input of length " +
                         std::to_string(p.metadata_branch.front().in_dim()) + ", got " +
                         std::to_string(metadata.size()));
    detail::branch_forward(p.metadata_branch, metadata, c.metadata);
    concat_dim += c.metadata.out.size();
  }
  if (!p.tweet_branch.empty()) {
    if (tweet.size() != p.tweet_branch.front().in_dim())
      throw FeatureError("user_forward: tweet branch expects input of length " +
                         std::to_string(p.tweet_branch.front().in_dim()) + ", got " +
                         std::to_string(tweet.size()));
    detail::branch_forward(p.tweet_branch, tweet, c.tweet);
    concat_dim += c.tweet.out.size();
  }

  c.concat.clear();
  c.concat.reserve(concat_dim);
  c.concat.insert(c.concat.end(), c.content.out.begin(), c.content.out.end());
  c.concat.insert(c.concat.end(), c.metadata.out.begin(), c.metadata.out.end());
  c.concat.insert(c.concat.end(), c.tweet.out.begin(), c.tweet.out.end());

  Vec u(p.combine.out_dim());
  dense_forward_cached(p.combine, c.concat, c.combine, u);
  return u;
}

inline Vec user_forward(const ModelParams& p, const UserRecord& user,
                        UserForwardCache* cache = nullptr) {
  return user_forward(p, user.content_vec, user.metadata_vec, user.tweet_vec, cache);
}

inline void user_backward(const ModelParams& p, const UserForwardCache& cache,
                          std::span<const double> du, ModelParams& grads) {
  Vec dconcat(cache.concat.size());
  dense_backward(p.combine, cache.combine, du, grads.combine, dconcat);
  std::size_t off = 0;
  const auto take = [&](std::size_t n) {
    std::span<const double> s(dconcat.data() + off, n);
    off += n;
    return s;
  };
  detail::branch_backward(p.content_branch, cache.content, take(cache.content.out.size()),
                          grads.content_branch);
  if (!p.metadata_branch.empty())
    detail::branch_backward(p.metadata_branch, cache.metadata, take(cache.metadata.out.size()),
                            grads.metadata_branch);
  if (!p.tweet_branch.empty())
    detail::branch_backward(p.tweet_branch, cache.tweet, take(cache.tweet.out.size()),
                            grads.tweet_branch);
}

// --- edge scoring --------------------------------------------------------------

// tau * cos(W^k_out u_i, W^k_in u_j) in directed mode (i is the edge source),
// tau * cos(W^k u_i, W^k u_j) otherwise.
inline double edge_score(const ModelParams& p, std::span<const double> u_i,
                         std::span<const double> u_j, std::size_t relation_class) {
  if (relation_class >= p.transforms.size())
    throw RegistryError("edge_score: relation class " + std::to_string(relation_class) +
                        " out of range (model has " + std::to_string(p.transforms.size()) + ")");
  const auto& t = p.transforms[relation_class];
  Vec ti(t.out_transform.rows()), tj(t.out_transform.rows());
  matvec(t.out_transform, u_i, ti);
  matvec(p.directed ? t.in_transform : t.out_transform, u_j, tj);
  return p.tau * cosine_similarity(ti, tj);
}

// --- embeddings ------------------------------------------------------------------

struct EmbeddingMatrix {
  std::vector<std::string> user_ids;
  Matrix values;  // N x d, row order matches user_ids
};

// Inductive by construction: each row depends only on that user's features.
inline EmbeddingMatrix embed_users(const ModelParams& p, std::span<const UserRecord> users) {
  EmbeddingMatrix em;
  em.values = Matrix(users.size(), p.embedding_dim());
  em.user_ids.reserve(users.size());
  for (std::size_t i = 0; i < users.size(); ++i) {
    em.user_ids.push_back(users[i].user_id);
    const Vec u = user_forward(p, users[i]);
    std::copy(u.begin(), u.end(), em.values.row(i).begin());
  }
  return em;
}

}  // namespace sllm
