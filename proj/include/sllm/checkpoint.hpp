#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sllm/dataset.hpp"
#include "sllm/model.hpp"
#include "sllm/text.hpp"
#include "sllm/train.hpp"

namespace sllm {

constexpr char kCheckpointMagic[8] = {'S', 'L', 'L', 'M', 'C', 'K', 'P', 'T'};
constexpr std::uint8_t kCheckpointVersion = 0x01;

struct Checkpoint {
  RepresentationConfig rep;
  TrainConfig train_config;
  RelationMap relations;
  std::vector<std::string> registry_names;
  std::optional<MetadataNormalizer> normalizer;
  TrainHistory history;
  ModelParams params;
};

namespace detail {

inline void append_u64_le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint64_t read_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

// memcpy through uint64 keeps the abstract bit pattern on any host; the
// byte-by-byte helpers pin the on-disk order to little-endian.
inline void append_f64_le(std::string& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  append_u64_le(out, bits);
}

inline double read_f64_le(const unsigned char* p) {
  const std::uint64_t bits = read_u64_le(p);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

inline nlohmann::json rep_to_json(const RepresentationConfig& rep) {
  return {{"d", rep.d},
          {"content_layers", rep.content_layers},
          {"metadata_layers", rep.metadata_layers},
          {"tweet_layers", rep.tweet_layers},
          {"use_metadata", rep.use_metadata},
          {"use_tweet", rep.use_tweet},
          {"content_dim", rep.content_dim},
          {"metadata_dim", rep.metadata_dim},
          {"tweet_dim", rep.tweet_dim}};
}

inline RepresentationConfig rep_from_json(const nlohmann::json& j) {
  RepresentationConfig rep;
  rep.d = j.at("d").get<std::size_t>();
  rep.content_layers = j.at("content_layers").get<std::vector<std::size_t>>();
  rep.metadata_layers = j.at("metadata_layers").get<std::vector<std::size_t>>();
  rep.tweet_layers = j.at("tweet_layers").get<std::vector<std::size_t>>();
  rep.use_metadata = j.at("use_metadata").get<bool>();
  rep.use_tweet = j.at("use_tweet").get<bool>();
  rep.content_dim = j.at("content_dim").get<std::size_t>();
  rep.metadata_dim = j.at("metadata_dim").get<std::size_t>();
  rep.tweet_dim = j.at("tweet_dim").get<std::size_t>();
  return rep;
}

inline nlohmann::json train_to_json(const TrainConfig& cfg) {
  return {{"batch_size", cfg.batch_size},
          {"epochs", cfg.epochs},
          {"patience", cfg.patience},
          {"lr", cfg.lr},
          {"directed", cfg.directed},
          {"weighted", cfg.weighted},
          {"edge_type_mode", edge_type_mode_name(cfg.edge_type_mode)},
          {"single_type", cfg.single_type},
          {"val_edge_fraction", cfg.val_edge_fraction},
          {"tau_init", cfg.tau_init},
          {"tau_trainable", cfg.tau_trainable},
          {"seed", cfg.seed}};
}

inline TrainConfig train_from_json(const nlohmann::json& j) {
  TrainConfig cfg;
  cfg.batch_size = j.at("batch_size").get<std::size_t>();
  cfg.epochs = j.at("epochs").get<std::size_t>();
  cfg.patience = j.at("patience").get<std::size_t>();
  cfg.lr = j.at("lr").get<double>();
  cfg.directed = j.at("directed").get<bool>();
  cfg.weighted = j.at("weighted").get<bool>();
  const std::string mode = j.at("edge_type_mode").get<std::string>();
  cfg.edge_type_mode = mode == "distinct" ? EdgeTypeMode::kDistinct
                       : mode == "single" ? EdgeTypeMode::kSingle
                                          : EdgeTypeMode::kMerged;
  cfg.single_type = j.at("single_type").get<std::string>();
  cfg.val_edge_fraction = j.at("val_edge_fraction").get<double>();
  cfg.tau_init = j.at("tau_init").get<double>();
  cfg.tau_trainable = j.at("tau_trainable").get<bool>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

}  // namespace detail

inline void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  nlohmann::json meta;
  meta["rep"] = detail::rep_to_json(ckpt.rep);
  meta["train"] = detail::train_to_json(ckpt.train_config);
  meta["relations"] = {{"mode", edge_type_mode_name(ckpt.relations.mode)},
                       {"class_of_type", ckpt.relations.class_of_type},
                       {"class_names", ckpt.relations.class_names}};
  meta["registry"] = ckpt.registry_names;
  if (ckpt.normalizer.has_value()) {
    meta["normalizer"] = {{"mean", ckpt.normalizer->mean},
                          {"sd", ckpt.normalizer->sd},
                          {"count_columns", ckpt.normalizer->count_columns}};
  } else {
    meta["normalizer"] = nullptr;
  }
  meta["history"] = {{"train_loss", ckpt.history.train_loss},
                     {"val_loss", ckpt.history.val_loss},
                     {"best_epoch", ckpt.history.best_epoch}};
  meta["directed"] = ckpt.params.directed;
  meta["tau_trainable"] = ckpt.params.tau_trainable;

  auto& params = const_cast<ModelParams&>(ckpt.params);
  const auto blocks = param_blocks(params);
  nlohmann::json decl = nlohmann::json::array();
  for (const auto& b : blocks)
    decl.push_back({{"name", b.name}, {"rows", b.rows}, {"cols", b.cols}});
  meta["params"] = decl;

  const std::string meta_text = meta.dump();
  std::string out;
  out.append(kCheckpointMagic, 8);
  out.push_back(static_cast<char>(kCheckpointVersion));
  detail::append_u64_le(out, meta_text.size());
  out += meta_text;
  for (const auto& b : blocks)
    for (std::size_t i = 0; i < b.size(); ++i) detail::append_f64_le(out, b.data[i]);
  write_file_atomic(path, out);
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const std::string raw = read_file(path);
  const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
  if (raw.size() < 17) throw FormatError(path.string() + ": truncated checkpoint header");
  if (std::memcmp(raw.data(), kCheckpointMagic, 8) != 0)
    throw FormatError(path.string() + ": bad magic, not a checkpoint file");
  const std::uint8_t version = p[8];
  if (version != kCheckpointVersion)
    throw FormatError(path.string() + ": format version " + std::to_string(version) +
                      " is not supported (expected " + std::to_string(kCheckpointVersion) + ")");
  const std::uint64_t meta_len = detail::read_u64_le(p + 9);
  if (raw.size() < 17 + meta_len)
    throw FormatError(path.string() + ": truncated metadata (declared " +
                      std::to_string(meta_len) + " bytes)");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(raw.substr(17, meta_len));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": metadata is not valid JSON: " + e.what());
  }

  Checkpoint ckpt;
  try {
    ckpt.rep = detail::rep_from_json(meta.at("rep"));
    ckpt.train_config = detail::train_from_json(meta.at("train"));
    const auto& rel = meta.at("relations");
    const std::string mode = rel.at("mode").get<std::string>();
    ckpt.relations.mode = mode == "distinct" ? EdgeTypeMode::kDistinct
                          : mode == "single" ? EdgeTypeMode::kSingle
                                             : EdgeTypeMode::kMerged;
    ckpt.relations.class_of_type = rel.at("class_of_type").get<std::vector<int>>();
    ckpt.relations.class_names = rel.at("class_names").get<std::vector<std::string>>();
    ckpt.registry_names = meta.at("registry").get<std::vector<std::string>>();
    if (!meta.at("normalizer").is_null()) {
      MetadataNormalizer nz;
      nz.mean = meta.at("normalizer").at("mean").get<Vec>();
      nz.sd = meta.at("normalizer").at("sd").get<Vec>();
      nz.count_columns = meta.at("normalizer").at("count_columns").get<std::vector<std::size_t>>();
      ckpt.normalizer = std::move(nz);
    }
    ckpt.history.train_loss = meta.at("history").at("train_loss").get<Vec>();
    ckpt.history.val_loss = meta.at("history").at("val_loss").get<Vec>();
    ckpt.history.best_epoch = meta.at("history").at("best_epoch").get<std::size_t>();

    const bool directed = meta.at("directed").get<bool>();
    const bool tau_trainable = meta.at("tau_trainable").get<bool>();
    ckpt.params = init_params(ckpt.rep, ckpt.relations,
                              {directed, /*tau_init=*/1.0, tau_trainable, 0.0}, /*seed=*/0);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": metadata missing required fields: " + e.what());
  }

  // Fill parameter values from the declared block list, verifying that the
  // declared layout matches the architecture implied by the configs.
  const auto blocks = param_blocks(ckpt.params);
  const auto& decl = meta.at("params");
  if (decl.size() != blocks.size())
    throw FormatError(path.string() + ": declared " + std::to_string(decl.size()) +
                      " parameter blocks, model expects " + std::to_string(blocks.size()));
  std::size_t off = 17 + meta_len;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& d = decl.at(i);
    if (d.at("name").get<std::string>() != blocks[i].name ||
        d.at("rows").get<std::size_t>() != blocks[i].rows ||
        d.at("cols").get<std::size_t>() != blocks[i].cols)
      throw FormatError(path.string() + ": parameter block " + std::to_string(i) +
                        " ('" + d.at("name").get<std::string>() + "') does not match expected '" +
                        blocks[i].name + "'");
    const std::size_t bytes = blocks[i].size() * 8;
    if (raw.size() < off + bytes)
      throw FormatError(path.string() + ": truncated parameter block '" + blocks[i].name + "'");
    for (std::size_t k = 0; k < blocks[i].size(); ++k)
      blocks[i].data[k] = detail::read_f64_le(p + off + k * 8);
    off += bytes;
  }
  if (off != raw.size())
    throw FormatError(path.string() + ": " + std::to_string(raw.size() - off) +
                      " trailing bytes after parameter blocks");
  return ckpt;
}

}  // namespace sllm
