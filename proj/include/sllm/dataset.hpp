#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sllm/errors.hpp"
#include "sllm/matrix.hpp"
#include "sllm/rng.hpp"
#include "sllm/text.hpp"

namespace sllm {

enum class LabelKind { kClassification, kRegression };

struct Label {
  LabelKind kind = LabelKind::kClassification;
  int class_index = -1;  // classification
  Vec values;            // regression, length L
};

struct UserRecord {
  std::string user_id;
  Vec content_vec;
  Vec metadata_vec;
  Vec tweet_vec;
  std::optional<Label> label;
};

// Endpoints are indices into the dataset's user table.
struct EdgeRecord {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  std::uint32_t edge_type = 0;
  double weight = 1.0;
};

class EdgeTypeRegistry {
 public:
  EdgeTypeRegistry() = default;
  explicit EdgeTypeRegistry(std::vector<std::string> names) : names_(std::move(names)) {}

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t id) const { return names_.at(id); }
  const std::vector<std::string>& names() const { return names_; }

  int id_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return static_cast<int>(i);
    return -1;
  }

 private:
  std::vector<std::string> names_;
};

struct LabelSpec {
  LabelKind kind = LabelKind::kClassification;
  std::size_t n_classes = 0;  // C, classification
  std::size_t n_outputs = 0;  // L, regression
};

struct SocialDataset {
  std::vector<UserRecord> users;  // sorted by user_id
  std::vector<EdgeRecord> edges;  // sorted by (src, dst, type)
  EdgeTypeRegistry edge_types;
  LabelSpec label_spec;
  std::size_t content_dim = 0;
  std::size_t metadata_dim = 0;
  std::size_t tweet_dim = 0;
  std::vector<std::size_t> metadata_count_columns;  // log1p before z-scoring

  int index_of(const std::string& user_id) const {
    auto it = std::lower_bound(users.begin(), users.end(), user_id,
                               [](const UserRecord& u, const std::string& id) { return u.user_id < id; });
    if (it == users.end() || it->user_id != user_id) return -1;
    return static_cast<int>(it - users.begin());
  }

  std::vector<std::size_t> labeled_user_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < users.size(); ++i)
      if (users[i].label.has_value()) out.push_back(i);
    return out;
  }
};

struct LoadConfig {
  bool zero_fill_missing = false;  // false: unknown edge endpoints are an error
  double min_edge_weight = 0.0;    // 0 disables the threshold filter
  LabelKind label_kind = LabelKind::kClassification;
  std::string manifest_path;  // defaults to <features_path>.manifest
};

struct SplitSpec {
  std::uint64_t seed = 0;
  double train = 0.6, val = 0.2, test = 0.2;
};

struct Split {
  std::vector<std::size_t> train, val, test;
};

namespace detail {

inline void canonicalize(SocialDataset& ds) {
  // Users by id, edges by (src, dst, type); registry is already sorted.
  std::vector<std::size_t> order(ds.users.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ds.users[a].user_id < ds.users[b].user_id;
  });
  std::vector<std::uint32_t> remap(ds.users.size());
  std::vector<UserRecord> sorted_users;
  sorted_users.reserve(ds.users.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    remap[order[pos]] = static_cast<std::uint32_t>(pos);
    sorted_users.push_back(std::move(ds.users[order[pos]]));
  }
  ds.users = std::move(sorted_users);
  for (auto& e : ds.edges) {
    e.src = remap[e.src];
    e.dst = remap[e.dst];
  }
  std::sort(ds.edges.begin(), ds.edges.end(), [](const EdgeRecord& a, const EdgeRecord& b) {
    if (a.src != b.src) return a.src < b.src;
    if (a.dst != b.dst) return a.dst < b.dst;
    return a.edge_type < b.edge_type;
  });
}

inline void validate(const SocialDataset& ds) {
  for (const auto& u : ds.users) {
    if (u.content_vec.size() != ds.content_dim)
      throw ShapeError("user " + u.user_id + ": content vector has length " +
                       std::to_string(u.content_vec.size()) + ", expected " +
                       std::to_string(ds.content_dim));
    if (u.metadata_vec.size() != ds.metadata_dim)
      throw ShapeError("user " + u.user_id + ": metadata vector has length " +
                       std::to_string(u.metadata_vec.size()) + ", expected " +
                       std::to_string(ds.metadata_dim));
    if (u.tweet_vec.size() != ds.tweet_dim)
      throw ShapeError("user " + u.user_id + ": tweet vector has length " +
                       std::to_string(u.tweet_vec.size()) + ", expected " +
                       std::to_string(ds.tweet_dim));
  }
  for (const auto& e : ds.edges) {
    if (e.src >= ds.users.size() || e.dst >= ds.users.size())
      throw FormatError("edge references a user index outside the user table");
    if (!(e.weight > 0.0)) throw FormatError("edge weight must be positive");
    if (e.edge_type >= ds.edge_types.size()) throw FormatError("edge has unregistered type id");
  }
  if (!ds.edges.empty() && ds.edge_types.size() == 0)
    throw FormatError("dataset has edges but no edge type registry");
}

}  // namespace detail

// --- manifest -------------------------------------------------------------

struct FeatureManifest {
  std::size_t content_dim = 0;
  std::size_t metadata_dim = 0;
  std::size_t tweet_dim = 0;
  std::vector<std::size_t> metadata_count_columns;
};

inline FeatureManifest load_manifest(const std::filesystem::path& path) {
  FeatureManifest m;
  const std::string text = read_file(path);
  std::size_t lineno = 0;
  for (const auto& raw : split(text, '\n')) {
    ++lineno;
    const std::string line = strip(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    long n = 0;
    if (key == "content_dim" || key == "metadata_dim" || key == "tweet_dim") {
      if (!parse_long(value, n) || n < 0)
        throw FormatError(path.string() + ":" + std::to_string(lineno) + ": bad " + key);
      if (key == "content_dim") m.content_dim = static_cast<std::size_t>(n);
      if (key == "metadata_dim") m.metadata_dim = static_cast<std::size_t>(n);
      if (key == "tweet_dim") m.tweet_dim = static_cast<std::size_t>(n);
    } else if (key == "metadata_count_columns") {
      if (!value.empty())
        for (const auto& tok : split(value, ',')) {
          if (!parse_long(strip(tok), n) || n < 0)
            throw FormatError(path.string() + ":" + std::to_string(lineno) +
                              ": bad column index '" + tok + "'");
          m.metadata_count_columns.push_back(static_cast<std::size_t>(n));
        }
    } else {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": unknown manifest key '" +
                        key + "'");
    }
  }
  if (m.content_dim == 0) throw FormatError(path.string() + ": content_dim must be positive");
  for (auto c : m.metadata_count_columns)
    if (c >= m.metadata_dim)
      throw FormatError(path.string() + ": count column " + std::to_string(c) +
                        " outside metadata_dim " + std::to_string(m.metadata_dim));
  return m;
}

// --- loading ---------------------------------------------------------------

// Users and feature groups only; edges and labels are untouched. This is the
// whole input surface of inductive embedding.
inline SocialDataset load_features(const std::filesystem::path& features_path,
                                   const std::filesystem::path& manifest_override = {}) {
  SocialDataset ds;
  const std::filesystem::path manifest_path =
      manifest_override.empty() ? std::filesystem::path(features_path.string() + ".manifest")
                                : manifest_override;
  const FeatureManifest manifest = load_manifest(manifest_path);
  ds.content_dim = manifest.content_dim;
  ds.metadata_dim = manifest.metadata_dim;
  ds.tweet_dim = manifest.tweet_dim;
  ds.metadata_count_columns = manifest.metadata_count_columns;

  {
    const std::string text = read_file(features_path);
    const auto lines = split(text, '\n');
    const std::size_t expect_cols = 1 + ds.content_dim + ds.metadata_dim + ds.tweet_dim;
    if (lines.empty() || strip(lines[0]).empty())
      throw FormatError(features_path.string() + ":1: missing header row");
    {
      const auto header = split(strip(lines[0]), ',');
      if (header.size() != expect_cols || header[0] != "user_id")
        throw FormatError(features_path.string() + ":1: header does not match manifest (" +
                          std::to_string(header.size()) + " columns, expected " +
                          std::to_string(expect_cols) + ")");
    }
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const std::string line = strip(lines[i]);
      if (line.empty()) continue;
      const std::string where = features_path.string() + ":" + std::to_string(i + 1);
      const auto cells = split(line, ',');
      if (cells.size() != expect_cols)
        throw FormatError(where + ": row has " + std::to_string(cells.size()) +
                          " columns, expected " + std::to_string(expect_cols));
      UserRecord u;
      u.user_id = cells[0];
      if (u.user_id.empty()) throw FormatError(where + ": empty user_id");
      if (!seen.emplace(u.user_id, i).second)
        throw FormatError(where + ": duplicate user_id '" + u.user_id + "'");
      std::size_t c = 1;
      auto read_group = [&](Vec& dst, std::size_t n) {
        dst.resize(n);
        for (std::size_t k = 0; k < n; ++k, ++c) {
          double v = 0;
          if (!parse_double(cells[c], v) || !std::isfinite(v))
            throw FormatError(where + ": bad numeric value '" + cells[c] + "'");
          dst[k] = v;
        }
      };
      read_group(u.content_vec, ds.content_dim);
      read_group(u.metadata_vec, ds.metadata_dim);
      read_group(u.tweet_vec, ds.tweet_dim);
      ds.users.push_back(std::move(u));
    }
  }
  return ds;
}

inline SocialDataset load_dataset(const std::filesystem::path& edges_path,
                                  const std::filesystem::path& features_path,
                                  const std::filesystem::path& labels_path,
                                  const LoadConfig& cfg = {}) {
  SocialDataset ds = load_features(
      features_path, cfg.manifest_path.empty() ? std::filesystem::path{}
                                               : std::filesystem::path(cfg.manifest_path));

  std::unordered_map<std::string, std::uint32_t> id_to_index;
  id_to_index.reserve(ds.users.size());
  for (std::size_t i = 0; i < ds.users.size(); ++i)
    id_to_index.emplace(ds.users[i].user_id, static_cast<std::uint32_t>(i));

  // Labels (optional file; empty path means unlabeled dataset).
  ds.label_spec.kind = cfg.label_kind;
  if (!labels_path.empty()) {
    const std::string text = read_file(labels_path);
    const auto lines = split(text, '\n');
    std::size_t n_outputs = 0;
    long max_class = -1;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const std::string line = strip(lines[i]);
      if (line.empty()) continue;
      const std::string where = labels_path.string() + ":" + std::to_string(i + 1);
      const auto cells = split(line, '\t');
      if (cells.size() < 2) throw FormatError(where + ": expected user_id<TAB>label");
      auto it = id_to_index.find(cells[0]);
      if (it == id_to_index.end())
        throw FormatError(where + ": label references unknown user '" + cells[0] + "'");
      Label label;
      label.kind = cfg.label_kind;
      if (cfg.label_kind == LabelKind::kClassification) {
        if (cells.size() != 2) throw FormatError(where + ": classification expects one label column");
        long cls = 0;
        if (!parse_long(cells[1], cls) || cls < 0)
          throw FormatError(where + ": bad class index '" + cells[1] + "'");
        label.class_index = static_cast<int>(cls);
        max_class = std::max(max_class, cls);
      } else {
        label.values.resize(cells.size() - 1);
        for (std::size_t k = 1; k < cells.size(); ++k) {
          double v = 0;
          if (!parse_double(cells[k], v) || !std::isfinite(v))
            throw FormatError(where + ": bad regression value '" + cells[k] + "'");
          label.values[k - 1] = v;
        }
        if (n_outputs == 0) n_outputs = label.values.size();
        if (label.values.size() != n_outputs)
          throw FormatError(where + ": row has " + std::to_string(label.values.size()) +
                            " outputs, expected " + std::to_string(n_outputs));
      }
      if (ds.users[it->second].label.has_value())
        throw FormatError(where + ": duplicate label for user '" + cells[0] + "'");
      ds.users[it->second].label = std::move(label);
    }
    if (cfg.label_kind == LabelKind::kClassification)
      ds.label_spec.n_classes = static_cast<std::size_t>(max_class + 1);
    else
      ds.label_spec.n_outputs = n_outputs;
  }

  // Edges: parse, resolve endpoints, merge duplicates by summing weights.
  std::vector<std::string> type_names;
  const std::size_t n_users_with_features = ds.users.size();
  {
    const std::string text = read_file(edges_path);
    const auto lines = split(text, '\n');
    if (lines.empty() || strip(lines[0]) != "src\tdst\ttype\tweight")
      throw FormatError(edges_path.string() + ":1: expected header 'src\\tdst\\ttype\\tweight'");
    struct RawEdge {
      std::string src, dst, type;
      double weight;
      std::size_t lineno;
    };
    std::vector<RawEdge> raw;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const std::string line = strip(lines[i]);
      if (line.empty()) continue;
      const std::string where = edges_path.string() + ":" + std::to_string(i + 1);
      const auto cells = split(line, '\t');
      if (cells.size() != 4)
        throw FormatError(where + ": row has " + std::to_string(cells.size()) +
                          " columns, expected 4");
      double w = 0;
      if (!parse_double(cells[3], w) || !std::isfinite(w) || w <= 0.0)
        throw FormatError(where + ": edge weight must be a positive number, got '" + cells[3] + "'");
      raw.push_back({cells[0], cells[1], cells[2], w, i + 1});
      if (std::find(type_names.begin(), type_names.end(), cells[2]) == type_names.end())
        type_names.push_back(cells[2]);
    }
    std::sort(type_names.begin(), type_names.end());
    ds.edge_types = EdgeTypeRegistry(type_names);

    auto resolve = [&](const std::string& id, std::size_t lineno) -> std::uint32_t {
      auto it = id_to_index.find(id);
      if (it != id_to_index.end()) return it->second;
      if (!cfg.zero_fill_missing)
        throw FormatError(edges_path.string() + ":" + std::to_string(lineno) +
                          ": edge references user '" + id + "' with no feature row");
      UserRecord u;
      u.user_id = id;
      u.content_vec.assign(ds.content_dim, 0.0);
      u.metadata_vec.assign(ds.metadata_dim, 0.0);
      u.tweet_vec.assign(ds.tweet_dim, 0.0);
      const auto idx = static_cast<std::uint32_t>(ds.users.size());
      ds.users.push_back(std::move(u));
      id_to_index.emplace(id, idx);
      return idx;
    };

    std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, double> merged;
    for (const auto& r : raw) {
      const std::uint32_t s = resolve(r.src, r.lineno);
      const std::uint32_t d = resolve(r.dst, r.lineno);
      const auto t = static_cast<std::uint32_t>(ds.edge_types.id_of(r.type));
      merged[{s, d, t}] += r.weight;
    }
    for (const auto& [key, w] : merged) {
      if (cfg.min_edge_weight > 0.0 && w < cfg.min_edge_weight) continue;
      ds.edges.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), w});
    }
  }

  // Zero-fill mode appends a was-missing flag column to everyone's metadata.
  // Zero-filled users were appended after the feature rows, so the cut point
  // is the pre-edge user count.
  if (cfg.zero_fill_missing) {
    for (std::size_t i = 0; i < ds.users.size(); ++i)
      ds.users[i].metadata_vec.push_back(i < n_users_with_features ? 0.0 : 1.0);
    ds.metadata_dim += 1;
  }

  detail::canonicalize(ds);
  detail::validate(ds);
  return ds;
}

// --- saving ----------------------------------------------------------------

inline void save_dataset(const SocialDataset& ds, const std::filesystem::path& edges_path,
                         const std::filesystem::path& features_path,
                         const std::filesystem::path& labels_path) {
  {
    std::string out = "src\tdst\ttype\tweight\n";
    for (const auto& e : ds.edges) {
      out += ds.users[e.src].user_id;
      out += '\t';
      out += ds.users[e.dst].user_id;
      out += '\t';
      out += ds.edge_types.name(e.edge_type);
      out += '\t';
      out += fmt_g17(e.weight);
      out += '\n';
    }
    write_file_atomic(edges_path, out);
  }
  {
    std::string header = "user_id";
    for (std::size_t i = 0; i < ds.content_dim; ++i) header += ",c" + std::to_string(i);
    for (std::size_t i = 0; i < ds.metadata_dim; ++i) header += ",m" + std::to_string(i);
    for (std::size_t i = 0; i < ds.tweet_dim; ++i) header += ",t" + std::to_string(i);
    std::string out = header + "\n";
    for (const auto& u : ds.users) {
      out += u.user_id;
      for (double v : u.content_vec) out += "," + fmt_g17(v);
      for (double v : u.metadata_vec) out += "," + fmt_g17(v);
      for (double v : u.tweet_vec) out += "," + fmt_g17(v);
      out += '\n';
    }
    write_file_atomic(features_path, out);

    std::string manifest = "content_dim = " + std::to_string(ds.content_dim) + "\n" +
                           "metadata_dim = " + std::to_string(ds.metadata_dim) + "\n" +
                           "tweet_dim = " + std::to_string(ds.tweet_dim) + "\n";
    manifest += "metadata_count_columns =";
    for (std::size_t i = 0; i < ds.metadata_count_columns.size(); ++i)
      manifest += (i == 0 ? " " : ",") + std::to_string(ds.metadata_count_columns[i]);
    manifest += "\n";
    write_file_atomic(features_path.string() + ".manifest", manifest);
  }
  if (!labels_path.empty()) {
    std::string out;
    for (const auto& u : ds.users) {
      if (!u.label.has_value()) continue;
      out += u.user_id;
      if (u.label->kind == LabelKind::kClassification) {
        out += '\t';
        out += std::to_string(u.label->class_index);
      } else {
        for (double v : u.label->values) {
          out += '\t';
          out += fmt_g17(v);
        }
      }
      out += '\n';
    }
    write_file_atomic(labels_path, out);
  }
}

// --- splitting --------------------------------------------------------------

inline Split split_users(const SocialDataset& ds, const SplitSpec& spec) {
  if (!(spec.train > 0.0 && spec.val > 0.0 && spec.test > 0.0))
    throw ConfigError("split fractions must all be positive");
  if (std::fabs(spec.train + spec.val + spec.test - 1.0) > 1e-9)
    throw ConfigError("split fractions must sum to 1, got " +
                      fmt_g17(spec.train + spec.val + spec.test));
  std::vector<std::size_t> ids = ds.labeled_user_indices();
  if (ids.size() < 5)
    throw Error("split_users: need at least 5 labeled users, have " + std::to_string(ids.size()));

  Rng rng(derive_seed(spec.seed, "split"));
  rng.shuffle(ids);

  const std::size_t n = ids.size();
  std::size_t sizes[3] = {static_cast<std::size_t>(std::floor(spec.train * static_cast<double>(n))),
                          static_cast<std::size_t>(std::floor(spec.val * static_cast<double>(n))),
                          static_cast<std::size_t>(std::floor(spec.test * static_cast<double>(n)))};
  std::size_t rem = n - (sizes[0] + sizes[1] + sizes[2]);
  for (std::size_t k = 0; k < 3 && rem > 0; ++k, --rem) sizes[k] += 1;

  Split out;
  out.train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(sizes[0]));
  out.val.assign(ids.begin() + static_cast<std::ptrdiff_t>(sizes[0]),
                 ids.begin() + static_cast<std::ptrdiff_t>(sizes[0] + sizes[1]));
  out.test.assign(ids.begin() + static_cast<std::ptrdiff_t>(sizes[0] + sizes[1]), ids.end());
  return out;
}

// --- metadata normalization --------------------------------------------------

struct MetadataNormalizer {
  Vec mean;  // per column, computed after any log1p transform
  Vec sd;    // population sd; 0 marks a zero-variance column
  std::vector<std::size_t> count_columns;

  std::size_t dim() const { return mean.size(); }
};

inline double normalizer_raw_value(const MetadataNormalizer& nz, std::size_t col, double x) {
  const bool is_count =
      std::find(nz.count_columns.begin(), nz.count_columns.end(), col) != nz.count_columns.end();
  if (is_count) {
    if (x < 0.0) throw Error("count-flagged metadata column " + std::to_string(col) +
                             " has negative value " + fmt_g17(x));
    return std::log1p(x);
  }
  return x;
}

inline MetadataNormalizer fit_metadata_normalizer(const SocialDataset& ds,
                                                  std::span<const std::size_t> ids) {
  if (ds.metadata_dim == 0) throw Error("fit_metadata_normalizer: dataset has no metadata");
  if (ids.empty()) throw Error("fit_metadata_normalizer: empty id set");
  MetadataNormalizer nz;
  nz.count_columns = ds.metadata_count_columns;
  nz.mean.assign(ds.metadata_dim, 0.0);
  nz.sd.assign(ds.metadata_dim, 0.0);
  const double n = static_cast<double>(ids.size());
  for (std::size_t col = 0; col < ds.metadata_dim; ++col) {
    double s = 0.0;
    for (std::size_t id : ids) s += normalizer_raw_value(nz, col, ds.users[id].metadata_vec[col]);
    const double mean = s / n;
    double ss = 0.0;
    for (std::size_t id : ids) {
      const double d = normalizer_raw_value(nz, col, ds.users[id].metadata_vec[col]) - mean;
      ss += d * d;
    }
    nz.mean[col] = mean;
    nz.sd[col] = std::sqrt(ss / n);
  }
  return nz;
}

inline Vec apply_normalizer(const MetadataNormalizer& nz, std::span<const double> metadata) {
  if (metadata.size() != nz.dim())
    throw ShapeError("apply_normalizer: metadata has length " + std::to_string(metadata.size()) +
                     ", normalizer expects " + std::to_string(nz.dim()));
  Vec out(metadata.size());
  for (std::size_t col = 0; col < metadata.size(); ++col) {
    if (nz.sd[col] == 0.0) {
      out[col] = 0.0;
    } else {
      out[col] = (normalizer_raw_value(nz, col, metadata[col]) - nz.mean[col]) / nz.sd[col];
    }
  }
  return out;
}

inline void apply_normalizer(const MetadataNormalizer& nz, std::vector<UserRecord>& users) {
  for (auto& u : users) u.metadata_vec = apply_normalizer(nz, u.metadata_vec);
}

// --- summary -----------------------------------------------------------------

struct DatasetSummary {
  std::size_t n_users = 0;
  std::size_t n_labeled = 0;
  std::vector<std::pair<std::string, std::size_t>> edges_per_type;
  std::map<int, std::size_t> label_balance;  // classification only
  LabelSpec label_spec;

  std::string to_string() const {
    std::string s = "users: " + std::to_string(n_users) + " (" + std::to_string(n_labeled) +
                    " labeled)\n";
    for (const auto& [name, count] : edges_per_type)
      s += "edges[" + name + "]: " + std::to_string(count) + "\n";
    if (label_spec.kind == LabelKind::kClassification) {
      s += "label balance:";
      for (const auto& [cls, count] : label_balance)
        s += " " + std::to_string(cls) + ":" + std::to_string(count);
      s += "\n";
    } else {
      s += "regression outputs: " + std::to_string(label_spec.n_outputs) + "\n";
    }
    return s;
  }
};

inline DatasetSummary dataset_summary(const SocialDataset& ds) {
  DatasetSummary s;
  s.n_users = ds.users.size();
  s.label_spec = ds.label_spec;
  std::vector<std::size_t> per_type(ds.edge_types.size(), 0);
  for (const auto& e : ds.edges) per_type[e.edge_type] += 1;
  for (std::size_t t = 0; t < per_type.size(); ++t)
    s.edges_per_type.emplace_back(ds.edge_types.name(t), per_type[t]);
  for (const auto& u : ds.users) {
    if (!u.label.has_value()) continue;
    s.n_labeled += 1;
    if (u.label->kind == LabelKind::kClassification) s.label_balance[u.label->class_index] += 1;
  }
  return s;
}

}  // namespace sllm
