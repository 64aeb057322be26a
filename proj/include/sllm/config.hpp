#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sllm/errors.hpp"
#include "sllm/experiment.hpp"
#include "sllm/heads.hpp"
#include "sllm/model.hpp"
#include "sllm/synthgen.hpp"
#include "sllm/text.hpp"
#include "sllm/train.hpp"

namespace sllm {

struct ConfigSchemaEntry {
  const char* key;
  const char* default_value;
  const char* help;
};

// Every run option, namespaced section.key. The config file supplies values
// under [section] headers; command-line flags override file values.
inline const std::vector<ConfigSchemaEntry>& config_schema() {
  static const std::vector<ConfigSchemaEntry> schema = {
      {"synth.mode", "sbm", "generator: sbm | direction"},
      {"synth.n_users", "2000", "number of users"},
      {"synth.n_blocks", "2", "number of label blocks"},
      {"synth.p_in", "0.02", "within-block edge probability"},
      {"synth.p_out", "0.002", "cross-block edge probability"},
      {"synth.content_dim", "64", "content vector dimension"},
      {"synth.content_noise_sd", "1.0", "gaussian noise sd around block centroids"},
      {"synth.edge_types", "edge", "comma list, entries name[:p_in:p_out]"},
      {"synth.direction_signal", "0.8", "cross-block orientation bias in [0,1]"},
      {"synth.weight_law", "unit", "edge weights: unit | geometric:<p>"},

      {"data.edges", "", "edges file (tsv: src dst type weight)"},
      {"data.features", "", "features file (csv with sidecar manifest)"},
      {"data.labels", "", "labels file (tsv); empty for unlabeled"},
      {"data.manifest", "", "manifest path; default <features>.manifest"},
      {"data.label_kind", "classification", "classification | regression"},
      {"data.zero_fill_missing", "false", "zero-fill users missing feature rows"},
      {"data.min_edge_weight", "0", "drop merged edges below this weight; 0 disables"},

      {"rep.d", "256", "embedding dimension"},
      {"rep.content_layers", "", "content branch sizes, comma list; empty = single layer to d"},
      {"rep.metadata_layers", "", "metadata branch sizes; empty = d,d"},
      {"rep.tweet_layers", "", "tweet branch sizes; empty = d,d"},
      {"rep.use_metadata", "true", "attach the metadata branch when metadata exists"},
      {"rep.use_tweet", "true", "attach the tweet branch when tweet vectors exist"},

      {"train.batch_size", "64", "edges per contrastive batch"},
      {"train.epochs", "30", "maximum epochs"},
      {"train.patience", "3", "early-stop strikes on validation loss"},
      {"train.lr", "0.001", "Adam learning rate"},
      {"train.directed", "false", "separate source/target transforms"},
      {"train.weighted", "false", "weight examples by edge weight"},
      {"train.edge_type_mode", "merged", "merged | distinct | single:<type>"},
      {"train.val_edge_fraction", "0.1", "held-out edge fraction for validation"},
      {"train.tau_init", "20", "initial similarity scale"},
      {"train.tau_trainable", "true", "train the similarity scale"},

      {"head.hidden", "64", "hidden sizes, comma list; empty = linear"},
      {"head.epochs", "400", "maximum full-batch epochs"},
      {"head.lr", "0.01", "Adam learning rate"},
      {"head.patience", "30", "early-stop strikes on validation metric"},
      {"head.inputs", "emb,content", "features fed to the head: emb|content|meta|tweet"},

      {"experiment.seeds", "1,2,3,4,5,6,7,8,9,10", "split/run seeds"},
      {"experiment.fractions", "0.6,0.2,0.2", "train,val,test fractions"},
      {"experiment.edge_type_modes", "merged", "grid axis, comma list"},
      {"experiment.directed", "false", "grid axis, comma list of bools"},
      {"experiment.weighted", "false", "grid axis, comma list of bools"},
      {"experiment.inputs", "emb,content", "grid axis, compositions separated by ';'"},
      {"experiment.d_values", "", "grid axis, comma list of dimensions; empty = rep.d"},

      {"gradcheck.cases", "10", "number of random configurations"},
      {"gradcheck.tolerance", "0.0001", "max relative error allowed"},

      {"embed.checkpoint", "", "trained checkpoint path"},
      {"embed.features", "", "features file to embed"},
      {"embed.manifest", "", "manifest path; default <features>.manifest"},

      {"eval.checkpoint", "", "trained checkpoint path"},

      {"project.embeddings", "", "embedding csv to project"},
      {"project.labels", "", "labels tsv for coloring; optional"},
  };
  return schema;
}

class RunConfig {
 public:
  RunConfig() {
    for (const auto& e : config_schema()) values_[e.key] = e.default_value;
  }

  void set(const std::string& key, const std::string& value) {
    if (values_.find(key) == values_.end())
      throw ConfigError("unknown config key '" + key + "'");
    values_[key] = value;
  }

  // Sectioned key-value text: [section] headers, key = value lines, '#'
  // comments. Fully qualified section.key lines are accepted too.
  void load_file(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    std::string section;
    std::size_t lineno = 0;
    for (const auto& raw : split(text, '\n')) {
      ++lineno;
      const std::string line = strip(raw);
      if (line.empty() || line[0] == '#') continue;
      if (line.front() == '[' && line.back() == ']') {
        section = strip(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                          ": expected key = value");
      std::string key = strip(line.substr(0, eq));
      if (key.find('.') == std::string::npos && !section.empty()) key = section + "." + key;
      try {
        set(key, strip(line.substr(eq + 1)));
      } catch (const ConfigError&) {
        throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                          ": unknown config key '" + key + "'");
      }
    }
  }

  const std::string& get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
  }

  long get_long(const std::string& key) const {
    long v = 0;
    if (!parse_long(get(key), v))
      throw ConfigError("config key '" + key + "' expects an integer, got '" + get(key) + "'");
    return v;
  }

  double get_double(const std::string& key) const {
    double v = 0;
    if (!parse_double(get(key), v))
      throw ConfigError("config key '" + key + "' expects a number, got '" + get(key) + "'");
    return v;
  }

  bool get_bool(const std::string& key) const {
    const std::string& v = get(key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key '" + key + "' expects true/false, got '" + v + "'");
  }

  std::vector<std::string> get_list(const std::string& key, char sep = ',') const {
    std::vector<std::string> out;
    for (auto& tok : split(get(key), sep)) {
      const std::string t = strip(tok);
      if (!t.empty()) out.push_back(t);
    }
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
};

// --- typed builders ---------------------------------------------------------

inline std::vector<std::size_t> parse_size_list(const RunConfig& cfg, const std::string& key) {
  std::vector<std::size_t> out;
  for (const auto& tok : cfg.get_list(key)) {
    long v = 0;
    if (!parse_long(tok, v) || v <= 0)
      throw ConfigError("config key '" + key + "' expects positive integers, got '" + tok + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

inline SynthConfig build_synth_config(const RunConfig& cfg, std::uint64_t seed) {
  SynthConfig s;
  const long n_users = cfg.get_long("synth.n_users");
  const long n_blocks = cfg.get_long("synth.n_blocks");
  const long content_dim = cfg.get_long("synth.content_dim");
  if (n_users < 2) throw ConfigError("synth.n_users must be at least 2");
  if (n_blocks < 1) throw ConfigError("synth.n_blocks must be positive");
  if (content_dim < 1) throw ConfigError("synth.content_dim must be positive");
  s.n_users = static_cast<std::size_t>(n_users);
  s.n_blocks = static_cast<std::size_t>(n_blocks);
  s.p_in = cfg.get_double("synth.p_in");
  s.p_out = cfg.get_double("synth.p_out");
  s.content_dim = static_cast<std::size_t>(content_dim);
  s.content_noise_sd = cfg.get_double("synth.content_noise_sd");
  s.direction_signal = cfg.get_double("synth.direction_signal");
  s.seed = seed;
  s.edge_types.clear();
  for (const auto& tok : cfg.get_list("synth.edge_types")) {
    const auto parts = split(tok, ':');
    EdgeTypeSpec spec;
    spec.name = strip(parts[0]);
    if (parts.size() == 3) {
      double pi = 0, po = 0;
      if (!parse_double(parts[1], pi) || !parse_double(parts[2], po))
        throw ConfigError("synth.edge_types entry '" + tok + "' expects name:p_in:p_out");
      spec.p_in = pi;
      spec.p_out = po;
    } else if (parts.size() != 1) {
      throw ConfigError("synth.edge_types entry '" + tok + "' expects name or name:p_in:p_out");
    }
    s.edge_types.push_back(std::move(spec));
  }
  if (s.edge_types.empty()) throw ConfigError("synth.edge_types must list at least one type");
  const std::string law = cfg.get("synth.weight_law");
  if (law == "unit") {
    s.weight_law.kind = WeightLaw::Kind::kUnit;
  } else if (law.rfind("geometric:", 0) == 0) {
    double p = 0;
    if (!parse_double(law.substr(10), p) || !(p > 0.0) || p > 1.0)
      throw ConfigError("synth.weight_law geometric parameter must be in (0,1], got '" + law + "'");
    s.weight_law.kind = WeightLaw::Kind::kGeometric;
    s.weight_law.p = p;
  } else {
    throw ConfigError("synth.weight_law must be unit or geometric:<p>, got '" + law + "'");
  }
  return s;
}

inline LoadConfig build_load_config(const RunConfig& cfg) {
  LoadConfig lc;
  lc.zero_fill_missing = cfg.get_bool("data.zero_fill_missing");
  lc.min_edge_weight = cfg.get_double("data.min_edge_weight");
  const std::string kind = cfg.get("data.label_kind");
  if (kind == "classification") {
    lc.label_kind = LabelKind::kClassification;
  } else if (kind == "regression") {
    lc.label_kind = LabelKind::kRegression;
  } else {
    throw ConfigError("data.label_kind must be classification or regression, got '" + kind + "'");
  }
  lc.manifest_path = cfg.get("data.manifest");
  return lc;
}

inline RepresentationConfig build_rep_config(const RunConfig& cfg) {
  RepresentationConfig rep;
  const long d = cfg.get_long("rep.d");
  if (d < 1) throw ConfigError("rep.d must be positive");
  rep.d = static_cast<std::size_t>(d);
  rep.content_layers = parse_size_list(cfg, "rep.content_layers");
  rep.metadata_layers = parse_size_list(cfg, "rep.metadata_layers");
  rep.tweet_layers = parse_size_list(cfg, "rep.tweet_layers");
  rep.use_metadata = cfg.get_bool("rep.use_metadata");
  rep.use_tweet = cfg.get_bool("rep.use_tweet");
  return rep;
}

inline void parse_edge_type_mode(const std::string& text, EdgeTypeMode& mode,
                                 std::string& single_type) {
  if (text == "merged") {
    mode = EdgeTypeMode::kMerged;
  } else if (text == "distinct") {
    mode = EdgeTypeMode::kDistinct;
  } else if (text.rfind("single:", 0) == 0) {
    mode = EdgeTypeMode::kSingle;
    single_type = text.substr(7);
    if (single_type.empty()) throw ConfigError("edge type mode 'single:' needs a type name");
  } else {
    throw ConfigError("edge type mode must be merged, distinct or single:<type>, got '" + text +
                      "'");
  }
}

inline TrainConfig build_train_config(const RunConfig& cfg, std::uint64_t seed) {
  TrainConfig t;
  const long batch = cfg.get_long("train.batch_size");
  const long epochs = cfg.get_long("train.epochs");
  const long patience = cfg.get_long("train.patience");
  if (batch < 2) throw ConfigError("train.batch_size must be at least 2");
  if (epochs < 1) throw ConfigError("train.epochs must be positive");
  if (patience < 0) throw ConfigError("train.patience must be nonnegative");
  t.batch_size = static_cast<std::size_t>(batch);
  t.epochs = static_cast<std::size_t>(epochs);
  t.patience = static_cast<std::size_t>(patience);
  t.lr = cfg.get_double("train.lr");
  t.directed = cfg.get_bool("train.directed");
  t.weighted = cfg.get_bool("train.weighted");
  parse_edge_type_mode(cfg.get("train.edge_type_mode"), t.edge_type_mode, t.single_type);
  t.val_edge_fraction = cfg.get_double("train.val_edge_fraction");
  t.tau_init = cfg.get_double("train.tau_init");
  t.tau_trainable = cfg.get_bool("train.tau_trainable");
  t.seed = seed;
  check_train_config(t);
  return t;
}

inline InputComposition parse_composition(const std::string& text) {
  InputComposition comp{false, false, false, false};
  for (const auto& tok : split(text, ',')) {
    const std::string t = strip(tok);
    if (t == "emb") {
      comp.use_embedding = true;
    } else if (t == "content") {
      comp.use_content = true;
    } else if (t == "meta") {
      comp.use_metadata = true;
    } else if (t == "tweet") {
      comp.use_tweet = true;
    } else if (!t.empty()) {
      throw ConfigError("unknown head input '" + t + "' (expected emb|content|meta|tweet)");
    }
  }
  if (!comp.any()) throw ConfigError("head inputs select no features");
  return comp;
}

inline HeadConfig build_head_config(const RunConfig& cfg) {
  HeadConfig h;
  h.hidden = parse_size_list(cfg, "head.hidden");
  const long epochs = cfg.get_long("head.epochs");
  const long patience = cfg.get_long("head.patience");
  if (epochs < 1) throw ConfigError("head.epochs must be positive");
  if (patience < 0) throw ConfigError("head.patience must be nonnegative");
  h.epochs = static_cast<std::size_t>(epochs);
  h.patience = static_cast<std::size_t>(patience);
  h.lr = cfg.get_double("head.lr");
  return h;
}

inline ExperimentConfig build_experiment_config(const RunConfig& cfg, std::size_t jobs) {
  ExperimentConfig e;
  e.seeds.clear();
  for (const auto& tok : cfg.get_list("experiment.seeds")) {
    long v = 0;
    if (!parse_long(tok, v) || v < 0)
      throw ConfigError("experiment.seeds expects nonnegative integers, got '" + tok + "'");
    e.seeds.push_back(static_cast<std::uint64_t>(v));
  }
  if (e.seeds.empty()) throw ConfigError("experiment.seeds must list at least one seed");
  const auto fracs = cfg.get_list("experiment.fractions");
  if (fracs.size() != 3) throw ConfigError("experiment.fractions expects train,val,test");
  double f[3];
  for (int i = 0; i < 3; ++i)
    if (!parse_double(fracs[static_cast<std::size_t>(i)], f[i]))
      throw ConfigError("experiment.fractions entry '" + fracs[static_cast<std::size_t>(i)] +
                        "' is not a number");
  e.train_fraction = f[0];
  e.val_fraction = f[1];
  e.test_fraction = f[2];
  e.jobs = jobs;
  return e;
}

// Cross product of the configured grid axes.
inline std::vector<VariantSpec> build_variant_grid(const RunConfig& cfg) {
  const auto modes = cfg.get_list("experiment.edge_type_modes");
  const auto directed = cfg.get_list("experiment.directed");
  const auto weighted = cfg.get_list("experiment.weighted");
  const auto compositions = cfg.get_list("experiment.inputs", ';');
  auto d_values = cfg.get_list("experiment.d_values");
  if (modes.empty() || directed.empty() || weighted.empty() || compositions.empty())
    throw ConfigError("experiment grid axes must be nonempty");
  if (d_values.empty()) d_values.push_back("0");

  auto parse_flag = [](const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError("grid flag must be true/false, got '" + s + "'");
  };

  std::vector<VariantSpec> grid;
  for (const auto& mode_text : modes)
    for (const auto& dir : directed)
      for (const auto& w : weighted)
        for (const auto& comp : compositions)
          for (const auto& dv : d_values) {
            VariantSpec v;
            parse_edge_type_mode(mode_text, v.edge_type_mode, v.single_type);
            v.directed = parse_flag(dir);
            v.weighted = parse_flag(w);
            v.inputs = parse_composition(comp);
            long d = 0;
            if (!parse_long(dv, d) || d < 0)
              throw ConfigError("experiment.d_values expects integers, got '" + dv + "'");
            v.d = static_cast<std::size_t>(d);
            grid.push_back(std::move(v));
          }
  return grid;
}

}  // namespace sllm
