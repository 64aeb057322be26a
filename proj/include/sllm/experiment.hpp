#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "sllm/dataset.hpp"
#include "sllm/heads.hpp"
#include "sllm/metrics.hpp"
#include "sllm/model.hpp"
#include "sllm/text.hpp"
#include "sllm/train.hpp"

namespace sllm {

struct InputComposition {
  bool use_embedding = true;
  bool use_content = false;
  bool use_metadata = false;
  bool use_tweet = false;

  bool any() const { return use_embedding || use_content || use_metadata || use_tweet; }

  std::string label() const {
    std::string s;
    auto add = [&](bool on, const char* n) {
      if (!on) return;
      if (!s.empty()) s += "+";
      s += n;
    };
    add(use_embedding, "emb");
    add(use_content, "content");
    add(use_metadata, "meta");
    add(use_tweet, "tweet");
    return s;
  }
};

// One grid cell: which edges the step-1 model trains on and what the head sees.
struct VariantSpec {
  EdgeTypeMode edge_type_mode = EdgeTypeMode::kMerged;
  std::string single_type;
  bool directed = false;
  bool weighted = false;
  InputComposition inputs;
  std::size_t d = 0;  // 0 keeps the RepresentationConfig default
};

struct ExperimentConfig {
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double train_fraction = 0.6;
  double val_fraction = 0.2;
  double test_fraction = 0.2;
  std::size_t jobs = 1;
};

namespace detail {

inline Matrix compose_inputs(const SocialDataset& ds, const std::vector<UserRecord>& users,
                             const EmbeddingMatrix* emb, const InputComposition& comp) {
  std::size_t dim = 0;
  if (comp.use_embedding) {
    if (!emb) throw Error("composition uses embeddings but none were computed");
    dim += emb->values.cols();
  }
  if (comp.use_content) dim += ds.content_dim;
  if (comp.use_metadata) dim += ds.metadata_dim;
  if (comp.use_tweet) dim += ds.tweet_dim;
  if (dim == 0) throw ConfigError("input composition selects no features");

  Matrix x(users.size(), dim);
  for (std::size_t i = 0; i < users.size(); ++i) {
    auto row = x.row(i);
    std::size_t off = 0;
    auto put = [&](std::span<const double> part) {
      std::copy(part.begin(), part.end(), row.begin() + static_cast<std::ptrdiff_t>(off));
      off += part.size();
    };
    if (comp.use_embedding) put(emb->values.row(i));
    if (comp.use_content) put(users[i].content_vec);
    if (comp.use_metadata) put(users[i].metadata_vec);
    if (comp.use_tweet) put(users[i].tweet_vec);
  }
  return x;
}

struct SeedRunResult {
  double metric = 0.0;
  Vec breakdown;
};

// One full repeat: split, per-seed step-1 training on the full edge set
// (splits apply to labels only), inductive embedding, head training with
// validation-metric selection, test-set evaluation.
inline SeedRunResult run_one_seed(const SocialDataset& ds, const RepresentationConfig& rep,
                                  const TrainConfig& train_cfg, const HeadConfig& head_cfg,
                                  const ExperimentConfig& exp, const VariantSpec& variant,
                                  std::uint64_t seed) {
  SplitSpec split_spec;
  split_spec.seed = seed;
  split_spec.train = exp.train_fraction;
  split_spec.val = exp.val_fraction;
  split_spec.test = exp.test_fraction;
  const Split split = split_users(ds, split_spec);

  // Metadata normalization fits on train-set statistics only.
  std::vector<UserRecord> users = ds.users;
  if (ds.metadata_dim > 0) {
    const MetadataNormalizer nz = fit_metadata_normalizer(ds, split.train);
    apply_normalizer(nz, users);
  }

  EmbeddingMatrix emb;
  const EmbeddingMatrix* emb_ptr = nullptr;
  if (variant.inputs.use_embedding) {
    SocialDataset working = ds;
    working.users = users;
    RepresentationConfig rep_v = rep;
    if (variant.d > 0) rep_v.d = variant.d;
    TrainConfig tcfg = train_cfg;
    tcfg.directed = variant.directed;
    tcfg.weighted = variant.weighted;
    tcfg.edge_type_mode = variant.edge_type_mode;
    tcfg.single_type = variant.single_type;
    tcfg.seed = derive_seed(seed, "step1");
    const TrainResult trained = train(working, rep_v, tcfg);
    emb = embed_users(trained.params, working.users);
    emb_ptr = &emb;
  }

  const Matrix inputs = compose_inputs(ds, users, emb_ptr, variant.inputs);
  const HeadTargets targets = HeadTargets::from_dataset(ds);
  HeadConfig hcfg = head_cfg;
  hcfg.seed = derive_seed(seed, "head");
  const HeadModel head = train_head(inputs, targets, split.train, split.val, hcfg);

  SeedRunResult out;
  if (targets.task == LabelKind::kClassification) {
    std::vector<int> pred, actual;
    for (std::size_t id : split.test) {
      pred.push_back(predict_class(head, inputs.row(id)));
      actual.push_back(targets.class_of_row[id]);
    }
    const MacroF1Result f1 = macro_f1_detailed(pred, actual, targets.n_outputs);
    out.metric = f1.macro_f1;
    out.breakdown = f1.per_class_f1;
  } else {
    Matrix pred(split.test.size(), targets.n_outputs), actual(split.test.size(), targets.n_outputs);
    for (std::size_t r = 0; r < split.test.size(); ++r) {
      const Vec v = predict_values(head, inputs.row(split.test[r]));
      for (std::size_t l = 0; l < targets.n_outputs; ++l) {
        pred(r, l) = v[l];
        actual(r, l) = targets.values_of_row(split.test[r], l);
      }
    }
    const PearsonResult pr = mean_pearson_detailed(pred, actual);
    out.metric = pr.mean;
    out.breakdown = pr.per_label;
  }
  return out;
}

}  // namespace detail

// Repeats the train/eval procedure over the configured seeds and aggregates.
// Seeds are independent; `jobs` bounds worker threads and the fold over
// results always runs in seed order.
inline MetricsReport run_experiment(const SocialDataset& ds, const RepresentationConfig& rep,
                                    const TrainConfig& train_cfg, const HeadConfig& head_cfg,
                                    const ExperimentConfig& exp, const VariantSpec& variant) {
  if (exp.seeds.empty()) throw ConfigError("experiment: at least one seed required");
  if (ds.labeled_user_indices().size() < 20)
    throw Error("experiment: need at least 20 labeled users");

  std::vector<detail::SeedRunResult> results(exp.seeds.size());
  std::vector<std::exception_ptr> errors(exp.seeds.size());

  const std::size_t jobs = std::max<std::size_t>(1, exp.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < exp.seeds.size(); ++i)
      results[i] = detail::run_one_seed(ds, rep, train_cfg, head_cfg, exp, variant, exp.seeds[i]);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= exp.seeds.size()) return;
        try {
          results[i] =
              detail::run_one_seed(ds, rep, train_cfg, head_cfg, exp, variant, exp.seeds[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(jobs, exp.seeds.size()); ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  MetricsReport report;
  report.metric_name =
      ds.label_spec.kind == LabelKind::kClassification ? "macro_f1" : "mean_pearson";
  report.seeds = exp.seeds;
  for (const auto& r : results) {
    report.per_seed.push_back(r.metric);
    report.per_seed_breakdown.push_back(r.breakdown);
  }
  report.aggregate();
  return report;
}

struct GridCell {
  std::string label;
  VariantSpec variant;
  MetricsReport report;
};

// Labels follow the ablation-table convention: the edge-mode part when edge
// modes vary, "+d"/"+w" suffixes when direction/weight vary ("base" when both
// are off), then input composition and dimension parts when those axes vary.
inline std::string variant_label(const VariantSpec& v, bool modes_vary, bool flags_vary,
                                 bool inputs_vary, bool d_vary) {
  std::string label;
  if (modes_vary || (!flags_vary && !inputs_vary && !d_vary)) {
    label = v.edge_type_mode == EdgeTypeMode::kSingle ? v.single_type
                                                      : edge_type_mode_name(v.edge_type_mode);
  }
  if (flags_vary) {
    std::string flags;
    if (v.directed) flags += "+d";
    if (v.weighted) flags += "+w";
    if (flags.empty() && label.empty()) flags = "base";
    label += flags;
  }
  if (inputs_vary) {
    if (!label.empty()) label += "|";
    label += v.inputs.label();
  }
  if (d_vary) {
    if (!label.empty()) label += "|";
    label += "d=" + std::to_string(v.d);
  }
  return label;
}

// Runs every grid cell through run_experiment and emits a labeled table.
inline std::vector<GridCell> run_ablation_grid(const SocialDataset& ds,
                                               const RepresentationConfig& rep,
                                               const TrainConfig& train_cfg,
                                               const HeadConfig& head_cfg,
                                               const ExperimentConfig& exp,
                                               const std::vector<VariantSpec>& grid) {
  if (grid.empty()) throw ConfigError("experiment: variant grid is empty");
  bool modes_vary = false, flags_vary = false, inputs_vary = false, d_vary = false;
  for (const auto& v : grid) {
    if (v.edge_type_mode != grid[0].edge_type_mode || v.single_type != grid[0].single_type)
      modes_vary = true;
    if (v.directed != grid[0].directed || v.weighted != grid[0].weighted) flags_vary = true;
    if (v.inputs.label() != grid[0].inputs.label()) inputs_vary = true;
    if (v.d != grid[0].d) d_vary = true;
  }
  std::vector<GridCell> cells;
  for (const auto& v : grid) {
    GridCell cell;
    cell.label = variant_label(v, modes_vary, flags_vary, inputs_vary, d_vary);
    cell.variant = v;
    cell.report = run_experiment(ds, rep, train_cfg, head_cfg, exp, v);
    cells.push_back(std::move(cell));
  }
  return cells;
}

// --- result emission -----------------------------------------------------------

// Machine-readable long format: variant,seed,metric,value. Aggregates use the
// pseudo-seeds "mean" and "sd".
inline std::string metrics_table_csv(const std::vector<GridCell>& cells) {
  std::string out = "variant,seed,metric,value\n";
  for (const auto& cell : cells) {
    const auto& r = cell.report;
    for (std::size_t i = 0; i < r.per_seed.size(); ++i) {
      out += cell.label + "," + std::to_string(r.seeds[i]) + "," + r.metric_name + "," +
             fmt_g17(r.per_seed[i]) + "\n";
      for (std::size_t k = 0; k < r.per_seed_breakdown[i].size(); ++k)
        out += cell.label + "," + std::to_string(r.seeds[i]) + "," + r.metric_name + "_" +
               std::to_string(k) + "," + fmt_g17(r.per_seed_breakdown[i][k]) + "\n";
    }
    out += cell.label + ",mean," + r.metric_name + "," + fmt_g17(r.mean) + "\n";
    out += cell.label + ",sd," + r.metric_name + "," + fmt_g17(r.sd) + "\n";
  }
  return out;
}

inline std::string metrics_summary_text(const std::vector<GridCell>& cells) {
  std::string out;
  for (const auto& cell : cells) {
    const auto& r = cell.report;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-28s %s = %.4f +/- %.4f over %zu seeds\n",
                  cell.label.c_str(), r.metric_name.c_str(), r.mean, r.sd, r.per_seed.size());
    out += buf;
  }
  return out;
}

}  // namespace sllm
