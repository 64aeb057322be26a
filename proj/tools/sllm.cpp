// Command-line front end: dataset synthesis, representation training,
// inductive embedding, head evaluation, ablation grids, gradient checks and
// 2-D projection. Progress goes to stderr; machine-readable results go to
// files under --out.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sllm/checkpoint.hpp"
#include "sllm/config.hpp"
#include "sllm/embedding_io.hpp"
#include "sllm/model_gradcheck.hpp"
#include "sllm/pca.hpp"
#include "sllm/sllm.hpp"
#include "sllm/svg.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 42;
  std::string out = ".";
  std::size_t jobs = 1;
};

struct CommandContext {
  sllm::RunConfig cfg;
  CommonArgs common;
};

// Registers --config/--seed/--out/--jobs plus one override flag per schema
// key, so `--help` lists every key with its default.
void add_common_options(CLI::App* cmd, CommonArgs& common,
                        std::map<std::string, std::string>& overrides) {
  cmd->add_option("--config", common.config_path, "key-value config file");
  cmd->add_option("--seed", common.seed, "global random seed")->capture_default_str();
  cmd->add_option("--out", common.out, "output directory")->capture_default_str();
  cmd->add_option("--jobs", common.jobs, "parallel per-seed workers")->capture_default_str();
  for (const auto& entry : sllm::config_schema()) {
    cmd->add_option_function<std::string>(
           std::string("--") + entry.key,
           [&overrides, key = std::string(entry.key)](const std::string& v) { overrides[key] = v; },
           std::string(entry.help) + " [" + entry.default_value + "]")
        ->group("Config keys");
  }
}

sllm::RunConfig resolve_config(const CommonArgs& common,
                               const std::map<std::string, std::string>& overrides) {
  sllm::RunConfig cfg;
  if (!common.config_path.empty()) cfg.load_file(common.config_path);
  for (const auto& [k, v] : overrides) cfg.set(k, v);
  return cfg;
}

fs::path out_path(const CommonArgs& common, const std::string& name) {
  fs::create_directories(common.out);
  return fs::path(common.out) / name;
}

void log_line(const std::string& s) { std::cerr << s << "\n"; }

// --- subcommands -----------------------------------------------------------------

int cmd_synth(const CommandContext& ctx) {
  const sllm::SynthConfig synth = sllm::build_synth_config(ctx.cfg, ctx.common.seed);
  const std::string mode = ctx.cfg.get("synth.mode");
  sllm::SocialDataset ds;
  if (mode == "sbm") {
    ds = sllm::generate_sbm_dataset(synth);
  } else if (mode == "direction") {
    ds = sllm::generate_direction_signal_dataset(synth);
  } else {
    throw sllm::ConfigError("synth.mode must be sbm or direction, got '" + mode + "'");
  }
  sllm::save_dataset(ds, out_path(ctx.common, "edges.tsv"), out_path(ctx.common, "features.csv"),
                     out_path(ctx.common, "labels.tsv"));
  log_line("synth: wrote dataset to " + ctx.common.out);
  std::cerr << sllm::dataset_summary(ds).to_string();
  return 0;
}

sllm::SocialDataset load_configured_dataset(const sllm::RunConfig& cfg) {
  const std::string edges = cfg.get("data.edges");
  const std::string features = cfg.get("data.features");
  if (edges.empty() || features.empty())
    throw sllm::ConfigError("data.edges and data.features are required");
  return sllm::load_dataset(edges, features, cfg.get("data.labels"),
                            sllm::build_load_config(cfg));
}

int cmd_train(const CommandContext& ctx) {
  sllm::SocialDataset ds = load_configured_dataset(ctx.cfg);
  std::cerr << sllm::dataset_summary(ds).to_string();

  std::optional<sllm::MetadataNormalizer> normalizer;
  if (ds.metadata_dim > 0) {
    std::vector<std::size_t> all(ds.users.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    normalizer = sllm::fit_metadata_normalizer(ds, all);
    sllm::apply_normalizer(*normalizer, ds.users);
  }

  const sllm::RepresentationConfig rep = sllm::build_rep_config(ctx.cfg);
  const sllm::TrainConfig train_cfg = sllm::build_train_config(ctx.cfg, ctx.common.seed);
  const sllm::TrainResult result = sllm::train(ds, rep, train_cfg);
  for (std::size_t e = 0; e < result.history.train_loss.size(); ++e) {
    std::string line = "epoch " + std::to_string(e) +
                       " train_loss=" + sllm::fmt_g17(result.history.train_loss[e]);
    if (e < result.history.val_loss.size())
      line += " val_loss=" + sllm::fmt_g17(result.history.val_loss[e]);
    log_line(line);
  }
  log_line("best epoch: " + std::to_string(result.history.best_epoch));

  sllm::Checkpoint ckpt;
  ckpt.rep = rep;
  ckpt.rep.content_dim = ds.content_dim;
  ckpt.rep.metadata_dim = ds.metadata_dim;
  ckpt.rep.tweet_dim = ds.tweet_dim;
  ckpt.train_config = train_cfg;
  ckpt.relations = result.relations;
  ckpt.registry_names = ds.edge_types.names();
  ckpt.normalizer = normalizer;
  ckpt.history = result.history;
  ckpt.params = result.params;
  const fs::path path = out_path(ctx.common, "model.ckpt");
  sllm::save_checkpoint(path, ckpt);
  log_line("train: wrote " + path.string());
  return 0;
}

int cmd_embed(const CommandContext& ctx) {
  const std::string ckpt_path = ctx.cfg.get("embed.checkpoint");
  const std::string features = ctx.cfg.get("embed.features");
  if (ckpt_path.empty() || features.empty())
    throw sllm::ConfigError("embed.checkpoint and embed.features are required");
  const sllm::Checkpoint ckpt = sllm::load_checkpoint(ckpt_path);
  sllm::SocialDataset users = sllm::load_features(features, ctx.cfg.get("embed.manifest"));
  if (ckpt.normalizer.has_value()) {
    for (auto& u : users.users) u.metadata_vec = sllm::apply_normalizer(*ckpt.normalizer, u.metadata_vec);
  }
  const sllm::EmbeddingMatrix em = sllm::embed_users(ckpt.params, users.users);
  const fs::path path = out_path(ctx.common, "embeddings.csv");
  sllm::export_embeddings(em, path);
  log_line("embed: wrote " + path.string() + " (" + std::to_string(em.user_ids.size()) +
           " users, d=" + std::to_string(em.values.cols()) + ")");
  return 0;
}

int cmd_eval(const CommandContext& ctx) {
  const std::string ckpt_path = ctx.cfg.get("eval.checkpoint");
  if (ckpt_path.empty()) throw sllm::ConfigError("eval.checkpoint is required");
  const sllm::Checkpoint ckpt = sllm::load_checkpoint(ckpt_path);
  sllm::SocialDataset ds = load_configured_dataset(ctx.cfg);
  if (ds.labeled_user_indices().size() < 20)
    throw sllm::Error("eval: need at least 20 labeled users");

  // Embeddings come from the fixed checkpoint; its stored normalizer feeds
  // the representation module, per-seed train statistics feed the head.
  std::vector<sllm::UserRecord> ckpt_users = ds.users;
  if (ckpt.normalizer.has_value())
    for (auto& u : ckpt_users) u.metadata_vec = sllm::apply_normalizer(*ckpt.normalizer, u.metadata_vec);
  const sllm::EmbeddingMatrix emb = sllm::embed_users(ckpt.params, ckpt_users);

  const sllm::HeadConfig head_cfg = sllm::build_head_config(ctx.cfg);
  const sllm::ExperimentConfig exp = sllm::build_experiment_config(ctx.cfg, ctx.common.jobs);
  const sllm::InputComposition comp = sllm::parse_composition(ctx.cfg.get("head.inputs"));
  const sllm::HeadTargets targets = sllm::HeadTargets::from_dataset(ds);

  sllm::MetricsReport report;
  report.metric_name =
      ds.label_spec.kind == sllm::LabelKind::kClassification ? "macro_f1" : "mean_pearson";
  report.seeds = exp.seeds;
  for (const std::uint64_t seed : exp.seeds) {
    sllm::SplitSpec split_spec{seed, exp.train_fraction, exp.val_fraction, exp.test_fraction};
    const sllm::Split split = sllm::split_users(ds, split_spec);
    std::vector<sllm::UserRecord> users = ds.users;
    if (ds.metadata_dim > 0) {
      const auto nz = sllm::fit_metadata_normalizer(ds, split.train);
      sllm::apply_normalizer(nz, users);
    }
    const sllm::Matrix inputs = sllm::detail::compose_inputs(ds, users, &emb, comp);
    sllm::HeadConfig hcfg = head_cfg;
    hcfg.seed = sllm::derive_seed(seed, "head");
    const sllm::HeadModel head = sllm::train_head(inputs, targets, split.train, split.val, hcfg);

    if (targets.task == sllm::LabelKind::kClassification) {
      std::vector<int> pred, actual;
      for (std::size_t id : split.test) {
        pred.push_back(sllm::predict_class(head, inputs.row(id)));
        actual.push_back(targets.class_of_row[id]);
      }
      const auto f1 = sllm::macro_f1_detailed(pred, actual, targets.n_outputs);
      report.per_seed.push_back(f1.macro_f1);
      report.per_seed_breakdown.push_back(f1.per_class_f1);
    } else {
      sllm::Matrix pred(split.test.size(), targets.n_outputs),
          actual(split.test.size(), targets.n_outputs);
      for (std::size_t r = 0; r < split.test.size(); ++r) {
        const sllm::Vec v = sllm::predict_values(head, inputs.row(split.test[r]));
        for (std::size_t l = 0; l < targets.n_outputs; ++l) {
          pred(r, l) = v[l];
          actual(r, l) = targets.values_of_row(split.test[r], l);
        }
      }
      const auto pr = sllm::mean_pearson_detailed(pred, actual);
      report.per_seed.push_back(pr.mean);
      report.per_seed_breakdown.push_back(pr.per_label);
    }
    log_line("eval: seed " + std::to_string(seed) + " " + report.metric_name + "=" +
             sllm::fmt_g17(report.per_seed.back()));
  }
  report.aggregate();

  std::vector<sllm::GridCell> cells(1);
  cells[0].label = comp.label();
  cells[0].report = report;
  sllm::write_file_atomic(out_path(ctx.common, "metrics.csv"), sllm::metrics_table_csv(cells));
  sllm::write_file_atomic(out_path(ctx.common, "summary.txt"), sllm::metrics_summary_text(cells));
  log_line("eval: wrote metrics.csv and summary.txt to " + ctx.common.out);
  std::cout << sllm::metrics_summary_text(cells);
  return 0;
}

int cmd_experiment(const CommandContext& ctx) {
  sllm::SocialDataset ds = load_configured_dataset(ctx.cfg);
  const sllm::RepresentationConfig rep = sllm::build_rep_config(ctx.cfg);
  const sllm::TrainConfig train_cfg = sllm::build_train_config(ctx.cfg, ctx.common.seed);
  const sllm::HeadConfig head_cfg = sllm::build_head_config(ctx.cfg);
  const sllm::ExperimentConfig exp = sllm::build_experiment_config(ctx.cfg, ctx.common.jobs);
  const std::vector<sllm::VariantSpec> grid = sllm::build_variant_grid(ctx.cfg);

  log_line("experiment: " + std::to_string(grid.size()) + " variants x " +
           std::to_string(exp.seeds.size()) + " seeds");
  const auto cells = sllm::run_ablation_grid(ds, rep, train_cfg, head_cfg, exp, grid);
  sllm::write_file_atomic(out_path(ctx.common, "grid.csv"), sllm::metrics_table_csv(cells));
  sllm::write_file_atomic(out_path(ctx.common, "summary.txt"), sllm::metrics_summary_text(cells));
  log_line("experiment: wrote grid.csv and summary.txt to " + ctx.common.out);
  std::cout << sllm::metrics_summary_text(cells);
  return 0;
}

int cmd_gradcheck(const CommandContext& ctx) {
  const long cases = ctx.cfg.get_long("gradcheck.cases");
  const double tolerance = ctx.cfg.get_double("gradcheck.tolerance");
  if (cases < 1) throw sllm::ConfigError("gradcheck.cases must be positive");
  const auto battery = sllm::run_model_gradcheck_battery(static_cast<std::size_t>(cases),
                                                         tolerance, ctx.common.seed);
  bool all_pass = true;
  std::string report;
  for (const auto& c : battery) {
    all_pass = all_pass && c.report.pass;
    report += std::string(c.report.pass ? "PASS" : "FAIL") + " " + c.description +
              " max_rel_err=" + sllm::fmt_g17(c.report.max_rel_error) + "\n";
  }
  report += std::string("overall: ") + (all_pass ? "pass" : "fail") + "\n";
  sllm::write_file_atomic(out_path(ctx.common, "gradcheck.txt"), report);
  std::cout << report;
  return all_pass ? 0 : 2;
}

int cmd_project(const CommandContext& ctx) {
  const std::string emb_path = ctx.cfg.get("project.embeddings");
  if (emb_path.empty()) throw sllm::ConfigError("project.embeddings is required");
  const sllm::EmbeddingMatrix em = sllm::load_embeddings(emb_path);
  const sllm::Projection2D proj = sllm::pca_project(em);

  std::string csv = "user_id,p0,p1\n";
  for (std::size_t i = 0; i < proj.user_ids.size(); ++i)
    csv += proj.user_ids[i] + "," + sllm::fmt_g17(proj.coords(i, 0)) + "," +
           sllm::fmt_g17(proj.coords(i, 1)) + "\n";
  sllm::write_file_atomic(out_path(ctx.common, "projection.csv"), csv);

  sllm::ScatterLabels labels;
  const std::string labels_path = ctx.cfg.get("project.labels");
  if (!labels_path.empty()) {
    const std::string text = sllm::read_file(labels_path);
    std::map<std::string, std::string> label_of;
    for (const auto& raw : sllm::split(text, '\n')) {
      const std::string line = sllm::strip(raw);
      if (line.empty()) continue;
      const auto cells = sllm::split(line, '\t');
      if (cells.size() < 2) throw sllm::FormatError(labels_path + ": expected user_id<TAB>label");
      label_of[cells[0]] = cells[1];
    }
    const bool regression = ctx.cfg.get("data.label_kind") == "regression";
    if (regression) {
      labels.kind = sllm::ScatterLabels::Kind::kValue;
      for (const auto& id : proj.user_ids) {
        auto it = label_of.find(id);
        double v = 0.0;
        if (it != label_of.end() && !sllm::parse_double(it->second, v))
          throw sllm::FormatError(labels_path + ": bad value '" + it->second + "'");
        labels.values.push_back(v);
      }
    } else {
      labels.kind = sllm::ScatterLabels::Kind::kClass;
      long max_class = 0;
      for (const auto& id : proj.user_ids) {
        auto it = label_of.find(id);
        long c = 0;
        if (it != label_of.end() && !sllm::parse_long(it->second, c))
          throw sllm::FormatError(labels_path + ": bad class '" + it->second + "'");
        labels.classes.push_back(static_cast<int>(c));
        max_class = std::max(max_class, c);
      }
      labels.n_classes = static_cast<std::size_t>(max_class + 1);
    }
  } else {
    labels.kind = sllm::ScatterLabels::Kind::kClass;
    labels.classes.assign(proj.user_ids.size(), 0);
    labels.n_classes = proj.user_ids.empty() ? 0 : 1;
  }
  sllm::emit_scatter(proj, labels, out_path(ctx.common, "scatter.svg"));
  log_line("project: explained variance " + sllm::fmt_g17(proj.explained_variance[0]) + ", " +
           sllm::fmt_g17(proj.explained_variance[1]));
  log_line("project: wrote projection.csv and scatter.svg to " + ctx.common.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"social network user embedding toolkit"};
  app.require_subcommand(1);

  struct SubcommandSpec {
    const char* name;
    const char* help;
    int (*fn)(const CommandContext&);
  };
  const std::vector<SubcommandSpec> subs = {
      {"synth", "generate a synthetic homophilous dataset", cmd_synth},
      {"train", "train the user representation module on edges", cmd_train},
      {"embed", "embed users inductively from a checkpoint (no edges read)", cmd_embed},
      {"eval", "evaluate a checkpoint's embeddings over repeated label splits", cmd_eval},
      {"experiment", "run the repeated-split ablation grid with per-seed retraining",
       cmd_experiment},
      {"gradcheck", "verify analytic gradients against finite differences", cmd_gradcheck},
      {"project", "project embeddings to 2-D and render a scatter", cmd_project},
  };

  std::vector<CommonArgs> common(subs.size());
  std::vector<std::map<std::string, std::string>> overrides(subs.size());
  std::vector<CLI::App*> cmds;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(subs[i].name, subs[i].help);
    add_common_options(cmd, common[i], overrides[i]);
    cmds.push_back(cmd);
  }

  CLI11_PARSE(app, argc, argv);

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!cmds[i]->parsed()) continue;
    try {
      CommandContext ctx{resolve_config(common[i], overrides[i]), common[i]};
      return subs[i].fn(ctx);
    } catch (const sllm::ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 1;
    } catch (const sllm::FormatError& e) {
      std::cerr << "input error: " << e.what() << "\n";
      return 1;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  return 1;
}
