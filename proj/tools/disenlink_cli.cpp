// Command-line front end: train | eval | baseline | ablate | sweep |
// homophily | corr | split. Flags mirror the hyperparameter names; a flat
// JSON config file may supply defaults, with precedence
// flags > config file > built-ins. Every run writes a config snapshot that
// is sufficient to replay it bit-exactly.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "disenlink/checkpoint.hpp"
#include "disenlink/datagen.hpp"
#include "disenlink/errors.hpp"
#include "disenlink/experiments.hpp"
#include "disenlink/graph.hpp"
#include "disenlink/heuristics.hpp"
#include "disenlink/metrics.hpp"
#include "disenlink/split.hpp"
#include "disenlink/trainer.hpp"

namespace {

using nlohmann::json;
using namespace disenlink;

constexpr const char* kVersion = "disenlink 0.1.0";

struct RunConfig {
  std::string dataset_dir;
  std::string out_dir = "runs";
  std::string split_file;
  std::string checkpoint;
  std::string which = "test";
  std::string axis = "beta";
  std::string values;
  std::string variant = "full";
  std::vector<double> ratios{0.85, 0.05, 0.10};
  int neg_multiplier = 5;
  int n_seeds = 5;
  Hyperparams hp;
};

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("io_error", "cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail("parse_error", "config file " + path + ": " + e.what());
  }
  if (!j.is_object()) fail("parse_error", "config file must hold a flat JSON object");
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("dataset_dir", cfg.dataset_dir);
  get("out_dir", cfg.out_dir);
  get("split_file", cfg.split_file);
  get("checkpoint", cfg.checkpoint);
  get("which", cfg.which);
  get("axis", cfg.axis);
  get("values", cfg.values);
  get("variant", cfg.variant);
  get("neg_multiplier", cfg.neg_multiplier);
  get("seeds", cfg.n_seeds);
  if (j.contains("ratios")) cfg.ratios = j.at("ratios").get<std::vector<double>>();
  get("factors", cfg.hp.factors);
  get("dim", cfg.hp.embed_dim);
  get("hidden", cfg.hp.hidden);
  get("tau", cfg.hp.tau);
  get("beta", cfg.hp.beta);
  get("neg_m", cfg.hp.train_negatives);
  get("epochs", cfg.hp.max_epochs);
  get("eval_every", cfg.hp.eval_every);
  get("patience", cfg.hp.patience);
  get("lr", cfg.hp.lr);
  get("weight_decay", cfg.hp.weight_decay);
  get("seed", cfg.hp.seed);
  get("normalize_features", cfg.hp.normalize_features);
  get("use_bias", cfg.hp.use_bias);
}

void add_hyperparam_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--factors", cfg.hp.factors, "Number of latent factors K");
  cmd->add_option("--dim", cfg.hp.embed_dim, "Per-factor embedding width d");
  cmd->add_option("--hidden", cfg.hp.hidden, "Projection MLP hidden width (0 = 2*dim)");
  cmd->add_option("--tau", cfg.hp.tau, "Softmax temperature");
  cmd->add_option("--beta", cfg.hp.beta, "Teleport weight on the centre node");
  cmd->add_option("--neg-m", cfg.hp.train_negatives, "Training negatives per positive");
  cmd->add_option("--epochs", cfg.hp.max_epochs, "Maximum training epochs");
  cmd->add_option("--eval-every", cfg.hp.eval_every, "Validation cadence in epochs");
  cmd->add_option("--patience", cfg.hp.patience, "Evaluations without improvement before stop");
  cmd->add_option("--lr", cfg.hp.lr, "Learning rate");
  cmd->add_option("--weight-decay", cfg.hp.weight_decay, "L2 weight decay");
  cmd->add_option("--seed", cfg.hp.seed, "Base seed for the run");
  cmd->add_option("--variant", cfg.variant,
                  "Pipeline variant: full|no-alpha|no-selection|vanilla-recon");
  cmd->add_flag("--normalize-features", cfg.hp.normalize_features,
                "Row L2-normalize input features");
  cmd->add_flag("--use-bias", cfg.hp.use_bias, "Bias terms in the projection MLPs");
}

void add_split_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--ratios", cfg.ratios, "Train/valid/test ratios")->expected(3);
  cmd->add_option("--neg-multiplier", cfg.neg_multiplier,
                  "Evaluation negatives per positive");
}

std::array<double, 3> ratio_array(const RunConfig& cfg) {
  if (cfg.ratios.size() != 3) fail("invalid_config", "ratios must hold three fractions");
  return {cfg.ratios[0], cfg.ratios[1], cfg.ratios[2]};
}

json config_snapshot(const RunConfig& cfg, const std::string& command) {
  json j;
  j["version"] = kVersion;
  j["command"] = command;
  j["dataset_dir"] = cfg.dataset_dir;
  j["out_dir"] = cfg.out_dir;
  j["split_file"] = cfg.split_file;
  j["checkpoint"] = cfg.checkpoint;
  j["which"] = cfg.which;
  j["axis"] = cfg.axis;
  j["values"] = cfg.values;
  j["variant"] = cfg.variant;
  j["ratios"] = cfg.ratios;
  j["neg_multiplier"] = cfg.neg_multiplier;
  j["seeds"] = cfg.n_seeds;
  j["factors"] = cfg.hp.factors;
  j["dim"] = cfg.hp.embed_dim;
  j["hidden"] = cfg.hp.resolved_hidden();
  j["tau"] = cfg.hp.tau;
  j["beta"] = cfg.hp.beta;
  j["neg_m"] = cfg.hp.train_negatives;
  j["epochs"] = cfg.hp.max_epochs;
  j["eval_every"] = cfg.hp.eval_every;
  j["patience"] = cfg.hp.patience;
  j["lr"] = cfg.hp.lr;
  j["weight_decay"] = cfg.hp.weight_decay;
  j["seed"] = cfg.hp.seed;
  j["normalize_features"] = cfg.hp.normalize_features;
  j["use_bias"] = cfg.hp.use_bias;
  return j;
}

void write_snapshot(const RunConfig& cfg, const std::string& command) {
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream out(cfg.out_dir + "/config.json");
  if (!out) fail("io_error", "cannot write config snapshot in " + cfg.out_dir);
  out << config_snapshot(cfg, command).dump(2) << "\n";
}

std::string dataset_id(const RunConfig& cfg) {
  return std::filesystem::path(cfg.dataset_dir).filename().string();
}

AttributedGraph load_dataset(const RunConfig& cfg) {
  if (cfg.dataset_dir.empty()) fail("invalid_config", "--dataset-dir is required");
  LoadStats stats;
  AttributedGraph g = load_graph_dir(cfg.dataset_dir, &stats);
  if (stats.duplicate_edges_dropped || stats.self_loops_dropped) {
    std::cerr << "note: dropped " << stats.duplicate_edges_dropped << " duplicate and "
              << stats.self_loops_dropped << " self-loop edges\n";
  }
  return g;
}

EdgeSplit obtain_split(const RunConfig& cfg, const AttributedGraph& g, bool save_when_generated) {
  if (!cfg.split_file.empty()) return load_split(cfg.split_file);
  EdgeSplit split = split_edges(g, ratio_array(cfg), cfg.neg_multiplier, cfg.hp.seed);
  if (save_when_generated) {
    std::filesystem::create_directories(cfg.out_dir);
    save_split(split, cfg.out_dir + "/split.txt");
  }
  return split;
}

std::vector<double> parse_values(const std::string& values) {
  std::vector<double> out;
  std::stringstream ss(values);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::strtod(tok.c_str(), nullptr));
  }
  return out;
}

void append_metrics(const std::vector<MetricsReport>& rows, const std::string& path) {
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) fail("io_error", "cannot write metrics csv: " + path);
  if (fresh) out << metrics_csv_header() << "\n";
  for (const MetricsReport& r : rows) out << metrics_csv_row(r) << "\n";
}

int cmd_train(RunConfig& cfg) {
  AttributedGraph g = load_dataset(cfg);
  cfg.hp.variant = parse_variant(cfg.variant);
  EdgeSplit split = obtain_split(cfg, g, /*save_when_generated=*/true);
  write_snapshot(cfg, "train");

  TrainResult result = train(g, split, cfg.hp);
  save_trace_csv(result.trace, cfg.out_dir + "/trace.csv");
  if (result.stop_reason == "diverged") {
    fail("divergence", "training loss became non-finite at epoch " +
                           std::to_string(result.epochs_run) + " (trace written)");
  }
  save_checkpoint(result.state, cfg.out_dir + "/checkpoint.txt");
  if (result.clamp_saturations > 0) {
    std::cerr << "note: reconstruction-weight logits clamped "
              << result.clamp_saturations << " times\n";
  }
  MetricsReport test = evaluate_model(g, split, result.state, SplitPart::test);
  test.dataset = dataset_id(cfg);
  append_metrics({test}, cfg.out_dir + "/metrics.csv");
  std::cout << "train dataset=" << test.dataset << " variant=" << cfg.variant
            << " seed=" << cfg.hp.seed << " epochs=" << result.epochs_run
            << " stop=" << result.stop_reason
            << " best_valid_auc=" << format_double(result.best_valid_auc)
            << " test_auc=" << format_double(test.auc) << "\n";
  return 0;
}

int cmd_eval(RunConfig& cfg) {
  AttributedGraph g = load_dataset(cfg);
  if (cfg.checkpoint.empty()) fail("invalid_config", "--checkpoint is required for eval");
  if (cfg.split_file.empty()) fail("invalid_config", "--split-file is required for eval");
  ModelState state = load_checkpoint(cfg.checkpoint);
  EdgeSplit split = load_split(cfg.split_file);
  write_snapshot(cfg, "eval");
  const SplitPart part = cfg.which == "valid" ? SplitPart::valid : SplitPart::test;
  MetricsReport report = evaluate_model(g, split, state, part);
  report.dataset = dataset_id(cfg);
  append_metrics({report}, cfg.out_dir + "/metrics.csv");
  std::cout << "eval dataset=" << report.dataset << " split=" << report.split
            << " auc=" << format_double(report.auc) << "\n";
  return 0;
}

int cmd_baseline(RunConfig& cfg) {
  AttributedGraph g = load_dataset(cfg);
  write_snapshot(cfg, "baseline");
  std::vector<MetricsReport> rows;
  for (Method method : {Method::common_neighbors, Method::adamic_adar}) {
    ExperimentConfig config;
    config.dataset = dataset_id(cfg);
    config.method = method;
    config.ratios = ratio_array(cfg);
    config.neg_multiplier = cfg.neg_multiplier;
    config.base_seed = cfg.hp.seed;
    RepeatSummary summary = repeat_experiment(g, config, cfg.n_seeds);
    rows.insert(rows.end(), summary.runs.begin(), summary.runs.end());
    std::cout << "baseline method=" << method_name(method) << " dataset=" << config.dataset
              << " seeds=" << cfg.n_seeds << " mean_auc=" << format_double(summary.mean_auc)
              << " std=" << format_double(summary.std_auc) << "\n";
  }
  append_metrics(rows, cfg.out_dir + "/metrics.csv");
  return 0;
}

int cmd_ablate(RunConfig& cfg) {
  AttributedGraph g = load_dataset(cfg);
  write_snapshot(cfg, "ablate");
  std::vector<MetricsReport> rows;
  for (const char* name : {"full", "no-alpha", "no-selection", "vanilla-recon"}) {
    ExperimentConfig config;
    config.dataset = dataset_id(cfg);
    config.method = Method::model;
    config.hp = cfg.hp;
    config.hp.variant = parse_variant(name);
    config.ratios = ratio_array(cfg);
    config.neg_multiplier = cfg.neg_multiplier;
    config.base_seed = cfg.hp.seed;
    RepeatSummary summary = repeat_experiment(g, config, cfg.n_seeds);
    rows.insert(rows.end(), summary.runs.begin(), summary.runs.end());
    std::cout << "ablate variant=" << name << " dataset=" << config.dataset
              << " seeds=" << cfg.n_seeds << " mean_auc=" << format_double(summary.mean_auc)
              << " std=" << format_double(summary.std_auc) << "\n";
  }
  append_metrics(rows, cfg.out_dir + "/metrics.csv");
  return 0;
}

int cmd_sweep(RunConfig& cfg) {
  AttributedGraph g = load_dataset(cfg);
  cfg.hp.variant = parse_variant(cfg.variant);
  write_snapshot(cfg, "sweep");
  SweepAxis axis;
  if (cfg.axis == "K" || cfg.axis == "factors") axis = SweepAxis::factors;
  else if (cfg.axis == "beta") axis = SweepAxis::beta;
  else fail("invalid_config", "--axis must be K or beta");
  std::vector<double> values = parse_values(cfg.values);
  if (values.empty()) {
    values = axis == SweepAxis::factors
                 ? std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}
                 : std::vector<double>{0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
  }
  ExperimentConfig config;
  config.dataset = dataset_id(cfg);
  config.method = Method::model;
  config.hp = cfg.hp;
  config.ratios = ratio_array(cfg);
  config.neg_multiplier = cfg.neg_multiplier;
  config.base_seed = cfg.hp.seed;
  auto points = sweep(g, config, axis, values, cfg.n_seeds);
  std::vector<MetricsReport> rows;
  for (const SweepPoint& p : points) {
    rows.insert(rows.end(), p.summary.runs.begin(), p.summary.runs.end());
    std::cout << "sweep axis=" << cfg.axis << " value=" << format_double(p.value)
              << " mean_auc=" << format_double(p.summary.mean_auc)
              << " std=" << format_double(p.summary.std_auc) << "\n";
  }
  append_metrics(rows, cfg.out_dir + "/metrics.csv");
  return 0;
}

int cmd_homophily(RunConfig& cfg) {
  AttributedGraph g = load_dataset(cfg);
  std::printf("%.4f\n", edge_homophily(g));
  return 0;
}

int cmd_corr(RunConfig& cfg) {
  AttributedGraph g = load_dataset(cfg);
  if (cfg.checkpoint.empty()) fail("invalid_config", "--checkpoint is required for corr");
  if (cfg.split_file.empty()) fail("invalid_config", "--split-file is required for corr");
  ModelState state = load_checkpoint(cfg.checkpoint);
  EdgeSplit split = load_split(cfg.split_file);
  write_snapshot(cfg, "corr");
  DirectedAdj adj = DirectedAdj::from_undirected(split.train_pos, g.num_nodes);
  FactorEmbeddings emb = compute_embeddings(g, adj, state);
  Tensor corr = correlation_matrix(emb.h);
  write_correlation_csv(corr, cfg.out_dir + "/correlation.csv");
  if (state.hp.factors > 1 && state.hp.embed_dim > 1) {
    std::cout << "corr block_ratio="
              << format_double(block_correlation_ratio(corr, state.hp.factors,
                                                       state.hp.embed_dim))
              << "\n";
  }
  return 0;
}

int cmd_split(RunConfig& cfg, const std::string& out_file) {
  AttributedGraph g = load_dataset(cfg);
  EdgeSplit split = split_edges(g, ratio_array(cfg), cfg.neg_multiplier, cfg.hp.seed);
  save_split(split, out_file);
  std::cout << "split train=" << split.train_pos.size() << " valid=" << split.valid_pos.size()
            << " test=" << split.test_pos.size() << " valid_neg=" << split.valid_neg.size()
            << " test_neg=" << split.test_neg.size() << " -> " << out_file << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Disentangled link prediction for heterophilic graphs"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunConfig cfg;

  // The config file is applied before flag parsing so flags win.
  std::string config_path;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  }

  try {
    if (!config_path.empty()) apply_config_file(cfg, config_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.category() << ": " << e.what() << "\n";
    return 1;
  }

  std::string split_out = "split.txt";
  std::string dummy_config;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", dummy_config, "JSON config file supplying defaults");
    cmd->add_option("--dataset-dir", cfg.dataset_dir, "Dataset directory");
    cmd->add_option("--out-dir", cfg.out_dir, "Output directory");
    return cmd;
  };

  CLI::App* train_cmd = add_common(app.add_subcommand("train", "Train a model"));
  add_hyperparam_flags(train_cmd, cfg);
  add_split_flags(train_cmd, cfg);
  train_cmd->add_option("--split-file", cfg.split_file, "Existing split to reuse");

  CLI::App* eval_cmd = add_common(app.add_subcommand("eval", "Evaluate a checkpoint"));
  eval_cmd->add_option("--checkpoint", cfg.checkpoint, "Checkpoint path");
  eval_cmd->add_option("--split-file", cfg.split_file, "Split file to evaluate on");
  eval_cmd->add_option("--which", cfg.which, "valid or test");

  CLI::App* baseline_cmd =
      add_common(app.add_subcommand("baseline", "Common-neighbors and Adamic-Adar baselines"));
  add_split_flags(baseline_cmd, cfg);
  baseline_cmd->add_option("--seeds", cfg.n_seeds, "Number of repetitions");
  baseline_cmd->add_option("--seed", cfg.hp.seed, "Base seed");

  CLI::App* ablate_cmd = add_common(app.add_subcommand("ablate", "Run the pipeline variants"));
  add_hyperparam_flags(ablate_cmd, cfg);
  add_split_flags(ablate_cmd, cfg);
  ablate_cmd->add_option("--seeds", cfg.n_seeds, "Number of repetitions per variant");

  CLI::App* sweep_cmd = add_common(app.add_subcommand("sweep", "Sensitivity sweep over K or beta"));
  add_hyperparam_flags(sweep_cmd, cfg);
  add_split_flags(sweep_cmd, cfg);
  sweep_cmd->add_option("--axis", cfg.axis, "K or beta");
  sweep_cmd->add_option("--values", cfg.values, "Comma-separated grid values");
  sweep_cmd->add_option("--seeds", cfg.n_seeds, "Repetitions per grid point");

  CLI::App* hom_cmd = add_common(app.add_subcommand("homophily", "Print the edge homophily"));
  (void)hom_cmd;

  CLI::App* corr_cmd =
      add_common(app.add_subcommand("corr", "Export the embedding correlation matrix"));
  corr_cmd->add_option("--checkpoint", cfg.checkpoint, "Checkpoint path");
  corr_cmd->add_option("--split-file", cfg.split_file, "Split whose training edges to use");

  CLI::App* split_cmd = add_common(app.add_subcommand("split", "Materialize an edge split"));
  add_split_flags(split_cmd, cfg);
  split_cmd->add_option("--seed", cfg.hp.seed, "Split seed");
  split_cmd->add_option("--out", split_out, "Output split file");

  try {
    app.parse(argc, argv);
    if (train_cmd->parsed()) return cmd_train(cfg);
    if (eval_cmd->parsed()) return cmd_eval(cfg);
    if (baseline_cmd->parsed()) return cmd_baseline(cfg);
    if (ablate_cmd->parsed()) return cmd_ablate(cfg);
    if (sweep_cmd->parsed()) return cmd_sweep(cfg);
    if (hom_cmd->parsed()) return cmd_homophily(cfg);
    if (corr_cmd->parsed()) return cmd_corr(cfg);
    if (split_cmd->parsed()) return cmd_split(cfg, split_out);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.category() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
