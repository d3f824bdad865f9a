// Integration tests driving the installed binaries end to end.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "disenlink/datagen.hpp"
#include "doctest.h"

namespace {

namespace fs = std::filesystem;

struct CmdResult {
  int exit_code = -1;
  std::string stdout_text;
};

CmdResult run_cmd(const std::string& cmd) {
  const fs::path out = fs::temp_directory_path() / "disenlink_cli_out.txt";
  const std::string full = cmd + " > " + out.string() + " 2>&1";
  int rc = std::system(full.c_str());
  CmdResult result;
  result.exit_code = WEXITSTATUS(rc);
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  result.stdout_text = ss.str();
  return result;
}

std::string file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path workdir() {
  const fs::path dir = fs::temp_directory_path() / "disenlink_cli_tests";
  fs::create_directories(dir);
  return dir;
}

const std::string kCli = DISENLINK_CLI_PATH;
const std::string kDatagen = DISENLINK_DATAGEN_PATH;

// A small dataset shared across the CLI tests.
const fs::path& dataset_dir() {
  static fs::path dir = [] {
    fs::path d = workdir() / "data";
    disenlink::DatasetSpec spec;
    spec.name = "toy";
    spec.nodes = 70;
    spec.edges = 150;
    spec.features = 45;
    spec.classes = 3;
    spec.target_homophily = 0.3;
    spec.true_factors = 3;
    spec.words_per_factor = 6;
    spec.noise_words = 2;
    spec.seed = 99;
    disenlink::write_dataset(disenlink::synthesize_dataset(spec), (d / "toy").string());
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("split runs are byte-identical under a fixed seed") {
  const fs::path dir = workdir();
  const std::string ds = (dataset_dir() / "toy").string();
  const std::string s1 = (dir / "s1.txt").string();
  const std::string s2 = (dir / "s2.txt").string();
  CmdResult r1 = run_cmd(kCli + " split --dataset-dir " + ds + " --seed 7 --out " + s1);
  CmdResult r2 = run_cmd(kCli + " split --dataset-dir " + ds + " --seed 7 --out " + s2);
  CHECK(r1.exit_code == 0);
  CHECK(r2.exit_code == 0);
  CHECK(file_bytes(s1) == file_bytes(s2));
  CmdResult r3 = run_cmd(kCli + " split --dataset-dir " + ds + " --seed 8 --out " + s2);
  CHECK(r3.exit_code == 0);
  CHECK(file_bytes(s1) != file_bytes(s2));
}

TEST_CASE("homophily prints a fraction") {
  const std::string ds = (dataset_dir() / "toy").string();
  CmdResult r = run_cmd(kCli + " homophily --dataset-dir " + ds);
  CHECK(r.exit_code == 0);
  const double value = std::strtod(r.stdout_text.c_str(), nullptr);
  CHECK(value >= 0.0);
  CHECK(value <= 1.0);
}

TEST_CASE("missing dataset produces a machine-parsable error and nonzero exit") {
  CmdResult r = run_cmd(kCli + " homophily --dataset-dir /nonexistent/nowhere");
  CHECK(r.exit_code == 1);
  CHECK(r.stdout_text.find("error: io_error:") != std::string::npos);
}

TEST_CASE("train writes checkpoint, trace, split, config snapshot and metrics") {
  const fs::path dir = workdir() / "train_run";
  fs::remove_all(dir);
  const std::string ds = (dataset_dir() / "toy").string();
  CmdResult r = run_cmd(kCli + " train --dataset-dir " + ds + " --out-dir " + dir.string() +
                        " --factors 2 --dim 6 --hidden 12 --epochs 10 --eval-every 5 --seed 3");
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "checkpoint.txt"));
  CHECK(fs::exists(dir / "trace.csv"));
  CHECK(fs::exists(dir / "split.txt"));
  CHECK(fs::exists(dir / "config.json"));
  CHECK(fs::exists(dir / "metrics.csv"));
  CHECK(r.stdout_text.find("best_valid_auc=") != std::string::npos);

  // Re-evaluating the written checkpoint on the written split must succeed.
  const fs::path eval_dir = workdir() / "eval_run";
  fs::remove_all(eval_dir);
  CmdResult e = run_cmd(kCli + " eval --dataset-dir " + ds + " --out-dir " + eval_dir.string() +
                        " --checkpoint " + (dir / "checkpoint.txt").string() +
                        " --split-file " + (dir / "split.txt").string() + " --which test");
  CHECK(e.exit_code == 0);
  CHECK(e.stdout_text.find("auc=") != std::string::npos);

  // corr exports a matrix for the trained checkpoint.
  const fs::path corr_dir = workdir() / "corr_run";
  fs::remove_all(corr_dir);
  CmdResult c = run_cmd(kCli + " corr --dataset-dir " + ds + " --out-dir " + corr_dir.string() +
                        " --checkpoint " + (dir / "checkpoint.txt").string() +
                        " --split-file " + (dir / "split.txt").string());
  CHECK(c.exit_code == 0);
  CHECK(fs::exists(corr_dir / "correlation.csv"));
}

TEST_CASE("config file supplies defaults and flags override") {
  const fs::path dir = workdir() / "config_run";
  fs::remove_all(dir);
  const std::string ds = (dataset_dir() / "toy").string();
  const fs::path cfg = workdir() / "cfg.json";
  {
    std::ofstream out(cfg);
    out << R"({"factors": 2, "dim": 6, "hidden": 12, "epochs": 4, "eval_every": 2, "seed": 5})";
  }
  CmdResult r = run_cmd(kCli + " train --config " + cfg.string() + " --dataset-dir " + ds +
                        " --out-dir " + dir.string() + " --epochs 6");
  CHECK(r.exit_code == 0);
  std::string snapshot = file_bytes(dir / "config.json");
  CHECK(snapshot.find("\"epochs\": 6") != std::string::npos);     // flag wins
  CHECK(snapshot.find("\"factors\": 2") != std::string::npos);    // config wins over default
}

TEST_CASE("baseline subcommand reports cn and aa") {
  const fs::path dir = workdir() / "baseline_run";
  fs::remove_all(dir);
  const std::string ds = (dataset_dir() / "toy").string();
  CmdResult r = run_cmd(kCli + " baseline --dataset-dir " + ds + " --out-dir " + dir.string() +
                        " --seeds 2 --neg-multiplier 2");
  CHECK(r.exit_code == 0);
  CHECK(r.stdout_text.find("method=cn") != std::string::npos);
  CHECK(r.stdout_text.find("method=aa") != std::string::npos);
  std::string csv = file_bytes(dir / "metrics.csv");
  CHECK(csv.find("dataset,method,variant,seed,K,d,tau,beta,M,auc,split,wall_ms") == 0);
}

TEST_CASE("datagen presets are deterministic") {
  const fs::path d1 = workdir() / "gen1";
  const fs::path d2 = workdir() / "gen2";
  fs::remove_all(d1);
  fs::remove_all(d2);
  CmdResult r1 = run_cmd(kDatagen + " --preset texas --out " + d1.string());
  CmdResult r2 = run_cmd(kDatagen + " --preset texas --out " + d2.string());
  CHECK(r1.exit_code == 0);
  CHECK(r2.exit_code == 0);
  CHECK(file_bytes(d1 / "texas" / "edges.txt") == file_bytes(d2 / "texas" / "edges.txt"));
  CHECK(file_bytes(d1 / "texas" / "features.txt") == file_bytes(d2 / "texas" / "features.txt"));
  CHECK(file_bytes(d1 / "texas" / "labels.txt") == file_bytes(d2 / "texas" / "labels.txt"));
}
