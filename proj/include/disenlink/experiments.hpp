#pragma once

#include <string>
#include <vector>

#include "disenlink/metrics.hpp"
#include "disenlink/model.hpp"
#include "disenlink/split.hpp"
#include "disenlink/trainer.hpp"

namespace disenlink {

/// What to evaluate in a repeated experiment.
enum class Method { model, common_neighbors, adamic_adar };

Method parse_method(const std::string& name);
std::string method_name(Method m);

struct ExperimentConfig {
  std::string dataset;  // id used in reports
  Method method = Method::model;
  Hyperparams hp;
  std::array<double, 3> ratios{0.85, 0.05, 0.10};
  int neg_multiplier = 5;
  uint64_t base_seed = 1;
};

struct RepeatSummary {
  std::vector<MetricsReport> runs;  // one test-split row per seed
  double mean_auc = 0.0;
  double std_auc = 0.0;  // sample standard deviation; 0 for a single run
};

/// Runs the experiment n_seeds times with a fresh split per repetition
/// (seed_i derived from base_seed and i) and reports mean ± sample std of
/// the test AUC.
RepeatSummary repeat_experiment(const AttributedGraph& graph, const ExperimentConfig& config,
                                int n_seeds);

/// Sensitivity sweep over factor count or teleport weight; one repeated
/// experiment per grid value.
enum class SweepAxis { factors, beta };

struct SweepPoint {
  double value = 0.0;
  RepeatSummary summary;
};

std::vector<SweepPoint> sweep(const AttributedGraph& graph, const ExperimentConfig& config,
                              SweepAxis axis, const std::vector<double>& values, int n_seeds);

/// Absolute Pearson correlations between the columns of an N × D embedding
/// matrix. Zero-variance columns correlate as 0 against everything
/// (including themselves), all other diagonals are 1.
Tensor correlation_matrix(const Tensor& embeddings);

/// Mean |correlation| inside the K diagonal d×d blocks (off-diagonal
/// entries only) divided by the mean |correlation| across blocks; the
/// block-diagonal disentanglement signature.
double block_correlation_ratio(const Tensor& corr, int factors, int embed_dim);

/// Correlation CSV: first column the row index, then one column per
/// embedding dimension.
void write_correlation_csv(const Tensor& corr, const std::string& path);

}  // namespace disenlink
