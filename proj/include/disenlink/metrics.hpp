#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "disenlink/model.hpp"
#include "disenlink/split.hpp"

namespace disenlink {

/// AUC as the probability that a uniformly chosen positive outscores a
/// uniformly chosen negative, ties counting one half. Computed from rank
/// statistics; agrees exactly with the brute-force pairwise count.
double auc_score(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores);

/// O(P·N) reference used by tests; matches auc_score to machine precision.
double auc_brute_force(const std::vector<double>& pos_scores,
                       const std::vector<double>& neg_scores);

enum class SplitPart { valid, test };
std::string split_part_name(SplitPart part);

/// One evaluation row; the CSV schema is
/// dataset,method,variant,seed,K,d,tau,beta,M,auc,split,wall_ms.
struct MetricsReport {
  std::string dataset;
  std::string method;
  std::string variant = "-";
  uint64_t seed = 0;
  int factors = 0;
  int embed_dim = 0;
  double tau = 0.0;
  double beta = 0.0;
  int train_negatives = 0;
  double auc = 0.0;
  std::string split;
  double wall_ms = 0.0;
  // Not part of the CSV schema; retained for reporting.
  int64_t num_train_pos = 0;
  int64_t num_eval_pos = 0;
  int64_t num_eval_neg = 0;
};

/// Arbitrary pair scorer (heuristics, oracles, tests).
using ScoreFn = std::function<double(int32_t, int32_t)>;

/// Scores the chosen split's positives and pre-sampled negatives with an
/// arbitrary scorer and reports AUC.
MetricsReport evaluate_scorer(const ScoreFn& scorer, const EdgeSplit& split, SplitPart part);

/// Model evaluation: one batched forward pass over the training graph
/// (message passing never sees validation or test edges), then AUC over the
/// chosen split's pairs.
MetricsReport evaluate_model(const AttributedGraph& graph, const EdgeSplit& split,
                             const ModelState& state, SplitPart part);

void write_metrics_csv(const std::vector<MetricsReport>& rows, const std::string& path);
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsReport& row);

/// %.17g formatting used for every floating-point value we persist; chosen
/// so text round-trips reproduce the exact double.
std::string format_double(double v);

}  // namespace disenlink
