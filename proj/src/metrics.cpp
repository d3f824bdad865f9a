#include "disenlink/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "disenlink/errors.hpp"

namespace disenlink {

double auc_score(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores) {
  if (pos_scores.empty() || neg_scores.empty()) {
    fail("invalid_config", "auc requires nonempty positive and negative score lists");
  }
  struct Item {
    double score;
    bool positive;
  };
  std::vector<Item> all;
  all.reserve(pos_scores.size() + neg_scores.size());
  for (double s : pos_scores) {
    if (!std::isfinite(s)) fail("invalid_config", "auc: non-finite positive score");
    all.push_back({s, true});
  }
  for (double s : neg_scores) {
    if (!std::isfinite(s)) fail("invalid_config", "auc: non-finite negative score");
    all.push_back({s, false});
  }
  std::sort(all.begin(), all.end(), [](const Item& a, const Item& b) { return a.score < b.score; });

  // Average 1-based ranks within tie groups.
  double pos_rank_sum = 0.0;
  size_t i = 0;
  while (i < all.size()) {
    size_t j = i;
    while (j < all.size() && all[j].score == all[i].score) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (size_t t = i; t < j; ++t) {
      if (all[t].positive) pos_rank_sum += avg_rank;
    }
    i = j;
  }
  const double p = static_cast<double>(pos_scores.size());
  const double n = static_cast<double>(neg_scores.size());
  return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

double auc_brute_force(const std::vector<double>& pos_scores,
                       const std::vector<double>& neg_scores) {
  if (pos_scores.empty() || neg_scores.empty()) {
    fail("invalid_config", "auc requires nonempty positive and negative score lists");
  }
  double wins = 0.0;
  for (double p : pos_scores) {
    for (double n : neg_scores) {
      if (p > n) wins += 1.0;
      else if (p == n) wins += 0.5;
    }
  }
  return wins / (static_cast<double>(pos_scores.size()) * static_cast<double>(neg_scores.size()));
}

std::string split_part_name(SplitPart part) { return part == SplitPart::valid ? "valid" : "test"; }

namespace {

const std::vector<Edge>& part_pos(const EdgeSplit& split, SplitPart part) {
  return part == SplitPart::valid ? split.valid_pos : split.test_pos;
}

const std::vector<Edge>& part_neg(const EdgeSplit& split, SplitPart part) {
  return part == SplitPart::valid ? split.valid_neg : split.test_neg;
}

}  // namespace

MetricsReport evaluate_scorer(const ScoreFn& scorer, const EdgeSplit& split, SplitPart part) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& pos = part_pos(split, part);
  const auto& neg = part_neg(split, part);
  std::vector<double> pos_scores, neg_scores;
  pos_scores.reserve(pos.size());
  neg_scores.reserve(neg.size());
  for (const Edge& e : pos) pos_scores.push_back(scorer(e.first, e.second));
  for (const Edge& e : neg) neg_scores.push_back(scorer(e.first, e.second));

  MetricsReport report;
  report.auc = auc_score(pos_scores, neg_scores);
  report.split = split_part_name(part);
  report.num_train_pos = static_cast<int64_t>(split.train_pos.size());
  report.num_eval_pos = static_cast<int64_t>(pos.size());
  report.num_eval_neg = static_cast<int64_t>(neg.size());
  report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

MetricsReport evaluate_model(const AttributedGraph& graph, const EdgeSplit& split,
                             const ModelState& state, SplitPart part) {
  const auto t0 = std::chrono::steady_clock::now();
  DirectedAdj adj = DirectedAdj::from_undirected(split.train_pos, graph.num_nodes);

  Tape tape;
  FeatureSet features = FeatureSet::prepare(graph.features, state.hp);
  Forward f = run_forward(tape, features.input(), adj, state);

  const auto& pos = part_pos(split, part);
  const auto& neg = part_neg(split, part);
  PairList pairs;
  pairs.src.reserve(pos.size() + neg.size());
  pairs.dst.reserve(pos.size() + neg.size());
  for (const Edge& e : pos) {
    pairs.src.push_back(e.first);
    pairs.dst.push_back(e.second);
  }
  for (const Edge& e : neg) {
    pairs.src.push_back(e.first);
    pairs.dst.push_back(e.second);
  }
  NodeId scores = score_pairs(tape, f.z, f.h, pairs, state.hp.tau, state.hp.variant);
  const Tensor& sv = tape.value(scores);
  std::vector<double> pos_scores(sv.data.begin(), sv.data.begin() + static_cast<int64_t>(pos.size()));
  std::vector<double> neg_scores(sv.data.begin() + static_cast<int64_t>(pos.size()), sv.data.end());

  MetricsReport report;
  report.method = "disenlink";
  report.variant = variant_name(state.hp.variant);
  report.seed = state.hp.seed;
  report.factors = state.hp.factors;
  report.embed_dim = state.hp.embed_dim;
  report.tau = state.hp.tau;
  report.beta = state.hp.beta;
  report.train_negatives = state.hp.train_negatives;
  report.auc = auc_score(pos_scores, neg_scores);
  report.split = split_part_name(part);
  report.num_train_pos = static_cast<int64_t>(split.train_pos.size());
  report.num_eval_pos = static_cast<int64_t>(pos.size());
  report.num_eval_neg = static_cast<int64_t>(neg.size());
  report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string metrics_csv_header() {
  return "dataset,method,variant,seed,K,d,tau,beta,M,auc,split,wall_ms";
}

std::string metrics_csv_row(const MetricsReport& r) {
  std::string row;
  row += r.dataset + "," + r.method + "," + r.variant + ",";
  row += std::to_string(r.seed) + "," + std::to_string(r.factors) + "," +
         std::to_string(r.embed_dim) + ",";
  row += format_double(r.tau) + "," + format_double(r.beta) + "," +
         std::to_string(r.train_negatives) + ",";
  row += format_double(r.auc) + "," + r.split + "," + format_double(r.wall_ms);
  return row;
}

void write_metrics_csv(const std::vector<MetricsReport>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("io_error", "cannot write metrics csv: " + path);
  out << metrics_csv_header() << "\n";
  for (const MetricsReport& r : rows) out << metrics_csv_row(r) << "\n";
}

}  // namespace disenlink
