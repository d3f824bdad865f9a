#include "disenlink/experiments.hpp"

#include <cmath>
#include <fstream>

#include "disenlink/errors.hpp"
#include "disenlink/heuristics.hpp"
#include "disenlink/rng.hpp"

namespace disenlink {

Method parse_method(const std::string& name) {
  if (name == "disenlink" || name == "model") return Method::model;
  if (name == "cn") return Method::common_neighbors;
  if (name == "aa") return Method::adamic_adar;
  fail("invalid_config", "unknown method \"" + name + "\" (expected disenlink|cn|aa)");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::model: return "disenlink";
    case Method::common_neighbors: return "cn";
    case Method::adamic_adar: return "aa";
  }
  return "disenlink";
}

RepeatSummary repeat_experiment(const AttributedGraph& graph, const ExperimentConfig& config,
                                int n_seeds) {
  if (n_seeds < 1) fail("invalid_config", "repeat_experiment requires n_seeds >= 1");
  RepeatSummary summary;
  for (int i = 0; i < n_seeds; ++i) {
    const uint64_t run_seed = Rng::derive(config.base_seed, static_cast<uint64_t>(i));
    EdgeSplit split = split_edges(graph, config.ratios, config.neg_multiplier, run_seed);

    MetricsReport report;
    if (config.method == Method::model) {
      Hyperparams hp = config.hp;
      hp.seed = run_seed;
      TrainResult trained = train(graph, split, hp);
      if (trained.stop_reason == "diverged") {
        fail("divergence", "training diverged on " + config.dataset + " seed " +
                               std::to_string(run_seed));
      }
      report = evaluate_model(graph, split, trained.state, SplitPart::test);
    } else {
      const AttributedGraph train_graph = with_edges(graph, split.train_pos);
      ScoreFn scorer;
      if (config.method == Method::common_neighbors) {
        scorer = [&train_graph](int32_t u, int32_t v) {
          return static_cast<double>(common_neighbors(train_graph, u, v));
        };
      } else {
        scorer = [&train_graph](int32_t u, int32_t v) { return adamic_adar(train_graph, u, v); };
      }
      report = evaluate_scorer(scorer, split, SplitPart::test);
      report.method = method_name(config.method);
      report.seed = run_seed;
    }
    report.dataset = config.dataset;
    summary.runs.push_back(std::move(report));
  }

  double mean = 0.0;
  for (const MetricsReport& r : summary.runs) mean += r.auc;
  mean /= static_cast<double>(summary.runs.size());
  double var = 0.0;
  if (summary.runs.size() > 1) {
    for (const MetricsReport& r : summary.runs) var += (r.auc - mean) * (r.auc - mean);
    var /= static_cast<double>(summary.runs.size() - 1);
  }
  summary.mean_auc = mean;
  summary.std_auc = std::sqrt(var);
  return summary;
}

std::vector<SweepPoint> sweep(const AttributedGraph& graph, const ExperimentConfig& config,
                              SweepAxis axis, const std::vector<double>& values, int n_seeds) {
  std::vector<SweepPoint> points;
  points.reserve(values.size());
  for (double v : values) {
    ExperimentConfig point_config = config;
    if (axis == SweepAxis::factors) {
      const int k = static_cast<int>(v);
      if (k < 1 || static_cast<double>(k) != v) {
        fail("invalid_config", "factor sweep values must be positive integers");
      }
      point_config.hp.factors = k;
    } else {
      if (v < 0.0 || v > 1.0) fail("invalid_config", "beta sweep values must lie in [0, 1]");
      point_config.hp.beta = v;
    }
    SweepPoint point;
    point.value = v;
    point.summary = repeat_experiment(graph, point_config, n_seeds);
    points.push_back(std::move(point));
  }
  return points;
}

Tensor correlation_matrix(const Tensor& embeddings) {
  const int64_t n = embeddings.rows();
  const int64_t dim = embeddings.cols();
  if (n < 2) fail("invalid_config", "correlation_matrix requires at least 2 rows");

  std::vector<double> mean(static_cast<size_t>(dim), 0.0);
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < dim; ++j) mean[static_cast<size_t>(j)] += embeddings.at(i, j);
  }
  for (double& m : mean) m /= static_cast<double>(n);

  std::vector<double> sd(static_cast<size_t>(dim), 0.0);
  Tensor centered = Tensor::zeros({n, dim});
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < dim; ++j) {
      const double c = embeddings.at(i, j) - mean[static_cast<size_t>(j)];
      centered.at(i, j) = c;
      sd[static_cast<size_t>(j)] += c * c;
    }
  }
  for (double& s : sd) s = std::sqrt(s);

  // A column whose values are all identical has zero variance by
  // definition; detect that exactly rather than through the rounded mean.
  for (int64_t j = 0; j < dim; ++j) {
    bool constant = true;
    for (int64_t i = 1; i < n && constant; ++i) {
      constant = embeddings.at(i, j) == embeddings.at(0, j);
    }
    if (constant) sd[static_cast<size_t>(j)] = 0.0;
  }

  Tensor corr = Tensor::zeros({dim, dim});
  for (int64_t a = 0; a < dim; ++a) {
    for (int64_t b = a; b < dim; ++b) {
      double value = 0.0;
      if (sd[static_cast<size_t>(a)] > 0.0 && sd[static_cast<size_t>(b)] > 0.0) {
        double cov = 0.0;
        for (int64_t i = 0; i < n; ++i) cov += centered.at(i, a) * centered.at(i, b);
        value = std::abs(cov / (sd[static_cast<size_t>(a)] * sd[static_cast<size_t>(b)]));
      }
      corr.at(a, b) = value;
      corr.at(b, a) = value;
    }
  }
  return corr;
}

double block_correlation_ratio(const Tensor& corr, int factors, int embed_dim) {
  const int64_t dim = corr.rows();
  if (dim != static_cast<int64_t>(factors) * embed_dim) {
    fail("shape_mismatch", "correlation matrix does not match factors*embed_dim");
  }
  double within = 0.0, cross = 0.0;
  int64_t n_within = 0, n_cross = 0;
  for (int64_t a = 0; a < dim; ++a) {
    for (int64_t b = 0; b < dim; ++b) {
      if (a == b) continue;
      if (a / embed_dim == b / embed_dim) {
        within += corr.at(a, b);
        ++n_within;
      } else {
        cross += corr.at(a, b);
        ++n_cross;
      }
    }
  }
  if (n_within == 0 || n_cross == 0) {
    fail("invalid_config", "block ratio needs at least two factors and embed_dim >= 2");
  }
  within /= static_cast<double>(n_within);
  cross /= static_cast<double>(n_cross);
  return cross > 0.0 ? within / cross : std::numeric_limits<double>::infinity();
}

void write_correlation_csv(const Tensor& corr, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("io_error", "cannot write correlation csv: " + path);
  const int64_t dim = corr.rows();
  out << "idx";
  for (int64_t j = 0; j < dim; ++j) out << ",c" << j;
  out << "\n";
  for (int64_t i = 0; i < dim; ++i) {
    out << i;
    for (int64_t j = 0; j < dim; ++j) out << "," << format_double(corr.at(i, j));
    out << "\n";
  }
}

}  // namespace disenlink
