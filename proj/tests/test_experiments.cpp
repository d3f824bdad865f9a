#include <cmath>

#include "disenlink/datagen.hpp"
#include "disenlink/errors.hpp"
#include "disenlink/experiments.hpp"
#include "doctest.h"

using namespace disenlink;

namespace {

AttributedGraph tiny_graph() {
  DatasetSpec spec;
  spec.name = "tiny";
  spec.nodes = 50;
  spec.edges = 110;
  spec.features = 30;
  spec.classes = 3;
  spec.target_homophily = 0.3;
  spec.true_factors = 3;
  spec.words_per_factor = 5;
  spec.noise_words = 2;
  spec.seed = 77;
  return synthesize_dataset(spec);
}

}  // namespace

TEST_CASE("single repetition has zero std by convention") {
  AttributedGraph g = tiny_graph();
  ExperimentConfig config;
  config.dataset = "tiny";
  config.method = Method::common_neighbors;
  config.neg_multiplier = 2;
  RepeatSummary s = repeat_experiment(g, config, 1);
  CHECK(s.runs.size() == 1);
  CHECK(s.std_auc == 0.0);
  CHECK(s.mean_auc == s.runs[0].auc);
}

TEST_CASE("heuristic repetitions reflect split variance only") {
  AttributedGraph g = tiny_graph();
  ExperimentConfig config;
  config.dataset = "tiny";
  config.method = Method::adamic_adar;
  config.neg_multiplier = 2;
  RepeatSummary s = repeat_experiment(g, config, 4);
  CHECK(s.runs.size() == 4);
  for (const MetricsReport& r : s.runs) {
    CHECK(r.method == "aa");
    CHECK(r.dataset == "tiny");
    CHECK(r.auc >= 0.0);
    CHECK(r.auc <= 1.0);
  }
  CHECK(s.std_auc >= 0.0);
}

TEST_CASE("model repetitions produce one test row per seed") {
  AttributedGraph g = tiny_graph();
  ExperimentConfig config;
  config.dataset = "tiny";
  config.method = Method::model;
  config.neg_multiplier = 2;
  config.hp.factors = 2;
  config.hp.embed_dim = 6;
  config.hp.hidden = 12;
  config.hp.max_epochs = 8;
  config.hp.eval_every = 4;
  RepeatSummary s = repeat_experiment(g, config, 2);
  CHECK(s.runs.size() == 2);
  CHECK(s.runs[0].seed != s.runs[1].seed);
  for (const MetricsReport& r : s.runs) CHECK(r.split == "test");
}

TEST_CASE("sweep validates axis values and sets the axis field") {
  AttributedGraph g = tiny_graph();
  ExperimentConfig config;
  config.dataset = "tiny";
  config.method = Method::model;
  config.neg_multiplier = 2;
  config.hp.factors = 2;
  config.hp.embed_dim = 4;
  config.hp.hidden = 8;
  config.hp.max_epochs = 4;
  config.hp.eval_every = 2;

  auto points = sweep(g, config, SweepAxis::beta, {0.0, 0.5}, 1);
  REQUIRE(points.size() == 2);
  CHECK(points[0].summary.runs[0].beta == 0.0);
  CHECK(points[1].summary.runs[0].beta == 0.5);

  auto kpoints = sweep(g, config, SweepAxis::factors, {1.0, 2.0}, 1);
  CHECK(kpoints[0].summary.runs[0].factors == 1);
  CHECK_THROWS_AS(sweep(g, config, SweepAxis::factors, {1.5}, 1), Error);
  CHECK_THROWS_AS(sweep(g, config, SweepAxis::beta, {1.5}, 1), Error);
}

TEST_CASE("correlation of a column with itself is one and with its negation one") {
  Tensor emb = Tensor::zeros({4, 2});
  const double vals[4] = {1.0, -2.0, 0.5, 3.0};
  for (int i = 0; i < 4; ++i) {
    emb.at(i, 0) = vals[i];
    emb.at(i, 1) = -vals[i];
  }
  Tensor corr = correlation_matrix(emb);
  CHECK(corr.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(corr.at(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(corr.at(0, 1) == doctest::Approx(1.0).epsilon(1e-12));  // |-1|
}

TEST_CASE("correlation matrix is symmetric with unit diagonal where variance exists") {
  Rng rng(12);
  Tensor emb = Tensor::zeros({20, 6});
  for (double& v : emb.data) v = rng.next_uniform(-1.0, 1.0);
  // Column 3 has zero variance.
  for (int64_t i = 0; i < 20; ++i) emb.at(i, 3) = 0.42;
  Tensor corr = correlation_matrix(emb);
  for (int64_t a = 0; a < 6; ++a) {
    for (int64_t b = 0; b < 6; ++b) {
      CHECK(corr.at(a, b) == corr.at(b, a));
      CHECK(corr.at(a, b) >= 0.0);
      CHECK(corr.at(a, b) <= 1.0 + 1e-12);
    }
    if (a != 3) CHECK(corr.at(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (int64_t b = 0; b < 6; ++b) CHECK(corr.at(3, b) == 0.0);
  CHECK_THROWS_AS(correlation_matrix(Tensor::zeros({1, 4})), Error);
}

TEST_CASE("block ratio separates block-diagonal from flat structure") {
  // Two factors, d=2: block-diagonal pattern scores higher than uniform.
  Tensor blocky = Tensor::zeros({40, 4});
  Rng rng(9);
  for (int64_t i = 0; i < 40; ++i) {
    double a = rng.next_normal(), b = rng.next_normal();
    blocky.at(i, 0) = a;
    blocky.at(i, 1) = a + 0.1 * rng.next_normal();
    blocky.at(i, 2) = b;
    blocky.at(i, 3) = b + 0.1 * rng.next_normal();
  }
  double ratio = block_correlation_ratio(correlation_matrix(blocky), 2, 2);
  CHECK(ratio > 1.5);
}

TEST_CASE("method parsing") {
  CHECK(parse_method("cn") == Method::common_neighbors);
  CHECK(parse_method("aa") == Method::adamic_adar);
  CHECK(parse_method("disenlink") == Method::model);
  CHECK_THROWS_AS(parse_method("nope"), Error);
}
