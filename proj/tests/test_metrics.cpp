#include <cmath>

#include "disenlink/errors.hpp"
#include "disenlink/metrics.hpp"
#include "disenlink/rng.hpp"
#include "doctest.h"

using namespace disenlink;

TEST_CASE("auc with complete separation is 1") {
  CHECK(auc_score({0.9, 0.8}, {0.7, 0.1}) == 1.0);
}

TEST_CASE("auc of a pure tie is one half") {
  CHECK(auc_score({0.5}, {0.5}) == 0.5);
}

TEST_CASE("auc mixed case equals the hand count") {
  // Pairs: (0.8 vs 0.6, 0.2) wins twice; (0.4 vs 0.6) loses, (0.4 vs 0.2)
  // wins. 3 of 4.
  CHECK(auc_score({0.8, 0.4}, {0.6, 0.2}) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("empty score lists are rejected") {
  CHECK_THROWS_AS(auc_score({}, {0.1}), Error);
  CHECK_THROWS_AS(auc_score({0.1}, {}), Error);
}

TEST_CASE("rank auc equals brute force on 1000 random tied instances") {
  Rng rng(314);
  for (int rep = 0; rep < 1000; ++rep) {
    const int np = 1 + static_cast<int>(rng.next_below(20));
    const int nn = 1 + static_cast<int>(rng.next_below(20));
    std::vector<double> pos, neg;
    // Quantized scores so ties are common.
    for (int i = 0; i < np; ++i) pos.push_back(rng.next_below(8) / 4.0);
    for (int i = 0; i < nn; ++i) neg.push_back(rng.next_below(8) / 4.0);
    const double fast = auc_score(pos, neg);
    const double slow = auc_brute_force(pos, neg);
    CHECK(std::abs(fast - slow) < 1e-12);
  }
}

TEST_CASE("auc is invariant under strictly increasing transforms") {
  Rng rng(1618);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> pos, neg;
    for (int i = 0; i < 12; ++i) pos.push_back(rng.next_uniform(-2.0, 2.0));
    for (int i = 0; i < 15; ++i) neg.push_back(rng.next_uniform(-2.0, 2.0));
    auto monotone = [](double x) { return std::exp(0.5 * x) + 3.0; };
    std::vector<double> pos_t, neg_t;
    for (double v : pos) pos_t.push_back(monotone(v));
    for (double v : neg) neg_t.push_back(monotone(v));
    CHECK(auc_score(pos, neg) == doctest::Approx(auc_score(pos_t, neg_t)).epsilon(1e-12));
  }
}

TEST_CASE("evaluate_scorer with an oracle reaches auc 1 and a constant scorer 0.5") {
  EdgeSplit split;
  split.valid_pos = {{0, 1}, {2, 3}};
  split.valid_neg = {{0, 2}, {1, 3}, {0, 3}};

  auto oracle = [&](int32_t u, int32_t v) {
    for (const Edge& e : split.valid_pos) {
      if (e == canonical_edge(u, v)) return 1.0;
    }
    return 0.0;
  };
  MetricsReport r = evaluate_scorer(oracle, split, SplitPart::valid);
  CHECK(r.auc == 1.0);
  CHECK(r.split == "valid");
  CHECK(r.num_eval_pos == 2);
  CHECK(r.num_eval_neg == 3);

  MetricsReport flat = evaluate_scorer([](int32_t, int32_t) { return 0.25; }, split,
                                       SplitPart::valid);
  CHECK(flat.auc == 0.5);
}

TEST_CASE("metrics csv schema") {
  CHECK(metrics_csv_header() == "dataset,method,variant,seed,K,d,tau,beta,M,auc,split,wall_ms");
  MetricsReport r;
  r.dataset = "toy";
  r.method = "cn";
  r.seed = 3;
  r.auc = 0.5;
  r.split = "test";
  r.wall_ms = 1.25;
  const std::string row = metrics_csv_row(r);
  CHECK(row.find("toy,cn,-,3,") == 0);
  CHECK(row.find(",0.5,test,") != std::string::npos);
}

TEST_CASE("format_double round-trips exactly") {
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    double v = rng.next_uniform(-1e6, 1e6) * std::pow(10.0, rng.next_below(10) - 5.0);
    double back = std::strtod(format_double(v).c_str(), nullptr);
    CHECK(back == v);
  }
}
