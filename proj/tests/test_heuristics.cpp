#include <cmath>

#include "disenlink/heuristics.hpp"
#include "disenlink/rng.hpp"
#include "disenlink/split.hpp"
#include "doctest.h"

using namespace disenlink;

namespace {

AttributedGraph path3() {
  return make_graph(Tensor::zeros({3, 1}), {{0, 1}, {1, 2}});
}

AttributedGraph k4() {
  std::vector<Edge> edges;
  for (int32_t u = 0; u < 4; ++u) {
    for (int32_t v = u + 1; v < 4; ++v) edges.push_back({u, v});
  }
  return make_graph(Tensor::zeros({4, 1}), edges);
}

}  // namespace

TEST_CASE("common neighbors on a path") {
  AttributedGraph g = path3();
  CHECK(common_neighbors(g, 0, 2) == 1);
  CHECK(common_neighbors(g, 0, 1) == 0);
}

TEST_CASE("adamic-adar on a path is 1/ln 2") {
  AttributedGraph g = path3();
  CHECK(adamic_adar(g, 0, 2) == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-12));
  CHECK(adamic_adar(g, 0, 1) == 0.0);
}

TEST_CASE("complete graph K4 pair scores") {
  AttributedGraph g = k4();
  // Any pair shares exactly the two remaining nodes, each of degree 3.
  CHECK(common_neighbors(g, 0, 1) == 2);
  CHECK(adamic_adar(g, 0, 1) == doctest::Approx(2.0 / std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("both scorers are symmetric and AA is bounded by CN/ln2") {
  Rng rng(44);
  std::vector<Edge> edges;
  const int64_t n = 30;
  for (int i = 0; i < 120; ++i) {
    int32_t u = static_cast<int32_t>(rng.next_below(n));
    int32_t v = static_cast<int32_t>(rng.next_below(n));
    if (u != v) edges.push_back(canonical_edge(u, v));
  }
  AttributedGraph g = make_graph(Tensor::zeros({n, 1}), edges);
  for (int rep = 0; rep < 200; ++rep) {
    int32_t u = static_cast<int32_t>(rng.next_below(n));
    int32_t v = static_cast<int32_t>(rng.next_below(n));
    if (u == v) continue;
    CHECK(common_neighbors(g, u, v) == common_neighbors(g, v, u));
    CHECK(adamic_adar(g, u, v) == adamic_adar(g, v, u));
    CHECK(adamic_adar(g, u, v) <=
          static_cast<double>(common_neighbors(g, u, v)) / std::log(2.0) + 1e-12);
  }
}

TEST_CASE("scores depend only on the training edges") {
  Rng rng(45);
  std::vector<Edge> edges;
  const int64_t n = 40;
  for (int i = 0; i < 160; ++i) {
    int32_t u = static_cast<int32_t>(rng.next_below(n));
    int32_t v = static_cast<int32_t>(rng.next_below(n));
    if (u != v) edges.push_back(canonical_edge(u, v));
  }
  AttributedGraph g = make_graph(Tensor::zeros({n, 1}), edges);
  EdgeSplit s = split_edges(g, {0.7, 0.15, 0.15}, 1, 5);
  AttributedGraph train_only = with_edges(g, s.train_pos);

  // Removing a test edge from the full graph must not change any score
  // computed on the training subgraph (it was never there).
  std::vector<Edge> without_test = s.train_pos;
  AttributedGraph train_again = with_edges(g, without_test);
  for (const Edge& e : s.test_pos) {
    CHECK(common_neighbors(train_only, e.first, e.second) ==
          common_neighbors(train_again, e.first, e.second));
    CHECK(adamic_adar(train_only, e.first, e.second) ==
          adamic_adar(train_again, e.first, e.second));
  }
}
