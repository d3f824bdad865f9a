#include "disenlink/heuristics.hpp"

#include <cmath>

#include "disenlink/errors.hpp"

namespace disenlink {

namespace {

void check_pair(const AttributedGraph& graph, int32_t u, int32_t v) {
  if (u == v) fail("invalid_config", "heuristic scores are undefined for self-pairs");
  if (u < 0 || v < 0 || u >= graph.num_nodes || v >= graph.num_nodes) {
    fail("dimension_mismatch", "node pair outside graph");
  }
}

// Walks both sorted neighbor lists once, applying fn to shared neighbors.
template <typename Fn>
void for_common_neighbors(const AttributedGraph& graph, int32_t u, int32_t v, Fn&& fn) {
  const auto& a = graph.adjacency[static_cast<size_t>(u)];
  const auto& b = graph.adjacency[static_cast<size_t>(v)];
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) ++i;
    else if (a[i] > b[j]) ++j;
    else {
      fn(a[i]);
      ++i;
      ++j;
    }
  }
}

}  // namespace

int64_t common_neighbors(const AttributedGraph& graph, int32_t u, int32_t v) {
  check_pair(graph, u, v);
  int64_t count = 0;
  for_common_neighbors(graph, u, v, [&](int32_t) { ++count; });
  return count;
}

double adamic_adar(const AttributedGraph& graph, int32_t u, int32_t v) {
  check_pair(graph, u, v);
  double score = 0.0;
  for_common_neighbors(graph, u, v, [&](int32_t w) {
    score += 1.0 / std::log(static_cast<double>(graph.degree(w)));
  });
  return score;
}

}  // namespace disenlink
