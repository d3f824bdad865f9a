#include "disenlink/split.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "disenlink/errors.hpp"
#include "disenlink/rng.hpp"

namespace disenlink {

namespace {

int64_t pair_key(int64_t n, const Edge& e) { return e.first * n + e.second; }

// Deterministic fallback when rejection sampling stalls on dense graphs:
// enumerate the remaining non-edge pool and shuffle it.
std::vector<Edge> enumerate_unused_non_edges(const AttributedGraph& graph,
                                             const std::unordered_set<int64_t>& used) {
  std::vector<Edge> pool;
  for (int32_t u = 0; u < graph.num_nodes; ++u) {
    for (int32_t v = u + 1; v < graph.num_nodes; ++v) {
      Edge e{u, v};
      if (!graph.has_edge(u, v) && !used.count(pair_key(graph.num_nodes, e))) {
        pool.push_back(e);
      }
    }
  }
  return pool;
}

}  // namespace

EdgeSplit split_edges(const AttributedGraph& graph, std::array<double, 3> ratios,
                      int neg_multiplier, uint64_t seed) {
  double ratio_sum = ratios[0] + ratios[1] + ratios[2];
  if (ratios[0] <= 0.0 || ratios[1] <= 0.0 || ratios[2] <= 0.0 ||
      std::abs(ratio_sum - 1.0) > 1e-9) {
    fail("invalid_config", "split ratios must be positive and sum to 1");
  }
  if (neg_multiplier < 1) fail("invalid_config", "negative multiplier must be >= 1");

  const int64_t n = graph.num_nodes;
  const int64_t num_edges = graph.num_edges();
  const int64_t all_pairs = n * (n - 1) / 2;
  const int64_t non_edge_pool = all_pairs - num_edges;
  if (non_edge_pool <= 0) {
    fail("sampling_exhausted", "graph has no non-edges to sample negatives from");
  }

  EdgeSplit split;
  split.seed = seed;
  split.ratios = ratios;

  std::vector<Edge> permuted = graph.edges;
  Rng perm_rng(Rng::derive(seed, 0x5511));
  perm_rng.shuffle(permuted);

  // Floor rounding for validation/test; remainder edges stay in training.
  const int64_t n_valid = static_cast<int64_t>(std::floor(ratios[1] * static_cast<double>(num_edges)));
  const int64_t n_test = static_cast<int64_t>(std::floor(ratios[2] * static_cast<double>(num_edges)));
  const int64_t n_train = num_edges - n_valid - n_test;

  split.train_pos.assign(permuted.begin(), permuted.begin() + n_train);
  split.valid_pos.assign(permuted.begin() + n_train, permuted.begin() + n_train + n_valid);
  split.test_pos.assign(permuted.begin() + n_train + n_valid, permuted.end());

  const int64_t want_valid = static_cast<int64_t>(neg_multiplier) * n_valid;
  const int64_t want_test = static_cast<int64_t>(neg_multiplier) * n_test;
  if (want_valid + want_test > non_edge_pool) {
    fail("sampling_exhausted", "non-edge pool (" + std::to_string(non_edge_pool) +
                                   ") smaller than requested negatives (" +
                                   std::to_string(want_valid + want_test) + ")");
  }

  Rng neg_rng(Rng::derive(seed, 0x4e454721));
  std::unordered_set<int64_t> used;
  used.reserve(static_cast<size_t>(want_valid + want_test) * 2);
  auto draw_into = [&](std::vector<Edge>& out, int64_t want) {
    int64_t attempts = 0;
    const int64_t max_attempts = 1000 + 200 * want;
    while (static_cast<int64_t>(out.size()) < want) {
      if (attempts++ > max_attempts) {
        std::vector<Edge> pool = enumerate_unused_non_edges(graph, used);
        neg_rng.shuffle(pool);
        for (const Edge& e : pool) {
          if (static_cast<int64_t>(out.size()) >= want) break;
          used.insert(pair_key(n, e));
          out.push_back(e);
        }
        return;
      }
      int32_t u = static_cast<int32_t>(neg_rng.next_below(n));
      int32_t v = static_cast<int32_t>(neg_rng.next_below(n));
      if (u == v) continue;
      Edge e = canonical_edge(u, v);
      if (graph.has_edge(e.first, e.second)) continue;
      if (!used.insert(pair_key(n, e)).second) continue;
      out.push_back(e);
    }
  };
  draw_into(split.valid_neg, want_valid);
  draw_into(split.test_neg, want_test);
  return split;
}

std::vector<std::vector<int32_t>> sample_training_negatives(
    const std::vector<std::vector<int32_t>>& train_adjacency, int64_t num_nodes,
    const std::vector<int32_t>& positive_sources, int num_negatives, uint64_t seed,
    int64_t epoch, int64_t* skipped) {
  if (num_negatives < 1) fail("invalid_config", "training negatives per positive must be >= 1");
  Rng rng(Rng::derive(Rng::derive(seed, 0x4e4547), static_cast<uint64_t>(epoch)));
  std::vector<std::vector<int32_t>> result;
  result.reserve(positive_sources.size());
  int64_t skip_count = 0;
  for (int32_t s : positive_sources) {
    const auto& nbrs = train_adjacency[static_cast<size_t>(s)];
    if (static_cast<int64_t>(nbrs.size()) >= num_nodes - 1) {
      ++skip_count;
      result.emplace_back();
      continue;
    }
    std::vector<int32_t> negs;
    negs.reserve(static_cast<size_t>(num_negatives));
    while (static_cast<int>(negs.size()) < num_negatives) {
      int32_t m = static_cast<int32_t>(rng.next_below(num_nodes));
      if (m == s) continue;
      if (std::binary_search(nbrs.begin(), nbrs.end(), m)) continue;
      negs.push_back(m);
    }
    result.push_back(std::move(negs));
  }
  if (skipped) *skipped = skip_count;
  return result;
}

namespace {

void write_section(std::ofstream& out, const char* name, const std::vector<Edge>& edges) {
  out << "[" << name << "]\n";
  for (const Edge& e : edges) out << e.first << " " << e.second << "\n";
}

}  // namespace

void save_split(const EdgeSplit& split, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("io_error", "cannot write split file: " + path);
  write_section(out, "train_pos", split.train_pos);
  write_section(out, "valid_pos", split.valid_pos);
  write_section(out, "valid_neg", split.valid_neg);
  write_section(out, "test_pos", split.test_pos);
  write_section(out, "test_neg", split.test_neg);
}

EdgeSplit load_split(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("io_error", "cannot open split file: " + path);
  EdgeSplit split;
  std::vector<Edge>* current = nullptr;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line == "[train_pos]") current = &split.train_pos;
      else if (line == "[valid_pos]") current = &split.valid_pos;
      else if (line == "[valid_neg]") current = &split.valid_neg;
      else if (line == "[test_pos]") current = &split.test_pos;
      else if (line == "[test_neg]") current = &split.test_neg;
      else fail("parse_error", path + ":" + std::to_string(lineno) + ": unknown section " + line);
      continue;
    }
    if (!current) {
      fail("parse_error", path + ":" + std::to_string(lineno) + ": edge before any section");
    }
    std::istringstream ls(line);
    long long u, v;
    if (!(ls >> u >> v)) {
      fail("parse_error", path + ":" + std::to_string(lineno) + ": expected an integer pair");
    }
    current->emplace_back(static_cast<int32_t>(u), static_cast<int32_t>(v));
  }
  return split;
}

}  // namespace disenlink
