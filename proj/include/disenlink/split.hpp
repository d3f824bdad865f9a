#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "disenlink/graph.hpp"

namespace disenlink {

/// Train/validation/test partition of a graph's edges plus pre-sampled
/// evaluation negatives. The three positive sets partition the edge set
/// exactly; negatives are non-edges, unique, and disjoint between
/// validation and test.
struct EdgeSplit {
  std::vector<Edge> train_pos;
  std::vector<Edge> valid_pos;
  std::vector<Edge> test_pos;
  std::vector<Edge> valid_neg;
  std::vector<Edge> test_neg;
  uint64_t seed = 0;
  std::array<double, 3> ratios{0.85, 0.05, 0.10};
};

/// Permutes the edge set under `seed`, partitions by `ratios`
/// (floor-rounded; remainders go to the training split), and samples
/// `neg_multiplier`× negatives for validation and test uniformly from the
/// non-edge pool. Deterministic for a fixed seed.
EdgeSplit split_edges(const AttributedGraph& graph, std::array<double, 3> ratios,
                      int neg_multiplier, uint64_t seed);

/// Per-positive training negatives: for positive (s, t), M targets m with
/// no train edge (s, m) and m != s, resampled fresh per epoch from
/// (seed, epoch). Sources whose neighborhood covers the whole graph are
/// skipped (counted in *skipped).
std::vector<std::vector<int32_t>> sample_training_negatives(
    const std::vector<std::vector<int32_t>>& train_adjacency, int64_t num_nodes,
    const std::vector<int32_t>& positive_sources, int num_negatives, uint64_t seed,
    int64_t epoch, int64_t* skipped = nullptr);

/// Text round-trip with [train_pos]/[valid_pos]/[valid_neg]/[test_pos]/
/// [test_neg] sections; rewriting a loaded file is byte-identical.
void save_split(const EdgeSplit& split, const std::string& path);
EdgeSplit load_split(const std::string& path);

}  // namespace disenlink
