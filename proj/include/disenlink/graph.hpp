#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "disenlink/tensor.hpp"

namespace disenlink {

/// Undirected edge in canonical form (u < v).
using Edge = std::pair<int32_t, int32_t>;

inline Edge canonical_edge(int32_t u, int32_t v) {
  return u < v ? Edge{u, v} : Edge{v, u};
}

/// Counters reported by graph construction; duplicates and self-loops are
/// dropped rather than rejected.
struct LoadStats {
  int64_t duplicate_edges_dropped = 0;
  int64_t self_loops_dropped = 0;
};

/// Undirected sparse graph with dense node features and optional labels.
/// Immutable after construction; all operations on it are pure.
struct AttributedGraph {
  int64_t num_nodes = 0;
  std::vector<Edge> edges;                      // canonical, sorted, unique
  std::vector<std::vector<int32_t>> adjacency;  // sorted neighbor lists
  Tensor features;                              // num_nodes × F
  std::vector<int32_t> labels;                  // empty when absent

  bool has_labels() const { return !labels.empty(); }
  int64_t num_edges() const { return static_cast<int64_t>(edges.size()); }
  int64_t feature_dim() const { return features.rank() == 2 ? features.cols() : 0; }
  bool has_edge(int32_t u, int32_t v) const;
  int64_t degree(int32_t u) const { return static_cast<int64_t>(adjacency[static_cast<size_t>(u)].size()); }
};

/// Builds a validated graph from raw directed/undirected input edges:
/// symmetrizes, drops self-loops and duplicates (counted in stats), checks
/// endpoints against the feature row count.
AttributedGraph make_graph(Tensor features, const std::vector<Edge>& input_edges,
                           std::vector<int32_t> labels = {}, LoadStats* stats = nullptr);

/// Parses the on-disk text formats. Edges: two whitespace-separated
/// non-negative integers per line, '#' comments ignored. Features: one node
/// per line of F decimal values. Labels (optional): one integer per line.
/// Parse failures and endpoint/feature mismatches report line numbers.
AttributedGraph load_graph(const std::string& edges_path, const std::string& features_path,
                           const std::string& labels_path = "", LoadStats* stats = nullptr);

/// Convenience for the conventional dataset directory layout
/// (edges.txt / features.txt / labels.txt).
AttributedGraph load_graph_dir(const std::string& dataset_dir, LoadStats* stats = nullptr);

/// Writes edges in canonical form, one per line.
void save_edges(const AttributedGraph& graph, const std::string& path);

/// Fraction of edges joining same-label endpoints. Requires labels.
double edge_homophily(const AttributedGraph& graph);

/// Copy of `graph` whose edge set is replaced by `edges` (features and
/// labels shared). Used to restrict scoring to the training graph.
AttributedGraph with_edges(const AttributedGraph& graph, const std::vector<Edge>& edges);

/// Row-wise L2 normalization; zero rows stay zero.
Tensor l2_normalize_rows(const Tensor& features);

}  // namespace disenlink
