#include "disenlink/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "disenlink/errors.hpp"

namespace disenlink {

namespace {

std::vector<std::vector<int32_t>> build_adjacency(int64_t n, const std::vector<Edge>& edges) {
  std::vector<std::vector<int32_t>> adj(static_cast<size_t>(n));
  for (const Edge& e : edges) {
    adj[static_cast<size_t>(e.first)].push_back(e.second);
    adj[static_cast<size_t>(e.second)].push_back(e.first);
  }
  for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
  return adj;
}

}  // namespace

bool AttributedGraph::has_edge(int32_t u, int32_t v) const {
  const auto& nbrs = adjacency[static_cast<size_t>(u)];
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

AttributedGraph make_graph(Tensor features, const std::vector<Edge>& input_edges,
                           std::vector<int32_t> labels, LoadStats* stats) {
  AttributedGraph g;
  g.num_nodes = features.rank() == 2 ? features.rows() : 0;
  g.features = std::move(features);

  LoadStats local;
  std::vector<Edge> canon;
  canon.reserve(input_edges.size());
  for (const Edge& e : input_edges) {
    if (e.first == e.second) {
      ++local.self_loops_dropped;
      continue;
    }
    if (e.first < 0 || e.second < 0 || e.first >= g.num_nodes || e.second >= g.num_nodes) {
      fail("dimension_mismatch",
           "edge endpoint (" + std::to_string(e.first) + "," + std::to_string(e.second) +
               ") outside feature row count " + std::to_string(g.num_nodes));
    }
    canon.push_back(canonical_edge(e.first, e.second));
  }
  std::sort(canon.begin(), canon.end());
  auto last = std::unique(canon.begin(), canon.end());
  local.duplicate_edges_dropped = std::distance(last, canon.end());
  canon.erase(last, canon.end());
  g.edges = std::move(canon);
  g.adjacency = build_adjacency(g.num_nodes, g.edges);

  if (!labels.empty()) {
    if (static_cast<int64_t>(labels.size()) != g.num_nodes) {
      fail("dimension_mismatch", "label count " + std::to_string(labels.size()) +
                                     " does not match node count " + std::to_string(g.num_nodes));
    }
    g.labels = std::move(labels);
  }
  if (stats) *stats = local;
  return g;
}

namespace {

bool is_comment_or_blank(const std::string& line) {
  for (char ch : line) {
    if (ch == '#') return true;
    if (!isspace(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

std::vector<Edge> parse_edges_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("io_error", "cannot open edges file: " + path);
  std::vector<Edge> edges;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_comment_or_blank(line)) continue;
    std::istringstream ls(line);
    long long u = -1, v = -1;
    if (!(ls >> u >> v) || u < 0 || v < 0) {
      fail("parse_error", path + ":" + std::to_string(lineno) +
                              ": expected two non-negative integers, got \"" + line + "\"");
    }
    std::string trailing;
    if (ls >> trailing) {
      fail("parse_error", path + ":" + std::to_string(lineno) + ": trailing token \"" +
                              trailing + "\"");
    }
    edges.emplace_back(static_cast<int32_t>(u), static_cast<int32_t>(v));
  }
  return edges;
}

Tensor parse_features_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("io_error", "cannot open features file: " + path);
  std::vector<double> values;
  int64_t cols = -1;
  int64_t rows = 0;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_comment_or_blank(line)) continue;
    std::istringstream ls(line);
    int64_t count = 0;
    std::string tok;
    while (ls >> tok) {
      char* end = nullptr;
      double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') {
        fail("parse_error", path + ":" + std::to_string(lineno) + ": non-numeric feature \"" +
                                tok + "\"");
      }
      values.push_back(v);
      ++count;
    }
    if (count == 0) continue;
    if (cols < 0) {
      cols = count;
    } else if (count != cols) {
      fail("parse_error", path + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(cols) + " features, got " + std::to_string(count));
    }
    ++rows;
  }
  if (rows == 0) fail("parse_error", path + ": no feature rows");
  return Tensor::from_rows(rows, cols, std::move(values));
}

std::vector<int32_t> parse_labels_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("io_error", "cannot open labels file: " + path);
  std::vector<int32_t> labels;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_comment_or_blank(line)) continue;
    std::istringstream ls(line);
    long long v;
    std::string trailing;
    if (!(ls >> v) || (ls >> trailing)) {
      fail("parse_error", path + ":" + std::to_string(lineno) + ": expected one integer label");
    }
    labels.push_back(static_cast<int32_t>(v));
  }
  return labels;
}

}  // namespace

AttributedGraph load_graph(const std::string& edges_path, const std::string& features_path,
                           const std::string& labels_path, LoadStats* stats) {
  Tensor features = parse_features_file(features_path);
  std::vector<Edge> edges = parse_edges_file(edges_path);
  std::vector<int32_t> labels;
  if (!labels_path.empty()) labels = parse_labels_file(labels_path);
  return make_graph(std::move(features), edges, std::move(labels), stats);
}

AttributedGraph load_graph_dir(const std::string& dataset_dir, LoadStats* stats) {
  const std::string edges = dataset_dir + "/edges.txt";
  const std::string features = dataset_dir + "/features.txt";
  const std::string labels = dataset_dir + "/labels.txt";
  std::ifstream probe(labels);
  return load_graph(edges, features, probe ? labels : "", stats);
}

void save_edges(const AttributedGraph& graph, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("io_error", "cannot write edges file: " + path);
  for (const Edge& e : graph.edges) out << e.first << " " << e.second << "\n";
}

double edge_homophily(const AttributedGraph& graph) {
  if (!graph.has_labels()) fail("missing_labels", "edge_homophily requires node labels");
  if (graph.edges.empty()) return 0.0;
  int64_t same = 0;
  for (const Edge& e : graph.edges) {
    if (graph.labels[static_cast<size_t>(e.first)] == graph.labels[static_cast<size_t>(e.second)]) {
      ++same;
    }
  }
  return static_cast<double>(same) / static_cast<double>(graph.edges.size());
}

AttributedGraph with_edges(const AttributedGraph& graph, const std::vector<Edge>& edges) {
  AttributedGraph g;
  g.num_nodes = graph.num_nodes;
  g.features = graph.features;
  g.labels = graph.labels;
  std::vector<Edge> canon = edges;
  std::sort(canon.begin(), canon.end());
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
  g.edges = std::move(canon);
  g.adjacency = build_adjacency(g.num_nodes, g.edges);
  return g;
}

Tensor l2_normalize_rows(const Tensor& features) {
  Tensor out = features;
  const int64_t r = out.rows();
  const int64_t c = out.cols();
  for (int64_t i = 0; i < r; ++i) {
    double norm2 = 0.0;
    for (int64_t j = 0; j < c; ++j) norm2 += out.at(i, j) * out.at(i, j);
    if (norm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (int64_t j = 0; j < c; ++j) out.at(i, j) *= inv;
    }
  }
  return out;
}

}  // namespace disenlink
