#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "disenlink/graph.hpp"

namespace disenlink {

/// Seeded latent-factor benchmark generator.
///
/// Nodes carry one or two active latent factors with a continuous topic
/// vector per active factor; features are bag-of-words blocks whose words
/// are picked by topic affinity, and edges connect nodes through a shared
/// factor with probability increasing in topic similarity. Class labels are
/// either tied to the primary factor (homophilic presets) or drawn
/// independently, with the per-edge same-label rate pinned to
/// `target_homophily`. The presets mirror the node/edge/feature/class
/// counts and edge homophily of the standard small link-prediction
/// benchmarks so experiments run at identical scale.
struct DatasetSpec {
  std::string name;
  int64_t nodes = 0;
  int64_t edges = 0;
  int64_t features = 0;
  int classes = 2;
  double target_homophily = 0.5;
  int true_factors = 5;
  double secondary_factor_prob = 0.4;
  int topic_dim = 4;
  double topic_sharpness = 2.0;   // edge preference for similar topics
  int words_per_factor = 20;      // active words per (node, factor)
  int noise_words = 6;            // uniformly random extra words per node
  double word_noise = 0.7;        // gumbel noise in word selection
  double word_count_spread = 0.5; // per-node word budget in [1-s, 1+s] x base
  double sparse_node_frac = 0.1;  // nodes with almost no topic words
  double sparse_node_scale = 0.15;
  double cold_degree_boost = 2.5; // text-poor nodes tend to be link-rich
  double triadic_closure = 0.0;   // fraction of edges closing a same-factor wedge
  bool labels_from_factors = false;
  uint64_t seed = 7;
};

/// Built-in presets: texas, wisconsin, cora, chameleon.
DatasetSpec dataset_preset(const std::string& name);
std::vector<std::string> dataset_preset_names();

/// Generates the graph in memory. Deterministic in spec.seed.
AttributedGraph synthesize_dataset(const DatasetSpec& spec);

/// Writes edges.txt / features.txt / labels.txt under out_dir (created if
/// missing).
void write_dataset(const AttributedGraph& graph, const std::string& out_dir);

}  // namespace disenlink
