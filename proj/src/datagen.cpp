#include "disenlink/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "disenlink/errors.hpp"
#include "disenlink/rng.hpp"

namespace disenlink {

namespace {

struct NodeProfile {
  int primary = 0;
  int secondary = -1;  // -1 when absent
  // Topic vector per active factor, unit length.
  std::vector<std::vector<double>> topics;  // indexed by slot (0=primary, 1=secondary)
  double affinity(int factor) const {
    if (factor == primary) return 1.0;
    if (factor == secondary) return 0.6;
    return 0.0;
  }
  const std::vector<double>* topic(int factor) const {
    if (factor == primary) return &topics[0];
    if (factor == secondary) return &topics[1];
    return nullptr;
  }
};

std::vector<double> unit_vector(int dim, Rng& rng) {
  std::vector<double> v(static_cast<size_t>(dim));
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& x : v) {
      x = rng.next_normal();
      norm2 += x * x;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
  return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double gumbel(Rng& rng) {
  double u = 1.0 - rng.next_unit();  // (0, 1]
  return -std::log(-std::log(u));
}

}  // namespace

DatasetSpec dataset_preset(const std::string& name) {
  DatasetSpec s;
  s.name = name;
  if (name == "texas") {
    s.nodes = 183;
    s.edges = 309;
    s.features = 1703;
    s.classes = 5;
    s.target_homophily = 0.11;
    s.true_factors = 5;
    s.secondary_factor_prob = 0.35;
    s.topic_sharpness = 3.5;
    s.words_per_factor = 28;
    s.noise_words = 4;
    s.word_noise = 0.25;
    s.seed = 1183;
  } else if (name == "wisconsin") {
    s.nodes = 251;
    s.edges = 499;
    s.features = 1703;
    s.classes = 5;
    s.target_homophily = 0.20;
    s.true_factors = 5;
    s.secondary_factor_prob = 0.35;
    s.topic_sharpness = 3.5;
    s.words_per_factor = 28;
    s.noise_words = 4;
    s.word_noise = 0.25;
    s.seed = 1251;
  } else if (name == "cora") {
    s.nodes = 2708;
    s.edges = 5278;
    s.features = 1433;
    s.classes = 7;
    s.target_homophily = 0.81;
    s.true_factors = 7;
    s.secondary_factor_prob = 0.35;
    s.topic_dim = 3;
    s.topic_sharpness = 6.0;
    s.words_per_factor = 32;
    s.noise_words = 2;
    s.word_noise = 0.15;
    s.word_count_spread = 0.25;
    s.sparse_node_frac = 0.13;
    s.sparse_node_scale = 0.2;
    s.cold_degree_boost = 1.0;
    s.triadic_closure = 0.5;
    s.labels_from_factors = true;
    s.seed = 2708;
  } else if (name == "chameleon") {
    s.nodes = 2277;
    s.edges = 36101;
    s.features = 2325;
    s.classes = 5;
    s.target_homophily = 0.23;
    s.true_factors = 5;
    s.secondary_factor_prob = 0.5;
    s.topic_sharpness = 2.5;
    s.words_per_factor = 25;
    s.noise_words = 8;
    s.seed = 2277;
  } else {
    fail("invalid_config", "unknown dataset preset \"" + name +
                               "\" (expected texas|wisconsin|cora|chameleon)");
  }
  return s;
}

std::vector<std::string> dataset_preset_names() {
  return {"texas", "wisconsin", "cora", "chameleon"};
}

AttributedGraph synthesize_dataset(const DatasetSpec& spec) {
  if (spec.nodes < 2 || spec.edges < 1 || spec.features < spec.true_factors) {
    fail("invalid_config", "dataset spec too small");
  }
  Rng rng(Rng::derive(spec.seed, 0xDA7A));
  const int kt = spec.true_factors;
  const int64_t n = spec.nodes;

  // Latent node profiles.
  std::vector<NodeProfile> profiles(static_cast<size_t>(n));
  for (auto& p : profiles) {
    p.primary = static_cast<int>(rng.next_below(kt));
    p.topics.push_back(unit_vector(spec.topic_dim, rng));
    if (rng.next_unit() < spec.secondary_factor_prob) {
      p.secondary = static_cast<int>(rng.next_below(kt - 1));
      if (p.secondary >= p.primary) ++p.secondary;
      p.topics.push_back(unit_vector(spec.topic_dim, rng));
    }
  }

  // Labels: tied to the primary factor for homophilic presets, independent
  // otherwise. The per-edge same-label rate is pinned during edge sampling.
  std::vector<int32_t> labels(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    labels[static_cast<size_t>(i)] =
        spec.labels_from_factors
            ? static_cast<int32_t>(profiles[static_cast<size_t>(i)].primary % spec.classes)
            : static_cast<int32_t>(rng.next_below(spec.classes));
  }

  // Per-node word budgets vary the way document lengths do. A fraction of
  // nodes is text-poor: they only carry their factor's generic stem words,
  // which collide across nodes, so their fine position is recoverable only
  // through their neighborhoods.
  std::vector<double> word_budget(static_cast<size_t>(n), 1.0);
  std::vector<char> text_poor(static_cast<size_t>(n), 0);
  for (int64_t i = 0; i < n; ++i) {
    word_budget[static_cast<size_t>(i)] =
        rng.next_uniform(1.0 - spec.word_count_spread, 1.0 + spec.word_count_spread);
    if (rng.next_unit() < spec.sparse_node_frac) text_poor[static_cast<size_t>(i)] = 1;
  }
  auto node_weight = [&](int32_t i, int k) {
    const double boost = text_poor[static_cast<size_t>(i)] ? spec.cold_degree_boost : 1.0;
    return profiles[static_cast<size_t>(i)].affinity(k) * boost;
  };

  // Vocabulary: one block of word directions per factor; the leftover tail
  // of the feature range only receives noise words.
  const int64_t block = spec.features / kt;
  std::vector<std::vector<std::vector<double>>> word_dirs(static_cast<size_t>(kt));
  for (int k = 0; k < kt; ++k) {
    word_dirs[static_cast<size_t>(k)].reserve(static_cast<size_t>(block));
    for (int64_t m = 0; m < block; ++m) {
      word_dirs[static_cast<size_t>(k)].push_back(unit_vector(spec.topic_dim, rng));
    }
  }

  // Features: per active factor, the words whose directions best match the
  // node's topic (plus gumbel noise); then a few uniform noise words.
  Tensor features = Tensor::zeros({n, spec.features});
  std::vector<std::pair<double, int64_t>> scored(static_cast<size_t>(block));
  const int64_t stem_words = std::max<int64_t>(
      3, static_cast<int64_t>(std::lround(spec.words_per_factor * spec.sparse_node_scale)));
  for (int64_t i = 0; i < n; ++i) {
    const NodeProfile& p = profiles[static_cast<size_t>(i)];
    if (text_poor[static_cast<size_t>(i)]) {
      for (int64_t w = 0; w < std::min(stem_words, block); ++w) {
        features.at(i, static_cast<int64_t>(p.primary) * block + w) = 1.0;
      }
      continue;
    }
    for (size_t slot = 0; slot < p.topics.size(); ++slot) {
      const int k = slot == 0 ? p.primary : p.secondary;
      const double aff = p.affinity(k);
      const int64_t want = static_cast<int64_t>(
          std::lround(spec.words_per_factor * aff * word_budget[static_cast<size_t>(i)]));
      if (want < 1) continue;  // cold nodes carry only noise words
      for (int64_t m = 0; m < block; ++m) {
        const double score =
            dot(p.topics[slot], word_dirs[static_cast<size_t>(k)][static_cast<size_t>(m)]) +
            spec.word_noise * gumbel(rng);
        scored[static_cast<size_t>(m)] = {score, m};
      }
      std::partial_sort(scored.begin(), scored.begin() + std::min(want, block), scored.end(),
                        [](const auto& a, const auto& b) { return a.first > b.first; });
      for (int64_t w = 0; w < std::min(want, block); ++w) {
        features.at(i, static_cast<int64_t>(k) * block + scored[static_cast<size_t>(w)].second) = 1.0;
      }
    }
    for (int w = 0; w < spec.noise_words; ++w) {
      features.at(i, rng.next_below(spec.features)) = 1.0;
    }
  }

  // Per-factor membership pools.
  std::vector<std::vector<int32_t>> pools(static_cast<size_t>(kt));
  for (int64_t i = 0; i < n; ++i) {
    const NodeProfile& p = profiles[static_cast<size_t>(i)];
    pools[static_cast<size_t>(p.primary)].push_back(static_cast<int32_t>(i));
    if (p.secondary >= 0) pools[static_cast<size_t>(p.secondary)].push_back(static_cast<int32_t>(i));
  }
  std::vector<double> pool_weight(static_cast<size_t>(kt), 0.0);
  double pool_total = 0.0;
  for (int k = 0; k < kt; ++k) {
    for (int32_t i : pools[static_cast<size_t>(k)]) {
      pool_weight[static_cast<size_t>(k)] += node_weight(i, k);
    }
    pool_total += pool_weight[static_cast<size_t>(k)];
  }

  // Edges: pick a factor, a source by affinity, then a target by
  // affinity × exp(sharpness · topic similarity), constrained to hit the
  // same-label rate in expectation. A configurable fraction instead closes
  // a wedge inside one factor (triadic closure), which gives homophilic
  // presets their realistic clustering.
  std::vector<Edge> edges;
  std::vector<int> edge_factor;
  std::unordered_set<int64_t> edge_keys;
  edges.reserve(static_cast<size_t>(spec.edges));
  // Per-factor incidence lists for wedge sampling.
  std::vector<std::vector<std::vector<int32_t>>> factor_nbrs(
      static_cast<size_t>(n), std::vector<std::vector<int32_t>>(static_cast<size_t>(kt)));
  std::vector<double> cand_weight;
  int64_t attempts = 0;
  int64_t same_label_edges = 0;
  const int64_t max_attempts = 400 * spec.edges + 10000;

  auto label_ok = [&](int32_t a, int32_t b, bool want_same) {
    return (labels[static_cast<size_t>(a)] == labels[static_cast<size_t>(b)]) == want_same;
  };
  auto add_edge = [&](int32_t a, int32_t b, int k) {
    const Edge e = canonical_edge(a, b);
    edge_keys.insert(static_cast<int64_t>(e.first) * n + e.second);
    edges.push_back(e);
    edge_factor.push_back(k);
    factor_nbrs[static_cast<size_t>(a)][static_cast<size_t>(k)].push_back(b);
    factor_nbrs[static_cast<size_t>(b)][static_cast<size_t>(k)].push_back(a);
    if (labels[static_cast<size_t>(a)] == labels[static_cast<size_t>(b)]) ++same_label_edges;
  };

  while (static_cast<int64_t>(edges.size()) < spec.edges) {
    if (++attempts > max_attempts) {
      fail("sampling_exhausted", "dataset generator could not place the requested edge count");
    }
    // Proportional control pins the realized same-label fraction to the
    // target within one edge (a Bernoulli draw drifts under rejection).
    const bool want_same_label =
        static_cast<double>(same_label_edges) <
        spec.target_homophily * static_cast<double>(edges.size() + 1);

    if (!edges.empty() && rng.next_unit() < spec.triadic_closure) {
      // Close a wedge a-b-c inside the factor of a random existing edge.
      const size_t pick = static_cast<size_t>(rng.next_below(static_cast<int64_t>(edges.size())));
      const int k = edge_factor[pick];
      const Edge base = edges[pick];
      const int32_t a = rng.next_unit() < 0.5 ? base.first : base.second;
      const int32_t b = base.first == a ? base.second : base.first;
      const auto& bn = factor_nbrs[static_cast<size_t>(b)][static_cast<size_t>(k)];
      if (bn.size() < 2) continue;
      const int32_t c = bn[static_cast<size_t>(rng.next_below(static_cast<int64_t>(bn.size())))];
      if (c == a || !label_ok(a, c, want_same_label)) continue;
      const Edge e = canonical_edge(a, c);
      if (edge_keys.count(static_cast<int64_t>(e.first) * n + e.second)) continue;
      // Wedges still close preferentially between similar topics; cold
      // endpoints (no topic in this factor) close unconditionally.
      const auto* a_topic = profiles[static_cast<size_t>(a)].topic(k);
      const auto* c_topic = profiles[static_cast<size_t>(c)].topic(k);
      if (a_topic && c_topic &&
          rng.next_unit() > std::exp(spec.topic_sharpness * (dot(*a_topic, *c_topic) - 1.0))) {
        continue;
      }
      add_edge(a, c, k);
      continue;
    }

    // Factor.
    double pick = rng.next_unit() * pool_total;
    int k = 0;
    while (k + 1 < kt && pick > pool_weight[static_cast<size_t>(k)]) {
      pick -= pool_weight[static_cast<size_t>(k)];
      ++k;
    }
    const auto& pool = pools[static_cast<size_t>(k)];
    if (pool.size() < 2) continue;

    // Source, weighted by affinity (and the link-richness boost).
    double src_total = pool_weight[static_cast<size_t>(k)];
    double spick = rng.next_unit() * src_total;
    int32_t u = pool.back();
    for (int32_t cand : pool) {
      spick -= node_weight(cand, k);
      if (spick <= 0.0) {
        u = cand;
        break;
      }
    }

    // Target weights.
    cand_weight.assign(pool.size(), 0.0);
    double total = 0.0;
    const auto* u_topic = profiles[static_cast<size_t>(u)].topic(k);
    for (size_t c = 0; c < pool.size(); ++c) {
      const int32_t v = pool[c];
      if (v == u) continue;
      if (!label_ok(u, v, want_same_label)) continue;
      const Edge e = canonical_edge(u, v);
      if (edge_keys.count(static_cast<int64_t>(e.first) * n + e.second)) continue;
      const auto* v_topic = profiles[static_cast<size_t>(v)].topic(k);
      double w = node_weight(v, k) *
                 std::exp(spec.topic_sharpness * dot(*u_topic, *v_topic));
      cand_weight[c] = w;
      total += w;
    }
    if (total <= 0.0) continue;
    double tpick = rng.next_unit() * total;
    int32_t v = -1;
    for (size_t c = 0; c < pool.size(); ++c) {
      tpick -= cand_weight[c];
      if (cand_weight[c] > 0.0 && tpick <= 0.0) {
        v = pool[c];
        break;
      }
    }
    if (v < 0) continue;
    add_edge(u, v, k);
  }

  return make_graph(std::move(features), edges, std::move(labels));
}

void write_dataset(const AttributedGraph& graph, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  save_edges(graph, out_dir + "/edges.txt");

  std::ofstream feat(out_dir + "/features.txt");
  if (!feat) fail("io_error", "cannot write features: " + out_dir);
  for (int64_t i = 0; i < graph.num_nodes; ++i) {
    for (int64_t j = 0; j < graph.feature_dim(); ++j) {
      if (j) feat << ' ';
      const double v = graph.features.at(i, j);
      if (v == static_cast<int64_t>(v)) {
        feat << static_cast<int64_t>(v);
      } else {
        feat << v;
      }
    }
    feat << '\n';
  }

  if (graph.has_labels()) {
    std::ofstream lab(out_dir + "/labels.txt");
    if (!lab) fail("io_error", "cannot write labels: " + out_dir);
    for (int32_t l : graph.labels) lab << l << '\n';
  }
}

}  // namespace disenlink
