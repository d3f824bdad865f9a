#include "disenlink/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "disenlink/errors.hpp"
#include "disenlink/rng.hpp"

namespace disenlink {

namespace {

constexpr double kGammaLogitCap = 50.0;

// Below this density a CSR product beats the dense one comfortably.
constexpr double kSparseDensityCutoff = 0.25;

}  // namespace

FeatureSet FeatureSet::prepare(const Tensor& features, const Hyperparams& hp) {
  FeatureSet fs;
  fs.dense = hp.normalize_features ? l2_normalize_rows(features) : features;
  CsrMatrix csr = CsrMatrix::from_dense(fs.dense);
  if (csr.density() < kSparseDensityCutoff) {
    fs.csr = std::move(csr);
    fs.use_sparse = true;
    fs.dense = Tensor{};
  }
  return fs;
}

FeatureInput FeatureSet::input() const {
  FeatureInput in;
  if (use_sparse) {
    in.sparse = &csr;
  } else {
    in.dense = &dense;
  }
  return in;
}

Variant parse_variant(const std::string& name) {
  if (name == "full") return Variant::full;
  if (name == "no-alpha") return Variant::no_alpha;
  if (name == "no-selection") return Variant::no_selection;
  if (name == "vanilla-recon") return Variant::vanilla_recon;
  fail("invalid_config", "unknown variant \"" + name +
                             "\" (expected full|no-alpha|no-selection|vanilla-recon)");
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::full: return "full";
    case Variant::no_alpha: return "no-alpha";
    case Variant::no_selection: return "no-selection";
    case Variant::vanilla_recon: return "vanilla-recon";
  }
  return "full";
}

void Hyperparams::validate() const {
  if (factors < 1) fail("invalid_config", "factors must be >= 1");
  if (embed_dim < 1) fail("invalid_config", "embed_dim must be >= 1");
  if (resolved_hidden() < 1) fail("invalid_config", "hidden must be >= 1");
  if (!(tau > 0.0)) fail("invalid_config", "tau must be > 0");
  if (beta < 0.0 || beta > 1.0) fail("invalid_config", "beta must lie in [0, 1]");
  if (train_negatives < 1) fail("invalid_config", "train_negatives must be >= 1");
  if (lr < 0.0) fail("invalid_config", "learning rate must be >= 0");
  if (weight_decay < 0.0) fail("invalid_config", "weight decay must be >= 0");
  if (max_epochs < 1) fail("invalid_config", "max_epochs must be >= 1");
  if (eval_every < 1) fail("invalid_config", "eval_every must be >= 1");
  if (patience < 1) fail("invalid_config", "patience must be >= 1");
}

ModelState ModelState::init(int64_t feature_dim, const Hyperparams& hp) {
  hp.validate();
  ModelState s;
  s.hp = hp;
  s.feature_dim = feature_dim;
  const int hidden = hp.resolved_hidden();
  Rng rng(Rng::derive(hp.seed, 0x1217));
  for (int k = 0; k < hp.factors; ++k) {
    s.w1.push_back(glorot_init(hidden, feature_dim, rng));
    s.w2.push_back(glorot_init(hp.embed_dim, hidden, rng));
    if (hp.use_bias) {
      s.b1.push_back(Tensor::zeros({hidden}));
      s.b2.push_back(Tensor::zeros({hp.embed_dim}));
    }
  }
  s.opt.lr = hp.lr;
  s.opt.weight_decay = hp.weight_decay;
  s.opt.init(s.param_copy());
  return s;
}

std::vector<Tensor*> ModelState::param_ptrs() {
  std::vector<Tensor*> out;
  for (int k = 0; k < hp.factors; ++k) {
    out.push_back(&w1[static_cast<size_t>(k)]);
    out.push_back(&w2[static_cast<size_t>(k)]);
    if (hp.use_bias) {
      out.push_back(&b1[static_cast<size_t>(k)]);
      out.push_back(&b2[static_cast<size_t>(k)]);
    }
  }
  return out;
}

std::vector<Tensor> ModelState::param_copy() const {
  std::vector<Tensor> out;
  for (int k = 0; k < hp.factors; ++k) {
    out.push_back(w1[static_cast<size_t>(k)]);
    out.push_back(w2[static_cast<size_t>(k)]);
    if (hp.use_bias) {
      out.push_back(b1[static_cast<size_t>(k)]);
      out.push_back(b2[static_cast<size_t>(k)]);
    }
  }
  return out;
}

void ModelState::set_params(const std::vector<Tensor>& params) {
  size_t i = 0;
  for (int k = 0; k < hp.factors; ++k) {
    w1[static_cast<size_t>(k)] = params[i++];
    w2[static_cast<size_t>(k)] = params[i++];
    if (hp.use_bias) {
      b1[static_cast<size_t>(k)] = params[i++];
      b2[static_cast<size_t>(k)] = params[i++];
    }
  }
}

std::vector<std::string> ModelState::param_names() const {
  std::vector<std::string> names;
  for (int k = 0; k < hp.factors; ++k) {
    names.push_back("w1." + std::to_string(k));
    names.push_back("w2." + std::to_string(k));
    if (hp.use_bias) {
      names.push_back("b1." + std::to_string(k));
      names.push_back("b2." + std::to_string(k));
    }
  }
  return names;
}

DirectedAdj DirectedAdj::from_undirected(const std::vector<Edge>& edges, int64_t num_nodes) {
  std::vector<std::pair<int32_t, int32_t>> directed;
  directed.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    directed.emplace_back(e.first, e.second);
    directed.emplace_back(e.second, e.first);
  }
  std::sort(directed.begin(), directed.end());
  DirectedAdj adj;
  adj.num_nodes = num_nodes;
  adj.src.reserve(directed.size());
  adj.dst.reserve(directed.size());
  for (const auto& [s, t] : directed) {
    adj.src.push_back(s);
    adj.dst.push_back(t);
  }
  adj.row_offsets.assign(static_cast<size_t>(num_nodes) + 1, 0);
  for (int32_t s : adj.src) ++adj.row_offsets[static_cast<size_t>(s) + 1];
  for (size_t i = 1; i < adj.row_offsets.size(); ++i) adj.row_offsets[i] += adj.row_offsets[i - 1];
  return adj;
}

std::vector<std::vector<int32_t>> DirectedAdj::neighbor_lists() const {
  std::vector<std::vector<int32_t>> out(static_cast<size_t>(num_nodes));
  for (int64_t s = 0; s < num_nodes; ++s) {
    out[static_cast<size_t>(s)].assign(dst.begin() + row_offsets[static_cast<size_t>(s)],
                                       dst.begin() + row_offsets[static_cast<size_t>(s) + 1]);
  }
  return out;
}

ParamNodes register_params(Tape& tape, const ModelState& state) {
  ParamNodes nodes;
  for (int k = 0; k < state.hp.factors; ++k) {
    nodes.w1.push_back(tape.param(state.w1[static_cast<size_t>(k)]));
    nodes.w2.push_back(tape.param(state.w2[static_cast<size_t>(k)]));
    if (state.hp.use_bias) {
      nodes.b1.push_back(tape.param(state.b1[static_cast<size_t>(k)]));
      nodes.b2.push_back(tape.param(state.b2[static_cast<size_t>(k)]));
    }
  }
  return nodes;
}

std::vector<NodeId> project_features(Tape& tape, const FeatureInput& x, const ParamNodes& params,
                                     const Hyperparams& hp) {
  std::vector<NodeId> z;
  z.reserve(params.w1.size());
  for (size_t k = 0; k < params.w1.size(); ++k) {
    NodeId pre = x.sparse ? tape.spmm_nt(x.sparse, params.w1[k])
                          : tape.matmul(tape.constant(*x.dense), params.w1[k], false, true);
    if (hp.use_bias) pre = tape.add_rowvec(pre, params.b1[k]);
    NodeId hidden = tape.relu(pre);
    NodeId out = tape.matmul(hidden, params.w2[k], false, true);
    if (hp.use_bias) out = tape.add_rowvec(out, params.b2[k]);
    z.push_back(out);
  }
  return z;
}

std::vector<NodeId> compute_importance(Tape& tape, const std::vector<NodeId>& z,
                                       const DirectedAdj& adj, double tau) {
  if (!(tau > 0.0)) fail("invalid_config", "tau must be > 0");
  const int K = static_cast<int>(z.size());
  const int64_t num_edges = adj.num_directed();

  std::vector<NodeId> logits;
  logits.reserve(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) {
    logits.push_back(tape.scale(tape.pair_dot(z[static_cast<size_t>(k)], adj.src, adj.dst), 1.0 / tau));
  }

  // Per-edge max logit, subtracted as a constant; softmax is invariant to
  // the shift, so holding it fixed leaves gradients exact.
  Tensor max_logit = Tensor::full({num_edges}, -std::numeric_limits<double>::infinity());
  for (int k = 0; k < K; ++k) {
    const Tensor& lv = tape.value(logits[static_cast<size_t>(k)]);
    for (int64_t e = 0; e < num_edges; ++e) max_logit[e] = std::max(max_logit[e], lv[e]);
  }
  NodeId shift = tape.constant(std::move(max_logit));

  std::vector<NodeId> unnorm;
  unnorm.reserve(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) {
    unnorm.push_back(tape.exp(tape.sub(logits[static_cast<size_t>(k)], shift)));
  }
  NodeId denom = unnorm[0];
  for (int k = 1; k < K; ++k) denom = tape.add(denom, unnorm[static_cast<size_t>(k)]);

  std::vector<NodeId> alpha;
  alpha.reserve(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) alpha.push_back(tape.divide(unnorm[static_cast<size_t>(k)], denom));
  return alpha;
}

Selection select_factors(const Tape& tape, const std::vector<NodeId>& alpha,
                         const DirectedAdj& adj, int factors, Variant variant) {
  const int64_t num_edges = adj.num_directed();
  Selection sel;
  sel.chosen.assign(static_cast<size_t>(num_edges), 0);
  sel.factor_edges.assign(static_cast<size_t>(factors), {});
  sel.neighborhoods.num_nodes = adj.num_nodes;
  sel.neighborhoods.factors = factors;
  sel.neighborhoods.sets.assign(static_cast<size_t>(adj.num_nodes),
                                std::vector<std::vector<int32_t>>(static_cast<size_t>(factors)));

  // Argmax with ties to the lowest factor index.
  for (int64_t e = 0; e < num_edges; ++e) {
    int best = 0;
    double best_val = tape.value(alpha[0])[e];
    for (int k = 1; k < factors; ++k) {
      double v = tape.value(alpha[static_cast<size_t>(k)])[e];
      if (v > best_val) {
        best_val = v;
        best = k;
      }
    }
    sel.chosen[static_cast<size_t>(e)] = best;
  }

  if (variant == Variant::no_selection) {
    for (int k = 0; k < factors; ++k) {
      auto& idx = sel.factor_edges[static_cast<size_t>(k)];
      idx.resize(static_cast<size_t>(num_edges));
      for (int64_t e = 0; e < num_edges; ++e) idx[static_cast<size_t>(e)] = static_cast<int32_t>(e);
    }
    for (int64_t s = 0; s < adj.num_nodes; ++s) {
      std::vector<int32_t> nbrs(adj.dst.begin() + adj.row_offsets[static_cast<size_t>(s)],
                                adj.dst.begin() + adj.row_offsets[static_cast<size_t>(s) + 1]);
      for (int k = 0; k < factors; ++k) {
        sel.neighborhoods.sets[static_cast<size_t>(s)][static_cast<size_t>(k)] = nbrs;
      }
    }
    return sel;
  }

  for (int64_t e = 0; e < num_edges; ++e) {
    const int k = sel.chosen[static_cast<size_t>(e)];
    sel.factor_edges[static_cast<size_t>(k)].push_back(static_cast<int32_t>(e));
    sel.neighborhoods.sets[static_cast<size_t>(adj.src[static_cast<size_t>(e)])]
                          [static_cast<size_t>(k)].push_back(adj.dst[static_cast<size_t>(e)]);
  }
  return sel;
}

std::vector<NodeId> normalize_attention(Tape& tape, const std::vector<NodeId>& alpha,
                                        const Selection& selection, const DirectedAdj& adj,
                                        Variant variant) {
  const int K = selection.neighborhoods.factors;
  std::vector<NodeId> alpha_bar;
  alpha_bar.reserve(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) {
    const auto& edge_idx = selection.factor_edges[static_cast<size_t>(k)];
    std::vector<int32_t> seg;
    seg.reserve(edge_idx.size());
    for (int32_t e : edge_idx) seg.push_back(adj.src[static_cast<size_t>(e)]);

    if (variant == Variant::no_alpha) {
      // Uniform attention over the factor neighborhood; constant, so no
      // gradient flows through alpha anywhere.
      Tensor w = Tensor::zeros({static_cast<int64_t>(edge_idx.size())});
      std::vector<int64_t> counts(static_cast<size_t>(adj.num_nodes), 0);
      for (int32_t s : seg) ++counts[static_cast<size_t>(s)];
      for (size_t i = 0; i < seg.size(); ++i) {
        w.data[i] = 1.0 / static_cast<double>(counts[static_cast<size_t>(seg[i])]);
      }
      alpha_bar.push_back(tape.constant(std::move(w)));
      continue;
    }

    NodeId picked = tape.gather_rows(alpha[static_cast<size_t>(k)], edge_idx);
    NodeId per_node_sum = tape.segment_sum(picked, seg, adj.num_nodes);
    NodeId denom = tape.gather_rows(per_node_sum, seg);
    alpha_bar.push_back(tape.divide(picked, denom));
  }
  return alpha_bar;
}

std::vector<NodeId> message_pass(Tape& tape, const std::vector<NodeId>& z,
                                 const std::vector<NodeId>& alpha_bar,
                                 const Selection& selection, const DirectedAdj& adj, double beta) {
  if (beta < 0.0 || beta > 1.0) fail("invalid_config", "beta must lie in [0, 1]");
  const int K = static_cast<int>(z.size());
  std::vector<NodeId> h;
  h.reserve(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) {
    const auto& edge_idx = selection.factor_edges[static_cast<size_t>(k)];
    std::vector<int32_t> out_row, in_row;
    out_row.reserve(edge_idx.size());
    in_row.reserve(edge_idx.size());
    for (int32_t e : edge_idx) {
      out_row.push_back(adj.src[static_cast<size_t>(e)]);
      in_row.push_back(adj.dst[static_cast<size_t>(e)]);
    }
    NodeId agg = tape.scatter_weighted_rows(z[static_cast<size_t>(k)],
                                            alpha_bar[static_cast<size_t>(k)],
                                            std::move(out_row), std::move(in_row), adj.num_nodes);
    h.push_back(tape.add(tape.scale(z[static_cast<size_t>(k)], beta),
                         tape.scale(agg, 1.0 - beta)));
  }
  return h;
}

NodeId score_pairs(Tape& tape, const std::vector<NodeId>& z, const std::vector<NodeId>& h,
                   const PairList& pairs, double tau, Variant variant) {
  const int K = static_cast<int>(z.size());
  const bool weighted = variant == Variant::full || variant == Variant::no_selection;
  NodeId logits = -1;
  for (int k = 0; k < K; ++k) {
    NodeId term = tape.pair_dot(h[static_cast<size_t>(k)], pairs.src, pairs.dst);
    if (weighted) {
      NodeId zdot = tape.pair_dot(z[static_cast<size_t>(k)], pairs.src, pairs.dst);
      NodeId gamma = tape.exp(tape.clamp(tape.scale(zdot, 1.0 / tau), -kGammaLogitCap,
                                         kGammaLogitCap));
      term = tape.mul(gamma, term);
    }
    logits = k == 0 ? term : tape.add(logits, term);
  }
  return tape.sigmoid(logits);
}

NodeId training_loss(Tape& tape, NodeId pos_scores, NodeId neg_scores,
                     const std::vector<int32_t>& negatives_per_positive) {
  const int64_t num_pos = tape.value(pos_scores).size();
  const int64_t num_neg = tape.value(neg_scores).size();
  int64_t total_negs = 0;
  for (int32_t m : negatives_per_positive) total_negs += m;
  if (total_negs != num_neg) {
    fail("shape_mismatch", "training_loss: negative counts do not match scores");
  }
  if (static_cast<int64_t>(negatives_per_positive.size()) != num_pos) {
    fail("shape_mismatch", "training_loss: one negative count per positive required");
  }

  // Each positive's negatives carry weight 1/m_i so a skipped source does
  // not distort the balance.
  Tensor weights = Tensor::zeros({num_neg});
  int64_t at = 0;
  for (int32_t m : negatives_per_positive) {
    for (int32_t j = 0; j < m; ++j) weights[at++] = 1.0 / static_cast<double>(m);
  }

  NodeId residual = tape.add_scalar(pos_scores, -1.0);
  NodeId pos_term = tape.dot(residual, residual);
  NodeId neg_term = tape.dot(tape.mul(neg_scores, neg_scores), tape.constant(std::move(weights)));
  return tape.add(pos_term, neg_term);
}

Forward run_forward(Tape& tape, const FeatureInput& x, const DirectedAdj& adj,
                    const ModelState& state, const Selection* frozen_selection) {
  Forward f;
  f.params = register_params(tape, state);
  f.z = project_features(tape, x, f.params, state.hp);
  f.alpha = compute_importance(tape, f.z, adj, state.hp.tau);
  f.selection = frozen_selection
                    ? *frozen_selection
                    : select_factors(tape, f.alpha, adj, state.hp.factors, state.hp.variant);
  f.alpha_bar = normalize_attention(tape, f.alpha, f.selection, adj, state.hp.variant);
  f.h = message_pass(tape, f.z, f.alpha_bar, f.selection, adj, state.hp.beta);
  return f;
}

double predict_link(const AttributedGraph& graph, const DirectedAdj& adj,
                    const ModelState& state, int32_t s, int32_t t) {
  Tape tape;
  FeatureSet features = FeatureSet::prepare(graph.features, state.hp);
  Forward f = run_forward(tape, features.input(), adj, state);
  PairList pairs;
  pairs.src = {s};
  pairs.dst = {t};
  NodeId scores = score_pairs(tape, f.z, f.h, pairs, state.hp.tau, state.hp.variant);
  return tape.value(scores)[0];
}

FactorEmbeddings compute_embeddings(const AttributedGraph& graph, const DirectedAdj& adj,
                                    const ModelState& state, EdgeFactorScores* scores,
                                    const PairList* scored_pairs) {
  Tape tape;
  FeatureSet features = FeatureSet::prepare(graph.features, state.hp);
  Forward f = run_forward(tape, features.input(), adj, state);

  const int K = state.hp.factors;
  const int d = state.hp.embed_dim;
  FactorEmbeddings emb;
  emb.num_nodes = graph.num_nodes;
  emb.factors = K;
  emb.embed_dim = d;
  emb.z = Tensor::zeros({graph.num_nodes, static_cast<int64_t>(K) * d});
  emb.h = Tensor::zeros({graph.num_nodes, static_cast<int64_t>(K) * d});
  for (int k = 0; k < K; ++k) {
    const Tensor& zk = tape.value(f.z[static_cast<size_t>(k)]);
    const Tensor& hk = tape.value(f.h[static_cast<size_t>(k)]);
    for (int64_t i = 0; i < graph.num_nodes; ++i) {
      for (int j = 0; j < d; ++j) {
        emb.z.at(i, static_cast<int64_t>(k) * d + j) = zk.at(i, j);
        emb.h.at(i, static_cast<int64_t>(k) * d + j) = hk.at(i, j);
      }
    }
  }

  if (scores) {
    const int64_t num_edges = adj.num_directed();
    scores->alpha = Tensor::zeros({num_edges, K});
    for (int k = 0; k < K; ++k) {
      const Tensor& ak = tape.value(f.alpha[static_cast<size_t>(k)]);
      for (int64_t e = 0; e < num_edges; ++e) scores->alpha.at(e, k) = ak[e];
    }
    scores->chosen = f.selection.chosen;
    scores->alpha_bar = Tensor::zeros({num_edges});
    for (int k = 0; k < K; ++k) {
      const auto& edge_idx = f.selection.factor_edges[static_cast<size_t>(k)];
      const Tensor& abk = tape.value(f.alpha_bar[static_cast<size_t>(k)]);
      for (size_t i = 0; i < edge_idx.size(); ++i) {
        // With selection disabled an edge appears under every factor; keep
        // the weight of its argmax factor for reporting.
        if (state.hp.variant == Variant::no_selection &&
            f.selection.chosen[static_cast<size_t>(edge_idx[i])] != k) {
          continue;
        }
        scores->alpha_bar[edge_idx[i]] = abk[static_cast<int64_t>(i)];
      }
    }
    if (scored_pairs) {
      const int64_t P = static_cast<int64_t>(scored_pairs->size());
      scores->gamma = Tensor::zeros({P, K});
      for (int k = 0; k < K; ++k) {
        const Tensor& zk = tape.value(f.z[static_cast<size_t>(k)]);
        for (int64_t p = 0; p < P; ++p) {
          double acc = 0.0;
          for (int j = 0; j < d; ++j) {
            acc += zk.at(scored_pairs->src[static_cast<size_t>(p)], j) *
                   zk.at(scored_pairs->dst[static_cast<size_t>(p)], j);
          }
          double logit = std::clamp(acc / state.hp.tau, -kGammaLogitCap, kGammaLogitCap);
          scores->gamma.at(p, k) = std::exp(logit);
        }
      }
    }
  }
  return emb;
}

void check_partition(const Selection& selection, const DirectedAdj& adj) {
  const int K = selection.neighborhoods.factors;
  int64_t assigned = 0;
  for (int k = 0; k < K; ++k) assigned += static_cast<int64_t>(selection.factor_edges[static_cast<size_t>(k)].size());
  if (assigned != adj.num_directed()) {
    fail("invariant_violation", "factor edge lists do not cover the adjacency exactly");
  }
  std::vector<int8_t> seen(static_cast<size_t>(adj.num_directed()), 0);
  for (int k = 0; k < K; ++k) {
    for (int32_t e : selection.factor_edges[static_cast<size_t>(k)]) {
      if (seen[static_cast<size_t>(e)]++) {
        fail("invariant_violation", "directed edge assigned to more than one factor");
      }
    }
  }
  for (int64_t s = 0; s < adj.num_nodes; ++s) {
    std::vector<int32_t> merged;
    for (int k = 0; k < K; ++k) {
      const auto& set = selection.neighborhoods.sets[static_cast<size_t>(s)][static_cast<size_t>(k)];
      merged.insert(merged.end(), set.begin(), set.end());
    }
    std::sort(merged.begin(), merged.end());
    std::vector<int32_t> expected(adj.dst.begin() + adj.row_offsets[static_cast<size_t>(s)],
                                  adj.dst.begin() + adj.row_offsets[static_cast<size_t>(s) + 1]);
    if (merged != expected) {
      fail("invariant_violation",
           "factor neighborhoods of node " + std::to_string(s) + " do not partition N(s)");
    }
  }
}

}  // namespace disenlink
