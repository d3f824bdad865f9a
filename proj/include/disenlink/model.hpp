#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "disenlink/adam.hpp"
#include "disenlink/graph.hpp"
#include "disenlink/sparse.hpp"
#include "disenlink/tape.hpp"
#include "disenlink/tensor.hpp"

namespace disenlink {

/// Pipeline variants used by the ablation study. `full` is the complete
/// model; `no_alpha` replaces attention with uniform weights and drops the
/// reconstruction weighting; `no_selection` gives every factor the full
/// neighborhood; `vanilla_recon` scores factors equally. The single-factor
/// ablation is expressed as K=1, not a named variant.
enum class Variant { full, no_alpha, no_selection, vanilla_recon };

Variant parse_variant(const std::string& name);
std::string variant_name(Variant v);

struct Hyperparams {
  int factors = 5;        // K
  int embed_dim = 32;     // d, per-factor width
  int hidden = 0;         // MLP hidden width; <= 0 means 2*embed_dim
  double tau = 1.0;       // softmax temperature
  double beta = 0.5;      // teleport weight on the centre node
  int train_negatives = 5;  // M per positive
  double lr = 1e-3;
  double weight_decay = 5e-4;
  int max_epochs = 2000;
  int eval_every = 10;    // validation cadence, in epochs
  int patience = 20;      // evaluations without improvement before stopping
  uint64_t seed = 1;
  Variant variant = Variant::full;
  bool normalize_features = false;  // row L2-normalize inputs
  bool use_bias = false;            // bias terms in the projection MLPs

  int resolved_hidden() const { return hidden > 0 ? hidden : 2 * embed_dim; }
  /// Throws invalid_config on out-of-range values. beta = 0 is accepted
  /// (pure neighbor aggregation, reachable through the sensitivity sweep).
  void validate() const;
};

/// Trainable parameters plus optimizer state. Parameter order is fixed:
/// for each factor k: w1[k], w2[k], then optional b1[k], b2[k].
struct ModelState {
  Hyperparams hp;
  int64_t feature_dim = 0;
  std::vector<Tensor> w1;  // K × (hidden × F)
  std::vector<Tensor> w2;  // K × (d × hidden)
  std::vector<Tensor> b1;  // K × (hidden), only when use_bias
  std::vector<Tensor> b2;  // K × (d), only when use_bias
  AdamState opt;

  static ModelState init(int64_t feature_dim, const Hyperparams& hp);
  std::vector<Tensor*> param_ptrs();
  std::vector<Tensor> param_copy() const;
  void set_params(const std::vector<Tensor>& params);
  std::vector<std::string> param_names() const;
};

/// Directed view of an undirected edge set: each edge appears once per
/// direction, sorted by (src, dst), with CSR offsets per source node.
struct DirectedAdj {
  int64_t num_nodes = 0;
  std::vector<int32_t> src;
  std::vector<int32_t> dst;
  std::vector<int64_t> row_offsets;  // size num_nodes+1

  static DirectedAdj from_undirected(const std::vector<Edge>& edges, int64_t num_nodes);
  int64_t num_directed() const { return static_cast<int64_t>(src.size()); }
  /// Sorted neighbor lists reconstructed from the CSR layout.
  std::vector<std::vector<int32_t>> neighbor_lists() const;
};

/// K disjoint neighbor sets per node; their union is the full neighborhood.
struct FactorNeighborhoods {
  int64_t num_nodes = 0;
  int factors = 0;
  // sets[node][k] = sorted neighbors of `node` assigned to factor k.
  std::vector<std::vector<std::vector<int32_t>>> sets;
};

/// Outcome of the per-edge factor choice.
struct Selection {
  std::vector<int32_t> chosen;                     // per directed edge; argmax factor
  std::vector<std::vector<int32_t>> factor_edges;  // K lists of directed-edge indices
  FactorNeighborhoods neighborhoods;
};

/// Per-node per-factor embeddings flattened to N × (K·d); z is
/// pre-aggregation, h post-aggregation.
struct FactorEmbeddings {
  int64_t num_nodes = 0;
  int factors = 0;
  int embed_dim = 0;
  Tensor z;  // N × (K·d)
  Tensor h;  // N × (K·d)
};

/// Per-edge factor scores extracted for analysis: normalized importance,
/// chosen factor, attention within the chosen factor, and the raw
/// reconstruction weights of scored pairs.
struct EdgeFactorScores {
  Tensor alpha;              // E × K
  std::vector<int32_t> chosen;
  Tensor alpha_bar;          // E, within the chosen factor's neighborhood
  Tensor gamma;              // P × K for the scored pairs
};

/// Node pairs to score (parallel arrays).
struct PairList {
  std::vector<int32_t> src;
  std::vector<int32_t> dst;
  size_t size() const { return src.size(); }
};

// ---------------------------------------------------------------------------
// Pipeline stages. Each stage records onto the tape so gradients flow back
// into the projection weights; only the discrete factor choice is computed
// off-tape and held constant within a forward pass.
// ---------------------------------------------------------------------------

/// Dense or CSR feature source for the projection.
struct FeatureInput {
  const Tensor* dense = nullptr;
  const CsrMatrix* sparse = nullptr;
  int64_t rows() const { return sparse ? sparse->rows : dense->rows(); }
  int64_t cols() const { return sparse ? sparse->cols : dense->cols(); }
};

/// Owns the (optionally row-normalized) feature matrix in whichever
/// representation the projection consumes; bag-of-words matrices go through
/// the CSR path.
struct FeatureSet {
  Tensor dense;
  CsrMatrix csr;
  bool use_sparse = false;

  static FeatureSet prepare(const Tensor& features, const Hyperparams& hp);
  FeatureInput input() const;
};

/// Parameter node handles for one recorded forward pass.
struct ParamNodes {
  std::vector<NodeId> w1, w2, b1, b2;
};

/// Registers the model parameters on the tape in checkpoint order.
ParamNodes register_params(Tape& tape, const ModelState& state);

/// Two-layer per-factor projection: z_k = W2_k · relu(W1_k · x).
/// Returns K nodes of shape N × d.
std::vector<NodeId> project_features(Tape& tape, const FeatureInput& x, const ParamNodes& params,
                                     const Hyperparams& hp);

/// Factor importance per directed edge: softmax over factors of
/// z_src·z_dst / tau, stabilized by subtracting the per-edge max logit.
/// Returns K nodes of shape {E}.
std::vector<NodeId> compute_importance(Tape& tape, const std::vector<NodeId>& z,
                                       const DirectedAdj& adj, double tau);

/// Picks the highest-importance factor per edge (ties to the lowest factor
/// index) and builds the disjoint per-factor neighborhoods. Off-tape. With
/// Variant::no_selection every factor keeps the full neighborhood.
Selection select_factors(const Tape& tape, const std::vector<NodeId>& alpha,
                         const DirectedAdj& adj, int factors, Variant variant);

/// Attention within each factor neighborhood: alpha renormalized over the
/// neighbors assigned to the factor. Returns K nodes, each parallel to
/// selection.factor_edges[k]. With Variant::no_alpha the weights are the
/// uniform constants 1/|N_k(s)|.
std::vector<NodeId> normalize_attention(Tape& tape, const std::vector<NodeId>& alpha,
                                        const Selection& selection, const DirectedAdj& adj,
                                        Variant variant);

/// h_k = beta * z_k + (1-beta) * sum over the factor neighborhood of
/// attention-weighted neighbor embeddings. Empty neighborhoods contribute
/// an empty sum, so isolated factor rows keep only the teleport term.
std::vector<NodeId> message_pass(Tape& tape, const std::vector<NodeId>& z,
                                 const std::vector<NodeId>& alpha_bar,
                                 const Selection& selection, const DirectedAdj& adj, double beta);

/// Link probability for every pair: sigmoid of the gamma-weighted sum of
/// per-factor h-dot-products; gamma = exp(z·z/tau) kept unnormalized
/// (logits clamped to ±50 against overflow). vanilla_recon and no_alpha
/// drop gamma and weight factors equally. Returns a node of shape {P}.
NodeId score_pairs(Tape& tape, const std::vector<NodeId>& z, const std::vector<NodeId>& h,
                   const PairList& pairs, double tau, Variant variant);

/// Squared-error reconstruction loss: sum over positives of
/// (score−1)² + (1/m_i)·Σ negatives score², where m_i is the actual
/// negative count for positive i (skipped sources contribute none).
NodeId training_loss(Tape& tape, NodeId pos_scores, NodeId neg_scores,
                     const std::vector<int32_t>& negatives_per_positive);

// ---------------------------------------------------------------------------
// Whole-pipeline helpers.
// ---------------------------------------------------------------------------

/// One recorded forward pass over the training graph.
struct Forward {
  ParamNodes params;
  std::vector<NodeId> z;          // K × (N×d)
  std::vector<NodeId> alpha;      // K × {E}
  Selection selection;
  std::vector<NodeId> alpha_bar;  // K, parallel to selection.factor_edges
  std::vector<NodeId> h;          // K × (N×d)
};

/// Records projection → importance → selection → attention → aggregation.
/// When `frozen_selection` is non-null it is used instead of recomputing the
/// factor choice (gradient checks differentiate at fixed selection, which is
/// exactly what the tape computes).
Forward run_forward(Tape& tape, const FeatureInput& x, const DirectedAdj& adj,
                    const ModelState& state, const Selection* frozen_selection = nullptr);

/// Off-tape convenience: probability that the pair is linked, using a fresh
/// forward pass over `adj`. Symmetric in (s, t).
double predict_link(const AttributedGraph& graph, const DirectedAdj& adj,
                    const ModelState& state, int32_t s, int32_t t);

/// Embeddings (and optionally edge scores) from a forward pass with the
/// current parameters.
FactorEmbeddings compute_embeddings(const AttributedGraph& graph, const DirectedAdj& adj,
                                    const ModelState& state,
                                    EdgeFactorScores* scores = nullptr,
                                    const PairList* scored_pairs = nullptr);

/// Exact partition check: every neighborhood is split across factors with
/// no overlap and no loss, i.e. the per-factor adjacencies sum back to the
/// training adjacency. Throws on violation.
void check_partition(const Selection& selection, const DirectedAdj& adj);

}  // namespace disenlink
