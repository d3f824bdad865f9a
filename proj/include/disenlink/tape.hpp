#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "disenlink/sparse.hpp"
#include "disenlink/tensor.hpp"

namespace disenlink {

using NodeId = int32_t;

/// Reverse-mode tape over dense tensors.
///
/// Nodes are recorded in topological order by construction and walked in
/// reverse on backward(). Index arrays (gather / scatter / segment) are
/// constants of the recorded program, never differentiable inputs. A tape is
/// single-threaded; independent tapes may run on separate threads.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf that never receives a gradient.
  NodeId constant(Tensor v);
  /// Leaf whose gradient is accumulated by backward().
  NodeId param(Tensor v);

  // Linear algebra. Operands are rank-2; transpose flags avoid materialized
  // transposes.
  NodeId matmul(NodeId a, NodeId b, bool transpose_a = false, bool transpose_b = false);
  /// x · wᵀ with x a constant CSR matrix (rows×k) and w rank-2 (m×k).
  /// The caller guarantees *x outlives the tape.
  NodeId spmm_nt(const CsrMatrix* x, NodeId w);

  // Elementwise; binary ops require identical shapes.
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId divide(NodeId a, NodeId b);
  NodeId scale(NodeId a, double c);
  NodeId add_scalar(NodeId a, double c);
  NodeId relu(NodeId a);
  NodeId exp(NodeId a);
  NodeId sigmoid(NodeId a);
  /// Clamps to [lo, hi]; saturated elements pass no gradient and are counted
  /// in clamp_saturations().
  NodeId clamp(NodeId a, double lo, double hi);

  // Reductions to shape {1} / {rows}.
  NodeId dot(NodeId a, NodeId b);
  NodeId sum(NodeId a);
  NodeId row_sum(NodeId a);

  /// a (rows×cols) + b ({cols}) broadcast over rows.
  NodeId add_rowvec(NodeId a, NodeId b);

  // Graph-structured ops. All index vectors are captured by value and treated
  // as program constants.
  /// out[i] = a[idx[i]] (rows for rank-2, elements for rank-1).
  NodeId gather_rows(NodeId a, std::vector<int32_t> idx);
  /// out[e] = z[left[e]] · z[right[e]] over rank-2 z.
  NodeId pair_dot(NodeId z, std::vector<int32_t> left, std::vector<int32_t> right);
  /// out[out_row[e]] += w[e] * z[in_row[e]]; out has num_rows rows.
  NodeId scatter_weighted_rows(NodeId z, NodeId w, std::vector<int32_t> out_row,
                               std::vector<int32_t> in_row, int64_t num_rows);
  /// out[seg[i]] += v[i]; out has shape {num_segments}.
  NodeId segment_sum(NodeId v, std::vector<int32_t> seg, int64_t num_segments);

  /// Seeds d(root)/d(root)=1 and accumulates gradients into every
  /// requires-grad ancestor. root must be a scalar (size-1) node.
  void backward(NodeId root);

  const Tensor& value(NodeId id) const { return nodes_[static_cast<size_t>(id)].value; }
  /// Gradient buffer; allocated as zeros on first access.
  Tensor& grad(NodeId id);
  bool requires_grad(NodeId id) const { return nodes_[static_cast<size_t>(id)].requires_grad; }
  int64_t num_nodes() const { return static_cast<int64_t>(nodes_.size()); }
  /// How many clamp() elements saturated during forward evaluation.
  int64_t clamp_saturations() const { return clamp_saturations_; }

 private:
  struct Node {
    Tensor value;
    Tensor grad;  // empty until touched
    bool requires_grad = false;
    std::function<void()> back;
  };

  NodeId emplace(Tensor value, bool requires_grad, std::function<void()> back);
  bool touched(NodeId id) const { return !nodes_[static_cast<size_t>(id)].grad.data.empty(); }
  void check_same_shape(NodeId a, NodeId b, const char* op) const;

  std::vector<Node> nodes_;
  int64_t clamp_saturations_ = 0;
};

}  // namespace disenlink
