#include "disenlink/tape.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "disenlink/errors.hpp"

namespace disenlink {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

ConstMap map_of(const Tensor& t) { return ConstMap(t.data.data(), t.rows(), t.cols()); }
MutMap map_of(Tensor& t) { return MutMap(t.data.data(), t.rows(), t.cols()); }

}  // namespace

NodeId Tape::emplace(Tensor value, bool requires_grad, std::function<void()> back) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

Tensor& Tape::grad(NodeId id) {
  Node& n = nodes_[static_cast<size_t>(id)];
  if (n.grad.data.empty()) {
    n.grad = Tensor::zeros(n.value.shape);
  }
  return n.grad;
}

void Tape::check_same_shape(NodeId a, NodeId b, const char* op) const {
  if (!value(a).same_shape(value(b))) {
    fail("shape_mismatch", std::string(op) + ": " + value(a).shape_str() + " vs " +
                               value(b).shape_str());
  }
}

NodeId Tape::constant(Tensor v) { return emplace(std::move(v), false, nullptr); }

NodeId Tape::param(Tensor v) { return emplace(std::move(v), true, nullptr); }

NodeId Tape::matmul(NodeId a, NodeId b, bool transpose_a, bool transpose_b) {
  const Tensor& va = value(a);
  const Tensor& vb = value(b);
  if (va.rank() != 2 || vb.rank() != 2) fail("shape_mismatch", "matmul requires rank-2 operands");
  const int64_t ar = transpose_a ? va.cols() : va.rows();
  const int64_t ac = transpose_a ? va.rows() : va.cols();
  const int64_t br = transpose_b ? vb.cols() : vb.rows();
  const int64_t bc = transpose_b ? vb.rows() : vb.cols();
  if (ac != br) {
    fail("shape_mismatch", "matmul inner dimensions " + va.shape_str() + (transpose_a ? "^T" : "") +
                               " x " + vb.shape_str() + (transpose_b ? "^T" : ""));
  }
  Tensor out = Tensor::zeros({ar, bc});
  {
    auto A = map_of(va);
    auto B = map_of(vb);
    auto O = map_of(out);
    if (!transpose_a && !transpose_b) O.noalias() = A * B;
    else if (transpose_a && !transpose_b) O.noalias() = A.transpose() * B;
    else if (!transpose_a && transpose_b) O.noalias() = A * B.transpose();
    else O.noalias() = A.transpose() * B.transpose();
  }
  bool rg = requires_grad(a) || requires_grad(b);
  NodeId id = emplace(std::move(out), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(id)].back = [this, a, b, id, transpose_a, transpose_b]() {
      auto G = map_of(grad(id));
      if (requires_grad(a)) {
        auto GA = map_of(grad(a));
        auto B = map_of(value(b));
        if (!transpose_a && !transpose_b) GA.noalias() += G * B.transpose();
        else if (!transpose_a && transpose_b) GA.noalias() += G * B;
        else if (transpose_a && !transpose_b) GA.noalias() += B * G.transpose();
        else GA.noalias() += B.transpose() * G.transpose();
      }
      if (requires_grad(b)) {
        auto GB = map_of(grad(b));
        auto A = map_of(value(a));
        if (!transpose_a && !transpose_b) GB.noalias() += A.transpose() * G;
        else if (transpose_a && !transpose_b) GB.noalias() += A * G;
        else if (!transpose_a && transpose_b) GB.noalias() += G.transpose() * A;
        else GB.noalias() += G.transpose() * A.transpose();
      }
    };
  }
  return id;
}

NodeId Tape::spmm_nt(const CsrMatrix* x, NodeId w) {
  const Tensor& vw = value(w);
  if (vw.rank() != 2) fail("shape_mismatch", "spmm_nt requires rank-2 weights");
  if (vw.cols() != x->cols) {
    fail("shape_mismatch", "spmm_nt: sparse cols " + std::to_string(x->cols) +
                               " vs weight cols " + std::to_string(vw.cols()));
  }
  const int64_t m = vw.rows();
  Tensor out = Tensor::zeros({x->rows, m});
  for (int64_t i = 0; i < x->rows; ++i) {
    double* orow = &out.data[static_cast<size_t>(i * m)];
    for (int64_t p = x->offsets[static_cast<size_t>(i)]; p < x->offsets[static_cast<size_t>(i) + 1]; ++p) {
      const double xv = x->values[static_cast<size_t>(p)];
      const double* wcolbase = &vw.data[0] + x->col_idx[static_cast<size_t>(p)];
      const int64_t k = vw.cols();
      for (int64_t h = 0; h < m; ++h) orow[h] += xv * wcolbase[h * k];
    }
  }
  bool rg = requires_grad(w);
  NodeId id = emplace(std::move(out), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(id)].back = [this, x, w, id]() {
      // gW[h, j] += sum_i x[i, j] * G[i, h]
      Tensor& gw = grad(w);
      const Tensor& g = grad(id);
      const int64_t m = gw.rows();
      const int64_t k = gw.cols();
      for (int64_t i = 0; i < x->rows; ++i) {
        const double* grow = &g.data[static_cast<size_t>(i * m)];
        for (int64_t p = x->offsets[static_cast<size_t>(i)]; p < x->offsets[static_cast<size_t>(i) + 1]; ++p) {
          const double xv = x->values[static_cast<size_t>(p)];
          double* gwbase = &gw.data[0] + x->col_idx[static_cast<size_t>(p)];
          for (int64_t h = 0; h < m; ++h) gwbase[h * k] += xv * grow[h];
        }
      }
    };
  }
  return id;
}

NodeId Tape::add(NodeId a, NodeId b) {
  check_same_shape(a, b, "add");
  Tensor out = value(a);
  const Tensor& vb = value(b);
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += vb.data[i];
  bool rg = requires_grad(a) || requires_grad(b);
  NodeId id = emplace(std::move(out), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(id)].back = [this, a, b, id]() {
      const Tensor& g = grad(id);
      if (requires_grad(a)) {
        Tensor& ga = grad(a);
        for (size_t i = 0; i < g.data.size(); ++i) ga.data[i] += g.data[i];
      }
      if (requires_grad(b)) {
        Tensor& gb = grad(b);
        for (size_t i = 0; i < g.data.size(); ++i) gb.data[i] += g.data[i];
      }
    };
  }
  return id;
}

NodeId Tape::sub(NodeId a, NodeId b) {
  check_same_shape(a, b, "sub");
  Tensor out = value(a);
  const Tensor& vb = value(b);
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] -= vb.data[i];
  bool rg = requires_grad(a) || requires_grad(b);
  NodeId id = emplace(std::move(out), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(id)].back = [this, a, b, id]() {
      const Tensor& g = grad(id);
      if (requires_grad(a)) {
        Tensor& ga = grad(a);
        for (size_t i = 0; i < g.data.size(); ++i) ga.data[i] += g.data[i];
      }
      if (requires_grad(b)) {
        Tensor& gb = grad(b);
        for (size_t i = 0; i < g.data.size(); ++i) gb.data[i] -= g.data[i];
      }
    };
  }
  return id;
}

NodeId Tape::mul(NodeId a, NodeId b) {
  check_same_shape(a, b, "mul");
  Tensor out = value(a);
  const Tensor& vb = value(b);
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] *= vb.data[i];
  bool rg = requires_grad(a) || requires_grad(b);
  NodeId id = emplace(std::move(out), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(id)].back = [this, a, b, id]() {
      const Tensor& g = grad(id);
      if (requires_grad(a)) {
        Tensor& ga = grad(a);
        const Tensor& vb2 = value(b);
        for (size_t i = 0; i < g.data.size(); ++i) ga.data[i] += g.data[i] * vb2.data[i];
      }
      if (requires_grad(b)) {
        Tensor& gb = grad(b);
        const Tensor& va2 = value(a);
        for (size_t i = 0; i < g.data.size(); ++i) gb.data[i] += g.data[i] * va2.data[i];
      }
    };
  }
  return id;
}

NodeId Tape::divide(NodeId a, NodeId b) {
  check_same_shape(a, b, "divide");
  Tensor out = value(a);
  const Tensor& vb = value(b);
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] /= vb.data[i];
  bool rg = requires_grad(a) || requires_grad(b);
  NodeId id = emplace(std::move(out), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(id)].back = [this, a, b, id]() {
      const Tensor& g = grad(id);
      const Tensor& vb2 = value(b);
      if (requires_grad(a)) {
        Tensor& ga = grad(a);
        for (size_t i = 0; i < g.data.size(); ++i) ga.data[i] += g.data[i] / vb2.data[i];
      }
      if (requires_grad(b)) {
        Tensor& gb = grad(b);
        const Tensor& out2 = value(id);
        for (size_t i = 0; i < g.data.size(); ++i) {
          gb.data[i] -= g.data[i] * out2.data[i] / vb2.data[i];
        }
      }
    };
  }
  return id;
}

NodeId Tape::scale(NodeId a, double c) {
  Tensor out = value(a);
  for (double& v : out.data) v *= c;
  bool rg = requires_grad(a);
  NodeId id = emplace(std::move(out), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(id)].back = [this, a, id, c]() {
      Tensor& ga = grad(a);
      const Tensor& g = grad(id);
      for (size_t i = 0; i < g.data.size(); ++i) ga.data[i] += c * g.data[i];
    };
  }
  return id;
}

NodeId Tape::add_scalar(NodeId a, double c) {
  Tensor out = value(a);
  for (double& v : out.data) v += c;
  bool rg = requires_grad(a);
  NodeId id = emplace(std::move(out), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(id)].back = [this, a, id]() {
      Tensor& ga = grad(a);
      const Tensor& g = grad(id);
      for (size_t i = 0; i < g.data.size(); ++i) ga.data[i] += g.data[i];
    };
  }
  return id;
}

NodeId Tape::relu(NodeId a) {
  Tensor out = value(a);
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  bool rg = requires_grad(a);
  NodeId id = emplace(std::move(out), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(id)].back = [this, a, id]() {
      Tensor& ga = grad(a);
      const Tensor& g = grad(id);
      const Tensor& va = value(a);
      for (size_t i = 0; i < g.data.size(); ++i) {
        if (va.data[i] > 0.0) ga.data[i] += g.data[i];
      }
    };
  }
  return id;
}

NodeId Tape::exp(NodeId a) {
  Tensor out = value(a);
  for (double& v : out.data) v = std::exp(v);
  bool rg = requires_grad(a);
  NodeId id = emplace(std::move(out), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(id)].back = [this, a, id]() {
      Tensor& ga = grad(a);
      const Tensor& g = grad(id);
      const Tensor& out2 = value(id);
      for (size_t i = 0; i < g.data.size(); ++i) ga.data[i] += g.data[i] * out2.data[i];
    };
  }
  return id;
}

NodeId Tape::sigmoid(NodeId a) {
  Tensor out = value(a);
  for (double& v : out.data) {
    v = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  }
  bool rg = requires_grad(a);
  NodeId id = emplace(std::move(out), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(id)].back = [this, a, id]() {
      Tensor& ga = grad(a);
      const Tensor& g = grad(id);
      const Tensor& out2 = value(id);
      for (size_t i = 0; i < g.data.size(); ++i) {
        double y = out2.data[i];
        ga.data[i] += g.data[i] * y * (1.0 - y);
      }
    };
  }
  return id;
}

NodeId Tape::clamp(NodeId a, double lo, double hi) {
  Tensor out = value(a);
  for (double& v : out.data) {
    if (v < lo) {
      v = lo;
      ++clamp_saturations_;
    } else if (v > hi) {
      v = hi;
      ++clamp_saturations_;
    }
  }
  bool rg = requires_grad(a);
  NodeId id = emplace(std::move(out), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(id)].back = [this, a, id, lo, hi]() {
      Tensor& ga = grad(a);
      const Tensor& g = grad(id);
      const Tensor& va = value(a);
      for (size_t i = 0; i < g.data.size(); ++i) {
        if (va.data[i] >= lo && va.data[i] <= hi) ga.data[i] += g.data[i];
      }
    };
  }
  return id;
}

NodeId Tape::dot(NodeId a, NodeId b) {
  check_same_shape(a, b, "dot");
  const Tensor& va = value(a);
  const Tensor& vb = value(b);
  double acc = 0.0;
  for (size_t i = 0; i < va.data.size(); ++i) acc += va.data[i] * vb.data[i];
  bool rg = requires_grad(a) || requires_grad(b);
  NodeId id = emplace(Tensor::scalar(acc), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(id)].back = [this, a, b, id]() {
      const double g = grad(id).data[0];
      if (requires_grad(a)) {
        Tensor& ga = grad(a);
        const Tensor& vb2 = value(b);
        for (size_t i = 0; i < ga.data.size(); ++i) ga.data[i] += g * vb2.data[i];
      }
      if (requires_grad(b)) {
        Tensor& gb = grad(b);
        const Tensor& va2 = value(a);
        for (size_t i = 0; i < gb.data.size(); ++i) gb.data[i] += g * va2.data[i];
      }
    };
  }
  return id;
}

NodeId Tape::sum(NodeId a) {
  const Tensor& va = value(a);
  double acc = 0.0;
  for (double v : va.data) acc += v;
  bool rg = requires_grad(a);
  NodeId id = emplace(Tensor::scalar(acc), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(id)].back = [this, a, id]() {
      Tensor& ga = grad(a);
      const double g = grad(id).data[0];
      for (double& v : ga.data) v += g;
    };
  }
  return id;
}

NodeId Tape::row_sum(NodeId a) {
  const Tensor& va = value(a);
  if (va.rank() != 2) fail("shape_mismatch", "row_sum requires a rank-2 operand");
  const int64_t r = va.rows();
  const int64_t c = va.cols();
  Tensor out = Tensor::zeros({r});
  for (int64_t i = 0; i < r; ++i) {
    double acc = 0.0;
    for (int64_t j = 0; j < c; ++j) acc += va.at(i, j);
    out[i] = acc;
  }
  bool rg = requires_grad(a);
  NodeId id = emplace(std::move(out), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(id)].back = [this, a, id]() {
      Tensor& ga = grad(a);
      const Tensor& g = grad(id);
      const int64_t rr = ga.rows();
      const int64_t cc = ga.cols();
      for (int64_t i = 0; i < rr; ++i) {
        for (int64_t j = 0; j < cc; ++j) ga.at(i, j) += g[i];
      }
    };
  }
  return id;
}

NodeId Tape::add_rowvec(NodeId a, NodeId b) {
  const Tensor& va = value(a);
  const Tensor& vb = value(b);
  if (va.rank() != 2 || vb.rank() != 1 || va.cols() != static_cast<int64_t>(vb.data.size())) {
    fail("shape_mismatch", "add_rowvec: " + va.shape_str() + " + " + vb.shape_str());
  }
  Tensor out = va;
  for (int64_t i = 0; i < va.rows(); ++i) {
    for (int64_t j = 0; j < va.cols(); ++j) out.at(i, j) += vb[j];
  }
  bool rg = requires_grad(a) || requires_grad(b);
  NodeId id = emplace(std::move(out), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(id)].back = [this, a, b, id]() {
      const Tensor& g = grad(id);
      if (requires_grad(a)) {
        Tensor& ga = grad(a);
        for (size_t i = 0; i < g.data.size(); ++i) ga.data[i] += g.data[i];
      }
      if (requires_grad(b)) {
        Tensor& gb = grad(b);
        for (int64_t i = 0; i < g.rows(); ++i) {
          for (int64_t j = 0; j < g.cols(); ++j) gb[j] += g.at(i, j);
        }
      }
    };
  }
  return id;
}

NodeId Tape::gather_rows(NodeId a, std::vector<int32_t> idx) {
  const Tensor& va = value(a);
  const int64_t c = va.rank() == 2 ? va.cols() : 1;
  const int64_t n = static_cast<int64_t>(idx.size());
  Tensor out = va.rank() == 2 ? Tensor::zeros({n, c}) : Tensor::zeros({n});
  for (int64_t i = 0; i < n; ++i) {
    const double* src = &va.data[static_cast<size_t>(idx[static_cast<size_t>(i)]) * c];
    double* dst = &out.data[static_cast<size_t>(i * c)];
    for (int64_t j = 0; j < c; ++j) dst[j] = src[j];
  }
  bool rg = requires_grad(a);
  NodeId id = emplace(std::move(out), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(id)].back = [this, a, id, idx = std::move(idx), c]() {
      Tensor& ga = grad(a);
      const Tensor& g = grad(id);
      for (size_t i = 0; i < idx.size(); ++i) {
        double* dst = &ga.data[static_cast<size_t>(idx[i]) * c];
        const double* src = &g.data[i * static_cast<size_t>(c)];
        for (int64_t j = 0; j < c; ++j) dst[j] += src[j];
      }
    };
  }
  return id;
}

NodeId Tape::pair_dot(NodeId z, std::vector<int32_t> left, std::vector<int32_t> right) {
  const Tensor& vz = value(z);
  if (vz.rank() != 2) fail("shape_mismatch", "pair_dot requires a rank-2 operand");
  if (left.size() != right.size()) fail("shape_mismatch", "pair_dot: index length mismatch");
  const int64_t c = vz.cols();
  const int64_t n = static_cast<int64_t>(left.size());
  Tensor out = Tensor::zeros({n});
  for (int64_t i = 0; i < n; ++i) {
    const double* l = &vz.data[static_cast<size_t>(left[static_cast<size_t>(i)]) * c];
    const double* r = &vz.data[static_cast<size_t>(right[static_cast<size_t>(i)]) * c];
    double acc = 0.0;
    for (int64_t j = 0; j < c; ++j) acc += l[j] * r[j];
    out[i] = acc;
  }
  bool rg = requires_grad(z);
  NodeId id = emplace(std::move(out), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(id)].back =
        [this, z, id, left = std::move(left), right = std::move(right), c]() {
          Tensor& gz = grad(z);
          const Tensor& vz2 = value(z);
          const Tensor& g = grad(id);
          for (size_t i = 0; i < left.size(); ++i) {
            const double gi = g.data[i];
            double* gl = &gz.data[static_cast<size_t>(left[i]) * c];
            double* gr = &gz.data[static_cast<size_t>(right[i]) * c];
            const double* vl = &vz2.data[static_cast<size_t>(left[i]) * c];
            const double* vr = &vz2.data[static_cast<size_t>(right[i]) * c];
            for (int64_t j = 0; j < c; ++j) {
              gl[j] += gi * vr[j];
              gr[j] += gi * vl[j];
            }
          }
        };
  }
  return id;
}

NodeId Tape::scatter_weighted_rows(NodeId z, NodeId w, std::vector<int32_t> out_row,
                                   std::vector<int32_t> in_row, int64_t num_rows) {
  const Tensor& vz = value(z);
  const Tensor& vw = value(w);
  if (vz.rank() != 2) fail("shape_mismatch", "scatter_weighted_rows requires rank-2 source");
  if (vw.size() != static_cast<int64_t>(out_row.size()) || out_row.size() != in_row.size()) {
    fail("shape_mismatch", "scatter_weighted_rows: index/weight length mismatch");
  }
  const int64_t c = vz.cols();
  Tensor out = Tensor::zeros({num_rows, c});
  for (size_t e = 0; e < out_row.size(); ++e) {
    const double we = vw.data[e];
    double* dst = &out.data[static_cast<size_t>(out_row[e]) * c];
    const double* src = &vz.data[static_cast<size_t>(in_row[e]) * c];
    for (int64_t j = 0; j < c; ++j) dst[j] += we * src[j];
  }
  bool rg = requires_grad(z) || requires_grad(w);
  NodeId id = emplace(std::move(out), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(id)].back =
        [this, z, w, id, out_row = std::move(out_row), in_row = std::move(in_row), c]() {
          const Tensor& g = grad(id);
          const Tensor& vz2 = value(z);
          const Tensor& vw2 = value(w);
          if (requires_grad(w)) {
            Tensor& gw = grad(w);
            for (size_t e = 0; e < out_row.size(); ++e) {
              const double* grow = &g.data[static_cast<size_t>(out_row[e]) * c];
              const double* src = &vz2.data[static_cast<size_t>(in_row[e]) * c];
              double acc = 0.0;
              for (int64_t j = 0; j < c; ++j) acc += grow[j] * src[j];
              gw.data[e] += acc;
            }
          }
          if (requires_grad(z)) {
            Tensor& gz = grad(z);
            for (size_t e = 0; e < out_row.size(); ++e) {
              const double we = vw2.data[e];
              const double* grow = &g.data[static_cast<size_t>(out_row[e]) * c];
              double* dst = &gz.data[static_cast<size_t>(in_row[e]) * c];
              for (int64_t j = 0; j < c; ++j) dst[j] += we * grow[j];
            }
          }
        };
  }
  return id;
}

NodeId Tape::segment_sum(NodeId v, std::vector<int32_t> seg, int64_t num_segments) {
  const Tensor& vv = value(v);
  if (vv.size() != static_cast<int64_t>(seg.size())) {
    fail("shape_mismatch", "segment_sum: segment ids do not match value length");
  }
  Tensor out = Tensor::zeros({num_segments});
  for (size_t i = 0; i < seg.size(); ++i) out[seg[i]] += vv.data[i];
  bool rg = requires_grad(v);
  NodeId id = emplace(std::move(out), rg, nullptr);
  if (rg) {
    nodes_[static_cast<size_t>(id)].back = [this, v, id, seg = std::move(seg)]() {
      Tensor& gv = grad(v);
      const Tensor& g = grad(id);
      for (size_t i = 0; i < seg.size(); ++i) gv.data[i] += g[seg[i]];
    };
  }
  return id;
}

void Tape::backward(NodeId root) {
  if (value(root).size() != 1) {
    fail("shape_mismatch", "backward root must be a scalar node");
  }
  grad(root).data[0] = 1.0;
  for (NodeId id = root; id >= 0; --id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.requires_grad && n.back && touched(id)) n.back();
  }
}

}  // namespace disenlink
