#include <cmath>
#include <vector>

#include "disenlink/errors.hpp"
#include "disenlink/gradcheck.hpp"
#include "disenlink/rng.hpp"
#include "disenlink/tape.hpp"
#include "doctest.h"

using namespace disenlink;

namespace {

Tensor random_tensor(std::vector<int64_t> shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t = Tensor::zeros(std::move(shape));
  for (double& v : t.data) v = rng.next_uniform(lo, hi);
  return t;
}

// Scalarizes an output by a fixed random weighting so every element
// contributes to the loss the finite-difference harness sees.
double weighted_loss(Tape& tape, NodeId out, const Tensor& weights, NodeId* loss_node = nullptr) {
  NodeId w = tape.constant(weights);
  NodeId loss = tape.dot(out, w);
  if (loss_node) *loss_node = loss;
  return tape.value(loss)[0];
}

}  // namespace

TEST_CASE("relu forward and backward") {
  Tape tape;
  NodeId x = tape.param(Tensor::from_vector({-1.0, 2.0}));
  NodeId y = tape.relu(x);
  CHECK(tape.value(y).data == std::vector<double>{0.0, 2.0});
  NodeId loss = tape.sum(y);
  tape.backward(loss);
  CHECK(tape.grad(x).data == std::vector<double>{0.0, 1.0});
}

TEST_CASE("sigmoid at zero is one half") {
  Tape tape;
  NodeId x = tape.constant(Tensor::from_vector({0.0}));
  NodeId y = tape.sigmoid(x);
  CHECK(tape.value(y)[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("matmul shapes and gradient shapes") {
  Tape tape;
  Rng rng(5);
  NodeId a = tape.param(random_tensor({2, 3}, rng));
  NodeId b = tape.param(random_tensor({3, 1}, rng));
  NodeId c = tape.matmul(a, b);
  CHECK(tape.value(c).rows() == 2);
  CHECK(tape.value(c).cols() == 1);
  NodeId loss = tape.sum(c);
  tape.backward(loss);
  CHECK(tape.grad(a).shape == std::vector<int64_t>{2, 3});
  CHECK(tape.grad(b).shape == std::vector<int64_t>{3, 1});
  CHECK_THROWS_AS(tape.matmul(a, a), Error);
}

TEST_CASE("every primitive matches central finite differences") {
  // Property: tape gradients agree with numeric differentiation on random
  // small tensors, 100+ cases across the primitive set.
  Rng rng(2024);
  int cases = 0;
  for (int rep = 0; rep < 10; ++rep) {
    const int64_t r = 2 + rng.next_below(3);
    const int64_t c = 2 + rng.next_below(3);

    struct OpCase {
      const char* name;
      int arity;
      std::vector<int64_t> shape_a, shape_b;
      std::function<NodeId(Tape&, NodeId, NodeId)> build;
    };
    const std::vector<OpCase> ops = {
        {"add", 2, {r, c}, {r, c}, [](Tape& t, NodeId a, NodeId b) { return t.add(a, b); }},
        {"sub", 2, {r, c}, {r, c}, [](Tape& t, NodeId a, NodeId b) { return t.sub(a, b); }},
        {"mul", 2, {r, c}, {r, c}, [](Tape& t, NodeId a, NodeId b) { return t.mul(a, b); }},
        {"divide", 2, {r, c}, {r, c}, [](Tape& t, NodeId a, NodeId b) { return t.divide(a, b); }},
        {"scale", 1, {r, c}, {}, [](Tape& t, NodeId a, NodeId) { return t.scale(a, -1.7); }},
        {"add_scalar", 1, {r, c}, {}, [](Tape& t, NodeId a, NodeId) { return t.add_scalar(a, 0.3); }},
        {"relu", 1, {r, c}, {}, [](Tape& t, NodeId a, NodeId) { return t.relu(a); }},
        {"exp", 1, {r, c}, {}, [](Tape& t, NodeId a, NodeId) { return t.exp(a); }},
        {"sigmoid", 1, {r, c}, {}, [](Tape& t, NodeId a, NodeId) { return t.sigmoid(a); }},
        {"clamp", 1, {r, c}, {}, [](Tape& t, NodeId a, NodeId) { return t.clamp(a, -0.5, 0.5); }},
        {"matmul", 2, {r, c}, {c, r}, [](Tape& t, NodeId a, NodeId b) { return t.matmul(a, b); }},
        {"matmul_nt", 2, {r, c}, {r, c},
         [](Tape& t, NodeId a, NodeId b) { return t.matmul(a, b, false, true); }},
        {"matmul_tn", 2, {r, c}, {r, c},
         [](Tape& t, NodeId a, NodeId b) { return t.matmul(a, b, true, false); }},
        {"row_sum", 1, {r, c}, {}, [](Tape& t, NodeId a, NodeId) { return t.row_sum(a); }},
        {"dot", 2, {r * c}, {r * c}, [](Tape& t, NodeId a, NodeId b) { return t.dot(a, b); }},
        {"sum", 1, {r, c}, {}, [](Tape& t, NodeId a, NodeId) { return t.sum(a); }},
    };

    for (const OpCase& op : ops) {
      Tensor va = random_tensor(op.shape_a, rng);
      Tensor vb;
      if (op.arity == 2) {
        // Keep divide denominators away from zero.
        vb = random_tensor(op.shape_b, rng, 0.5, 1.5);
      }
      // Avoid evaluating relu/clamp at their kinks.
      if (std::string(op.name) == "relu" || std::string(op.name) == "clamp") {
        for (double& v : va.data) {
          if (std::abs(v) < 0.05) v = 0.1;
          if (std::abs(std::abs(v) - 0.5) < 0.05) v = 0.3;
        }
      }

      Tape tape;
      NodeId a = tape.param(va);
      NodeId b = op.arity == 2 ? tape.param(vb) : -1;
      NodeId out = op.build(tape, a, b);
      Tensor weights = random_tensor(tape.value(out).shape, rng);
      NodeId loss;
      weighted_loss(tape, out, weights, &loss);
      tape.backward(loss);

      std::vector<Tensor> params = {va};
      std::vector<Tensor> grads = {tape.grad(a)};
      if (op.arity == 2) {
        params.push_back(vb);
        grads.push_back(tape.grad(b));
      }
      auto loss_fn = [&](const std::vector<Tensor>& p) {
        Tape t2;
        NodeId a2 = t2.param(p[0]);
        NodeId b2 = op.arity == 2 ? t2.param(p[1]) : -1;
        NodeId out2 = op.build(t2, a2, b2);
        return weighted_loss(t2, out2, weights);
      };
      const double err = finite_difference_check(loss_fn, params, grads, 1e-5);
      INFO("op ", op.name);
      CHECK(err < 1e-5);
      ++cases;
    }
  }
  CHECK(cases >= 100);
}

TEST_CASE("graph-structured ops match finite differences") {
  Rng rng(77);
  for (int rep = 0; rep < 5; ++rep) {
    const int64_t n = 5;
    const int64_t c = 3;
    std::vector<int32_t> left, right, seg;
    for (int e = 0; e < 8; ++e) {
      left.push_back(static_cast<int32_t>(rng.next_below(n)));
      right.push_back(static_cast<int32_t>(rng.next_below(n)));
      seg.push_back(static_cast<int32_t>(rng.next_below(4)));
    }
    Tensor z = random_tensor({n, c}, rng);
    Tensor w = random_tensor({8}, rng, 0.2, 1.0);

    struct Build {
      const char* name;
      std::function<NodeId(Tape&, NodeId, NodeId)> fn;
    };
    std::vector<Build> builds = {
        {"gather_rows", [&](Tape& t, NodeId a, NodeId) { return t.gather_rows(a, left); }},
        {"pair_dot", [&](Tape& t, NodeId a, NodeId) { return t.pair_dot(a, left, right); }},
        {"scatter_weighted_rows",
         [&](Tape& t, NodeId a, NodeId b) {
           return t.scatter_weighted_rows(a, b, left, right, n);
         }},
        {"segment_sum_w", [&](Tape& t, NodeId, NodeId b) { return t.segment_sum(b, seg, 4); }},
        {"add_rowvec",
         [&](Tape& t, NodeId a, NodeId) {
           return t.add_rowvec(a, t.param(Tensor::from_vector({0.1, -0.2, 0.3})));
         }},
    };
    for (const Build& build : builds) {
      Tape tape;
      NodeId a = tape.param(z);
      NodeId b = tape.param(w);
      NodeId out = build.fn(tape, a, b);
      Tensor weights = random_tensor(tape.value(out).shape, rng);
      NodeId loss;
      weighted_loss(tape, out, weights, &loss);
      tape.backward(loss);

      std::vector<Tensor> params = {z, w};
      std::vector<Tensor> grads = {tape.grad(a), tape.grad(b)};
      auto loss_fn = [&](const std::vector<Tensor>& p) {
        Tape t2;
        NodeId a2 = t2.param(p[0]);
        NodeId b2 = t2.param(p[1]);
        NodeId out2 = build.fn(t2, a2, b2);
        return weighted_loss(t2, out2, weights);
      };
      INFO("op ", build.name);
      CHECK(finite_difference_check(loss_fn, params, grads, 1e-5) < 1e-5);
    }
  }
}

TEST_CASE("sparse product agrees with the dense path") {
  Rng rng(31);
  Tensor dense = Tensor::zeros({6, 10});
  for (double& v : dense.data) {
    if (rng.next_unit() < 0.2) v = rng.next_uniform(-1.0, 1.0);
  }
  CsrMatrix csr = CsrMatrix::from_dense(dense);
  Tensor w = random_tensor({4, 10}, rng);

  Tape t1;
  NodeId w1 = t1.param(w);
  NodeId out1 = t1.spmm_nt(&csr, w1);
  Tape t2;
  NodeId w2 = t2.param(w);
  NodeId out2 = t2.matmul(t2.constant(dense), w2, false, true);
  for (size_t i = 0; i < t1.value(out1).data.size(); ++i) {
    CHECK(t1.value(out1).data[i] == doctest::Approx(t2.value(out2).data[i]).epsilon(1e-12));
  }

  Tensor weights = random_tensor({6, 4}, rng);
  NodeId l1, l2;
  weighted_loss(t1, out1, weights, &l1);
  weighted_loss(t2, out2, weights, &l2);
  t1.backward(l1);
  t2.backward(l2);
  for (size_t i = 0; i < t1.grad(w1).data.size(); ++i) {
    CHECK(t1.grad(w1).data[i] == doctest::Approx(t2.grad(w2).data[i]).epsilon(1e-12));
  }
}

TEST_CASE("backward of a sum of losses is the sum of backward passes") {
  Rng rng(13);
  Tensor va = random_tensor({3, 3}, rng);

  auto grad_of = [&](bool first, bool second) {
    Tape tape;
    NodeId a = tape.param(va);
    NodeId l1 = tape.sum(tape.mul(a, a));
    NodeId l2 = tape.dot(tape.relu(a), tape.constant(Tensor::full({3, 3}, 0.7)));
    NodeId loss;
    if (first && second) loss = tape.add(l1, l2);
    else if (first) loss = l1;
    else loss = l2;
    tape.backward(loss);
    return tape.grad(a);
  };
  Tensor g_both = grad_of(true, true);
  Tensor g1 = grad_of(true, false);
  Tensor g2 = grad_of(false, true);
  for (size_t i = 0; i < g_both.data.size(); ++i) {
    CHECK(g_both.data[i] == doctest::Approx(g1.data[i] + g2.data[i]).epsilon(1e-12));
  }
}

TEST_CASE("unused parameters receive exactly zero gradient") {
  Tape tape;
  NodeId used = tape.param(Tensor::from_vector({1.0, 2.0}));
  NodeId unused = tape.param(Tensor::from_vector({3.0, 4.0}));
  NodeId loss = tape.dot(used, used);
  tape.backward(loss);
  CHECK(tape.grad(unused).data == std::vector<double>{0.0, 0.0});
}

TEST_CASE("clamp saturation counter") {
  Tape tape;
  NodeId x = tape.constant(Tensor::from_vector({-100.0, 0.0, 100.0}));
  tape.clamp(x, -50.0, 50.0);
  CHECK(tape.clamp_saturations() == 2);
}

TEST_CASE("shape mismatches are rejected") {
  Tape tape;
  NodeId a = tape.constant(Tensor::zeros({2, 2}));
  NodeId b = tape.constant(Tensor::zeros({2, 3}));
  CHECK_THROWS_AS(tape.add(a, b), Error);
  CHECK_THROWS_AS(tape.dot(a, b), Error);
  CHECK_THROWS_AS(tape.backward(a), Error);
}
