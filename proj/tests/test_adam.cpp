#include <cmath>

#include "disenlink/adam.hpp"
#include "disenlink/errors.hpp"
#include "disenlink/gradcheck.hpp"
#include "doctest.h"

using namespace disenlink;

TEST_CASE("zero gradient and zero weight decay is a fixed point") {
  AdamState state;
  state.lr = 0.01;
  std::vector<Tensor> params = {Tensor::from_vector({1.0, -2.0, 3.0})};
  std::vector<Tensor> grads = {Tensor::zeros({3})};
  state.init(params);
  auto before = params[0].data;
  adam_step(state, params, grads);
  CHECK(params[0].data == before);
  CHECK(state.step_count == 1);
}

TEST_CASE("first step moves against the gradient sign at the learning rate") {
  // With bias correction, the first update is lr * g/|g| (up to eps).
  AdamState state;
  state.lr = 0.1;
  std::vector<Tensor> params = {Tensor::from_vector({0.5, -0.5})};
  std::vector<Tensor> grads = {Tensor::from_vector({3.0, -7.0})};
  state.init(params);
  adam_step(state, params, grads);
  CHECK(params[0][0] == doctest::Approx(0.5 - 0.1).epsilon(1e-6));
  CHECK(params[0][1] == doctest::Approx(-0.5 + 0.1).epsilon(1e-6));
}

TEST_CASE("adam minimizes a scalar quadratic") {
  // f(w) = (w-3)^2 from w=0 with lr 0.1: within 0.5 of the optimum after
  // 100 steps.
  AdamState state;
  state.lr = 0.1;
  std::vector<Tensor> params = {Tensor::from_vector({0.0})};
  state.init(params);
  for (int i = 0; i < 100; ++i) {
    std::vector<Tensor> grads = {Tensor::from_vector({2.0 * (params[0][0] - 3.0)})};
    adam_step(state, params, grads);
  }
  CHECK(std::abs(params[0][0] - 3.0) < 0.5);
}

TEST_CASE("lr zero leaves parameters bit-identical") {
  AdamState state;
  state.lr = 0.0;
  state.weight_decay = 5e-4;
  std::vector<Tensor> params = {Tensor::from_vector({0.25, -1.75, 42.0})};
  auto before = params[0].data;
  state.init(params);
  for (int i = 0; i < 10; ++i) {
    std::vector<Tensor> grads = {Tensor::from_vector({1.0, -2.0, 0.5})};
    adam_step(state, params, grads);
  }
  CHECK(params[0].data == before);
}

TEST_CASE("non-finite gradients abort the step") {
  AdamState state;
  std::vector<Tensor> params = {Tensor::from_vector({1.0})};
  state.init(params);
  std::vector<Tensor> grads = {Tensor::from_vector({std::nan("")})};
  CHECK_THROWS_AS(adam_step(state, params, grads), Error);
  CHECK(params[0][0] == 1.0);
  CHECK(state.step_count == 0);
}

TEST_CASE("weight decay pulls parameters toward zero") {
  AdamState state;
  state.lr = 0.01;
  state.weight_decay = 0.1;
  std::vector<Tensor> params = {Tensor::from_vector({2.0})};
  state.init(params);
  for (int i = 0; i < 50; ++i) {
    std::vector<Tensor> grads = {Tensor::zeros({1})};
    adam_step(state, params, grads);
  }
  CHECK(params[0][0] < 2.0);
  CHECK(params[0][0] > 0.0);
}

TEST_CASE("finite differences are exact for quadratics") {
  auto loss = [](const std::vector<Tensor>& p) {
    double acc = 0.0;
    for (double v : p[0].data) acc += (v - 1.0) * (v - 1.0);
    return acc;
  };
  std::vector<Tensor> params = {Tensor::from_vector({0.3, -0.9, 2.5})};
  std::vector<Tensor> grads = {Tensor::from_vector(
      {2.0 * (0.3 - 1.0), 2.0 * (-0.9 - 1.0), 2.0 * (2.5 - 1.0)})};
  CHECK(finite_difference_check(loss, params, grads, 1e-5) < 1e-6);
}

TEST_CASE("parameters the loss ignores have zero gradient both ways") {
  auto loss = [](const std::vector<Tensor>& p) {
    return p[0][0] * p[0][0];  // ignores p[1]
  };
  std::vector<Tensor> params = {Tensor::from_vector({2.0}), Tensor::from_vector({5.0})};
  std::vector<Tensor> grads = {Tensor::from_vector({4.0}), Tensor::zeros({1})};
  CHECK(finite_difference_check(loss, params, grads, 1e-5) < 1e-6);
}
