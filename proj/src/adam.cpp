#include "disenlink/adam.hpp"

#include <cmath>

#include "disenlink/errors.hpp"

namespace disenlink {

void AdamState::init(const std::vector<Tensor>& params) {
  m.clear();
  v.clear();
  m.reserve(params.size());
  v.reserve(params.size());
  for (const Tensor& p : params) {
    m.push_back(Tensor::zeros(p.shape));
    v.push_back(Tensor::zeros(p.shape));
  }
  step_count = 0;
}

void adam_step(AdamState& state, std::vector<Tensor>& params,
               const std::vector<Tensor>& grads) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    fail("shape_mismatch", "adam_step: parameter/gradient/moment count mismatch");
  }
  for (size_t p = 0; p < params.size(); ++p) {
    if (!params[p].same_shape(grads[p])) {
      fail("shape_mismatch", "adam_step: gradient shape mismatch at parameter " +
                                 std::to_string(p));
    }
    if (!grads[p].all_finite()) {
      fail("divergence", "adam_step: non-finite gradient at parameter " + std::to_string(p));
    }
  }

  const int64_t t = state.step_count + 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(t));
  for (size_t p = 0; p < params.size(); ++p) {
    Tensor& w = params[p];
    Tensor& m = state.m[p];
    Tensor& v = state.v[p];
    const Tensor& g0 = grads[p];
    for (size_t i = 0; i < w.data.size(); ++i) {
      const double g = g0.data[i] + state.weight_decay * w.data[i];
      m.data[i] = state.beta1 * m.data[i] + (1.0 - state.beta1) * g;
      v.data[i] = state.beta2 * v.data[i] + (1.0 - state.beta2) * g * g;
      const double m_hat = m.data[i] / bc1;
      const double v_hat = v.data[i] / bc2;
      w.data[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
  state.step_count = t;
}

}  // namespace disenlink
