#pragma once

#include <cstdint>
#include <vector>

#include "disenlink/tensor.hpp"

namespace disenlink {

/// Adam with classic (coupled) L2 weight decay: the decay term is added to
/// the gradient before the moment updates.
struct AdamState {
  double lr = 1e-3;
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int64_t step_count = 0;

  std::vector<Tensor> m;
  std::vector<Tensor> v;

  /// Allocates zero moments mirroring the parameter shapes.
  void init(const std::vector<Tensor>& params);
};

/// One bias-corrected update over the full parameter list. Throws on
/// non-finite gradients without touching parameters or moments.
void adam_step(AdamState& state, std::vector<Tensor>& params,
               const std::vector<Tensor>& grads);

}  // namespace disenlink
