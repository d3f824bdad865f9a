#pragma once

#include <functional>
#include <vector>

#include "disenlink/tensor.hpp"

namespace disenlink {

/// Loss evaluated at a full parameter set; must be deterministic.
using LossFn = std::function<double(const std::vector<Tensor>&)>;

/// Central-difference verification of analytic gradients.
///
/// Perturbs every element of every parameter by ±h, evaluates loss_fn, and
/// compares (f(θ+h)−f(θ−h))/2h against analytic_grads element-wise. Returns
/// the maximum relative error, with denominator max(|analytic|, |numeric|,
/// 1e-8).
double finite_difference_check(const LossFn& loss_fn, std::vector<Tensor> params,
                               const std::vector<Tensor>& analytic_grads, double h = 1e-5);

}  // namespace disenlink
