#include "disenlink/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "disenlink/errors.hpp"

namespace disenlink {

double finite_difference_check(const LossFn& loss_fn, std::vector<Tensor> params,
                               const std::vector<Tensor>& analytic_grads, double h) {
  if (h <= 0.0) fail("invalid_config", "finite_difference_check requires h > 0");
  if (params.size() != analytic_grads.size()) {
    fail("shape_mismatch", "finite_difference_check: parameter/gradient count mismatch");
  }
  double max_rel = 0.0;
  for (size_t p = 0; p < params.size(); ++p) {
    if (!params[p].same_shape(analytic_grads[p])) {
      fail("shape_mismatch", "finite_difference_check: gradient shape mismatch at parameter " +
                                 std::to_string(p));
    }
    for (size_t i = 0; i < params[p].data.size(); ++i) {
      const double saved = params[p].data[i];
      params[p].data[i] = saved + h;
      const double f_plus = loss_fn(params);
      params[p].data[i] = saved - h;
      const double f_minus = loss_fn(params);
      params[p].data[i] = saved;
      const double numeric = (f_plus - f_minus) / (2.0 * h);
      const double analytic = analytic_grads[p].data[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      max_rel = std::max(max_rel, std::abs(analytic - numeric) / denom);
    }
  }
  return max_rel;
}

}  // namespace disenlink
