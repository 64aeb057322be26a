#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "sllm/errors.hpp"

namespace sllm {

struct GradCheckReport {
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::size_t worst_index = 0;
  std::vector<double> per_param_rel_error;
};

// Evaluates the loss at `params`; when `analytic_grads` is non-empty, also
// fills it with the analytic gradient. Must be deterministic.
using LossGradFn = std::function<double(std::span<const double> params,
                                        std::span<double> analytic_grads)>;

// Compares the analytic gradient against central finite differences with
// step h on every parameter. Relative error uses max(|analytic|, |numeric|,
// 1e-8) as the denominator.
inline GradCheckReport gradient_check(const LossGradFn& fn, std::span<double> params,
                                      double tolerance, double h = 1e-5) {
  GradCheckReport report;
  report.tolerance = tolerance;
  report.per_param_rel_error.resize(params.size(), 0.0);

  std::vector<double> analytic(params.size(), 0.0);
  const double base = fn(params, analytic);
  if (!std::isfinite(base)) throw Error("gradient_check: loss is not finite at the given point");

  for (std::size_t i = 0; i < params.size(); ++i) {
    const double orig = params[i];
    params[i] = orig + h;
    const double fp = fn(params, {});
    params[i] = orig - h;
    const double fm = fn(params, {});
    params[i] = orig;
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw Error("gradient_check: loss is not finite near parameter " + std::to_string(i));
    const double numeric = (fp - fm) / (2.0 * h);
    const double denom = std::max({std::fabs(analytic[i]), std::fabs(numeric), 1e-8});
    const double rel = std::fabs(analytic[i] - numeric) / denom;
    report.per_param_rel_error[i] = rel;
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_index = i;
    }
  }
  report.pass = report.max_rel_error <= tolerance;
  return report;
}

}  // namespace sllm
