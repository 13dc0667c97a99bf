#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "unkadf/errors.hpp"
#include "unkadf/param.hpp"

namespace unkadf {

struct GradCheckEntry {
  std::string param;
  double max_rel_error = 0.0;
  std::size_t elements = 0;
};

struct GradCheckResult {
  std::vector<GradCheckEntry> per_param;
  double max_rel_error = 0.0;

  bool passed(double tol) const { return max_rel_error < tol; }
};

/// Central finite-difference verification of analytic gradients. The caller
/// evaluates the analytic backward pass first, leaving gradients in each
/// Param's grad slot; `loss` must then re-evaluate the loss from the current
/// parameter values (pure forward, no gradient side effects). Frozen
/// parameters are excluded from the report. Relative error per element is
/// |analytic - fd| / max(|analytic|, |fd|, floor). The floor turns the test
/// into an absolute comparison for near-zero gradients: central differences
/// on a double-precision loss carry roughly 1e-12 of cancellation noise, so
/// a pure relative test below that scale would only measure the probe's own
/// noise, not the backward pass.
inline constexpr double kGradCheckFloor = 1e-6;

inline GradCheckResult grad_check(const std::function<double()>& loss,
                                  const std::vector<Param*>& params, double h = 1e-5) {
  GradCheckResult result;
  for (Param* p : params) {
    if (p->frozen) continue;
    GradCheckEntry entry;
    entry.param = p->name;
    entry.elements = p->value.size();
    double* v = p->value.data();
    const double* analytic = p->grad.data();
    for (std::size_t k = 0; k < p->value.size(); ++k) {
      const double saved = v[k];
      v[k] = saved + h;
      const double lp = loss();
      v[k] = saved - h;
      const double lm = loss();
      v[k] = saved;
      if (!std::isfinite(lp) || !std::isfinite(lm))
        throw errors::numerical("grad_check: non-finite loss while perturbing " + p->name);
      const double fd = (lp - lm) / (2.0 * h);
      const double denom = std::max({std::abs(analytic[k]), std::abs(fd), kGradCheckFloor});
      const double rel = std::abs(analytic[k] - fd) / denom;
      entry.max_rel_error = std::max(entry.max_rel_error, rel);
    }
    result.max_rel_error = std::max(result.max_rel_error, entry.max_rel_error);
    result.per_param.push_back(std::move(entry));
  }
  return result;
}

}  // namespace unkadf
