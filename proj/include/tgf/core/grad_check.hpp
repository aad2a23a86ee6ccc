#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tgf/core/params.hpp"

namespace tgf {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coordinates = 0;
};

inline double gradient_relative_error(double analytic, double numeric) noexcept {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

/// Central differences (f(w+h) − f(w−h)) / 2h on every coordinate of `params`,
/// compared against `analytic` (same names and shapes). Parameters are perturbed
/// in place and restored exactly.
inline GradCheckResult grad_check(const std::function<double()>& loss,
                                  const std::vector<ParamRef>& params,
                                  const std::vector<ParamRef>& analytic, double h = 1e-5) {
  if (!(h > 0.0)) throw DomainError("grad_check: step must be positive");
  if (params.size() != analytic.size()) {
    throw DimensionError("grad_check: parameter and gradient lists differ in length");
  }
  GradCheckResult result;
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto w = params[p].tensor->data();
    auto g = analytic[p].tensor->data();
    if (w.size() != g.size()) {
      throw DimensionError("grad_check: gradient shape mismatch for '" + params[p].name + "'");
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double saved = w[i];
      w[i] = saved + h;
      const double fp = loss();
      w[i] = saved - h;
      const double fm = loss();
      w[i] = saved;
      if (!std::isfinite(fp) || !std::isfinite(fm)) {
        throw NumericalError("grad_check: non-finite loss perturbing '" + params[p].name + "'[" +
                             std::to_string(i) + "]");
      }
      const double numeric = (fp - fm) / (2.0 * h);
      const double err = gradient_relative_error(g[i], numeric);
      ++result.coordinates;
      if (err >= result.max_rel_error) {
        result.max_rel_error = err;
        result.worst_param = params[p].name;
        result.worst_index = i;
        result.analytic = g[i];
        result.numeric = numeric;
      }
    }
  }
  return result;
}

/// Flat-vector form for closed-form checks.
inline double grad_check(const std::function<double(std::span<const double>)>& loss,
                         std::vector<double> params, std::span<const double> analytic,
                         double h = 1e-5) {
  const auto n = params.size();
  Tensor2 w(1, n, std::move(params));
  Tensor2 g = Tensor2::row_vector(analytic);
  const std::vector<ParamRef> pw{{"w", &w}};
  const std::vector<ParamRef> pg{{"w", &g}};
  return grad_check([&] { return loss(w.data()); }, pw, pg, h).max_rel_error;
}

}  // namespace tgf
