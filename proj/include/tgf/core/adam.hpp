#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "tgf/core/params.hpp"

namespace tgf {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<Tensor2> m;
  std::vector<Tensor2> v;
  std::uint64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double lr = 1e-3;

  static AdamState for_params(const std::vector<ParamRef>& params, const AdamConfig& cfg = {}) {
    if (!(cfg.beta1 > 0.0 && cfg.beta1 < 1.0 && cfg.beta2 > 0.0 && cfg.beta2 < 1.0)) {
      throw ConfigError("adam: betas must lie in (0, 1)");
    }
    if (!(cfg.lr > 0.0) || !(cfg.eps > 0.0)) throw ConfigError("adam: lr and eps must be positive");
    AdamState s;
    s.beta1 = cfg.beta1;
    s.beta2 = cfg.beta2;
    s.eps = cfg.eps;
    s.lr = cfg.lr;
    for (const auto& p : params) {
      s.m.emplace_back(p.tensor->rows(), p.tensor->cols());
      s.v.emplace_back(p.tensor->rows(), p.tensor->cols());
    }
    return s;
  }
};

/// One bias-corrected Adam update of every parameter in place.
inline void adam_step(const std::vector<ParamRef>& params, const std::vector<ParamRef>& grads,
                      AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw DimensionError("adam_step: " + std::to_string(params.size()) + " params, " +
                         std::to_string(grads.size()) + " grads, " +
                         std::to_string(state.m.size()) + " moment slots");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].tensor->same_shape(*grads[i].tensor) ||
        !params[i].tensor->same_shape(state.m[i])) {
      throw DimensionError("adam_step: parameter '" + params[i].name + "' shape " +
                           params[i].tensor->shape_string() + " vs gradient " +
                           grads[i].tensor->shape_string());
    }
  }
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto w = params[i].tensor->data();
    auto g = grads[i].tensor->data();
    auto m = state.m[i].data();
    auto v = state.v[i].data();
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g[j];
      v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g[j] * g[j];
      const double mhat = m[j] / c1;
      const double vhat = v[j] / c2;
      w[j] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

}  // namespace tgf
