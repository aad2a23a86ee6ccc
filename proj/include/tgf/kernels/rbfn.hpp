#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tgf/core/params.hpp"
#include "tgf/kernels/kmeans.hpp"
#include "tgf/kernels/linalg.hpp"

namespace tgf {

/// Gaussian radial basis network: ŷ = Σ wᵢ exp(−‖x − cᵢ‖² / 2σᵢ²) + w₀.
struct RbfnModel {
  Tensor2 centers;  // m×k
  Tensor2 spreads;  // m×1
  Tensor2 weights;  // m×1
  Tensor2 bias;     // 1×1

  std::size_t neurons() const noexcept { return centers.rows(); }
  std::size_t input_size() const noexcept { return centers.cols(); }

  template <class Self, class F>
  static void for_each_param(Self& self, F&& f) {
    f("centers", self.centers);
    f("spreads", self.spreads);
    f("weights", self.weights);
    f("bias", self.bias);
  }

  void validate() const {
    if (centers.rows() == 0) throw ConfigError("rbfn: at least one neuron required");
    if (spreads.rows() != centers.rows() || weights.rows() != centers.rows() ||
        spreads.cols() != 1 || weights.cols() != 1 || bias.size() != 1) {
      throw DimensionError("rbfn: inconsistent parameter shapes");
    }
    for (double s : spreads.data())
      if (!(s > 0.0)) throw DomainError("rbfn: spreads must be positive");
  }
};

struct RbfnOptions {
  std::size_t centers = 20;
  RngSeed seed{};
  std::optional<double> spread;  // overrides the max-distance heuristic
  double ridge = 1e-8;
  KMeansOptions kmeans{};
};

inline double rbf_activation(std::span<const double> x, std::span<const double> center,
                             double spread) {
  return std::exp(-squared_distance(x, center) / (2.0 * spread * spread));
}

inline double rbfn_predict(const RbfnModel& model, std::span<const double> x) {
  if (x.size() != model.input_size()) {
    throw DimensionError("rbfn_predict: input length " + std::to_string(x.size()) +
                         ", model expects " + std::to_string(model.input_size()));
  }
  double y = model.bias[0];
  for (std::size_t i = 0; i < model.neurons(); ++i) {
    y += model.weights[i] * rbf_activation(x, model.centers.row(i), model.spreads[i]);
  }
  return y;
}

/// Fits weights and bias by least squares on [Φ | 1] for fixed centers and spreads.
/// The ridge term applies to the neuron weights only.
inline RbfnModel rbfn_fit_readout(const Tensor2& x, std::span<const double> y, Tensor2 centers,
                                  Tensor2 spreads, double ridge = 1e-8) {
  const auto n = x.rows();
  const auto m = centers.rows();
  if (y.size() != n) throw DimensionError("rbfn_fit: X and y lengths differ");
  if (centers.cols() != x.cols()) throw DimensionError("rbfn_fit: center dimension mismatch");
  Tensor2 design(n, m + 1);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < m; ++i)
      design(r, i) = rbf_activation(x.row(r), centers.row(i), spreads[i]);
    design(r, m) = 1.0;
  }
  // Unpenalized bias: the ridge solution then keeps a constant target in w₀.
  const auto p = m + 1;
  Tensor2 gram = matmul_tn(design, design);
  for (std::size_t i = 0; i < m; ++i) gram(i, i) += ridge;
  std::vector<double> rhs(p, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < p; ++j) rhs[j] += design(r, j) * y[r];
  const auto theta = solve_spd(gram, rhs);

  RbfnModel model;
  model.centers = std::move(centers);
  model.spreads = std::move(spreads);
  model.weights = Tensor2(m, 1, std::vector<double>(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(m)));
  model.bias = Tensor2(1, 1, theta[m]);
  if (!model.weights.all_finite() || !std::isfinite(model.bias[0])) {
    throw NumericalError("rbfn_fit: non-finite readout weights");
  }
  return model;
}

/// Shared spread d_max/√(2m) from the largest inter-center distance.
inline double rbfn_spread_heuristic(const Tensor2& centers, const Tensor2& x) {
  const auto m = centers.rows();
  double dmax = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      dmax = std::max(dmax, std::sqrt(squared_distance(centers.row(i), centers.row(j))));
  if (dmax > 0.0) return dmax / std::sqrt(2.0 * static_cast<double>(m));
  // One center (or all coincident): fall back to the RMS distance of the data.
  double s = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) s += squared_distance(x.row(r), centers.row(0));
  s = std::sqrt(s / static_cast<double>(x.rows()));
  return s > 0.0 ? s : 1.0;
}

/// k-means centers, shared spread, least-squares readout.
inline RbfnModel rbfn_fit(const Tensor2& x, std::span<const double> y, const RbfnOptions& opt) {
  const auto n = x.rows();
  if (opt.centers == 0 || opt.centers > n) {
    throw SizeError("rbfn_fit: need 1 <= m <= n, got m=" + std::to_string(opt.centers) +
                    ", n=" + std::to_string(n));
  }
  if (y.size() != n) throw DimensionError("rbfn_fit: X and y lengths differ");
  auto km = kmeans(x, opt.centers, opt.seed, opt.kmeans);
  const double spread = opt.spread ? *opt.spread : rbfn_spread_heuristic(km.centers, x);
  if (!(spread > 0.0)) throw DomainError("rbfn_fit: spread must be positive");
  Tensor2 spreads(opt.centers, 1, spread);
  return rbfn_fit_readout(x, y, std::move(km.centers), std::move(spreads), opt.ridge);
}

/// Mean squared residual over (X, y); when `grad` is given, accumulates its
/// gradient w.r.t. every parameter.
inline double rbfn_loss(const RbfnModel& model, const Tensor2& x, std::span<const double> y,
                        RbfnModel* grad = nullptr) {
  const auto n = x.rows();
  const auto m = model.neurons();
  const double scale = 2.0 / static_cast<double>(n);
  double loss = 0.0;
  std::vector<double> phi(m);
  for (std::size_t r = 0; r < n; ++r) {
    double pred = model.bias[0];
    for (std::size_t i = 0; i < m; ++i) {
      phi[i] = rbf_activation(x.row(r), model.centers.row(i), model.spreads[i]);
      pred += model.weights[i] * phi[i];
    }
    const double resid = pred - y[r];
    loss += resid * resid;
    if (!grad) continue;
    const double g = scale * resid;
    grad->bias[0] += g;
    for (std::size_t i = 0; i < m; ++i) {
      const double s = model.spreads[i];
      grad->weights[i] += g * phi[i];
      const double common = g * model.weights[i] * phi[i];
      auto c = model.centers.row(i);
      auto dc = grad->centers.row(i);
      auto xr = x.row(r);
      double dist2 = 0.0;
      for (std::size_t j = 0; j < c.size(); ++j) {
        dc[j] += common * (xr[j] - c[j]) / (s * s);
        dist2 += (xr[j] - c[j]) * (xr[j] - c[j]);
      }
      grad->spreads[i] += common * dist2 / (s * s * s);
    }
  }
  return loss / static_cast<double>(n);
}

}  // namespace tgf
