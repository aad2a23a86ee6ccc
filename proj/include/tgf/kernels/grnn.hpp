#pragma once

#include <algorithm>
#include <limits>
#include <cmath>
#include <span>
#include <vector>

#include "tgf/core/params.hpp"
#include "tgf/kernels/linalg.hpp"

namespace tgf {

/// Memorizing kernel regressor: the prediction is the Gaussian-weighted
/// average of the stored targets with one shared bandwidth.
struct GrnnModel {
  Tensor2 inputs;   // n×k
  Tensor2 targets;  // n×1
  double sigma = 0.1;

  std::size_t samples() const noexcept { return inputs.rows(); }
  std::size_t input_size() const noexcept { return inputs.cols(); }

  template <class Self, class F>
  static void for_each_param(Self& self, F&& f) {
    f("stored_inputs", self.inputs);
    f("stored_targets", self.targets);
  }
};

inline const std::vector<double> kDefaultGrnnSigmaGrid{0.01, 0.03, 0.1, 0.3, 1.0};

/// Normalized kernel weights, computed relative to the largest exponent so that
/// far-away queries still give finite weights.
inline std::vector<double> grnn_weights(const GrnnModel& model, std::span<const double> x) {
  if (x.size() != model.input_size()) {
    throw DimensionError("grnn: input length " + std::to_string(x.size()) + ", model expects " +
                         std::to_string(model.input_size()));
  }
  const auto n = model.samples();
  std::vector<double> w(n);
  const double denom = 2.0 * model.sigma * model.sigma;
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = -squared_distance(x, model.inputs.row(i)) / denom;
    mx = std::max(mx, w[i]);
  }
  double sum = 0.0;
  for (auto& v : w) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (auto& v : w) v /= sum;
  return w;
}

inline double grnn_predict(const GrnnModel& model, std::span<const double> x) {
  const auto w = grnn_weights(model, x);
  double y = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) y += w[i] * model.targets[i];
  return y;
}

inline GrnnModel grnn_make(const Tensor2& x, std::span<const double> y, double sigma) {
  if (x.rows() == 0) throw SizeError("grnn: no stored samples");
  if (y.size() != x.rows()) throw DimensionError("grnn: X and y lengths differ");
  if (!(sigma > 0.0)) throw DomainError("grnn: sigma must be positive");
  return GrnnModel{x, Tensor2(y.size(), 1, std::vector<double>(y.begin(), y.end())), sigma};
}

/// Stores (X, y) and picks sigma from the grid by holdout MSE: the last 20% of
/// rows are predicted from the first 80%. Ties go to the smaller sigma.
inline GrnnModel grnn_fit(const Tensor2& x, std::span<const double> y,
                          std::vector<double> sigma_grid = kDefaultGrnnSigmaGrid) {
  const auto n = x.rows();
  if (sigma_grid.empty()) throw ConfigError("grnn_fit: empty sigma grid");
  for (double s : sigma_grid)
    if (!(s > 0.0)) throw ConfigError("grnn_fit: sigma grid values must be positive");
  if (n < 3) throw SizeError("grnn_fit: need at least 3 samples, got " + std::to_string(n));
  if (y.size() != n) throw DimensionError("grnn_fit: X and y lengths differ");

  std::sort(sigma_grid.begin(), sigma_grid.end());
  sigma_grid.erase(std::unique(sigma_grid.begin(), sigma_grid.end()), sigma_grid.end());

  auto n_fit = static_cast<std::size_t>(std::floor(0.8 * static_cast<double>(n)));
  n_fit = std::clamp<std::size_t>(n_fit, 1, n - 1);
  Tensor2 fit_x(n_fit, x.cols());
  for (std::size_t i = 0; i < n_fit; ++i) std::copy_n(x.row(i).begin(), x.cols(), fit_x.row(i).begin());
  const std::span<const double> fit_y = y.subspan(0, n_fit);

  double best_sigma = sigma_grid.front();
  double best_mse = std::numeric_limits<double>::infinity();
  for (double sigma : sigma_grid) {
    const auto m = grnn_make(fit_x, fit_y, sigma);
    double mse = 0.0;
    for (std::size_t i = n_fit; i < n; ++i) {
      const double e = grnn_predict(m, x.row(i)) - y[i];
      mse += e * e;
    }
    mse /= static_cast<double>(n - n_fit);
    if (mse < best_mse) {
      best_mse = mse;
      best_sigma = sigma;
    }
  }
  return grnn_make(x, y, best_sigma);
}

}  // namespace tgf
