#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "tgf/core/tensor.hpp"

namespace tgf {

enum class Activation { sigmoid, tanh, relu };

inline double sigmoid(double u) noexcept {
  // Branching keeps exp() from overflowing for large |u|.
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

inline double relu(double u) noexcept { return u > 0.0 ? u : 0.0; }

inline double activate(Activation kind, double u) noexcept {
  switch (kind) {
    case Activation::sigmoid: return sigmoid(u);
    case Activation::tanh: return std::tanh(u);
    case Activation::relu: return relu(u);
  }
  return u;
}

inline Tensor2 elementwise_activation(Activation kind, Tensor2 x) {
  for (auto& v : x.data()) v = activate(kind, v);
  return x;
}

/// Row-wise softmax with per-row max subtraction.
inline Tensor2 softmax_rows(const Tensor2& x) {
  Tensor2 out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto in = x.row(i);
    auto o = out.row(i);
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : in) mx = std::max(mx, v);
    double sum = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) {
      o[j] = std::exp(in[j] - mx);
      sum += o[j];
    }
    for (auto& v : o) v /= sum;
  }
  return out;
}

/// Gradient of the loss w.r.t. softmax inputs, given the softmax output y and upstream dy.
inline Tensor2 softmax_rows_backward(const Tensor2& y, const Tensor2& dy) {
  Tensor2 dx(y.rows(), y.cols());
  for (std::size_t i = 0; i < y.rows(); ++i) {
    auto yr = y.row(i);
    auto dyr = dy.row(i);
    double dot = 0.0;
    for (std::size_t j = 0; j < yr.size(); ++j) dot += yr[j] * dyr[j];
    auto dxr = dx.row(i);
    for (std::size_t j = 0; j < yr.size(); ++j) dxr[j] = yr[j] * (dyr[j] - dot);
  }
  return dx;
}

inline constexpr double kLayerNormEps = 1e-5;

/// gamma ⊙ (x − mean) / √(var + eps) + beta with the population variance of the row.
inline std::vector<double> layer_norm(std::span<const double> x, std::span<const double> gamma,
                                      std::span<const double> beta, double eps = kLayerNormEps) {
  if (x.size() != gamma.size() || x.size() != beta.size()) {
    throw DimensionError("layer_norm: lengths " + std::to_string(x.size()) + ", " +
                         std::to_string(gamma.size()) + ", " + std::to_string(beta.size()));
  }
  if (!(eps > 0.0)) throw DomainError("layer_norm: eps must be positive");
  const auto n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= n;
  const double inv = 1.0 / std::sqrt(var + eps);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = gamma[i] * (x[i] - mean) * inv + beta[i];
  return out;
}

/// Per-row LayerNorm over a T×d matrix, keeping what the backward pass needs.
struct LayerNormCache {
  Tensor2 normalized;             // (x − mean) / s
  std::vector<double> inv_stddev;  // 1 / s per row
};

inline Tensor2 layer_norm_rows(const Tensor2& x, const Tensor2& gamma, const Tensor2& beta,
                               LayerNormCache* cache, double eps = kLayerNormEps) {
  if (gamma.size() != x.cols() || beta.size() != x.cols()) {
    throw DimensionError("layer_norm_rows: gamma/beta " + gamma.shape_string() + "/" +
                         beta.shape_string() + " vs input " + x.shape_string());
  }
  Tensor2 out(x.rows(), x.cols());
  Tensor2 xhat(x.rows(), x.cols());
  std::vector<double> inv(x.rows());
  const auto n = static_cast<double>(x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto r = x.row(i);
    double mean = 0.0;
    for (double v : r) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : r) var += (v - mean) * (v - mean);
    var /= n;
    inv[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < x.cols(); ++j) {
      xhat(i, j) = (r[j] - mean) * inv[i];
      out(i, j) = gamma[j] * xhat(i, j) + beta[j];
    }
  }
  if (cache) {
    cache->normalized = std::move(xhat);
    cache->inv_stddev = std::move(inv);
  }
  return out;
}

/// Returns dx and accumulates dgamma, dbeta.
inline Tensor2 layer_norm_rows_backward(const LayerNormCache& cache, const Tensor2& gamma,
                                        const Tensor2& dy, Tensor2& dgamma, Tensor2& dbeta) {
  const Tensor2& xhat = cache.normalized;
  Tensor2 dx(dy.rows(), dy.cols());
  const auto n = static_cast<double>(dy.cols());
  std::vector<double> dxhat(dy.cols());
  for (std::size_t i = 0; i < dy.rows(); ++i) {
    double mean_d = 0.0;
    double mean_dx = 0.0;
    for (std::size_t j = 0; j < dy.cols(); ++j) {
      dgamma[j] += dy(i, j) * xhat(i, j);
      dbeta[j] += dy(i, j);
      dxhat[j] = dy(i, j) * gamma[j];
      mean_d += dxhat[j];
      mean_dx += dxhat[j] * xhat(i, j);
    }
    mean_d /= n;
    mean_dx /= n;
    for (std::size_t j = 0; j < dy.cols(); ++j) {
      dx(i, j) = cache.inv_stddev[i] * (dxhat[j] - mean_d - xhat(i, j) * mean_dx);
    }
  }
  return dx;
}

}  // namespace tgf
