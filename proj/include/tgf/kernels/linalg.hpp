#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "tgf/core/tensor.hpp"

namespace tgf {

/// Solves S x = b for symmetric positive-definite S by Cholesky factorization.
inline std::vector<double> solve_spd(Tensor2 s, std::span<const double> b) {
  const auto p = s.rows();
  if (s.cols() != p || b.size() != p) {
    throw DimensionError("solve_spd: matrix " + s.shape_string() + " vs rhs length " +
                         std::to_string(b.size()));
  }
  // In-place lower factor.
  for (std::size_t j = 0; j < p; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= s(j, k) * s(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw NumericalError("solve_spd: matrix is singular or indefinite at pivot " +
                           std::to_string(j));
    }
    s(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < p; ++i) {
      double acc = s(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= s(i, k) * s(j, k);
      s(i, j) = acc / s(j, j);
    }
  }
  std::vector<double> y(p);
  for (std::size_t i = 0; i < p; ++i) {
    double acc = b[i];
    for (std::size_t k = 0; k < i; ++k) acc -= s(i, k) * y[k];
    y[i] = acc / s(i, i);
  }
  std::vector<double> x(p);
  for (std::size_t i = p; i-- > 0;) {
    double acc = y[i];
    for (std::size_t k = i + 1; k < p; ++k) acc -= s(k, i) * x[k];
    x[i] = acc / s(i, i);
  }
  return x;
}

/// Solves (AᵀA + ridge·I) x = Aᵀb.
inline std::vector<double> solve_least_squares(const Tensor2& a, std::span<const double> b,
                                               double ridge) {
  if (a.rows() != b.size()) {
    throw DimensionError("solve_least_squares: design " + a.shape_string() + " vs " +
                         std::to_string(b.size()) + " targets");
  }
  Tensor2 gram = matmul_tn(a, a);
  for (std::size_t i = 0; i < gram.rows(); ++i) gram(i, i) += ridge;
  std::vector<double> rhs(a.cols(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t j = 0; j < a.cols(); ++j) rhs[j] += a(r, j) * b[r];
  return solve_spd(std::move(gram), rhs);
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace tgf
