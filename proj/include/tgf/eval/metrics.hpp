#pragma once

#include <cmath>
#include <span>
#include <string>

#include "tgf/core/errors.hpp"

namespace tgf {

struct MetricReport {
  double mse = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  double mape_percent = 0.0;
  std::size_t n = 0;
};

/// MSE, RMSE = √MSE, MAE and MAPE (in percent) of predictions against actuals.
inline MetricReport compute_metrics(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) {
    throw DimensionError("compute_metrics: " + std::to_string(actual.size()) + " actuals vs " +
                         std::to_string(predicted.size()) + " predictions");
  }
  if (actual.empty()) throw SizeError("compute_metrics: no samples");
  MetricReport r;
  r.n = actual.size();
  for (std::size_t t = 0; t < r.n; ++t) {
    if (actual[t] == 0.0) {
      throw DomainError("compute_metrics: MAPE undefined, actual value at index " +
                        std::to_string(t) + " is zero");
    }
    const double e = actual[t] - predicted[t];
    r.mse += e * e;
    r.mae += std::abs(e);
    r.mape_percent += std::abs(e) / std::abs(actual[t]);
  }
  const auto n = static_cast<double>(r.n);
  r.mse /= n;
  r.rmse = std::sqrt(r.mse);
  r.mae /= n;
  r.mape_percent = r.mape_percent / n * 100.0;
  return r;
}

}  // namespace tgf
