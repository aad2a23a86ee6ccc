#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "tgf/core/errors.hpp"

namespace tgf {

/// Linear-interpolation quantile of sorted data: position p·(n−1) between order statistics.
inline double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw SizeError("quantile: no data");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile: probability outside [0, 1]");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct IntervalBand {
  std::vector<double> lower;
  std::vector<double> upper;
  double level = 0.95;
  double offset_low = 0.0;   // added to the point forecast for the lower bound
  double offset_high = 0.0;  // added for the upper bound
};

/// Fewest residuals that give at least one observation per tail, ⌈1/(1 − level)⌉.
inline std::size_t min_residuals_for(double level) {
  return static_cast<std::size_t>(std::ceil(1.0 / (1.0 - level) - 1e-9));
}

/// Band = ŷ + [q_{(1−level)/2}, q_{(1+level)/2}] of the residuals (actual − predicted).
/// Offsets are clamped so the point forecast always lies inside its band.
inline IntervalBand prediction_interval(std::span<const double> residuals,
                                        std::span<const double> point, double level = 0.95) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("prediction_interval: level outside (0, 1)");
  const auto need = min_residuals_for(level);
  if (residuals.size() < need) {
    throw SizeError("prediction_interval: need at least " + std::to_string(need) +
                    " residuals at level " + std::to_string(level) + ", got " +
                    std::to_string(residuals.size()));
  }
  std::vector<double> sorted(residuals.begin(), residuals.end());
  for (double r : sorted)
    if (!std::isfinite(r)) throw NumericalError("prediction_interval: non-finite residual");
  std::sort(sorted.begin(), sorted.end());
  IntervalBand band;
  band.level = level;
  band.offset_low = std::min(0.0, quantile_sorted(sorted, (1.0 - level) / 2.0));
  band.offset_high = std::max(0.0, quantile_sorted(sorted, (1.0 + level) / 2.0));
  for (double y : point) {
    band.lower.push_back(y + band.offset_low);
    band.upper.push_back(y + band.offset_high);
  }
  return band;
}

}  // namespace tgf
