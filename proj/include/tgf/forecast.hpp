#pragma once

#include <string>
#include <vector>

#include "tgf/data/pipeline.hpp"
#include "tgf/kernels/grnn.hpp"
#include "tgf/kernels/rbfn.hpp"

namespace tgf {

/// Flattens the last `lags` rows of a window, oldest first. lags = 1 gives the
/// one-step-lag feature vector x_{t−1}.
inline std::vector<double> lagged_features(const Tensor2& window, std::size_t lags) {
  if (lags == 0 || lags > window.rows()) {
    throw ConfigError("lagged_features: lags " + std::to_string(lags) + " outside [1, " +
                      std::to_string(window.rows()) + "]");
  }
  std::vector<double> out;
  out.reserve(lags * window.cols());
  for (std::size_t t = window.rows() - lags; t < window.rows(); ++t)
    out.insert(out.end(), window.row(t).begin(), window.row(t).end());
  return out;
}

inline Tensor2 lagged_design(const WindowSet& ws, std::size_t lags) {
  Tensor2 x(ws.size(), lags * ws.features());
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const auto f = lagged_features(ws.inputs[i], lags);
    std::copy(f.begin(), f.end(), x.row(i).begin());
  }
  return x;
}

/// Adapts the kernel regressors to the window interface shared by the sequence models.
struct RbfnForecaster {
  RbfnModel model;
  std::size_t lags = 1;
  double predict(const Tensor2& window) const { return rbfn_predict(model, lagged_features(window, lags)); }
};

struct GrnnForecaster {
  GrnnModel model;
  std::size_t lags = 1;
  double predict(const Tensor2& window) const { return grnn_predict(model, lagged_features(window, lags)); }
};

/// Point forecasts on the original price scale, aligned to target dates.
struct Forecast {
  std::vector<Date> dates;
  std::vector<double> actual;
  std::vector<double> predicted;
  std::vector<double> lower;  // empty until an interval band is attached
  std::vector<double> upper;
  double level = 0.0;

  std::size_t size() const noexcept { return dates.size(); }
};

/// Normalized-window predictions mapped back through P̂ = P̃·(P_max − P_min) + P_min.
template <class Model>
Forecast forecast_windows(const Model& model, const WindowSet& windows, const NormStats& stats) {
  Forecast fc;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    fc.dates.push_back(windows.target_dates[i]);
    fc.actual.push_back(invert_minmax(windows.targets[i], windows.target_column, stats));
    fc.predicted.push_back(invert_minmax(model.predict(windows.inputs[i]), windows.target_column, stats));
  }
  return fc;
}

/// Windows an original-scale frame with the given stats and forecasts every
/// date after the first T.
template <class Model>
Forecast predict_series(const Model& model, const SeriesFrame& frame, const NormStats& stats,
                        std::size_t window, const std::string& target = columns::kClose) {
  if (frame.rows() <= window) {
    throw SizeError("predict_series: frame of " + std::to_string(frame.rows()) +
                    " rows is too short for window " + std::to_string(window));
  }
  return forecast_windows(model, make_windows(apply_minmax(frame, stats), window, target), stats);
}

}  // namespace tgf
