#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "tgf/data/series.hpp"

namespace tgf {

struct SplitSpec {
  double ratio = 0.8;
};

struct TrainTestSplit {
  SeriesFrame train;
  SeriesFrame test;
};

/// First ⌊ratio·n⌋ rows train, the rest test.
inline TrainTestSplit chronological_split(const SeriesFrame& frame, SplitSpec spec = {}) {
  if (!(spec.ratio > 0.0 && spec.ratio < 1.0)) {
    throw ConfigError("split ratio " + format_double(spec.ratio) + " outside (0, 1)");
  }
  const auto n = frame.rows();
  if (n < 5) throw SizeError("chronological_split: need at least 5 rows, got " + std::to_string(n));
  const auto n_train = static_cast<std::size_t>(std::floor(spec.ratio * static_cast<double>(n)));
  if (n_train == 0 || n_train == n) {
    throw SizeError("chronological_split: ratio leaves an empty part");
  }
  return {frame.slice(0, n_train), frame.slice(n_train, n)};
}

/// Per-column min and max on the original scale.
struct NormStats {
  std::vector<std::string> names;
  std::vector<double> min;
  std::vector<double> max;

  std::size_t index(std::string_view column) const {
    for (std::size_t j = 0; j < names.size(); ++j)
      if (names[j] == column) return j;
    throw SchemaError("no normalization stats for column '" + std::string(column) + "'");
  }

  friend bool operator==(const NormStats&, const NormStats&) = default;
};

/// Fitted on training rows only; rejects constant columns.
inline NormStats fit_minmax(const SeriesFrame& train) {
  if (train.rows() == 0) throw SizeError("fit_minmax: empty frame");
  NormStats stats;
  stats.names = train.names();
  for (std::size_t j = 0; j < train.cols(); ++j) {
    double lo = train.values()(0, j);
    double hi = lo;
    for (std::size_t i = 1; i < train.rows(); ++i) {
      lo = std::min(lo, train.values()(i, j));
      hi = std::max(hi, train.values()(i, j));
    }
    if (!(hi > lo)) {
      throw DegenerateScaleError("column '" + train.names()[j] + "' is constant on training rows");
    }
    stats.min.push_back(lo);
    stats.max.push_back(hi);
  }
  return stats;
}

inline double apply_minmax(double value, std::string_view column, const NormStats& stats) {
  const auto j = stats.index(column);
  return (value - stats.min[j]) / (stats.max[j] - stats.min[j]);
}

inline double invert_minmax(double value, std::string_view column, const NormStats& stats) {
  const auto j = stats.index(column);
  return value * (stats.max[j] - stats.min[j]) + stats.min[j];
}

/// (x − min)/(max − min) column by column. Values outside the training range map
/// outside [0, 1] and are kept as is.
inline SeriesFrame apply_minmax(const SeriesFrame& frame, const NormStats& stats) {
  Tensor2 v(frame.rows(), frame.cols());
  for (std::size_t j = 0; j < frame.cols(); ++j) {
    const auto s = stats.index(frame.names()[j]);
    const double lo = stats.min[s];
    const double span = stats.max[s] - stats.min[s];
    if (!(span > 0.0)) throw DegenerateScaleError("degenerate stats for '" + frame.names()[j] + "'");
    for (std::size_t i = 0; i < frame.rows(); ++i) v(i, j) = (frame.values()(i, j) - lo) / span;
  }
  return SeriesFrame::scaled(frame.dates(), frame.names(), std::move(v));
}

/// Supervised samples: each input is a T×k window, the target the next row's
/// value of the target column.
struct WindowSet {
  std::vector<Tensor2> inputs;
  std::vector<double> targets;
  std::vector<Date> target_dates;
  std::vector<Date> last_input_dates;
  std::size_t window = 0;
  std::vector<std::string> feature_names;
  std::string target_column;

  std::size_t size() const noexcept { return targets.size(); }
  std::size_t features() const noexcept { return feature_names.size(); }

  WindowSet subset(std::size_t begin, std::size_t end) const {
    WindowSet out;
    out.window = window;
    out.feature_names = feature_names;
    out.target_column = target_column;
    for (std::size_t i = begin; i < end; ++i) {
      out.inputs.push_back(inputs[i]);
      out.targets.push_back(targets[i]);
      out.target_dates.push_back(target_dates[i]);
      out.last_input_dates.push_back(last_input_dates[i]);
    }
    return out;
  }
};

/// Sample j covers rows j..j+T−1 and targets row j+T, so N = n − T.
inline WindowSet make_windows(const SeriesFrame& frame, std::size_t window,
                              std::string_view target_column) {
  if (window == 0) throw ConfigError("make_windows: window length must be at least 1");
  const auto n = frame.rows();
  if (window >= n) {
    throw SizeError("make_windows: window " + std::to_string(window) + " needs more than " +
                    std::to_string(n) + " rows");
  }
  const auto target = frame.column_index(target_column);
  WindowSet ws;
  ws.window = window;
  ws.feature_names = frame.names();
  ws.target_column = std::string(target_column);
  const auto k = frame.cols();
  for (std::size_t j = 0; j + window < n; ++j) {
    Tensor2 x(window, k);
    for (std::size_t t = 0; t < window; ++t) {
      std::copy_n(frame.values().row(j + t).begin(), k, x.row(t).begin());
    }
    ws.inputs.push_back(std::move(x));
    ws.targets.push_back(frame.values()(j + window, target));
    ws.target_dates.push_back(frame.dates()[j + window]);
    ws.last_input_dates.push_back(frame.dates()[j + window - 1]);
  }
  return ws;
}

/// Test-period windows. Strict mode uses test rows only, so the first T test
/// dates get no prediction; borrow mode prepends the last T training rows so
/// every test date is predicted.
inline WindowSet make_test_windows(const SeriesFrame& train, const SeriesFrame& test,
                                   std::size_t window, std::string_view target_column,
                                   bool borrow_context) {
  if (!borrow_context) return make_windows(test, window, target_column);
  if (train.rows() < window) throw SizeError("make_test_windows: training part shorter than window");
  if (train.names() != test.names()) throw SchemaError("make_test_windows: column mismatch");
  const auto ctx = train.slice(train.rows() - window, train.rows());
  std::vector<Date> dates = ctx.dates();
  dates.insert(dates.end(), test.dates().begin(), test.dates().end());
  Tensor2 v(ctx.rows() + test.rows(), test.cols());
  for (std::size_t i = 0; i < ctx.rows(); ++i)
    std::copy_n(ctx.values().row(i).begin(), test.cols(), v.row(i).begin());
  for (std::size_t i = 0; i < test.rows(); ++i)
    std::copy_n(test.values().row(i).begin(), test.cols(), v.row(ctx.rows() + i).begin());
  return make_windows(SeriesFrame::scaled(std::move(dates), test.names(), std::move(v)), window,
                      target_column);
}

}  // namespace tgf
