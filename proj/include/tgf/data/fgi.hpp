#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "tgf/data/series.hpp"

namespace tgf {

/// Fear-and-greed composite in [0, 100] from a sentiment score in [−1, 1] and a
/// search-trend score in [0, 100]. With w1 = w2 = ½ this is
/// ½ · [(s + 1)/2 · 100 + g].
inline double compose_fgi(double sentiment, double trends, double w1 = 0.5, double w2 = 0.5) {
  if (!(sentiment >= -1.0 && sentiment <= 1.0)) {
    throw DomainError("compose_fgi: sentiment " + format_double(sentiment) + " outside [-1, 1]");
  }
  if (!(trends >= 0.0 && trends <= 100.0)) {
    throw DomainError("compose_fgi: trends " + format_double(trends) + " outside [0, 100]");
  }
  if (!(w1 >= 0.0 && w2 >= 0.0) || std::abs(w1 + w2 - 1.0) > 1e-12) {
    throw DomainError("compose_fgi: weights must be nonnegative and sum to 1");
  }
  const double sentiment_scaled = (sentiment + 1.0) / 2.0 * 100.0;
  return w1 * sentiment_scaled + w2 * trends;
}

enum class FgiCategory { ExtremeFear, Fear, Greed, ExtremeGreed };

/// Bands 0–24, 25–49, 50–74, 75–100 with thresholds at 25, 50 and 75.
inline FgiCategory classify_fgi(double score) {
  if (!(score >= 0.0 && score <= 100.0)) {
    throw DomainError("classify_fgi: score " + format_double(score) + " outside [0, 100]");
  }
  if (score < 25.0) return FgiCategory::ExtremeFear;
  if (score < 50.0) return FgiCategory::Fear;
  if (score < 75.0) return FgiCategory::Greed;
  return FgiCategory::ExtremeGreed;
}

inline std::string_view to_string(FgiCategory c) {
  switch (c) {
    case FgiCategory::ExtremeFear: return "extreme_fear";
    case FgiCategory::Fear: return "fear";
    case FgiCategory::Greed: return "greed";
    case FgiCategory::ExtremeGreed: return "extreme_greed";
  }
  return "unknown";
}

/// Adds an `fgi` column built from `sentiment` and `trends` when the frame has
/// both and no `fgi` yet; otherwise returns the frame unchanged.
inline SeriesFrame with_composed_fgi(const SeriesFrame& frame, double w1 = 0.5, double w2 = 0.5) {
  if (frame.has_column(columns::kFgi) || !frame.has_column(columns::kSentiment) ||
      !frame.has_column(columns::kTrends)) {
    return frame;
  }
  const auto s = frame.column(columns::kSentiment);
  const auto g = frame.column(columns::kTrends);
  std::vector<double> fgi(frame.rows());
  for (std::size_t i = 0; i < fgi.size(); ++i) fgi[i] = compose_fgi(s[i], g[i], w1, w2);
  return frame.with_column(columns::kFgi, fgi);
}

}  // namespace tgf
