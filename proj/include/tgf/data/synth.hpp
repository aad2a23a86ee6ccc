#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tgf/core/rng.hpp"
#include "tgf/data/fgi.hpp"

namespace tgf {

/// Knobs for the synthetic market generator.
///
/// Log price follows a random walk whose daily increment is
/// `drift + coupling · s(t−1) + volatility · ε`, where s is a sinusoidal
/// sentiment cycle of period `cycle_period` days. Sentiment and search trends
/// track s with independent noise and the FGI is composed from them. With
/// volatility = 0 and coupling = 0 the price is exactly P0·exp(drift·t).
struct SynthParams {
  Date start = Date{std::chrono::year{2020} / 1 / 1};
  double initial_price = 10000.0;
  double drift = 0.0005;
  double volatility = 0.02;
  double cycle_period = 60.0;
  double coupling = 0.0;
  double sentiment_noise = 0.1;
  double trends_noise = 5.0;
  double base_volume = 2.0e9;
  double volume_noise = 0.2;
  bool aux_price = false;  // adds a correlated `btc_close` column
};

inline SeriesFrame synthesize_series(RngSeed seed, std::size_t n, const SynthParams& p = {}) {
  if (n < 10) throw SizeError("synthesize_series: need n >= 10, got " + std::to_string(n));
  if (!(p.initial_price > 0.0) || !(p.base_volume > 0.0) || !(p.cycle_period > 0.0)) {
    throw ConfigError("synthesize_series: price, volume and cycle period must be positive");
  }
  if (p.volatility < 0.0) throw ConfigError("synthesize_series: volatility must be nonnegative");

  Rng rng(seed);
  std::vector<Date> dates(n);
  std::vector<std::string> names{columns::kClose, columns::kVolume, columns::kFgi,
                                 columns::kSentiment, columns::kTrends};
  if (p.aux_price) names.emplace_back(columns::kBtcClose);
  Tensor2 v(n, names.size());

  double log_price = std::log(p.initial_price);
  double log_aux = std::log(p.initial_price * 3.0);
  double cycle_prev = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    dates[t] = p.start + std::chrono::days{static_cast<long>(t)};
    const double cycle = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / p.cycle_period);
    const double shock = rng.normal();
    if (t > 0) log_price += p.drift + p.coupling * cycle_prev + p.volatility * shock;
    const double sentiment =
        std::clamp(0.8 * cycle + p.sentiment_noise * rng.normal(), -1.0, 1.0);
    const double trends = std::clamp(50.0 + 40.0 * cycle + p.trends_noise * rng.normal(), 0.0, 100.0);
    const double volume =
        p.base_volume * (1.0 + 0.3 * cycle) * std::exp(p.volume_noise * rng.normal());

    v(t, 0) = std::exp(log_price);
    v(t, 1) = volume;
    v(t, 2) = compose_fgi(sentiment, trends);
    v(t, 3) = sentiment;
    v(t, 4) = trends;
    if (p.aux_price) {
      if (t > 0) {
        log_aux += p.drift + p.coupling * cycle_prev +
                   p.volatility * (0.8 * shock + 0.6 * rng.normal());
      }
      v(t, 5) = std::exp(log_aux);
    }
    cycle_prev = cycle;
  }
  return SeriesFrame(std::move(dates), std::move(names), std::move(v));
}

}  // namespace tgf
