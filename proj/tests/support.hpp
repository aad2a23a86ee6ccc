#pragma once

#include <cmath>

#include "tgf/core/rng.hpp"
#include "tgf/core/tensor.hpp"
#include "tgf/data/pipeline.hpp"

namespace tgf::testing {

inline Tensor2 random_tensor(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
  Tensor2 t(rows, cols);
  for (auto& v : t.data()) v = scale * rng.normal();
  return t;
}

/// `count` windows of shape T×k with smooth inputs in [0,1] and targets that
/// depend on the window contents.
inline WindowSet small_window_set(std::size_t count, std::size_t window, std::size_t features,
                                  std::uint64_t seed) {
  Rng rng(RngSeed{seed});
  WindowSet ws;
  ws.window = window;
  for (std::size_t j = 0; j < features; ++j) ws.feature_names.push_back("f" + std::to_string(j));
  ws.target_column = "f0";
  const Date start{std::chrono::year{2021} / 1 / 1};
  for (std::size_t i = 0; i < count; ++i) {
    Tensor2 x(window, features);
    for (auto& v : x.data()) v = rng.uniform();
    double target = 0.0;
    for (std::size_t t = 0; t < window; ++t) target += x(t, 0) / static_cast<double>(window);
    ws.inputs.push_back(std::move(x));
    ws.targets.push_back(0.1 + 0.8 * target);
    ws.target_dates.push_back(start + std::chrono::days{static_cast<long>(i + window)});
    ws.last_input_dates.push_back(start + std::chrono::days{static_cast<long>(i + window - 1)});
  }
  return ws;
}

inline std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

}  // namespace tgf::testing
