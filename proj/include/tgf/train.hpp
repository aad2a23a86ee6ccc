#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "tgf/core/adam.hpp"
#include "tgf/data/pipeline.hpp"

namespace tgf {

struct TrainConfig {
  std::size_t epochs = 200;
  AdamConfig adam{};
  std::size_t batch_size = 0;  // 0 = full batch
  RngSeed seed{};
};

struct TrainResult {
  std::vector<double> loss_trace;  // mean training MSE seen during each epoch
};

/// Mean squared error of `model.predict` over every sample in `data`.
template <class Model>
double mean_squared_error(const Model& model, const WindowSet& data) {
  if (data.size() == 0) throw SizeError("mean_squared_error: empty data");
  double s = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double e = model.predict(data.inputs[i]) - data.targets[i];
    s += e * e;
  }
  return s / static_cast<double>(data.size());
}

/// Adam on the MSE loss. Models provide `batch_loss(data, indices, grad*)` and
/// `for_each_param`. Mini-batches are reshuffled every epoch from `cfg.seed`.
template <class Model>
TrainResult train_model(Model& model, const WindowSet& data, const TrainConfig& cfg) {
  if (data.size() == 0) throw SizeError("train: no training samples");
  TrainResult result;
  if (cfg.epochs == 0) return result;

  auto params = parameter_list(model);
  Model grad = zeros_like(model);
  auto grads = parameter_list(grad);
  auto state = AdamState::for_params(params, cfg.adam);
  Rng rng(cfg.seed);

  const auto n = data.size();
  const auto batch = cfg.batch_size == 0 ? n : std::min(cfg.batch_size, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (batch < n) rng.shuffle(order.begin(), order.end());
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const auto len = std::min(batch, n - start);
      for (auto& g : grads) g.tensor->fill(0.0);
      const double loss =
          model.batch_loss(data, std::span<const std::size_t>(order.data() + start, len), &grad);
      if (!std::isfinite(loss)) {
        throw DivergenceError("training diverged: non-finite loss in epoch " +
                              std::to_string(epoch + 1));
      }
      epoch_loss += loss * static_cast<double>(len);
      adam_step(params, grads, state);
    }
    result.loss_trace.push_back(epoch_loss / static_cast<double>(n));
  }
  for (const auto& p : params) {
    if (!p.tensor->all_finite()) {
      throw DivergenceError("training diverged: parameter '" + p.name + "' is non-finite");
    }
  }
  return result;
}

}  // namespace tgf
