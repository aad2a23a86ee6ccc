#pragma once

#include <span>
#include <string>
#include <vector>

#include "tgf/data/pipeline.hpp"
#include "tgf/recurrent/cells.hpp"

namespace tgf {

/// Bidirectional recurrent regressor. The forward cell reads t = 1..T, the
/// backward cell t = T..1, both from zero states; the two final hidden states
/// are concatenated [forward, backward] and mapped to a scalar by a linear head.
template <class Cell>
struct BiRnnModel {
  using CellType = Cell;
  using Params = typename Cell::Params;

  Params forward;
  Params backward;
  Tensor2 W_head;  // 1×(2·hidden)
  Tensor2 b_head;  // 1×1

  std::size_t input_size() const noexcept { return forward.input_size(); }
  std::size_t hidden_size() const noexcept { return forward.hidden_size(); }

  static BiRnnModel zeros(std::size_t input, std::size_t hidden) {
    if (input == 0 || hidden == 0) throw ConfigError("birnn: input and hidden sizes must be >= 1");
    return {Params::zeros(input, hidden), Params::zeros(input, hidden), Tensor2(1, 2 * hidden),
            Tensor2(1, 1)};
  }

  /// Xavier weights, zero biases.
  static BiRnnModel init(std::size_t input, std::size_t hidden, RngSeed seed) {
    if (input == 0 || hidden == 0) throw ConfigError("birnn: input and hidden sizes must be >= 1");
    Rng rng(seed);
    BiRnnModel m;
    m.forward = Params::xavier(input, hidden, rng);
    m.backward = Params::xavier(input, hidden, rng);
    m.W_head = xavier_init(1, 2 * hidden, rng);
    m.b_head = Tensor2(1, 1);
    return m;
  }

  template <class Self, class F>
  static void for_each_param(Self& self, F&& f) {
    Params::for_each_param(self.forward, [&](const std::string& n, auto& t) { f("forward." + n, t); });
    Params::for_each_param(self.backward, [&](const std::string& n, auto& t) { f("backward." + n, t); });
    f("W_head", self.W_head);
    f("b_head", self.b_head);
  }

  void check_window(const Tensor2& window) const {
    if (window.cols() != input_size() || window.rows() == 0) {
      throw DimensionError("birnn: window " + window.shape_string() + " incompatible with input size " +
                           std::to_string(input_size()));
    }
  }

  /// Normalized scalar prediction for one T×k window.
  double predict(const Tensor2& window) const {
    check_window(window);
    const auto hf = run_sequence<Cell>(forward, window, false, nullptr);
    const auto hb = run_sequence<Cell>(backward, window, true, nullptr);
    return head(hf.h, hb.h);
  }

  /// Concatenated [forward final, backward final] hidden state.
  std::vector<double> final_states(const Tensor2& window) const {
    check_window(window);
    auto out = run_sequence<Cell>(forward, window, false, nullptr).h;
    const auto hb = run_sequence<Cell>(backward, window, true, nullptr).h;
    out.insert(out.end(), hb.begin(), hb.end());
    return out;
  }

  /// Mean squared error over the selected samples; accumulates gradients into
  /// `grad` when given.
  double batch_loss(const WindowSet& data, std::span<const std::size_t> idx,
                    BiRnnModel* grad) const {
    const auto n = hidden_size();
    double loss = 0.0;
    std::vector<typename Cell::Cache> cf, cb;
    for (const auto s : idx) {
      const Tensor2& window = data.inputs[s];
      check_window(window);
      const auto hf = run_sequence<Cell>(forward, window, false, grad ? &cf : nullptr);
      const auto hb = run_sequence<Cell>(backward, window, true, grad ? &cb : nullptr);
      const double pred = head(hf.h, hb.h);
      const double resid = pred - data.targets[s];
      loss += resid * resid;
      if (!grad) continue;
      const double dy = 2.0 * resid / static_cast<double>(idx.size());
      grad->b_head[0] += dy;
      auto dfwd = Cell::zero_state(forward);
      auto dbwd = Cell::zero_state(backward);
      for (std::size_t j = 0; j < n; ++j) {
        grad->W_head[j] += dy * hf.h[j];
        grad->W_head[n + j] += dy * hb.h[j];
        dfwd.h[j] = dy * W_head[j];
        dbwd.h[j] = dy * W_head[n + j];
      }
      backprop_sequence<Cell>(forward, cf, std::move(dfwd), false, grad->forward, nullptr);
      backprop_sequence<Cell>(backward, cb, std::move(dbwd), true, grad->backward, nullptr);
    }
    return loss / static_cast<double>(idx.size());
  }

 private:
  double head(const std::vector<double>& hf, const std::vector<double>& hb) const {
    const auto n = hidden_size();
    double y = b_head[0];
    for (std::size_t j = 0; j < n; ++j) y += W_head[j] * hf[j] + W_head[n + j] * hb[j];
    return y;
  }
};

using BiLstmModel = BiRnnModel<LstmCell>;
using BiGruModel = BiRnnModel<GruCell>;

template <class Cell>
double birnn_forward(const BiRnnModel<Cell>& model, const Tensor2& window) {
  return model.predict(window);
}

}  // namespace tgf
