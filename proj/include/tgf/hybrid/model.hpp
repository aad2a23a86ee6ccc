#pragma once

#include <span>
#include <string>
#include <vector>

#include "tgf/data/pipeline.hpp"
#include "tgf/hybrid/encoder.hpp"
#include "tgf/recurrent/cells.hpp"

namespace tgf {

struct HybridConfig {
  std::size_t window = 30;    // T
  std::size_t features = 3;   // k
  std::size_t d_model = 32;   // d
  std::size_t heads = 4;      // h
  std::size_t layers = 2;     // L
  std::size_t d_ffn = 64;
  std::size_t d_gru = 32;

  std::size_t d_k() const noexcept { return heads == 0 ? 0 : d_model / heads; }

  void validate() const {
    if (window == 0 || features == 0 || d_model == 0 || heads == 0 || layers == 0 || d_ffn == 0 ||
        d_gru == 0) {
      throw ConfigError("hybrid: every dimension must be >= 1");
    }
    if (d_model % heads != 0) {
      throw ConfigError("hybrid: d_model " + std::to_string(d_model) + " not divisible by heads " +
                        std::to_string(heads));
    }
    if (d_model % 2 != 0) {
      throw ConfigError("hybrid: d_model must be even for the positional encoding, got " +
                        std::to_string(d_model));
    }
  }

  friend bool operator==(const HybridConfig&, const HybridConfig&) = default;
};

/// Everything the forward pass produced, kept for backpropagation and inspection.
struct HybridTrace {
  Tensor2 input;
  Tensor2 h0;  // embeddings + positional encoding
  std::vector<EncoderLayerCache> layers;
  Tensor2 encoded;
  std::vector<GruStepCache> gru;
  std::vector<double> h_final;
  double output = 0.0;
};

/// Transformer encoder (embedding, sinusoidal positions, L post-norm layers)
/// feeding a GRU decoder whose final hidden state drives a linear head.
struct HybridModel {
  HybridConfig config;
  Tensor2 W_e;  // d×k
  Tensor2 b_e;  // 1×d
  std::vector<EncoderLayerParams> encoder;
  GruCellParams decoder;  // input d, hidden d_gru
  Tensor2 W_p;  // 1×d_gru
  Tensor2 b_p;  // 1×1

  /// Zero weights with LayerNorm gamma = 1, beta = 0.
  static HybridModel zeros(const HybridConfig& cfg) {
    cfg.validate();
    HybridModel m;
    m.config = cfg;
    m.W_e = Tensor2(cfg.d_model, cfg.features);
    m.b_e = Tensor2(1, cfg.d_model);
    for (std::size_t l = 0; l < cfg.layers; ++l)
      m.encoder.push_back(EncoderLayerParams::zeros(cfg.d_model, cfg.heads, cfg.d_ffn));
    m.decoder = GruCellParams::zeros(cfg.d_model, cfg.d_gru);
    m.W_p = Tensor2(1, cfg.d_gru);
    m.b_p = Tensor2(1, 1);
    return m;
  }

  static HybridModel init(const HybridConfig& cfg, RngSeed seed) {
    cfg.validate();
    Rng rng(seed);
    HybridModel m = zeros(cfg);
    m.W_e = xavier_init(cfg.d_model, cfg.features, rng);
    for (auto& layer : m.encoder) layer = EncoderLayerParams::xavier(cfg.d_model, cfg.heads, cfg.d_ffn, rng);
    m.decoder = GruCellParams::xavier(cfg.d_model, cfg.d_gru, rng);
    m.W_p = xavier_init(1, cfg.d_gru, rng);
    return m;
  }

  template <class Self, class F>
  static void for_each_param(Self& self, F&& f) {
    f("W_e", self.W_e);
    f("b_e", self.b_e);
    for (std::size_t l = 0; l < self.encoder.size(); ++l) {
      const std::string prefix = "encoder." + std::to_string(l) + ".";
      EncoderLayerParams::for_each_param(self.encoder[l],
                                         [&](const std::string& n, auto& t) { f(prefix + n, t); });
    }
    GruCellParams::for_each_param(self.decoder, [&](const std::string& n, auto& t) { f("decoder." + n, t); });
    f("W_p", self.W_p);
    f("b_p", self.b_p);
  }

  void check_window(const Tensor2& window) const {
    if (window.rows() != config.window || window.cols() != config.features) {
      throw DimensionError("hybrid: window " + window.shape_string() + ", model expects " +
                           std::to_string(config.window) + "x" + std::to_string(config.features));
    }
  }

  /// Encoder output H^(L) (T×d). Without `positional` the embeddings enter the
  /// layers as is.
  Tensor2 encode(const Tensor2& window, bool positional = true) const {
    check_window(window);
    Tensor2 h = embed_window(window, W_e, b_e);
    if (positional) h += positional_encoding(window.rows(), config.d_model);
    for (const auto& layer : encoder) h = encoder_layer_forward(h, layer);
    return h;
  }

  HybridTrace trace(const Tensor2& window) const {
    check_window(window);
    HybridTrace tr;
    tr.input = window;
    tr.h0 = embed_window(window, W_e, b_e);
    tr.h0 += positional_encoding(window.rows(), config.d_model);
    tr.layers.resize(encoder.size());
    Tensor2 h = tr.h0;
    for (std::size_t l = 0; l < encoder.size(); ++l) h = encoder_layer_forward(h, encoder[l], &tr.layers[l]);
    tr.encoded = std::move(h);
    tr.h_final = run_sequence<GruCell>(decoder, tr.encoded, false, &tr.gru).h;
    tr.output = b_p[0];
    for (std::size_t j = 0; j < tr.h_final.size(); ++j) tr.output += W_p[j] * tr.h_final[j];
    return tr;
  }

  /// Normalized scalar prediction.
  double predict(const Tensor2& window) const {
    const Tensor2 encoded = encode(window, true);
    const auto h = run_sequence<GruCell>(decoder, encoded, false, nullptr).h;
    double y = b_p[0];
    for (std::size_t j = 0; j < h.size(); ++j) y += W_p[j] * h[j];
    return y;
  }

  /// Accumulates dL/dθ for an upstream gradient dy on the output.
  void backward(const HybridTrace& tr, double dy, HybridModel& grad) const {
    grad.b_p[0] += dy;
    GruCell::State dh{std::vector<double>(config.d_gru)};
    for (std::size_t j = 0; j < config.d_gru; ++j) {
      grad.W_p[j] += dy * tr.h_final[j];
      dh.h[j] = dy * W_p[j];
    }
    Tensor2 d_h(tr.encoded.rows(), tr.encoded.cols());
    backprop_sequence<GruCell>(decoder, tr.gru, std::move(dh), false, grad.decoder, &d_h);
    for (std::size_t l = encoder.size(); l-- > 0;)
      d_h = encoder_layer_backward(encoder[l], tr.layers[l], d_h, grad.encoder[l]);
    // Positional encoding is constant; d_h is now dL/dE.
    grad.W_e += matmul_tn(d_h, tr.input);
    accumulate_column_sums(d_h, grad.b_e);
  }

  double batch_loss(const WindowSet& data, std::span<const std::size_t> idx, HybridModel* grad) const {
    double loss = 0.0;
    for (const auto s : idx) {
      if (!grad) {
        const double e = predict(data.inputs[s]) - data.targets[s];
        loss += e * e;
        continue;
      }
      const auto tr = trace(data.inputs[s]);
      const double resid = tr.output - data.targets[s];
      loss += resid * resid;
      backward(tr, 2.0 * resid / static_cast<double>(idx.size()), *grad);
    }
    return loss / static_cast<double>(idx.size());
  }
};

inline double hybrid_forward(const HybridModel& model, const Tensor2& window) {
  return model.predict(window);
}

}  // namespace tgf
