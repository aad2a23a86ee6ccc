#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "tgf/core/ops.hpp"
#include "tgf/core/params.hpp"

namespace tgf {

/// E = X W_eᵀ + b_e, one embedding row per timestep. W_e is d×k, b_e 1×d.
inline Tensor2 embed_window(const Tensor2& window, const Tensor2& W_e, const Tensor2& b_e) {
  if (window.cols() != W_e.cols() || b_e.rows() != 1 || b_e.cols() != W_e.rows()) {
    throw DimensionError("embed_window: window " + window.shape_string() + ", W_e " +
                         W_e.shape_string() + ", b_e " + b_e.shape_string());
  }
  Tensor2 e = matmul_nt(window, W_e);
  add_row_inplace(e, b_e);
  return e;
}

/// Sinusoidal encoding: PE[pos, 2i] = sin(pos / 10000^(2i/d)), PE[pos, 2i+1] = cos(·).
inline Tensor2 positional_encoding(std::size_t length, std::size_t d) {
  if (d == 0 || d % 2 != 0) {
    throw ConfigError("positional_encoding: model dimension must be even, got " + std::to_string(d));
  }
  Tensor2 pe(length, d);
  for (std::size_t pos = 0; pos < length; ++pos) {
    for (std::size_t i = 0; i < d / 2; ++i) {
      const double freq = std::pow(10000.0, static_cast<double>(2 * i) / static_cast<double>(d));
      const double angle = static_cast<double>(pos) / freq;
      pe(pos, 2 * i) = std::sin(angle);
      pe(pos, 2 * i + 1) = std::cos(angle);
    }
  }
  return pe;
}

/// One post-norm Transformer encoder layer. Projections use the row convention
/// (Q = H W_Q), so W_Q[m] is d×d_k, W_O is (h·d_k)×d, W_1 d×d_ffn, W_2 d_ffn×d.
struct EncoderLayerParams {
  std::vector<Tensor2> W_Q, W_K, W_V;
  Tensor2 W_O;
  Tensor2 W_1, b_1;
  Tensor2 W_2, b_2;
  Tensor2 ln1_gamma, ln1_beta;
  Tensor2 ln2_gamma, ln2_beta;

  std::size_t heads() const noexcept { return W_Q.size(); }
  std::size_t d_model() const noexcept { return W_O.cols(); }
  std::size_t d_k() const noexcept { return W_Q.empty() ? 0 : W_Q.front().cols(); }
  std::size_t d_ffn() const noexcept { return W_1.cols(); }

  /// All weights zero, LayerNorm gamma = 1 and beta = 0.
  static EncoderLayerParams zeros(std::size_t d, std::size_t heads, std::size_t d_ffn) {
    if (heads == 0 || d % heads != 0) {
      throw ConfigError("encoder layer: d_model " + std::to_string(d) +
                        " not divisible by heads " + std::to_string(heads));
    }
    const auto dk = d / heads;
    EncoderLayerParams p;
    for (std::size_t m = 0; m < heads; ++m) {
      p.W_Q.emplace_back(d, dk);
      p.W_K.emplace_back(d, dk);
      p.W_V.emplace_back(d, dk);
    }
    p.W_O = Tensor2(heads * dk, d);
    p.W_1 = Tensor2(d, d_ffn);
    p.b_1 = Tensor2(1, d_ffn);
    p.W_2 = Tensor2(d_ffn, d);
    p.b_2 = Tensor2(1, d);
    p.ln1_gamma = Tensor2(1, d, 1.0);
    p.ln1_beta = Tensor2(1, d);
    p.ln2_gamma = Tensor2(1, d, 1.0);
    p.ln2_beta = Tensor2(1, d);
    return p;
  }

  static EncoderLayerParams xavier(std::size_t d, std::size_t heads, std::size_t d_ffn, Rng& rng) {
    auto p = zeros(d, heads, d_ffn);
    for (std::size_t m = 0; m < heads; ++m) {
      p.W_Q[m] = xavier_init(d, p.d_k(), rng);
      p.W_K[m] = xavier_init(d, p.d_k(), rng);
      p.W_V[m] = xavier_init(d, p.d_k(), rng);
    }
    p.W_O = xavier_init(heads * p.d_k(), d, rng);
    p.W_1 = xavier_init(d, d_ffn, rng);
    p.W_2 = xavier_init(d_ffn, d, rng);
    return p;
  }

  template <class Self, class F>
  static void for_each_param(Self& self, F&& f) {
    for (std::size_t m = 0; m < self.W_Q.size(); ++m) {
      const auto s = std::to_string(m);
      f("W_Q." + s, self.W_Q[m]);
      f("W_K." + s, self.W_K[m]);
      f("W_V." + s, self.W_V[m]);
    }
    f("W_O", self.W_O);
    f("W_1", self.W_1);
    f("b_1", self.b_1);
    f("W_2", self.W_2);
    f("b_2", self.b_2);
    f("ln1_gamma", self.ln1_gamma);
    f("ln1_beta", self.ln1_beta);
    f("ln2_gamma", self.ln2_gamma);
    f("ln2_beta", self.ln2_beta);
  }
};

struct AttentionCache {
  Tensor2 input;
  std::vector<Tensor2> q, k, v;
  std::vector<Tensor2> probs;  // T×T row-stochastic matrix per head
  Tensor2 concat;
};

/// Concat_m[softmax(Q_m K_mᵀ / √d_k) V_m] · W_O, no masking.
inline Tensor2 multi_head_attention(const Tensor2& h, const EncoderLayerParams& layer,
                                    AttentionCache* cache = nullptr) {
  const auto d = layer.d_model();
  const auto dk = layer.d_k();
  const auto heads = layer.heads();
  if (h.cols() != d || heads * dk != d) {
    throw DimensionError("multi_head_attention: input " + h.shape_string() + " vs d_model " +
                         std::to_string(d) + " with " + std::to_string(heads) + " heads of " +
                         std::to_string(dk));
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  Tensor2 concat(h.rows(), heads * dk);
  if (cache) {
    cache->input = h;
    cache->q.clear();
    cache->k.clear();
    cache->v.clear();
    cache->probs.clear();
  }
  for (std::size_t m = 0; m < heads; ++m) {
    Tensor2 q = matmul(h, layer.W_Q[m]);
    Tensor2 k = matmul(h, layer.W_K[m]);
    Tensor2 v = matmul(h, layer.W_V[m]);
    Tensor2 scores = matmul_nt(q, k);
    scores *= scale;
    Tensor2 a = softmax_rows(scores);
    Tensor2 o = matmul(a, v);
    for (std::size_t t = 0; t < h.rows(); ++t)
      for (std::size_t j = 0; j < dk; ++j) concat(t, m * dk + j) = o(t, j);
    if (cache) {
      cache->q.push_back(std::move(q));
      cache->k.push_back(std::move(k));
      cache->v.push_back(std::move(v));
      cache->probs.push_back(std::move(a));
    }
  }
  Tensor2 out = matmul(concat, layer.W_O);
  if (cache) cache->concat = std::move(concat);
  return out;
}

/// Returns dL/dH and accumulates projection gradients into `grad`.
inline Tensor2 multi_head_attention_backward(const EncoderLayerParams& layer,
                                             const AttentionCache& c, const Tensor2& d_out,
                                             EncoderLayerParams& grad) {
  const auto dk = layer.d_k();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  grad.W_O += matmul_tn(c.concat, d_out);
  const Tensor2 d_concat = matmul_nt(d_out, layer.W_O);
  Tensor2 dh(c.input.rows(), c.input.cols());
  for (std::size_t m = 0; m < layer.heads(); ++m) {
    Tensor2 d_o(c.input.rows(), dk);
    for (std::size_t t = 0; t < d_o.rows(); ++t)
      for (std::size_t j = 0; j < dk; ++j) d_o(t, j) = d_concat(t, m * dk + j);
    const Tensor2 d_a = matmul_nt(d_o, c.v[m]);
    const Tensor2 d_v = matmul_tn(c.probs[m], d_o);
    Tensor2 d_s = softmax_rows_backward(c.probs[m], d_a);
    d_s *= scale;
    const Tensor2 d_q = matmul(d_s, c.k[m]);
    const Tensor2 d_k = matmul_tn(d_s, c.q[m]);
    grad.W_Q[m] += matmul_tn(c.input, d_q);
    grad.W_K[m] += matmul_tn(c.input, d_k);
    grad.W_V[m] += matmul_tn(c.input, d_v);
    dh += matmul_nt(d_q, layer.W_Q[m]);
    dh += matmul_nt(d_k, layer.W_K[m]);
    dh += matmul_nt(d_v, layer.W_V[m]);
  }
  return dh;
}

struct EncoderLayerCache {
  AttentionCache attention;
  LayerNormCache ln1;
  Tensor2 h_attn;
  Tensor2 ffn_pre;  // H_attn W_1 + b_1, before ReLU
  Tensor2 ffn_act;
  LayerNormCache ln2;
};

/// H_attn = LN(H + MultiHead(H)); H_out = LN(H_attn + ReLU(H_attn W_1 + b_1) W_2 + b_2).
inline Tensor2 encoder_layer_forward(const Tensor2& h_in, const EncoderLayerParams& layer,
                                     EncoderLayerCache* cache = nullptr) {
  Tensor2 z1 = h_in + multi_head_attention(h_in, layer, cache ? &cache->attention : nullptr);
  Tensor2 h_attn = layer_norm_rows(z1, layer.ln1_gamma, layer.ln1_beta, cache ? &cache->ln1 : nullptr);
  Tensor2 pre = matmul(h_attn, layer.W_1);
  add_row_inplace(pre, layer.b_1);
  Tensor2 act = elementwise_activation(Activation::relu, pre);
  Tensor2 ffn = matmul(act, layer.W_2);
  add_row_inplace(ffn, layer.b_2);
  Tensor2 out = layer_norm_rows(h_attn + ffn, layer.ln2_gamma, layer.ln2_beta,
                                cache ? &cache->ln2 : nullptr);
  if (cache) {
    cache->h_attn = std::move(h_attn);
    cache->ffn_pre = std::move(pre);
    cache->ffn_act = std::move(act);
  }
  return out;
}

inline Tensor2 encoder_layer_backward(const EncoderLayerParams& layer, const EncoderLayerCache& c,
                                      const Tensor2& d_out, EncoderLayerParams& grad) {
  const Tensor2 d_z2 = layer_norm_rows_backward(c.ln2, layer.ln2_gamma, d_out, grad.ln2_gamma,
                                                grad.ln2_beta);
  Tensor2 d_h_attn = d_z2;
  grad.W_2 += matmul_tn(c.ffn_act, d_z2);
  accumulate_column_sums(d_z2, grad.b_2);
  Tensor2 d_pre = matmul_nt(d_z2, layer.W_2);
  for (std::size_t i = 0; i < d_pre.size(); ++i)
    if (!(c.ffn_pre[i] > 0.0)) d_pre[i] = 0.0;
  grad.W_1 += matmul_tn(c.h_attn, d_pre);
  accumulate_column_sums(d_pre, grad.b_1);
  d_h_attn += matmul_nt(d_pre, layer.W_1);
  const Tensor2 d_z1 = layer_norm_rows_backward(c.ln1, layer.ln1_gamma, d_h_attn, grad.ln1_gamma,
                                                grad.ln1_beta);
  return d_z1 + multi_head_attention_backward(layer, c.attention, d_z1, grad);
}

}  // namespace tgf
