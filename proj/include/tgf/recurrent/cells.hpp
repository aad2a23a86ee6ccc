#pragma once

#include <span>
#include <string>
#include <vector>

#include "tgf/core/ops.hpp"
#include "tgf/core/params.hpp"

namespace tgf {

namespace detail {
inline void require_len(std::span<const double> v, std::size_t n, const char* what) {
  if (v.size() != n) {
    throw DimensionError(std::string(what) + ": length " + std::to_string(v.size()) +
                         ", expected " + std::to_string(n));
  }
}
}  // namespace detail

// ---------------------------------------------------------------------------
// LSTM
// ---------------------------------------------------------------------------

/// Gate weights use the row convention a = x·W_x + h·W_h + b, so W_x is
/// input×hidden, W_h hidden×hidden and b 1×hidden.
struct LstmCellParams {
  Tensor2 W_fx, W_fh, b_f;  // forget
  Tensor2 W_ix, W_ih, b_i;  // input
  Tensor2 W_cx, W_ch, b_c;  // candidate
  Tensor2 W_ox, W_oh, b_o;  // output

  std::size_t input_size() const noexcept { return W_fx.rows(); }
  std::size_t hidden_size() const noexcept { return W_fh.rows(); }

  static LstmCellParams zeros(std::size_t input, std::size_t hidden) {
    LstmCellParams p;
    for_each_param(p, [&](const std::string& name, Tensor2& t) {
      const bool bias = name[0] == 'b';
      const bool recurrent = name.back() == 'h';
      t = Tensor2(bias ? 1 : (recurrent ? hidden : input), hidden);
    });
    return p;
  }

  static LstmCellParams xavier(std::size_t input, std::size_t hidden, Rng& rng) {
    auto p = zeros(input, hidden);
    for_each_param(p, [&](const std::string& name, Tensor2& t) {
      if (name[0] != 'b') t = xavier_init(t.rows(), t.cols(), rng);
    });
    return p;
  }

  template <class Self, class F>
  static void for_each_param(Self& self, F&& f) {
    f("W_fx", self.W_fx);
    f("W_fh", self.W_fh);
    f("b_f", self.b_f);
    f("W_ix", self.W_ix);
    f("W_ih", self.W_ih);
    f("b_i", self.b_i);
    f("W_cx", self.W_cx);
    f("W_ch", self.W_ch);
    f("b_c", self.b_c);
    f("W_ox", self.W_ox);
    f("W_oh", self.W_oh);
    f("b_o", self.b_o);
  }
};

struct LstmStepCache {
  std::vector<double> x, h_prev, c_prev;
  std::vector<double> f, i, g, o;  // g is the candidate c̃
  std::vector<double> tanh_c;
};

struct LstmState {
  std::vector<double> h;
  std::vector<double> c;
};

/// f, i, o = σ(·); c̃ = tanh(·); c = f⊙c_prev + i⊙c̃; h = o⊙tanh(c).
inline LstmState lstm_cell_step(const LstmCellParams& p, std::span<const double> x,
                                std::span<const double> h_prev, std::span<const double> c_prev,
                                LstmStepCache* cache = nullptr) {
  const auto n = p.hidden_size();
  detail::require_len(x, p.input_size(), "lstm_cell_step input");
  detail::require_len(h_prev, n, "lstm_cell_step hidden");
  detail::require_len(c_prev, n, "lstm_cell_step cell");

  auto gate = [&](const Tensor2& wx, const Tensor2& wh, const Tensor2& b) {
    std::vector<double> a(b.data().begin(), b.data().end());
    vecmat_accumulate(x, wx, a);
    vecmat_accumulate(h_prev, wh, a);
    return a;
  };
  auto f = gate(p.W_fx, p.W_fh, p.b_f);
  auto i = gate(p.W_ix, p.W_ih, p.b_i);
  auto g = gate(p.W_cx, p.W_ch, p.b_c);
  auto o = gate(p.W_ox, p.W_oh, p.b_o);
  LstmState out{std::vector<double>(n), std::vector<double>(n)};
  std::vector<double> tc(n);
  for (std::size_t j = 0; j < n; ++j) {
    f[j] = sigmoid(f[j]);
    i[j] = sigmoid(i[j]);
    g[j] = std::tanh(g[j]);
    o[j] = sigmoid(o[j]);
    out.c[j] = f[j] * c_prev[j] + i[j] * g[j];
    tc[j] = std::tanh(out.c[j]);
    out.h[j] = o[j] * tc[j];
  }
  if (cache) {
    cache->x.assign(x.begin(), x.end());
    cache->h_prev.assign(h_prev.begin(), h_prev.end());
    cache->c_prev.assign(c_prev.begin(), c_prev.end());
    cache->f = std::move(f);
    cache->i = std::move(i);
    cache->g = std::move(g);
    cache->o = std::move(o);
    cache->tanh_c = std::move(tc);
  }
  return out;
}

/// Backward through one step. On entry dh/dc hold the gradient w.r.t. the new
/// state; on exit they hold the gradient w.r.t. the previous state. dx (may be
/// empty) is accumulated into.
inline void lstm_cell_step_backward(const LstmCellParams& p, const LstmStepCache& c,
                                    std::vector<double>& dh, std::vector<double>& dc,
                                    LstmCellParams& grad, std::span<double> dx) {
  const auto n = p.hidden_size();
  std::vector<double> da_f(n), da_i(n), da_g(n), da_o(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double d_o = dh[j] * c.tanh_c[j];
    const double dct = dc[j] + dh[j] * c.o[j] * (1.0 - c.tanh_c[j] * c.tanh_c[j]);
    da_f[j] = dct * c.c_prev[j] * c.f[j] * (1.0 - c.f[j]);
    da_i[j] = dct * c.g[j] * c.i[j] * (1.0 - c.i[j]);
    da_g[j] = dct * c.i[j] * (1.0 - c.g[j] * c.g[j]);
    da_o[j] = d_o * c.o[j] * (1.0 - c.o[j]);
    dc[j] = dct * c.f[j];
  }
  std::vector<double> dh_prev(n, 0.0);
  auto gate_back = [&](const std::vector<double>& da, const Tensor2& wx, const Tensor2& wh,
                       Tensor2& gwx, Tensor2& gwh, Tensor2& gb) {
    outer_accumulate(c.x, da, gwx);
    outer_accumulate(c.h_prev, da, gwh);
    for (std::size_t j = 0; j < n; ++j) gb[j] += da[j];
    if (!dx.empty()) vec_matT_accumulate(da, wx, dx);
    vec_matT_accumulate(da, wh, dh_prev);
  };
  gate_back(da_f, p.W_fx, p.W_fh, grad.W_fx, grad.W_fh, grad.b_f);
  gate_back(da_i, p.W_ix, p.W_ih, grad.W_ix, grad.W_ih, grad.b_i);
  gate_back(da_g, p.W_cx, p.W_ch, grad.W_cx, grad.W_ch, grad.b_c);
  gate_back(da_o, p.W_ox, p.W_oh, grad.W_ox, grad.W_oh, grad.b_o);
  dh = std::move(dh_prev);
}

// ---------------------------------------------------------------------------
// GRU
// ---------------------------------------------------------------------------

struct GruCellParams {
  Tensor2 W_rx, W_rh, b_r;  // reset
  Tensor2 W_zx, W_zh, b_z;  // update
  Tensor2 W_x, W_h, b;      // candidate

  std::size_t input_size() const noexcept { return W_rx.rows(); }
  std::size_t hidden_size() const noexcept { return W_rh.rows(); }

  static GruCellParams zeros(std::size_t input, std::size_t hidden) {
    GruCellParams p;
    for_each_param(p, [&](const std::string& name, Tensor2& t) {
      const bool bias = name[0] == 'b';
      const bool recurrent = name.back() == 'h';
      t = Tensor2(bias ? 1 : (recurrent ? hidden : input), hidden);
    });
    return p;
  }

  static GruCellParams xavier(std::size_t input, std::size_t hidden, Rng& rng) {
    auto p = zeros(input, hidden);
    for_each_param(p, [&](const std::string& name, Tensor2& t) {
      if (name[0] != 'b') t = xavier_init(t.rows(), t.cols(), rng);
    });
    return p;
  }

  template <class Self, class F>
  static void for_each_param(Self& self, F&& f) {
    f("W_rx", self.W_rx);
    f("W_rh", self.W_rh);
    f("b_r", self.b_r);
    f("W_zx", self.W_zx);
    f("W_zh", self.W_zh);
    f("b_z", self.b_z);
    f("W_x", self.W_x);
    f("W_h", self.W_h);
    f("b", self.b);
  }
};

struct GruStepCache {
  std::vector<double> x, h_prev;
  std::vector<double> r, z, n;  // n is the candidate h̃
};

/// r, z = σ(·); h̃ = tanh(x W_x + (r⊙h_prev) W_h + b); h = z⊙h̃ + (1−z)⊙h_prev.
inline std::vector<double> gru_cell_step(const GruCellParams& p, std::span<const double> x,
                                         std::span<const double> h_prev,
                                         GruStepCache* cache = nullptr) {
  const auto n = p.hidden_size();
  detail::require_len(x, p.input_size(), "gru_cell_step input");
  detail::require_len(h_prev, n, "gru_cell_step hidden");

  std::vector<double> r(p.b_r.data().begin(), p.b_r.data().end());
  vecmat_accumulate(x, p.W_rx, r);
  vecmat_accumulate(h_prev, p.W_rh, r);
  std::vector<double> z(p.b_z.data().begin(), p.b_z.data().end());
  vecmat_accumulate(x, p.W_zx, z);
  vecmat_accumulate(h_prev, p.W_zh, z);
  std::vector<double> rh(n);
  for (std::size_t j = 0; j < n; ++j) {
    r[j] = sigmoid(r[j]);
    z[j] = sigmoid(z[j]);
    rh[j] = r[j] * h_prev[j];
  }
  std::vector<double> cand(p.b.data().begin(), p.b.data().end());
  vecmat_accumulate(x, p.W_x, cand);
  vecmat_accumulate(rh, p.W_h, cand);
  std::vector<double> h(n);
  for (std::size_t j = 0; j < n; ++j) {
    cand[j] = std::tanh(cand[j]);
    h[j] = z[j] * cand[j] + (1.0 - z[j]) * h_prev[j];
  }
  if (cache) {
    cache->x.assign(x.begin(), x.end());
    cache->h_prev.assign(h_prev.begin(), h_prev.end());
    cache->r = std::move(r);
    cache->z = std::move(z);
    cache->n = std::move(cand);
  }
  return h;
}

/// On entry dh holds dL/dh_t; on exit dL/dh_{t−1}. dx (may be empty) is accumulated into.
inline void gru_cell_step_backward(const GruCellParams& p, const GruStepCache& c,
                                   std::vector<double>& dh, GruCellParams& grad,
                                   std::span<double> dx) {
  const auto n = p.hidden_size();
  std::vector<double> dh_prev(n), da_n(n), da_z(n), da_r(n), rh(n);
  for (std::size_t j = 0; j < n; ++j) {
    da_n[j] = dh[j] * c.z[j] * (1.0 - c.n[j] * c.n[j]);
    da_z[j] = dh[j] * (c.n[j] - c.h_prev[j]) * c.z[j] * (1.0 - c.z[j]);
    dh_prev[j] = dh[j] * (1.0 - c.z[j]);
    rh[j] = c.r[j] * c.h_prev[j];
  }
  // Candidate path.
  outer_accumulate(c.x, da_n, grad.W_x);
  outer_accumulate(rh, da_n, grad.W_h);
  for (std::size_t j = 0; j < n; ++j) grad.b[j] += da_n[j];
  if (!dx.empty()) vec_matT_accumulate(da_n, p.W_x, dx);
  std::vector<double> drh(n, 0.0);
  vec_matT_accumulate(da_n, p.W_h, drh);
  for (std::size_t j = 0; j < n; ++j) {
    dh_prev[j] += drh[j] * c.r[j];
    da_r[j] = drh[j] * c.h_prev[j] * c.r[j] * (1.0 - c.r[j]);
  }
  // Gates.
  outer_accumulate(c.x, da_z, grad.W_zx);
  outer_accumulate(c.h_prev, da_z, grad.W_zh);
  for (std::size_t j = 0; j < n; ++j) grad.b_z[j] += da_z[j];
  outer_accumulate(c.x, da_r, grad.W_rx);
  outer_accumulate(c.h_prev, da_r, grad.W_rh);
  for (std::size_t j = 0; j < n; ++j) grad.b_r[j] += da_r[j];
  if (!dx.empty()) {
    vec_matT_accumulate(da_z, p.W_zx, dx);
    vec_matT_accumulate(da_r, p.W_rx, dx);
  }
  vec_matT_accumulate(da_z, p.W_zh, dh_prev);
  vec_matT_accumulate(da_r, p.W_rh, dh_prev);
  dh = std::move(dh_prev);
}

// ---------------------------------------------------------------------------
// Uniform cell interface used by the sequence runners.
// ---------------------------------------------------------------------------

struct LstmCell {
  using Params = LstmCellParams;
  using Cache = LstmStepCache;
  static constexpr const char* kName = "lstm";

  struct State {
    std::vector<double> h, c;
  };

  static State zero_state(const Params& p) {
    return {std::vector<double>(p.hidden_size(), 0.0), std::vector<double>(p.hidden_size(), 0.0)};
  }
  static State step(const Params& p, std::span<const double> x, const State& s, Cache* cache) {
    auto out = lstm_cell_step(p, x, s.h, s.c, cache);
    return {std::move(out.h), std::move(out.c)};
  }
  /// d.h / d.c: gradient w.r.t. the step output on entry, w.r.t. its input state on exit.
  static void step_backward(const Params& p, const Cache& cache, State& d, Params& grad,
                            std::span<double> dx) {
    lstm_cell_step_backward(p, cache, d.h, d.c, grad, dx);
  }
};

struct GruCell {
  using Params = GruCellParams;
  using Cache = GruStepCache;
  static constexpr const char* kName = "gru";

  struct State {
    std::vector<double> h;
  };

  static State zero_state(const Params& p) { return {std::vector<double>(p.hidden_size(), 0.0)}; }
  static State step(const Params& p, std::span<const double> x, const State& s, Cache* cache) {
    return {gru_cell_step(p, x, s.h, cache)};
  }
  static void step_backward(const Params& p, const Cache& cache, State& d, Params& grad,
                            std::span<double> dx) {
    gru_cell_step_backward(p, cache, d.h, grad, dx);
  }
};

/// Runs a cell over the rows of `inputs` from a zero state, in order or reversed.
/// Returns the final state; per-step caches are stored in processing order.
template <class Cell>
typename Cell::State run_sequence(const typename Cell::Params& p, const Tensor2& inputs,
                                  bool reverse, std::vector<typename Cell::Cache>* caches) {
  auto state = Cell::zero_state(p);
  const auto steps = inputs.rows();
  if (caches) caches->assign(steps, {});
  for (std::size_t s = 0; s < steps; ++s) {
    const auto t = reverse ? steps - 1 - s : s;
    state = Cell::step(p, inputs.row(t), state, caches ? &(*caches)[s] : nullptr);
  }
  return state;
}

/// BPTT from a gradient on the final state. Accumulates parameter gradients and,
/// when `dinputs` is non-null, the gradient w.r.t. each input row.
template <class Cell>
void backprop_sequence(const typename Cell::Params& p, const std::vector<typename Cell::Cache>& caches,
                       typename Cell::State d_final, bool reverse, typename Cell::Params& grad,
                       Tensor2* dinputs) {
  const auto steps = caches.size();
  auto d = std::move(d_final);
  for (std::size_t s = steps; s-- > 0;) {
    const auto t = reverse ? steps - 1 - s : s;
    std::span<double> dx = dinputs ? dinputs->row(t) : std::span<double>{};
    Cell::step_backward(p, caches[s], d, grad, dx);
  }
}

}  // namespace tgf
