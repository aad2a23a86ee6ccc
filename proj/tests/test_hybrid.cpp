#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "tgf/core/grad_check.hpp"
#include "tgf/data/synth.hpp"
#include "tgf/forecast.hpp"
#include "tgf/hybrid/model.hpp"
#include "tgf/train.hpp"

using namespace tgf;
using tgf::testing::all_indices;
using tgf::testing::random_tensor;
using tgf::testing::small_window_set;

namespace {

using Matrix = std::vector<std::vector<double>>;

Matrix to_matrix(const Tensor2& t) {
  Matrix m(t.rows(), std::vector<double>(t.cols()));
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.cols(); ++j) m[i][j] = t(i, j);
  return m;
}

// Plain-loop encoder layer used as an independent oracle.
Matrix reference_encoder_layer(const Matrix& h, const EncoderLayerParams& p) {
  const std::size_t T = h.size(), d = h[0].size(), heads = p.W_Q.size(), dk = d / heads;
  auto project = [&](const Tensor2& w, std::size_t t, std::size_t j) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) s += h[t][c] * w(c, j);
    return s;
  };
  Matrix concat(T, std::vector<double>(d, 0.0));
  for (std::size_t m = 0; m < heads; ++m) {
    for (std::size_t t = 0; t < T; ++t) {
      std::vector<double> scores(T);
      double mx = -1e300;
      for (std::size_t u = 0; u < T; ++u) {
        double s = 0.0;
        for (std::size_t j = 0; j < dk; ++j) s += project(p.W_Q[m], t, j) * project(p.W_K[m], u, j);
        scores[u] = s / std::sqrt(static_cast<double>(dk));
        mx = std::max(mx, scores[u]);
      }
      double z = 0.0;
      for (auto& s : scores) z += (s = std::exp(s - mx));
      for (std::size_t j = 0; j < dk; ++j) {
        double acc = 0.0;
        for (std::size_t u = 0; u < T; ++u) acc += scores[u] / z * project(p.W_V[m], u, j);
        concat[t][m * dk + j] = acc;
      }
    }
  }
  auto norm = [&](std::vector<double> row, const Tensor2& g, const Tensor2& b) {
    double mean = 0.0, var = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(d);
    for (double v : row) var += (v - mean) * (v - mean);
    var /= static_cast<double>(d);
    for (std::size_t j = 0; j < d; ++j) row[j] = g(0, j) * (row[j] - mean) / std::sqrt(var + 1e-5) + b(0, j);
    return row;
  };
  Matrix out(T);
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<double> z1(d);
    for (std::size_t j = 0; j < d; ++j) {
      double a = 0.0;
      for (std::size_t c = 0; c < d; ++c) a += concat[t][c] * p.W_O(c, j);
      z1[j] = h[t][j] + a;
    }
    const auto ha = norm(z1, p.ln1_gamma, p.ln1_beta);
    std::vector<double> hidden(p.W_1.cols());
    for (std::size_t f = 0; f < hidden.size(); ++f) {
      double a = p.b_1(0, f);
      for (std::size_t c = 0; c < d; ++c) a += ha[c] * p.W_1(c, f);
      hidden[f] = std::max(0.0, a);
    }
    std::vector<double> z2(d);
    for (std::size_t j = 0; j < d; ++j) {
      double a = p.b_2(0, j);
      for (std::size_t f = 0; f < hidden.size(); ++f) a += hidden[f] * p.W_2(f, j);
      z2[j] = ha[j] + a;
    }
    out[t] = norm(z2, p.ln2_gamma, p.ln2_beta);
  }
  return out;
}

HybridConfig small_config(std::size_t window, std::size_t features) {
  HybridConfig cfg;
  cfg.window = window;
  cfg.features = features;
  cfg.d_model = 4;
  cfg.heads = 2;
  cfg.layers = 1;
  cfg.d_ffn = 6;
  cfg.d_gru = 3;
  return cfg;
}

}  // namespace

TEST(Embedding, ZeroWindowAndBiasGiveZeros) {
  Rng rng(RngSeed{1});
  const auto e = embed_window(Tensor2(5, 3), random_tensor(4, 3, rng), Tensor2(1, 4));
  for (double v : e.data()) EXPECT_EQ(v, 0.0);
}

TEST(Embedding, AffineScalarCase) {
  EXPECT_DOUBLE_EQ(embed_window(Tensor2{{0.5}}, Tensor2{{2.0}}, Tensor2{{1.0}})(0, 0), 2.0);
}

TEST(Embedding, IdenticalTimestepsEmbedIdentically) {
  Rng rng(RngSeed{2});
  Tensor2 w(3, 2);
  w(0, 0) = w(2, 0) = 0.4;
  w(0, 1) = w(2, 1) = -0.9;
  w(1, 0) = 1.0;
  const auto e = embed_window(w, random_tensor(6, 2, rng), random_tensor(1, 6, rng));
  for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(e(0, j), e(2, j));
  EXPECT_THROW(embed_window(w, Tensor2(6, 3), Tensor2(1, 6)), DimensionError);
}

TEST(PositionalEncoding, KnownValuesAndBounds) {
  for (std::size_t d : {2u, 4u, 16u}) {
    const auto pe = positional_encoding(50, d);
    for (std::size_t j = 0; j < d; ++j) EXPECT_EQ(pe(0, j), j % 2 == 0 ? 0.0 : 1.0);
    EXPECT_NEAR(pe(1, 0), std::sin(1.0), 1e-15);
    EXPECT_NEAR(pe(1, 0), 0.841471, 1e-6);
    for (double v : pe.data()) {
      EXPECT_GE(v, -1.0);
      EXPECT_LE(v, 1.0);
    }
  }
  EXPECT_THROW(positional_encoding(3, 5), ConfigError);
}

TEST(Attention, SingleStepAttendsToItself) {
  Rng rng(RngSeed{3});
  const auto layer = EncoderLayerParams::xavier(4, 2, 6, rng);
  const auto h = random_tensor(1, 4, rng);
  AttentionCache cache;
  const auto out = multi_head_attention(h, layer, &cache);
  for (const auto& a : cache.probs) EXPECT_EQ(a, Tensor2{{1.0}});
  Tensor2 v_concat(1, 4);
  for (std::size_t m = 0; m < 2; ++m) {
    const auto v = matmul(h, layer.W_V[m]);
    v_concat(0, 2 * m) = v(0, 0);
    v_concat(0, 2 * m + 1) = v(0, 1);
  }
  const auto expected = matmul(v_concat, layer.W_O);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(out(0, j), expected(0, j), 1e-14);
}

TEST(Attention, IdenticalTimestepsGiveUniformWeights) {
  Rng rng(RngSeed{4});
  const auto layer = EncoderLayerParams::xavier(4, 2, 6, rng);
  const auto row = random_tensor(1, 4, rng);
  Tensor2 h(5, 4);
  for (std::size_t t = 0; t < 5; ++t) std::copy_n(row.data().begin(), 4, h.row(t).begin());
  AttentionCache cache;
  multi_head_attention(h, layer, &cache);
  for (const auto& a : cache.probs)
    for (double v : a.data()) EXPECT_NEAR(v, 0.2, 1e-15);
}

TEST(Attention, TwoStepSingleHeadHandOracle) {
  auto layer = EncoderLayerParams::zeros(2, 1, 2);
  layer.W_Q[0] = Tensor2{{1.0, 0.0}, {0.0, 2.0}};
  layer.W_K[0] = Tensor2{{0.5, 1.0}, {-1.0, 0.0}};
  layer.W_V[0] = Tensor2{{2.0, -1.0}, {1.0, 3.0}};
  layer.W_O = Tensor2::identity(2);
  const Tensor2 h{{1.0, 0.5}, {-0.5, 2.0}};
  // Q = H W_Q, K = H W_K, V = H W_V by hand.
  const double q[2][2] = {{1.0, 1.0}, {-0.5, 4.0}};
  const double k[2][2] = {{0.0, 1.0}, {-2.25, -0.5}};
  const double v[2][2] = {{2.5, 0.5}, {1.0, 6.5}};
  const auto out = multi_head_attention(h, layer);
  for (int t = 0; t < 2; ++t) {
    double s[2];
    for (int u = 0; u < 2; ++u) s[u] = (q[t][0] * k[u][0] + q[t][1] * k[u][1]) / std::sqrt(2.0);
    const double a0 = 1.0 / (1.0 + std::exp(s[1] - s[0]));
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(out(t, j), a0 * v[0][j] + (1.0 - a0) * v[1][j], 1e-14);
  }
}

TEST(EncoderLayer, ZeroFeedForwardReducesToNormalizedResidual) {
  Rng rng(RngSeed{5});
  auto layer = EncoderLayerParams::xavier(4, 2, 6, rng);
  layer.W_1.fill(0.0);
  layer.W_2.fill(0.0);
  layer.b_2 = random_tensor(1, 4, rng);
  const auto h = random_tensor(3, 4, rng);
  EncoderLayerCache cache;
  const auto out = encoder_layer_forward(h, layer, &cache);
  auto z = cache.h_attn;
  add_row_inplace(z, layer.b_2);
  const auto expected = layer_norm_rows(z, layer.ln2_gamma, layer.ln2_beta, nullptr);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out[i], expected[i], 1e-14);
}

TEST(EncoderLayer, OutputRowsAreStandardized) {
  Rng rng(RngSeed{6});
  const auto layer = EncoderLayerParams::xavier(8, 2, 16, rng);
  const auto out = encoder_layer_forward(random_tensor(5, 8, rng, 2.0), layer);
  for (std::size_t t = 0; t < out.rows(); ++t) {
    double mean = 0.0, var = 0.0;
    for (double v : out.row(t)) mean += v;
    mean /= 8.0;
    for (double v : out.row(t)) var += (v - mean) * (v - mean);
    var /= 8.0;
    EXPECT_NEAR(mean, 0.0, 1e-12);
    EXPECT_NEAR(var, 1.0, 1e-3);
  }
}

TEST(EncoderLayer, MatchesIndependentLoopImplementation) {
  Rng rng(RngSeed{7});
  auto layer = EncoderLayerParams::xavier(4, 2, 5, rng);
  layer.b_1 = random_tensor(1, 5, rng, 0.3);
  layer.b_2 = random_tensor(1, 4, rng, 0.3);
  layer.ln1_gamma = random_tensor(1, 4, rng);
  layer.ln2_beta = random_tensor(1, 4, rng);
  const auto h = random_tensor(2, 4, rng);
  const auto out = encoder_layer_forward(h, layer);
  const auto ref = reference_encoder_layer(to_matrix(h), layer);
  for (std::size_t t = 0; t < 2; ++t)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(out(t, j), ref[t][j], 1e-12);
}

TEST(EncoderLayer, AttentionRowsSumToOneInEveryLayerAndHead) {
  HybridConfig cfg;
  cfg.window = 9;
  cfg.features = 3;
  cfg.d_model = 8;
  cfg.heads = 4;
  cfg.layers = 3;
  cfg.d_ffn = 12;
  cfg.d_gru = 4;
  const auto model = HybridModel::init(cfg, RngSeed{8});
  Rng rng(RngSeed{9});
  const auto tr = model.trace(random_tensor(9, 3, rng));
  ASSERT_EQ(tr.layers.size(), 3u);
  for (const auto& layer : tr.layers) {
    ASSERT_EQ(layer.attention.probs.size(), 4u);
    for (const auto& a : layer.attention.probs) {
      for (std::size_t r = 0; r < a.rows(); ++r) {
        double s = 0.0;
        for (double v : a.row(r)) s += v;
        EXPECT_NEAR(s, 1.0, 1e-12);
      }
    }
  }
}

TEST(HybridConfigCheck, RejectsIndivisibleHeads) {
  HybridConfig cfg;
  cfg.d_model = 30;
  cfg.heads = 4;
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_THROW(HybridModel::init(cfg, RngSeed{1}), ConfigError);
  EXPECT_THROW(EncoderLayerParams::zeros(30, 4, 8), ConfigError);
}

TEST(HybridForward, ZeroParametersPredictOutputBias) {
  auto m = HybridModel::zeros(small_config(5, 3));
  m.b_p(0, 0) = 0.123;
  Rng rng(RngSeed{10});
  EXPECT_DOUBLE_EQ(hybrid_forward(m, random_tensor(5, 3, rng)), 0.123);
}

TEST(HybridForward, ScalarOutputForAnyWindowLength) {
  Rng rng(RngSeed{11});
  for (std::size_t t : {1u, 2u, 7u, 14u}) {
    const auto m = HybridModel::init(small_config(t, 2), RngSeed{1});
    EXPECT_TRUE(std::isfinite(m.predict(random_tensor(t, 2, rng))));
    EXPECT_EQ(m.W_p.rows(), 1u);
  }
  const auto m = HybridModel::init(small_config(4, 2), RngSeed{1});
  EXPECT_THROW(m.predict(Tensor2(5, 2)), DimensionError);
}

TEST(HybridForward, TracedAndDirectPredictionsAgree) {
  const auto m = HybridModel::init(small_config(6, 3), RngSeed{12});
  Rng rng(RngSeed{13});
  const auto w = random_tensor(6, 3, rng);
  EXPECT_EQ(m.trace(w).output, m.predict(w));
}

TEST(HybridForward, PositionalEncodingIsTheOnlyOrderSource) {
  const auto m = HybridModel::init(small_config(5, 2), RngSeed{14});
  Rng rng(RngSeed{15});
  const auto w = random_tensor(5, 2, rng);
  const std::vector<std::size_t> perm{3, 0, 4, 1, 2};
  Tensor2 pw(5, 2);
  for (std::size_t t = 0; t < 5; ++t) std::copy_n(w.row(perm[t]).begin(), 2, pw.row(t).begin());

  EXPECT_NE(m.predict(w), m.predict(pw));

  // Without positions the encoder is permutation-equivariant, so mean pooling
  // over its rows is order-invariant.
  const auto e = m.encode(w, false);
  const auto pe = m.encode(pw, false);
  std::vector<double> pooled(4, 0.0), pooled_perm(4, 0.0);
  for (std::size_t t = 0; t < 5; ++t) {
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_NEAR(pe(t, j), e(perm[t], j), 1e-12);
      pooled[j] += e(t, j) / 5.0;
      pooled_perm[j] += pe(t, j) / 5.0;
    }
  }
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(pooled[j], pooled_perm[j], 1e-12);
}

TEST(HybridGradients, FullModelMatchesFiniteDifferences) {
  auto m = HybridModel::init(small_config(3, 2), RngSeed{16});
  Rng rng(RngSeed{17});
  HybridModel::for_each_param(m, [&](const std::string&, Tensor2& t) {
    for (auto& v : t.data()) v += 0.1 * rng.normal();
  });
  const auto data = small_window_set(3, 3, 2, 18);
  const auto idx = all_indices(data.size());
  HybridModel grad = zeros_like(m);
  m.batch_loss(data, idx, &grad);
  const auto r = grad_check([&] { return m.batch_loss(data, idx, nullptr); }, parameter_list(m),
                            parameter_list(grad));
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst_param << "[" << r.worst_index << "] analytic "
                                   << r.analytic << " numeric " << r.numeric;
  EXPECT_EQ(r.coordinates, parameter_count(m));
}

TEST(HybridGradients, TwoLayersFourHeads) {
  HybridConfig cfg = small_config(4, 3);
  cfg.d_model = 8;
  cfg.heads = 4;
  cfg.layers = 2;
  auto m = HybridModel::init(cfg, RngSeed{19});
  const auto data = small_window_set(2, 4, 3, 20);
  const auto idx = all_indices(data.size());
  HybridModel grad = zeros_like(m);
  m.batch_loss(data, idx, &grad);
  const auto r = grad_check([&] { return m.batch_loss(data, idx, nullptr); }, parameter_list(m),
                            parameter_list(grad));
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst_param << "[" << r.worst_index << "]";
}

TEST(HybridTraining, SameSeedGivesIdenticalTracesAndParameters) {
  const auto data = small_window_set(6, 4, 2, 21);
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.batch_size = 4;
  cfg.seed = RngSeed{3};
  auto a = HybridModel::init(small_config(4, 2), RngSeed{2});
  auto b = HybridModel::init(small_config(4, 2), RngSeed{2});
  EXPECT_EQ(train_model(a, data, cfg).loss_trace, train_model(b, data, cfg).loss_trace);
  const auto pa = parameter_list(a);
  const auto pb = parameter_list(b);
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(*pa[i].tensor, *pb[i].tensor) << pa[i].name;
}

TEST(HybridTraining, MemorizesEightWindows) {
  HybridConfig cfg = small_config(4, 2);
  cfg.d_model = 8;
  cfg.d_ffn = 16;
  cfg.d_gru = 8;
  auto m = HybridModel::init(cfg, RngSeed{22});
  const auto data = small_window_set(8, 4, 2, 23);
  TrainConfig tc;
  tc.epochs = 500;
  tc.adam.lr = 1e-2;
  train_model(m, data, tc);
  EXPECT_LT(mean_squared_error(m, data), 1e-3);
}

TEST(PredictSeries, EnumeratesWindowsAndDenormalizes) {
  const std::size_t T = 4;
  const auto frame = synthesize_series(RngSeed{24}, 20).select({columns::kClose, columns::kFgi}).slice(0, T + 3);
  const auto stats = fit_minmax(frame);
  auto m = HybridModel::zeros(small_config(T, 2));
  m.b_p(0, 0) = 0.0;
  auto fc = predict_series(m, frame, stats, T);
  ASSERT_EQ(fc.size(), 3u);
  for (double p : fc.predicted) EXPECT_DOUBLE_EQ(p, stats.min[0]);
  m.b_p(0, 0) = 1.0;
  fc = predict_series(m, frame, stats, T);
  for (double p : fc.predicted) EXPECT_DOUBLE_EQ(p, stats.max[0]);
  EXPECT_EQ(fc.dates.front(), frame.dates()[T]);
  EXPECT_THROW(predict_series(m, frame.slice(0, T), stats, T), SizeError);
}

TEST(PredictSeries, RenormalizingReproducesNetworkOutput) {
  const std::size_t T = 5;
  const auto frame = synthesize_series(RngSeed{25}, 30).select({columns::kClose, columns::kVolume});
  const auto stats = fit_minmax(frame);
  const auto m = HybridModel::init(small_config(T, 2), RngSeed{26});
  const auto fc = predict_series(m, frame, stats, T);
  const auto ws = make_windows(apply_minmax(frame, stats), T, columns::kClose);
  for (std::size_t i = 0; i < fc.size(); ++i) {
    EXPECT_NEAR(apply_minmax(fc.predicted[i], columns::kClose, stats), m.predict(ws.inputs[i]), 1e-10);
  }
}
