#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "tgf/core/adam.hpp"
#include "tgf/core/grad_check.hpp"
#include "tgf/core/ops.hpp"
#include "tgf/core/params.hpp"

using namespace tgf;
using tgf::testing::random_tensor;

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  const Tensor2 m{{1, 2}, {3, 4}};
  EXPECT_EQ(matmul(Tensor2::identity(2), m), m);
}

TEST(Matmul, RowTimesColumn) {
  const auto r = matmul(Tensor2{{1, 2}}, Tensor2{{3}, {4}});
  ASSERT_EQ(r.rows(), 1u);
  ASSERT_EQ(r.cols(), 1u);
  EXPECT_DOUBLE_EQ(r(0, 0), 11.0);
}

TEST(Matmul, MismatchedInnerDimensionThrows) {
  EXPECT_THROW(matmul(Tensor2(2, 3), Tensor2(2, 3)), DimensionError);
}

TEST(Matmul, TransposedVariantsAgreeWithExplicitTranspose) {
  Rng rng(RngSeed{3});
  const auto a = random_tensor(4, 3, rng);
  const auto b = random_tensor(4, 5, rng);
  const auto c = random_tensor(6, 3, rng);
  const auto tn = matmul_tn(a, b);
  const auto ref_tn = matmul(transpose(a), b);
  for (std::size_t i = 0; i < tn.size(); ++i) EXPECT_NEAR(tn[i], ref_tn[i], 1e-12);
  const auto nt = matmul_nt(a, c);
  const auto ref_nt = matmul(a, transpose(c));
  for (std::size_t i = 0; i < nt.size(); ++i) EXPECT_NEAR(nt[i], ref_nt[i], 1e-12);
}

TEST(Activation, FixedPoints) {
  EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
  EXPECT_DOUBLE_EQ(std::tanh(0.0), 0.0);
  EXPECT_DOUBLE_EQ(relu(-3.0), 0.0);
  EXPECT_DOUBLE_EQ(relu(3.0), 3.0);
  const auto t = elementwise_activation(Activation::sigmoid, Tensor2{{0.0}});
  EXPECT_DOUBLE_EQ(t(0, 0), 0.5);
}

TEST(Activation, RangesHoldOnRandomInputs) {
  Rng rng(RngSeed{11});
  const auto x = random_tensor(20, 20, rng, 30.0);
  const auto s = elementwise_activation(Activation::sigmoid, x);
  const auto th = elementwise_activation(Activation::tanh, x);
  const auto r = elementwise_activation(Activation::relu, x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_GE(s[i], 0.0);
    EXPECT_LE(s[i], 1.0);
    EXPECT_GE(th[i], -1.0);
    EXPECT_LE(th[i], 1.0);
    EXPECT_GE(r[i], 0.0);
  }
  // Moderate inputs stay strictly inside the open ranges.
  const auto small = elementwise_activation(Activation::sigmoid, random_tensor(5, 5, rng));
  for (double v : small.data()) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  EXPECT_TRUE(std::isfinite(sigmoid(-1000.0)));
  EXPECT_TRUE(std::isfinite(sigmoid(1000.0)));
}

TEST(Softmax, SymmetricAndSingletonRows) {
  const auto s = softmax_rows(Tensor2{{0.0, 0.0}});
  EXPECT_DOUBLE_EQ(s(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(s(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(softmax_rows(Tensor2{{42.0}})(0, 0), 1.0);
}

TEST(Softmax, MatchesDirectExponentiation) {
  const auto s = softmax_rows(Tensor2{{1.0, 2.0, 3.0}});
  const double z = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
  EXPECT_NEAR(s(0, 0), std::exp(1.0) / z, 1e-15);
  EXPECT_NEAR(s(0, 1), std::exp(2.0) / z, 1e-15);
  EXPECT_NEAR(s(0, 2), std::exp(3.0) / z, 1e-15);
  EXPECT_NEAR(s(0, 0), 0.09003057, 1e-8);
  EXPECT_NEAR(s(0, 1), 0.24472847, 1e-8);
  EXPECT_NEAR(s(0, 2), 0.66524096, 1e-8);
}

TEST(Softmax, RowsSumToOneOnRandomTensors) {
  Rng rng(RngSeed{5});
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = random_tensor(1 + rng.index(6), 1 + rng.index(9), rng, 50.0);
    const auto s = softmax_rows(x);
    for (std::size_t r = 0; r < s.rows(); ++r) {
      double sum = 0.0;
      for (double v : s.row(r)) sum += v;
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(LayerNorm, ConstantRowNormalizesToZero) {
  const std::vector<double> x{4, 4, 4}, g{1, 1, 1}, b{0, 0, 0};
  for (double v : layer_norm(x, g, b, kLayerNormEps)) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(LayerNorm, TwoElementHandCheck) {
  const std::vector<double> x{1, 3}, g{1, 1}, b{0, 0};
  const auto y = layer_norm(x, g, b, 1e-14);
  EXPECT_NEAR(y[0], -1.0, 1e-12);
  EXPECT_NEAR(y[1], 1.0, 1e-12);
}

TEST(LayerNorm, ZeroGammaYieldsBeta) {
  const std::vector<double> x{1, -7, 2.5}, g{0, 0, 0}, b{0.1, 0.2, 0.3};
  const auto y = layer_norm(x, g, b, kLayerNormEps);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(y[i], b[i]);
}

TEST(LayerNorm, StandardizesRandomRows) {
  Rng rng(RngSeed{8});
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 2 + rng.index(10);
    std::vector<double> x(d), g(d, 1.0), b(d, 0.0);
    for (auto& v : x) v = 5.0 * rng.normal() + 3.0;
    const auto y = layer_norm(x, g, b, 1e-300);
    double mean = 0.0, var = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(d);
    for (double v : y) var += (v - mean) * (v - mean);
    var /= static_cast<double>(d);
    EXPECT_LT(std::abs(mean), 1e-10);
    EXPECT_NEAR(var, 1.0, 1e-8);
  }
}

TEST(LayerNorm, RejectsBadArguments) {
  const std::vector<double> x{1, 2}, g{1}, b{0, 0};
  EXPECT_THROW(layer_norm(x, g, b, kLayerNormEps), DimensionError);
  const std::vector<double> g2{1, 1};
  EXPECT_THROW(layer_norm(x, g2, b, 0.0), DomainError);
}

TEST(LayerNorm, RowBackwardMatchesFiniteDifferences) {
  Rng rng(RngSeed{21});
  auto x = random_tensor(3, 5, rng);
  auto gamma = random_tensor(1, 5, rng);
  auto beta = random_tensor(1, 5, rng);
  const auto upstream = random_tensor(3, 5, rng);
  auto loss = [&] {
    const auto y = layer_norm_rows(x, gamma, beta, nullptr);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * upstream[i];
    return s;
  };
  LayerNormCache cache;
  layer_norm_rows(x, gamma, beta, &cache);
  Tensor2 dgamma(1, 5), dbeta(1, 5);
  auto dx = layer_norm_rows_backward(cache, gamma, upstream, dgamma, dbeta);
  const auto r = grad_check(loss, {{"x", &x}, {"gamma", &gamma}, {"beta", &beta}},
                            {{"x", &dx}, {"gamma", &dgamma}, {"beta", &dbeta}});
  EXPECT_LT(r.max_rel_error, 1e-6) << r.worst_param;
}

TEST(Softmax, BackwardMatchesFiniteDifferences) {
  Rng rng(RngSeed{22});
  auto x = random_tensor(2, 4, rng);
  const auto upstream = random_tensor(2, 4, rng);
  auto loss = [&] {
    const auto y = softmax_rows(x);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * upstream[i];
    return s;
  };
  auto dx = softmax_rows_backward(softmax_rows(x), upstream);
  const auto r = grad_check(loss, {{"x", &x}}, {{"x", &dx}});
  EXPECT_LT(r.max_rel_error, 1e-6);
}

TEST(Adam, ZeroGradientLeavesParametersButAdvancesStep) {
  Tensor2 w{{1.0, -2.0}};
  Tensor2 g(1, 2, 0.0);
  const std::vector<ParamRef> params{{"w", &w}}, grads{{"w", &g}};
  auto state = AdamState::for_params(params);
  adam_step(params, grads, state);
  EXPECT_EQ(w, (Tensor2{{1.0, -2.0}}));
  EXPECT_EQ(state.t, 1u);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  // At t = 1 the bias-corrected moments are g and g², so Δw = −lr·g/(|g|+ε).
  for (double gv : {0.3, -4.0, 1e-3}) {
    Tensor2 w{{0.5}};
    Tensor2 g{{gv}};
    const std::vector<ParamRef> params{{"w", &w}}, grads{{"w", &g}};
    AdamConfig cfg;
    cfg.lr = 0.01;
    auto state = AdamState::for_params(params, cfg);
    adam_step(params, grads, state);
    const double expected = 0.5 - cfg.lr * gv / (std::abs(gv) + cfg.eps);
    EXPECT_NEAR(w(0, 0), expected, 1e-15);
    EXPECT_NEAR(std::abs(w(0, 0) - 0.5), cfg.lr, 1e-5 * cfg.lr / std::abs(gv) + 1e-12);
  }
}

TEST(Adam, IdenticalInputsGiveIdenticalOutputs) {
  auto run = [] {
    Rng rng(RngSeed{99});
    auto w = random_tensor(3, 3, rng);
    const std::vector<ParamRef> params{{"w", &w}};
    auto state = AdamState::for_params(params);
    for (int step = 0; step < 10; ++step) {
      auto g = random_tensor(3, 3, rng);
      adam_step(params, {{"w", &g}}, state);
    }
    return w;
  };
  EXPECT_EQ(run(), run());
}

TEST(Adam, ShapeMismatchThrows) {
  Tensor2 w(2, 2), g(2, 3);
  const std::vector<ParamRef> params{{"w", &w}}, grads{{"w", &g}};
  auto state = AdamState::for_params(params);
  EXPECT_THROW(adam_step(params, grads, state), DimensionError);
}

TEST(GradCheck, QuadraticHasTinyError) {
  const std::vector<double> analytic{6.0};
  const double err = grad_check([](std::span<const double> w) { return w[0] * w[0]; }, {3.0}, analytic);
  EXPECT_LT(err, 1e-8);
}

TEST(GradCheck, ConstantFunctionHasZeroError) {
  const std::vector<double> analytic{0.0, 0.0};
  EXPECT_EQ(grad_check([](std::span<const double>) { return 7.0; }, {1.0, 2.0}, analytic), 0.0);
}

TEST(GradCheck, DetectsWrongGradient) {
  const std::vector<double> analytic{5.0};
  EXPECT_GT(grad_check([](std::span<const double> w) { return w[0] * w[0]; }, {3.0}, analytic), 0.1);
}

TEST(Xavier, DeterministicAndBounded) {
  const auto a = xavier_init(4, 6, RngSeed{17});
  EXPECT_EQ(a, xavier_init(4, 6, RngSeed{17}));
  EXPECT_NE(a, xavier_init(4, 6, RngSeed{18}));
  const double limit = std::sqrt(6.0 / 10.0);
  for (double v : a.data()) EXPECT_LE(std::abs(v), limit);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const double v = xavier_init(1, 1, RngSeed{s})(0, 0);
    EXPECT_LT(std::abs(v), std::sqrt(3.0));
  }
  EXPECT_THROW(xavier_init(0, 3, RngSeed{1}), DimensionError);
}

TEST(Rng, SeededStreamsRepeatAndDiffer) {
  Rng a(RngSeed{1}), b(RngSeed{1}), c(RngSeed{2});
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
  }
  EXPECT_NE(derive_seed(RngSeed{1}, 0).value, derive_seed(RngSeed{1}, 1).value);
}

TEST(Rng, NormalMomentsAreReasonable) {
  Rng rng(RngSeed{123});
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}
