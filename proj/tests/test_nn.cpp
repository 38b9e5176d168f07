#include <gtest/gtest.h>

#include <cmath>

#include "emtk/nn/adam.hpp"
#include "emtk/nn/layers.hpp"
#include "emtk/nn/loss.hpp"
#include "support/finite_diff.hpp"

using namespace emtk;
using namespace emtk::nn;
using T = Tensor2<double>;
using emtk::testing::max_relative_error;
using emtk::testing::numeric_gradient;

namespace {

T random_tensor(Rng& rng, Eigen::Index r, Eigen::Index c, double lo = -1, double hi = 1) {
  T m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, lo, hi);
  return m;
}

}  // namespace

TEST(Dense, ZeroWeightsGiveActivatedBias) {
  DenseLayer<double> l(3, 2, Activation::Tanh);
  l.b << 0.3, -1.2;
  const T y = dense_forward(l, T(T::Ones(4, 3)));
  for (Eigen::Index i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(y(i, 0), std::tanh(0.3));
    EXPECT_DOUBLE_EQ(y(i, 1), std::tanh(-1.2));
  }
}

TEST(Dense, IdentityAndHandProduct) {
  DenseLayer<double> id(3, 3, Activation::Linear);
  id.W.setIdentity();
  Rng rng(1);
  const T x = random_tensor(rng, 5, 3);
  EXPECT_EQ(dense_forward(id, x), x);

  DenseLayer<double> l(2, 1, Activation::Linear);
  l.W << 1, 1;
  l.b << 0.5;
  T x2(1, 2);
  x2 << 1, 2;
  EXPECT_DOUBLE_EQ(dense_forward(l, x2)(0, 0), 3.5);
  EXPECT_THROW(dense_forward(l, T(T::Ones(1, 3))), ShapeError);
}

TEST(Dense, BackwardHandValues) {
  DenseLayer<double> l(1, 1, Activation::Linear);
  l.W << 0.7;
  T x(1, 1);
  x << 2;
  DenseCache<double> cache;
  dense_forward(l, x, &cache);
  auto g = DenseGrad<double>::zeros_like(l);
  const T dx = dense_backward(l, cache, T(T::Ones(1, 1)), g);
  EXPECT_DOUBLE_EQ(g.W(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(g.b(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(dx(0, 0), 0.7);

  // tanh at pre-activation 0 has unit slope.
  DenseLayer<double> t(1, 1, Activation::Tanh);
  x << 0;
  dense_forward(t, x, &cache);
  auto gt = DenseGrad<double>::zeros_like(t);
  dense_backward(t, cache, T(T::Ones(1, 1)), gt);
  EXPECT_DOUBLE_EQ(gt.b(0, 0), 1.0);
}

class DenseGradCheck : public ::testing::TestWithParam<Activation> {};

TEST_P(DenseGradCheck, MatchesFiniteDifferences) {
  Rng rng(42);
  DenseLayer<double> l(4, 3, GetParam(), 5e-4);
  l.init(rng);
  l.b = random_tensor(rng, 1, 3, -0.5, 0.5);
  T x = random_tensor(rng, 5, 4);
  const T w = random_tensor(rng, 5, 3);  // fixed projection to a scalar
  auto objective = [&]() { return (dense_forward(l, x).array() * w.array()).sum() + l.penalty(); };

  DenseCache<double> cache;
  dense_forward(l, x, &cache);
  auto g = DenseGrad<double>::zeros_like(l);
  const T dx = dense_backward(l, cache, w, g);

  EXPECT_LT(max_relative_error(g.W, numeric_gradient(l.W, objective)), 1e-4);
  EXPECT_LT(max_relative_error(g.b, numeric_gradient(l.b, objective)), 1e-4);
  EXPECT_LT(max_relative_error(dx, numeric_gradient(x, objective)), 1e-4);
}

INSTANTIATE_TEST_SUITE_P(AllActivations, DenseGradCheck,
                         ::testing::Values(Activation::Linear, Activation::Tanh, Activation::Sigmoid,
                                           Activation::Softmax),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Softmax, RowsAreDistributions) {
  Rng rng(8);
  const T z = random_tensor(rng, 50, 7, -30, 30);
  const T p = softmax_rows(z);
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-9);
    EXPECT_GE(p.row(i).minCoeff(), 0.0);
  }
  T big(1, 2);
  big << 1000, 1000;
  EXPECT_DOUBLE_EQ(softmax_rows(big)(0, 0), 0.5);
}

TEST(Embedding, GatherAndScatterGradient) {
  Rng rng(4);
  EmbeddingTable<double> t(5, 3);
  t.init(rng);
  EXPECT_LE(t.E.cwiseAbs().maxCoeff(), 0.05);
  const std::vector<std::size_t> idx = {1, 4, 1};
  const T w = random_tensor(rng, 3, 3);
  auto objective = [&]() { return (t.gather(idx).array() * w.array()).sum(); };
  T g = T::Zero(5, 3);
  EmbeddingTable<double>::scatter_add(w, idx, g);
  EXPECT_LT(max_relative_error(g, numeric_gradient(t.E, objective)), 1e-4);
  EXPECT_THROW(t.gather({5}), ShapeError);
}

TEST(Dropout, IdentityCases) {
  Rng rng(3);
  const T x = random_tensor(rng, 4, 6);
  EXPECT_EQ(dropout_forward(DropoutSpec{0.0, true}, x, &rng).first, x);
  EXPECT_EQ(dropout_forward(DropoutSpec{0.2, false}, x, &rng).first, x);
  EXPECT_THROW(dropout_forward(DropoutSpec{1.0, true}, x, &rng), ConfigError);
}

TEST(Dropout, HalfDropDoublesKept) {
  Rng rng(11);
  const T x = random_tensor(rng, 3, 8, 0.5, 1.0);
  const auto [y, mask] = dropout_forward(DropoutSpec{0.5, true}, x, &rng);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (mask.data()[i] == 0.0) {
      EXPECT_EQ(y.data()[i], 0.0);
    } else {
      EXPECT_EQ(mask.data()[i], 2.0);
      EXPECT_EQ(y.data()[i], 2.0 * x.data()[i]);
    }
  }
}

TEST(Dropout, PreservesExpectation) {
  Rng rng(2021);
  T x(1, 6);
  x << 1.0, -2.0, 0.5, 3.0, -0.25, 10.0;
  T sum = T::Zero(1, 6);
  const int passes = 10000;
  for (int k = 0; k < passes; ++k) sum += dropout_forward(DropoutSpec{0.2, true}, x, &rng).first;
  const T mean = sum / passes;
  for (Eigen::Index j = 0; j < 6; ++j) EXPECT_NEAR(mean(0, j), x(0, j), 0.02 * std::abs(x(0, j)));
}

TEST(Loss, HandValues) {
  Rng rng(6);
  const T p = random_tensor(rng, 4, 1);
  EXPECT_EQ(mse(p, p), 0.0);
  EXPECT_NEAR(bce(T(T::Constant(1, 1, 0.5)), T(T::Ones(1, 1))), std::log(2.0), 1e-15);
  EXPECT_NEAR(ce(T(T::Constant(3, 4, 0.25)), {0, 3, 2}), std::log(4.0), 1e-15);
}

TEST(Loss, ClampedProbabilitiesHaveZeroGradient) {
  T p(2, 1), t(2, 1);
  p << 0.0, 1.0;
  t << 1.0, 0.0;
  EXPECT_NEAR(bce(p, t), -std::log(kProbClamp), 1e-9);
  EXPECT_EQ(grad_bce(p, t), T::Zero(2, 1));
}

TEST(Loss, GradientsMatchFiniteDifferences) {
  Rng rng(99);
  T pred = random_tensor(rng, 6, 1, 1, 7);
  const T target = random_tensor(rng, 6, 1, 1, 7);
  EXPECT_LT(max_relative_error(grad_mse(pred, target), numeric_gradient(pred, [&] { return mse(pred, target); })),
            1e-4);

  T prob = random_tensor(rng, 6, 1, 0.05, 0.95);
  T bin(6, 1);
  bin << 1, 0, 0, 1, 1, 0;
  EXPECT_LT(max_relative_error(grad_bce(prob, bin), numeric_gradient(prob, [&] { return bce(prob, bin); })),
            1e-4);

  T probs = softmax_rows(random_tensor(rng, 5, 4, -2, 2));
  const std::vector<std::size_t> cls = {0, 3, 1, 1, 2};
  EXPECT_LT(max_relative_error(grad_ce(probs, cls), numeric_gradient(probs, [&] { return ce(probs, cls); })),
            1e-4);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  T theta = T(T::Ones(1, 1));
  const T g = T::Ones(1, 1);
  AdamState<double> st;
  adam_step<double>(st, {&theta}, {&g});
  EXPECT_NEAR(theta(0, 0), 1.0 - 1e-3 / (1.0 + 1e-8), 1e-15);
  EXPECT_NEAR(theta(0, 0), 0.999, 1e-9);
  const double after_one = theta(0, 0);
  adam_step<double>(st, {&theta}, {&g});
  EXPECT_LT(theta(0, 0), after_one);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  T theta(2, 2);
  theta << 1, -2, 3, 0.5;
  const T before = theta;
  const T g = T::Zero(2, 2);
  AdamState<double> st;
  adam_step<double>(st, {&theta}, {&g});
  EXPECT_EQ(theta, before);
}

TEST(ParamCount, DenseLayer) {
  DenseLayer<double> l(768, 128, Activation::Tanh);
  EXPECT_EQ(param_count<double>({&l.W, &l.b}), 98432u);
  EXPECT_EQ(param_count<double>({}), 0u);
}
