#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "emtk/error.hpp"
#include "emtk/model.hpp"
#include "support/fixtures.hpp"
#include "support/gradcheck.hpp"

using namespace emtk;
using emtk::testing::random_batch;
using emtk::testing::shrunken_config;

namespace {

std::size_t dense(std::size_t in, std::size_t out) { return in * out + out; }

// Layer inventory written out independently of build().
std::size_t expected_params(Target mode, std::array<std::size_t, 4> vocab, std::size_t E) {
  std::size_t n = dense(768, 128) + 2 * dense(128, 16) + dense(16, 1) + dense(16, E);
  n += 3 * (vocab[0] + vocab[1] + vocab[2] + vocab[3]);
  n += dense(12, 32) + dense(32, 16);
  n += 9 * dense(1, 8) + dense(72, 32);
  const std::size_t fusion_in = mode == Target::Distress ? 128 : 80;
  if (mode == Target::Distress) n += dense(6, 8) + dense(15, 16) + dense(24, 48);
  n += dense(fusion_in, 16) + dense(16, 1);
  return n;
}

}  // namespace

TEST(ModelConfig, FusionWidths) {
  const auto v = emtk::testing::corpus_shaped_vocab();
  EXPECT_EQ(default_config(Target::Empathy, v, 7).fusion_width(), 80u);
  EXPECT_EQ(default_config(Target::Distress, v, 7).fusion_width(), 128u);
}

TEST(ModelConfig, ValidationErrors) {
  auto c = shrunken_config(Target::Distress);
  c.lexical = FeatureSpec{};
  EXPECT_THROW(c.validate(), ConfigError);
  c = shrunken_config(Target::Empathy);
  c.lexical = FeatureSpec{{"fear"}, {}};
  EXPECT_THROW(c.validate(), ConfigError);
  c = shrunken_config(Target::Empathy);
  c.emotion_classes = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = shrunken_config(Target::Empathy);
  c.regularized.push_back("no.such_layer");
  EXPECT_THROW(build(c, 1), ConfigError);
}

TEST(Build, ParamCountsUnderBudget) {
  const auto v = emtk::testing::corpus_shaped_vocab();
  for (Target mode : {Target::Empathy, Target::Distress}) {
    const auto p = build(default_config(mode, v, 7), 13);
    EXPECT_EQ(p.param_count(), expected_params(mode, v.sizes(), 7));
    EXPECT_LT(p.param_count(), 110000u);
  }
  EXPECT_EQ(build(default_config(Target::Empathy, v, 7), 1).param_count(), 107505u);
  EXPECT_EQ(build(default_config(Target::Distress, v, 7), 1).param_count(), 109785u);
}

TEST(Build, PerGroupVariantAlsoUnderBudget) {
  auto c = default_config(Target::Distress, emtk::testing::corpus_shaped_vocab(), 7);
  c.grouping = NumericGrouping::PerGroup;
  c.include_income = true;
  const auto p = build(c, 2);
  EXPECT_EQ(p.num_in.size(), 3u);
  EXPECT_LT(p.param_count(), 110000u);
}

TEST(Build, CanonicalTensorOrder) {
  const auto p = build(shrunken_config(Target::Distress), 3);
  std::vector<std::string> names;
  for (const auto& t : p.tensors()) names.push_back(t.name);
  ASSERT_GE(names.size(), 6u);
  EXPECT_EQ(names[0], "text.shared.W");
  EXPECT_EQ(names[1], "text.shared.b");
  EXPECT_EQ(names.back(), "fusion.out.b");
  const auto pos = [&](const std::string& n) { return std::find(names.begin(), names.end(), n) - names.begin(); };
  EXPECT_LT(pos("head.emotion.b"), pos("cat.embed.gender.E"));
  EXPECT_LT(pos("cat.dense2.b"), pos("num.score0.W"));
  EXPECT_LT(pos("num.merge.b"), pos("lex.nrc.W"));
  EXPECT_LT(pos("lex.merge.b"), pos("fusion.hidden.W"));
}

TEST(Build, SeedDeterminesWeights) {
  const auto c = shrunken_config(Target::Empathy);
  const auto a = build(c, 5), b = build(c, 5), d = build(c, 6);
  EXPECT_EQ(a.text_shared.W, b.text_shared.W);
  EXPECT_NE(a.text_shared.W, d.text_shared.W);
  EXPECT_EQ(a.text_shared.b, Mat::Zero(1, 6));
}

TEST(Forward, ZeroNetwork) {
  const auto c = shrunken_config(Target::Distress);
  const auto p = build(c, 1).zeros_like();
  const auto rb = random_batch(c, 5, 2);
  const Outputs out = forward(p, rb.batch, false, nullptr);
  ASSERT_EQ(out.score.rows(), 5);
  ASSERT_EQ(out.bin.rows(), 5);
  ASSERT_EQ(out.emotion.rows(), 5);
  for (Eigen::Index i = 0; i < 5; ++i) {
    EXPECT_EQ(out.score(i, 0), 0.0);
    EXPECT_EQ(out.bin(i, 0), 0.5);
    for (Eigen::Index j = 0; j < out.emotion.cols(); ++j) EXPECT_DOUBLE_EQ(out.emotion(i, j), 0.25);
  }
}

TEST(Forward, EvalIsDeterministicAndTrainUsesRng) {
  const auto c = shrunken_config(Target::Empathy);
  const auto p = build(c, 4);
  const auto rb = random_batch(c, 6, 9);
  const Outputs a = forward(p, rb.batch, false, nullptr);
  const Outputs b = forward(p, rb.batch, false, nullptr);
  EXPECT_EQ(a.score, b.score);
  EXPECT_EQ(a.emotion, b.emotion);
  nn::Rng r1(1), r2(1);
  EXPECT_EQ(forward(p, rb.batch, true, &r1).score, forward(p, rb.batch, true, &r2).score);
  EXPECT_NE(forward(p, rb.batch, true, &r1).score, a.score);
  EXPECT_THROW(forward(p, rb.batch, true, nullptr), ConfigError);
  for (Eigen::Index i = 0; i < a.emotion.rows(); ++i) EXPECT_NEAR(a.emotion.row(i).sum(), 1.0, 1e-9);
}

TEST(Forward, ShapeErrors) {
  const auto c = shrunken_config(Target::Distress);
  const auto p = build(c, 4);
  auto rb = random_batch(c, 3, 9);
  rb.batch.lexical = Mat::Zero(3, 2);
  EXPECT_THROW(forward(p, rb.batch, false, nullptr), ShapeError);
  rb = random_batch(c, 3, 9);
  rb.batch.cats[0][1] = 99;
  EXPECT_THROW(forward(p, rb.batch, false, nullptr), ShapeError);
}

TEST(Forward, RowEquivariance) {
  const auto c = shrunken_config(Target::Distress);
  const auto p = build(c, 8);
  const auto rb = random_batch(c, 7, 10);
  const std::vector<std::size_t> perm = {3, 0, 6, 1, 5, 2, 4};
  const Outputs base = forward(p, rb.batch, false, nullptr);
  const Outputs permuted = forward(p, rb.batch.select(perm), false, nullptr);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const auto pi = static_cast<Eigen::Index>(perm[i]);
    const auto ii = static_cast<Eigen::Index>(i);
    EXPECT_NEAR(permuted.score(ii, 0), base.score(pi, 0), 1e-12);
    EXPECT_NEAR(permuted.bin(ii, 0), base.bin(pi, 0), 1e-12);
    EXPECT_LE((permuted.emotion.row(ii) - base.emotion.row(pi)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Forward, TrunkFeedsAllThreeHeads) {
  const auto c = shrunken_config(Target::Empathy);
  auto p = build(c, 8);
  const auto rb = random_batch(c, 4, 10);
  const Outputs base = forward(p, rb.batch, false, nullptr);
  p.text_shared.W(0, 0) += 1e-3;
  const Outputs moved = forward(p, rb.batch, false, nullptr);
  EXPECT_NE(moved.score, base.score);
  EXPECT_NE(moved.bin, base.bin);
  EXPECT_NE(moved.emotion, base.emotion);
}

TEST(Loss, DecompositionIsBitExact) {
  for (Target mode : {Target::Empathy, Target::Distress}) {
    const auto c = shrunken_config(mode);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto p = build(c, s);
      const auto rb = random_batch(c, 1 + s % 9, 100 + s);
      const auto l = loss_and_grads(p, rb.batch, rb.targets, false, nullptr).loss;
      EXPECT_EQ(l.total, l.reg_mse + l.bin_bce + l.emo_ce + l.l2_penalty);

      double penalty = 0.0;
      double squares = 0.0;
      for (const auto& [name, layer] : p.layers()) {
        if (std::find(c.regularized.begin(), c.regularized.end(), name) == c.regularized.end()) continue;
        penalty += c.l2 * layer->W.squaredNorm();
        squares += layer->W.squaredNorm();
      }
      EXPECT_EQ(l.l2_penalty, penalty);
      EXPECT_NEAR(l.l2_penalty, c.l2 * squares, 1e-15);
    }
  }
}

TEST(Loss, PerfectRegressionHasZeroMse) {
  const auto c = shrunken_config(Target::Empathy);
  const auto p = build(c, 3);
  auto rb = random_batch(c, 5, 4);
  rb.targets.score = forward(p, rb.batch, false, nullptr).score;
  const auto l = loss_and_grads(p, rb.batch, rb.targets, false, nullptr).loss;
  EXPECT_EQ(l.reg_mse, 0.0);
  EXPECT_EQ(l.total, l.bin_bce + l.emo_ce + l.l2_penalty);
}

TEST(Loss, MissingTargetsRejected) {
  const auto c = shrunken_config(Target::Empathy);
  const auto p = build(c, 3);
  auto rb = random_batch(c, 5, 4);
  rb.targets.emotion.pop_back();
  EXPECT_THROW(loss_and_grads(p, rb.batch, rb.targets, false, nullptr), DataError);
}

TEST(Backward, EmotionGradientReachesTrunkOnly) {
  const auto c = shrunken_config(Target::Distress);
  const auto p = build(c, 12);
  const auto rb = random_batch(c, 4, 13);
  ForwardCache cache;
  const Outputs out = forward(p, rb.batch, false, nullptr, &cache);
  const Mat ds = Mat::Ones(4, 1), db = Mat::Ones(4, 1);
  const Mat de = Mat::Random(4, out.emotion.cols());
  const auto with = backward(p, cache, ds, db, de);
  const auto without = backward(p, cache, ds, db, Mat::Zero(4, out.emotion.cols()));

  EXPECT_EQ(with.cat_dense1.W, without.cat_dense1.W);
  EXPECT_EQ(with.cat_dense2.W, without.cat_dense2.W);
  EXPECT_EQ(with.cat_embed[1].E, without.cat_embed[1].E);
  EXPECT_EQ(with.num_merge.W, without.num_merge.W);
  EXPECT_EQ(with.num_in[0].W, without.num_in[0].W);
  EXPECT_EQ(with.lex_merge.W, without.lex_merge.W);
  EXPECT_EQ(with.text_empathy.W, without.text_empathy.W);
  EXPECT_NE(with.text_emotion.W, without.text_emotion.W);
  EXPECT_NE(with.text_shared.W, without.text_shared.W);
}

class ModelGradCheck : public ::testing::TestWithParam<std::tuple<Target, bool>> {};

TEST_P(ModelGradCheck, EveryTensorMatchesFiniteDifferences) {
  const auto [mode, train] = GetParam();
  const auto checks = emtk::testing::full_gradient_check(shrunken_config(mode), 4, train, 31);
  EXPECT_EQ(checks.size(), build(shrunken_config(mode), 0).tensors().size());
  for (const auto& c : checks) EXPECT_LT(c.rel_error, 1e-4) << c.name;
}

INSTANTIATE_TEST_SUITE_P(Modes, ModelGradCheck,
                         ::testing::Combine(::testing::Values(Target::Empathy, Target::Distress),
                                            ::testing::Bool()),
                         [](const auto& info) {
                           return std::string(to_string(std::get<0>(info.param))) +
                                  (std::get<1>(info.param) ? "Train" : "Eval");
                         });

TEST(Params, RoundToStorageIsIdempotentFloat) {
  auto p = build(shrunken_config(Target::Empathy), 7);
  p.round_to_storage();
  for (const auto& t : p.tensors()) {
    for (Eigen::Index i = 0; i < t.value->size(); ++i) {
      const double v = t.value->data()[i];
      EXPECT_EQ(static_cast<double>(static_cast<float>(v)), v);
    }
  }
}
