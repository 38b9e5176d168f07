#include <gtest/gtest.h>

#include <sstream>

#include "emtk/error.hpp"
#include "emtk/trainer.hpp"
#include "support/fixtures.hpp"

using namespace emtk;
using emtk::testing::random_batch;
using emtk::testing::shrunken_config;

namespace {

LabeledSet labeled(const ModelConfig& c, std::size_t n, std::uint64_t seed) {
  auto rb = random_batch(c, n, seed);
  return {std::move(rb.batch), std::move(rb.targets)};
}

}  // namespace

// Dev loss improves at epochs 1 and 2, then stalls. Hand trace with
// plateau patience 10 and early-stop patience 20:
//   epoch 12: 10 epochs without improvement -> lr 1e-3 * 0.2 = 2e-4
//   epoch 22: 20 without improvement -> stop; plateau window full again
//             -> lr 2e-4 * 0.2 = 4e-5
TEST(PlateauMonitor, ScriptedTrace) {
  PlateauMonitor m(TrainConfig{});
  std::vector<double> lrs;
  std::size_t stop_epoch = 0;
  for (std::size_t e = 1; e <= 40 && !stop_epoch; ++e) {
    const double loss = e == 1 ? 1.0 : e == 2 ? 0.5 : 0.6;
    const auto d = m.observe(loss);
    EXPECT_EQ(d.improved, e <= 2) << e;
    EXPECT_EQ(d.lr_reduced, e == 12 || e == 22) << e;
    lrs.push_back(m.lr());
    if (d.stop) stop_epoch = e;
  }
  EXPECT_EQ(stop_epoch, 22u);
  EXPECT_EQ(m.best_epoch(), 2u);
  EXPECT_EQ(m.best_loss(), 0.5);
  EXPECT_DOUBLE_EQ(lrs[10], 1e-3);
  EXPECT_DOUBLE_EQ(lrs[11], 2e-4);
  EXPECT_DOUBLE_EQ(lrs[20], 2e-4);
  EXPECT_DOUBLE_EQ(lrs[21], 4e-5);
}

TEST(PlateauMonitor, EqualLossIsNotImprovementAndImprovementResets) {
  PlateauMonitor m(TrainConfig{});
  EXPECT_TRUE(m.observe(1.0).improved);
  for (int i = 0; i < 9; ++i) EXPECT_FALSE(m.observe(1.0).improved);
  EXPECT_TRUE(m.observe(0.9).improved);  // epoch 11 resets both counters
  for (std::size_t e = 12; e <= 20; ++e) EXPECT_FALSE(m.observe(0.95).lr_reduced) << e;
  EXPECT_TRUE(m.observe(0.95).lr_reduced);  // epoch 21
  EXPECT_DOUBLE_EQ(m.lr(), 2e-4);
}

TEST(TrainConfig, Validation) {
  TrainConfig c;
  c.plateau_patience = 20;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.plateau_factor = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Train, DeterministicForFixedSeed) {
  const auto c = shrunken_config(Target::Distress);
  const auto tr = labeled(c, 21, 1), dv = labeled(c, 9, 2);
  TrainConfig tc;
  tc.epochs = 6;
  tc.batch_size = 8;
  const auto a = train(build(c, 3), tr, dv, tc);
  const auto b = train(build(c, 3), tr, dv, tc);
  EXPECT_EQ(a.history.to_csv(), b.history.to_csv());
  for (std::size_t k = 0; k < a.best.tensors().size(); ++k) {
    EXPECT_EQ(*a.best.tensors()[k].value, *b.best.tensors()[k].value);
  }
  tc.seed = 14;
  const auto d = train(build(c, 3), tr, dv, tc);
  EXPECT_NE(d.history.to_csv(), a.history.to_csv());
}

TEST(Train, HistoryAndBestEpoch) {
  const auto c = shrunken_config(Target::Empathy);
  const auto tr = labeled(c, 16, 1), dv = labeled(c, 8, 2);
  TrainConfig tc;
  tc.epochs = 5;
  tc.batch_size = 5;
  const auto r = train(build(c, 3), tr, dv, tc);
  ASSERT_EQ(r.history.epochs.size(), 5u);
  std::size_t best = 0;
  double best_loss = 1e300;
  for (const auto& e : r.history.epochs) {
    EXPECT_EQ(e.dev.total, e.dev.reg_mse + e.dev.bin_bce + e.dev.emo_ce + e.dev.l2_penalty);
    if (e.dev.total < best_loss) {
      best_loss = e.dev.total;
      best = e.epoch;
    }
  }
  EXPECT_EQ(r.history.best_epoch, best);
  EXPECT_EQ(r.history.best_dev_loss, best_loss);
  const std::string csv = r.history.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "epoch,train_total,train_reg_mse,train_bin_bce,train_emo_ce,train_l2,dev_total,dev_reg_mse,"
            "dev_bin_bce,dev_emo_ce,dev_l2,lr");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  // Returned parameters are at storage precision.
  const double v = r.best.text_shared.W(0, 0);
  EXPECT_EQ(static_cast<double>(static_cast<float>(v)), v);
}

TEST(Train, LossDecreasesOnSmallSet) {
  const auto c = shrunken_config(Target::Empathy);
  const auto tr = labeled(c, 12, 5);
  TrainConfig tc;
  tc.epochs = 60;
  tc.batch_size = 12;
  tc.lr = 1e-2;
  const auto r = train(build(c, 3), tr, tr, tc);
  EXPECT_LT(r.history.epochs.back().train.total, r.history.epochs.front().train.total);
}

TEST(Predict, ClampsScoresAndArgmax) {
  const auto c = shrunken_config(Target::Empathy);
  auto p = build(c, 3);
  p.fusion_out.b(0, 0) = 50.0;
  const auto rb = random_batch(c, 7, 1);
  const auto preds = predict(p, rb.batch, 3);
  ASSERT_EQ(preds.size(), 7u);
  for (const auto& pr : preds) {
    EXPECT_EQ(pr.score, 7.0);
    EXPECT_GT(pr.bin_prob, 0.0);
    EXPECT_LT(pr.bin_prob, 1.0);
    ASSERT_EQ(pr.emotion_probs.size(), 4u);
    EXPECT_EQ(pr.emotion, static_cast<std::size_t>(std::max_element(pr.emotion_probs.begin(), pr.emotion_probs.end()) -
                                                   pr.emotion_probs.begin()));
  }
  p.fusion_out.b(0, 0) = -50.0;
  EXPECT_EQ(predict(p, rb.batch)[0].score, 1.0);
}

TEST(Predict, BatchSizeDoesNotChangeResults) {
  const auto c = shrunken_config(Target::Distress);
  const auto p = build(c, 3);
  const auto rb = random_batch(c, 10, 1);
  const auto a = predict(p, rb.batch, 3), b = predict(p, rb.batch, 256);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a[i].score, b[i].score, 1e-12);
    EXPECT_EQ(a[i].emotion, b[i].emotion);
  }
}
