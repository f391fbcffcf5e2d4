// Copyright 2026 The tclab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "tcl/error.h"
#include "tcl/learn.h"
#include "tcl/nets.h"
#include "tcl/rng.h"
#include "tcl/worlds.h"

namespace tcl {
namespace {

TransformerConfig small(TransformerConfig c) {
  c.layers = 2;
  c.heads = 2;
  c.embed_dim = 32;
  c.hidden_dim = 64;
  c.dropout = 0.0;
  return c;
}

TrainConfig quick(int steps, std::uint64_t seed) {
  TrainConfig t;
  t.epochs = 1;
  t.steps_per_epoch = steps;
  t.batch_size = 64;
  t.eval_interval = 100;
  t.eval_batches = 2;
  t.seed = seed;
  t.optimizer.learning_rate = 2e-3;
  return t;
}

// Models trained once on World A and shared by the slower tests below.
class TrainedWorldA : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    world_ = std::make_unique<SyntheticWorld>(world_a());
    const int n = 9, k = 5, c = 4;
    generator_ = std::make_unique<GeneratorModel>(make_generator(small(generator_config(n, k, c)), 1));
    gen_result_ = train_generator(*generator_, *world_, quick(600, 2));
    critic_ = std::make_unique<CriticModel>(make_critic(small(critic_config(n, k, c)), 3));
    critic_result_ = train_critic(*critic_, *generator_, *world_, quick(600, 4));
    untrained_ = std::make_unique<GeneratorModel>(make_generator(small(generator_config(n, k, c)), 5));
    sharp_critic_ = std::make_unique<CriticModel>(make_critic(small(critic_config(n, k, c)), 6));
    train_critic(*sharp_critic_, *untrained_, *world_, quick(600, 7));
  }
  static void TearDownTestSuite() {
    sharp_critic_.reset();
    untrained_.reset();
    critic_.reset();
    generator_.reset();
    world_.reset();
  }

  static std::unique_ptr<SyntheticWorld> world_;
  static std::unique_ptr<GeneratorModel> generator_;
  static std::unique_ptr<CriticModel> critic_;
  // Critic trained against a random generator, whose fills are easy to spot.
  static std::unique_ptr<GeneratorModel> untrained_;
  static std::unique_ptr<CriticModel> sharp_critic_;
  static TrainResult gen_result_;
  static TrainResult critic_result_;
};

std::unique_ptr<SyntheticWorld> TrainedWorldA::world_;
std::unique_ptr<GeneratorModel> TrainedWorldA::generator_;
std::unique_ptr<CriticModel> TrainedWorldA::critic_;
std::unique_ptr<GeneratorModel> TrainedWorldA::untrained_;
std::unique_ptr<CriticModel> TrainedWorldA::sharp_critic_;
TrainResult TrainedWorldA::gen_result_;
TrainResult TrainedWorldA::critic_result_;

TEST(TrainConfigTest, ValidationAndJson) {
  TrainConfig t;
  EXPECT_NO_THROW(t.validate());
  EXPECT_EQ(TrainConfig::from_json(t.to_json()).to_json(), t.to_json());
  t.batch_size = 0;
  try {
    t.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("batch_size"), std::string::npos);
  }
}

TEST(MaskSizeLaw, MatchesPushforwardOfUniformTime) {
  const std::vector<double> expected = {
      0.0, 0.070881891204920042, 0.071780202205126056, 0.073684802528739379,
      0.07685088140835894, 0.081790984829395508, 0.089570292221000047, 0.10274715372488918,
      0.12973774242498404, 0.30295604945258681};
  Rng rng(1);
  std::vector<double> counts(10, 0.0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) counts[draw_mask_size(9, rng)] += 1.0;
  double tv = 0.0;
  for (std::size_t r = 0; r < 10; ++r) tv += std::fabs(counts[r] / draws - expected[r]);
  EXPECT_LT(0.5 * tv, 0.02);
  EXPECT_EQ(counts[0], 0.0);
}

TEST(MaskedBatchTest, ConsistentWithMask) {
  const SyntheticWorld world(world_b());
  Rng rng(2);
  const auto b = make_masked_batch(world, 32, rng);
  ASSERT_EQ(b.xt.size(), 32u * 9u);
  const Token mask = world.vocab().mask_id();
  for (std::size_t i = 0; i < b.xt.size(); ++i) {
    if (b.visible[i]) {
      EXPECT_EQ(b.xt[i], b.x0[i]);
    } else {
      EXPECT_EQ(b.xt[i], mask);
    }
    EXPECT_NE(b.x0[i], mask);
  }
  for (std::size_t r = 0; r < 32; ++r) {
    const auto begin = b.visible.begin() + static_cast<long>(r * 9);
    EXPECT_LT(std::count(begin, begin + 9, 1), 9);
  }
}

TEST(GeneratorTraining, UniformWorldConvergesToLogK) {
  const SyntheticWorld world(potts_world({2, 2}, 3, {0.0}));
  auto gen = make_generator(small(generator_config(4, 3, 1)), 5);
  const auto result = train_generator(gen, world, quick(300, 6));
  EXPECT_EQ(result.skipped_batches, 0);
  const auto eval = evaluate_generator(gen, world, 8, 64, 7);
  EXPECT_NEAR(eval.masked_ce, std::log(3.0), 0.03);
}

TEST(GeneratorTraining, NonFiniteLossAbortsWithStep) {
  const SyntheticWorld world(world_a());
  auto gen = make_generator(small(generator_config(9, 5, 4)), 8);
  gen.net.parameter("head.bias").value[0] = std::nan("");
  try {
    train_generator(gen, world, quick(10, 9));
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.step(), 1u);
  }
}

TEST(GeneratorTraining, SameSeedBitIdentical) {
  const SyntheticWorld world(world_a());
  auto a = make_generator(small(generator_config(9, 5, 4)), 10);
  auto b = make_generator(small(generator_config(9, 5, 4)), 10);
  train_generator(a, world, quick(20, 11));
  train_generator(b, world, quick(20, 11));
  EXPECT_EQ(a.net.checksum(), b.net.checksum());
}

TEST_F(TrainedWorldA, GeneratorBeatsFactorizedBaseline) {
  const auto eval = evaluate_generator(*generator_, *world_, 16, 64, 12);
  const double baseline = factorized_baseline(*world_, 2000, 13, false);
  EXPECT_LT(eval.masked_ce, baseline);
  EXPECT_GT(eval.mean_true_prob, 1.0 / 5.0);
  EXPECT_GT(gen_result_.best_step, 0);
}

TEST_F(TrainedWorldA, EvaluationIsDeterministic) {
  const auto a = evaluate_generator(*generator_, *world_, 2, 32, 14);
  const auto b = evaluate_generator(*generator_, *world_, 2, 32, 14);
  EXPECT_EQ(a.masked_ce, b.masked_ce);
  const auto c = evaluate_critic(*critic_, *generator_, *world_, 2, 32, 15);
  const auto d = evaluate_critic(*critic_, *generator_, *world_, 2, 32, 15);
  EXPECT_EQ(c.bce, d.bce);
  EXPECT_EQ(c.auc, d.auc);
}

TEST_F(TrainedWorldA, CriticBeatsConstantPrediction) {
  const auto eval = evaluate_critic(*critic_, *generator_, *world_, 8, 64, 16);
  EXPECT_LT(eval.bce, std::log(2.0));
  const auto sharp = evaluate_critic(*sharp_critic_, *untrained_, *world_, 8, 64, 16);
  EXPECT_GT(sharp.auc, 0.8);
}

TEST_F(TrainedWorldA, CriticFlagsCorruptedPosition) {
  Rng rng(17);
  const auto& spec = world_->spec();
  int hits = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int label = static_cast<int>(rng.below(4));
    TokenGrid x{world_->shape(), spec.patterns[static_cast<std::size_t>(label)]};
    const std::size_t pos = rng.below(9);
    const Token original = x.tokens[pos];
    Token bad = original;
    while (bad == original) bad = static_cast<Token>(rng.below(5));
    x.tokens[pos] = bad;
    const Tensor logits = critic_forward(*sharp_critic_, x, label);
    const auto lowest = std::min_element(logits.data().begin(), logits.data().end()) -
                        logits.data().begin();
    hits += static_cast<std::size_t>(lowest) == pos;
  }
  EXPECT_GE(hits, 80);
}

TEST(CriticTraining, UntrainedGeneratorIsEasyToDetect) {
  const SyntheticWorld world(world_a());
  const auto gen = make_generator(small(generator_config(9, 5, 4)), 18);
  auto critic = make_critic(small(critic_config(9, 5, 4)), 19);
  const auto before = gen.net.checksum();
  train_critic(critic, gen, world, quick(300, 20));
  EXPECT_EQ(gen.net.checksum(), before);
  const auto eval = evaluate_critic(critic, gen, world, 8, 64, 21);
  EXPECT_LT(eval.bce, std::log(2.0));
}

TEST(CriticTraining, ModifiedGeneratorFailsIntegrityCheck) {
  const SyntheticWorld world(world_a());
  auto gen = make_generator(small(generator_config(9, 5, 4)), 22);
  auto critic = make_critic(small(critic_config(9, 5, 4)), 23);
  auto config = quick(4, 24);
  config.eval_interval = 2;
  auto tamper = [&gen](int, const Transformer&) { gen.net.parameters()[0].value[0] += 1.0; };
  try {
    train_critic(critic, gen, world, config, tamper);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("integrity"), std::string::npos);
  }
}

TEST(CriticEvaluation, ConstantScoresGiveChanceAuc) {
  const SyntheticWorld world(world_a());
  const auto gen = make_generator(small(generator_config(9, 5, 4)), 25);
  auto critic = make_critic(small(critic_config(9, 5, 4)), 26);
  critic.net.parameter("head.weight").value.fill(0.0);
  critic.net.parameter("head.bias").value.fill(0.3);
  const auto eval = evaluate_critic(critic, gen, world, 2, 32, 27);
  EXPECT_DOUBLE_EQ(eval.auc, 0.5);
}

TEST(FactorizedBaseline, ClassConditionalIsLower) {
  const SyntheticWorld world(world_a());
  EXPECT_LT(factorized_baseline(world, 2000, 28, true), factorized_baseline(world, 2000, 28, false));
}

TEST(EarlyStopping, PatienceStopsAndRestoresBest) {
  const SyntheticWorld world(potts_world({2, 2}, 3, {0.0}));
  auto gen = make_generator(small(generator_config(4, 3, 1)), 29);
  auto config = quick(400, 30);
  config.eval_interval = 10;
  config.patience = 2;
  config.optimizer.learning_rate = 5e-3;
  const auto result = train_generator(gen, world, config);
  EXPECT_TRUE(result.stopped_early);
  EXPECT_LT(result.steps_run, 400);
  EXPECT_LE(result.best_step, result.steps_run);
}

}  // namespace
}  // namespace tcl
