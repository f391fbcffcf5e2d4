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


#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "gradcheck.h"
#include "tcl/error.h"
#include "tcl/numerics/ops.h"
#include "tcl/numerics/optim.h"
#include "tcl/rng.h"

namespace tcl {
namespace {

using testing::make_parameter;
using testing::random_tensor;

OptimizerConfig config_with_lr(double lr) {
  OptimizerConfig c;
  c.learning_rate = lr;
  return c;
}

TEST(AdamTest, DefaultsMatchConvention) {
  OptimizerConfig c;
  EXPECT_DOUBLE_EQ(c.beta1, 0.9);
  EXPECT_DOUBLE_EQ(c.beta2, 0.96);
  EXPECT_NO_THROW(c.validate());
}

TEST(AdamTest, ValidateNamesField) {
  OptimizerConfig c;
  c.beta2 = 1.0;
  try {
    c.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("beta2"), std::string::npos);
  }
  c = OptimizerConfig{};
  c.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(AdamTest, ZeroGradientLeavesParametersUnchanged) {
  Rng rng(1);
  std::vector<Parameter> params = {make_parameter("w", random_tensor({3, 3}, rng))};
  const Tensor before = params[0].value;
  Adam adam(config_with_lr(0.1));
  for (std::size_t s = 1; s <= 5; ++s) adam.step(params, s);
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_EQ(params[0].value[i], before[i]);
}

TEST(AdamTest, FirstStepMovesByLearningRate) {
  std::vector<Parameter> params = {
      make_parameter("w", Tensor({3}, std::vector<double>{0.5, -1.0, 2.0}))};
  params[0].grad = Tensor({3}, std::vector<double>{0.3, -7.0, 1e-2});
  const Tensor before = params[0].value;
  Adam adam(config_with_lr(0.01));
  adam.step(params, 1);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(std::fabs(params[0].value[i] - before[i]), 0.01, 1e-8);
  }
  EXPECT_LT(params[0].value[0], before[0]);
  EXPECT_GT(params[0].value[1], before[1]);
}

TEST(AdamTest, GradientsClearedAfterStep) {
  std::vector<Parameter> params = {make_parameter("w", Tensor({2}, 1.0))};
  params[0].grad = Tensor({2}, 0.5);
  Adam adam(config_with_lr(0.01));
  adam.step(params, 1);
  for (double g : params[0].grad.data()) EXPECT_EQ(g, 0.0);
}

TEST(AdamTest, TwoStepsMatchReference) {
  std::vector<Parameter> params = {
      make_parameter("p", Tensor({2}, std::vector<double>{1.0, -2.0}))};
  Adam adam(config_with_lr(0.01));
  params[0].grad = Tensor({2}, std::vector<double>{0.5, -1.0});
  adam.step(params, 1);
  params[0].grad = Tensor({2}, std::vector<double>{0.25, 3.0});
  adam.step(params, 2);
  EXPECT_NEAR(params[0].value[0], 0.98062201000809046, 1e-13);
  EXPECT_NEAR(params[0].value[1], -1.9949030245428339, 1e-13);
}

TEST(AdamTest, NonFiniteGradientNamesParameter) {
  std::vector<Parameter> params = {make_parameter("alpha", Tensor({2}, 1.0)),
                                   make_parameter("beta", Tensor({2}, 1.0))};
  params[0].grad = Tensor({2}, 0.1);
  params[1].grad[1] = std::nan("");
  Adam adam(config_with_lr(0.01));
  try {
    adam.step(params, 1);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("beta"), std::string::npos);
  }
  EXPECT_EQ(params[0].value[0], 1.0);
}

double bowl_loss(std::vector<Parameter>& params, const Tensor& center, bool backward) {
  Tape tape(backward);
  Var p = tape.parameter(params[0]);
  Var d = ops::add(p, tape.constant(center));
  Var loss = ops::sum(ops::multiply(d, d));
  if (backward) tape.backward(loss);
  return loss.value()[0];
}

TEST(AdamTest, QuadraticBowlDecreasesOverEveryWindow) {
  Rng rng(2);
  std::vector<Parameter> params = {make_parameter("x", random_tensor({8}, rng, 3.0))};
  const Tensor center = random_tensor({8}, rng);
  Adam adam(config_with_lr(0.02));
  std::vector<double> losses;
  for (std::size_t s = 1; s <= 200; ++s) {
    losses.push_back(bowl_loss(params, center, true));
    adam.step(params, s);
  }
  losses.push_back(bowl_loss(params, center, false));
  for (std::size_t t = 0; t + 50 < losses.size(); ++t) {
    EXPECT_LT(losses[t + 50], losses[t]) << "window starting at " << t;
  }
}

TEST(AdamTest, IdenticalRunsAreBitIdentical) {
  auto run = [] {
    Rng rng(17);
    std::vector<Parameter> params = {make_parameter("w", random_tensor({4, 3}, rng)),
                                     make_parameter("b", random_tensor({3}, rng))};
    const Tensor x = random_tensor({5, 4}, rng);
    OptimizerConfig c = config_with_lr(0.05);
    c.weight_decay = 0.01;
    Adam adam(c);
    for (std::size_t s = 1; s <= 40; ++s) {
      Tape tape;
      Var y = ops::gelu(ops::linear(tape.constant(x), tape.parameter(params[0]),
                                    tape.parameter(params[1])));
      tape.backward(ops::sum(ops::multiply(y, y)));
      adam.step(params, s);
    }
    return params;
  };
  auto a = run();
  auto b = run();
  for (std::size_t p = 0; p < a.size(); ++p) {
    ASSERT_EQ(a[p].value.size(), b[p].value.size());
    EXPECT_EQ(std::memcmp(a[p].value.data().data(), b[p].value.data().data(),
                          a[p].value.size() * sizeof(double)),
              0);
  }
}

TEST(AdamTest, StepIndexIsOneBased) {
  std::vector<Parameter> params = {make_parameter("w", Tensor({1}, 1.0))};
  Adam adam(config_with_lr(0.01));
  EXPECT_THROW(adam.step(params, 0), DomainError);
}

}  // namespace
}  // namespace tcl
