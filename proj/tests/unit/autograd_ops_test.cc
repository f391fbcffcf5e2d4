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
#include <functional>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "gradcheck.h"
#include "op_cases.h"
#include "tcl/error.h"
#include "tcl/numerics/autograd.h"
#include "tcl/numerics/ops.h"
#include "tcl/rng.h"

namespace tcl {
namespace {

using testing::grad_check;
using testing::make_parameter;
using testing::random_tensor;

constexpr int kInstances = 10;

Tensor row(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({1, n}, std::move(values));
}

TEST(OpsExamples, ScalarMatmul) {
  Tape tape;
  Var a = tape.constant(Tensor({1, 1}, std::vector<double>{2.0}));
  Var b = tape.constant(Tensor({1, 1}, std::vector<double>{3.0}));
  EXPECT_DOUBLE_EQ(ops::matmul(a, b).value()[0], 6.0);
}

TEST(OpsExamples, SoftmaxOfZerosIsUniform) {
  Tape tape;
  Var s = ops::softmax(tape.constant(row({0.0, 0.0})));
  EXPECT_DOUBLE_EQ(s.value()[0], 0.5);
  EXPECT_DOUBLE_EQ(s.value()[1], 0.5);
}

TEST(OpsExamples, LayerNormOfConstantRowIsZero) {
  Tape tape;
  Var x = tape.constant(row({4.0, 4.0, 4.0, 4.0}));
  Var gamma = tape.constant(Tensor({4}, 1.0));
  Var beta = tape.constant(Tensor({4}, 0.0));
  Var y = ops::layer_norm(x, gamma, beta);
  for (double v : y.value().data()) EXPECT_EQ(v, 0.0);
}

TEST(OpsExamples, ShapeMismatchNamesShapes) {
  Tape tape;
  Var a = tape.constant(Tensor({2, 3}));
  Var b = tape.constant(Tensor({2, 3}));
  try {
    ops::matmul(a, b);
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("[2,3]"), std::string::npos) << what;
  }
  EXPECT_THROW(ops::add(a, tape.constant(Tensor({3, 2}))), ShapeError);
}

TEST(OpsExamples, GeluMatchesReference) {
  const std::vector<double> x = {-2.0, -0.5, 0.0, 0.7, 3.0};
  const std::vector<double> expected = {-0.045500263896358417, -0.15426876936299344, 0.0,
                                        0.53062544344384888, 2.9959503059051098};
  Tape tape;
  Var y = ops::gelu(tape.constant(row(x)));
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(y.value()[i], expected[i], 1e-14);
  }
}

TEST(CrossEntropyTest, UniformLogitsGiveLogK) {
  Tape tape;
  Var logits = tape.constant(Tensor({1, 5}, 0.0));
  const int target = 3;
  const double weight = 1.0;
  Var loss = ops::cross_entropy(logits, {&target, 1}, {&weight, 1});
  EXPECT_NEAR(loss.value()[0], std::log(5.0), 1e-12);
}

TEST(CrossEntropyTest, MarginLowersLoss) {
  Tape tape;
  Var logits = tape.constant(row({0.0, 3.0, 0.0, 0.0}));
  const int target = 1;
  const double weight = 1.0;
  Var loss = ops::cross_entropy(logits, {&target, 1}, {&weight, 1});
  EXPECT_LT(loss.value()[0], std::log(4.0));
}

TEST(CrossEntropyTest, ZeroWeightRowsAreIgnored) {
  Tape tape;
  Tensor two({2, 3}, std::vector<double>{0.2, -1.0, 0.5, 3.0, 1.0, -2.0});
  const std::vector<int> targets = {2, 0};
  const std::vector<double> weights = {1.0, 0.0};
  Var pair = ops::cross_entropy(tape.constant(two), targets, weights);
  const int t0 = 2;
  const double w0 = 1.0;
  Var single = ops::cross_entropy(tape.constant(row({0.2, -1.0, 0.5})), {&t0, 1}, {&w0, 1});
  EXPECT_DOUBLE_EQ(pair.value()[0], single.value()[0]);
}

TEST(CrossEntropyTest, AllZeroWeightsRejected) {
  Tape tape;
  const std::vector<int> targets = {0, 1};
  const std::vector<double> weights = {0.0, 0.0};
  try {
    ops::cross_entropy(tape.constant(Tensor({2, 3})), targets, weights);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("no supervised positions"), std::string::npos);
  }
}

TEST(CrossEntropyTest, VisibleRowsGetZeroGradient) {
  Rng rng(3);
  Parameter logits = make_parameter("logits", random_tensor({4, 5}, rng, 2.0));
  const std::vector<int> targets = {1, 4, 0, 2};
  const std::vector<double> weights = {1.0, 0.0, 1.0, 0.0};
  Tape tape;
  tape.backward(ops::cross_entropy(tape.parameter(logits), targets, weights));
  for (std::size_t c = 0; c < 5; ++c) {
    EXPECT_EQ(logits.grad.at(1, c), 0.0);
    EXPECT_EQ(logits.grad.at(3, c), 0.0);
    EXPECT_NE(logits.grad.at(0, c), 0.0);
  }
}

TEST(BceTest, ZeroLogitGivesLogTwo) {
  for (double target : {0.0, 1.0}) {
    Tape tape;
    Var loss = ops::bce_with_logits(tape.constant(Tensor({1}, 0.0)), {&target, 1});
    EXPECT_NEAR(loss.value()[0], std::log(2.0), 1e-15);
  }
}

TEST(BceTest, SaturatedLogitDoesNotOverflow) {
  Tape tape;
  const double target = 1.0;
  Var loss = ops::bce_with_logits(tape.constant(Tensor({1}, 20.0)), {&target, 1});
  EXPECT_NEAR(loss.value()[0], 2.0611536203143808e-09, 1e-22);
  const double zero = 0.0;
  Var huge = ops::bce_with_logits(tape.constant(Tensor({1}, 800.0)), {&zero, 1});
  EXPECT_NEAR(huge.value()[0], 800.0, 1e-9);
}

TEST(BceTest, MeanOfIdenticalTerms) {
  Tape tape;
  const std::vector<double> targets = {1.0, 0.0};
  Var loss = ops::bce_with_logits(tape.constant(Tensor({2}, 0.0)), targets);
  EXPECT_NEAR(loss.value()[0], std::log(2.0), 1e-15);
}

TEST(BackwardTest, SumGivesOnes) {
  Rng rng(5);
  Parameter p = make_parameter("p", random_tensor({3, 4}, rng));
  Tape tape;
  tape.backward(ops::sum(tape.parameter(p)));
  for (double g : p.grad.data()) EXPECT_EQ(g, 1.0);
}

TEST(BackwardTest, SquareGivesTwiceValue) {
  Rng rng(6);
  Parameter p = make_parameter("p", random_tensor({5}, rng));
  Tape tape;
  Var v = tape.parameter(p);
  tape.backward(ops::sum(ops::multiply(v, v)));
  for (std::size_t i = 0; i < p.value.size(); ++i) EXPECT_DOUBLE_EQ(p.grad[i], 2.0 * p.value[i]);
}

TEST(BackwardTest, NonScalarRejected) {
  Parameter p = make_parameter("p", Tensor({2, 2}, 1.0));
  Tape tape;
  EXPECT_THROW(tape.backward(tape.parameter(p)), DomainError);
}

TEST(BackwardTest, GradientsAccumulateAcrossUses) {
  Parameter p = make_parameter("p", Tensor({2}, std::vector<double>{1.0, -3.0}));
  Tape tape;
  Var v = tape.parameter(p);
  tape.backward(ops::sum(ops::add(v, ops::scale(v, 4.0))));
  EXPECT_DOUBLE_EQ(p.grad[0], 5.0);
  EXPECT_DOUBLE_EQ(p.grad[1], 5.0);
}

TEST(SoftmaxProperty, RowsSumToOne) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    Tape tape(false);
    Var s = ops::softmax(tape.constant(random_tensor({6, 9}, rng, 30.0)));
    for (std::size_t r = 0; r < 6; ++r) {
      double total = 0.0;
      for (std::size_t c = 0; c < 9; ++c) total += s.value().at(r, c);
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

class OpGradCheck : public ::testing::TestWithParam<std::size_t> {};

TEST_P(OpGradCheck, MatchesFiniteDifferences) {
  const auto& op = testing::op_cases()[GetParam()];
  const auto results = testing::check_op_case(op, kInstances);
  ASSERT_EQ(results.size(), static_cast<std::size_t>(kInstances));
  for (std::size_t i = 0; i < results.size(); ++i) {
    EXPECT_GT(results[i].checked, 0u);
    EXPECT_LT(results[i].max_rel_error, testing::kFdTolerance) << op.name << " instance " << i;
  }
}

INSTANTIATE_TEST_SUITE_P(AllOps, OpGradCheck,
                         ::testing::Range<std::size_t>(0, testing::op_cases().size()),
                         [](const auto& info) { return testing::op_cases()[info.param].name; });

TEST(DropoutTest, IdentityWithoutRng) {
  Tape tape;
  Rng rng(1);
  Tensor x = random_tensor({3, 3}, rng);
  Var y = ops::dropout(tape.constant(x), 0.5, nullptr);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(y.value()[i], x[i]);
}

TEST(DropoutTest, KeptValuesAreRescaled) {
  Tape tape;
  Rng rng(4);
  Var y = ops::dropout(tape.constant(Tensor({2000}, 1.0)), 0.25, &rng);
  std::size_t kept = 0;
  for (double v : y.value().data()) {
    if (v != 0.0) {
      EXPECT_DOUBLE_EQ(v, 1.0 / 0.75);
      ++kept;
    }
  }
  EXPECT_NEAR(static_cast<double>(kept) / 2000.0, 0.75, 0.04);
}

}  // namespace
}  // namespace tcl
