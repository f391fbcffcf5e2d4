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
#include <vector>

#include <gtest/gtest.h>

#include "tcl/error.h"
#include "tcl/metrics.h"
#include "tcl/rng.h"
#include "tcl/worlds.h"

namespace tcl {
namespace {

std::vector<TokenGrid> oracle_samples(const SyntheticWorld& w, int label, std::size_t n,
                                      std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TokenGrid> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(w.sample_class(label, rng));
  return out;
}

TEST(PluginKl, MatchesReference) {
  const std::vector<double> truth = {0.5, 0.25, 0.25, 0.0};
  const std::vector<double> counts = {3, 1, 0, 0};
  EXPECT_NEAR(plugin_kl(truth, counts, 4.0), 4.6315103172358807, 1e-12);
}

TEST(PluginKl, ExactMatchIsNearZero) {
  const std::vector<double> truth = {0.5, 0.5};
  const std::vector<double> counts = {50, 50};
  EXPECT_GE(plugin_kl(truth, counts, 100.0), 0.0);
  EXPECT_LT(plugin_kl(truth, counts, 100.0), 1e-8);
}

TEST(CompareToTruth, OracleSamplesConverge) {
  const SyntheticWorld w(potts_world({2, 3}, 3, {0.8}));
  const auto samples = oracle_samples(w, 0, 1000000, 1);
  const auto m = compare_to_truth(samples, w, 0);
  EXPECT_LT(m.joint_tv, 0.02);
  EXPECT_LT(m.marginal_tv, 0.005);
  EXPECT_GE(m.plugin_kl, 0.0);
  EXPECT_EQ(m.sample_count, 1000000u);
  EXPECT_NEAR(m.class_consistency, 1.0, 1e-12);
}

TEST(CompareToTruth, PointMassSampler) {
  const SyntheticWorld w(potts_world({2, 2}, 3, {1.0}));
  const TokenGrid mode{w.shape(), {1, 1, 1, 1}};
  const std::vector<TokenGrid> samples(500, mode);
  const auto m = compare_to_truth(samples, w, 0);
  EXPECT_DOUBLE_EQ(m.distinct_ratio, 1.0 / 500.0);
  EXPECT_NEAR(m.forward_cross_entropy, -std::log(w.prob(0, mode.tokens)), 1e-12);
  EXPECT_NEAR(m.joint_tv, 1.0 - w.prob(0, mode.tokens), 1e-12);
}

TEST(CompareToTruth, UniformSamplerHasHigherCrossEntropy) {
  const SyntheticWorld w(potts_world({2, 2}, 3, {1.2}));
  Rng rng(2);
  std::vector<TokenGrid> uniform;
  for (int i = 0; i < 20000; ++i) uniform.push_back(w.decode(rng.below(w.state_count())));
  const auto oracle = oracle_samples(w, 0, 20000, 3);
  EXPECT_GT(compare_to_truth(uniform, w, 0).forward_cross_entropy,
            compare_to_truth(oracle, w, 0).forward_cross_entropy);
}

TEST(CompareToTruth, TooFewSamplesRejected) {
  const SyntheticWorld w(potts_world({2, 2}, 3, {1.0}));
  const auto samples = oracle_samples(w, 0, 99, 4);
  EXPECT_THROW(compare_to_truth(samples, w, 0), DomainError);
}

TEST(CompareToTruth, BoundsHold) {
  const SyntheticWorld w(world_a());
  for (int c = 0; c < 4; ++c) {
    const auto m = compare_to_truth(oracle_samples(w, (c + 1) % 4, 300, 5 + c), w, c);
    EXPECT_GE(m.joint_tv, 0.0);
    EXPECT_LE(m.joint_tv, 1.0);
    EXPECT_GE(m.plugin_kl, 0.0);
    EXPECT_LT(m.class_consistency, 0.1);
  }
}

TEST(CompareByClass, PriorWeightedAverage) {
  const SyntheticWorld w(potts_world({2, 2}, 2, {1.0, -1.0}));
  auto s0 = oracle_samples(w, 0, 400, 6);
  auto s1 = std::vector<TokenGrid>(400, TokenGrid{w.shape(), {0, 0, 0, 0}});
  std::vector<TokenGrid> all = s0;
  all.insert(all.end(), s1.begin(), s1.end());
  std::vector<int> labels(400, 0);
  labels.insert(labels.end(), 400, 1);
  const auto joint = compare_by_class(all, labels, w);
  const auto m0 = compare_to_truth(s0, w, 0);
  const auto m1 = compare_to_truth(s1, w, 1);
  EXPECT_NEAR(joint.joint_tv, 0.5 * (m0.joint_tv + m1.joint_tv), 1e-12);
  EXPECT_EQ(joint.sample_count, 800u);
}

TEST(AllocateLabels, LargestRemainder) {
  const std::vector<double> prior = {0.5, 0.3, 0.2};
  const auto labels = allocate_labels(7, prior);
  ASSERT_EQ(labels.size(), 7u);
  EXPECT_EQ(std::count(labels.begin(), labels.end(), 0), 4);
  EXPECT_EQ(std::count(labels.begin(), labels.end(), 1), 2);
  EXPECT_EQ(std::count(labels.begin(), labels.end(), 2), 1);
  EXPECT_TRUE(std::is_sorted(labels.begin(), labels.end()));
}

TEST(IntermediateDivergence, MatchesReference) {
  const SyntheticWorld w(potts_world({1, 2}, 2, {1.0}));
  std::vector<TokenGrid> states;
  for (int i = 0; i < 6000; ++i) states.push_back(TokenGrid{w.shape(), {0, 2}});
  for (int i = 0; i < 4000; ++i) states.push_back(TokenGrid{w.shape(), {2, 1}});
  const double kl = intermediate_state_divergence(w, 0, states, 1, 2, GammaKind::linear);
  EXPECT_NEAR(kl, 9.3321176492216846, 1e-9);
}

TEST(IntermediateDivergence, AllMaskedIsZero) {
  const SyntheticWorld w(potts_world({2, 2}, 3, {1.0}));
  const std::vector<TokenGrid> states(10000, TokenGrid{w.shape(), {3, 3, 3, 3}});
  EXPECT_EQ(intermediate_state_divergence(w, 0, states, 6, 6), 0.0);
}

TEST(IntermediateDivergence, UnmaskedReducesToJointKl) {
  const SyntheticWorld w(potts_world({2, 2}, 3, {0.7}));
  const auto samples = oracle_samples(w, 0, 12000, 7);
  std::vector<double> counts(w.state_count(), 0.0);
  for (const auto& g : samples) counts[w.state_index(g.tokens)] += 1.0;
  const double joint = plugin_kl(w.joint(0).probs, counts, 12000.0);
  EXPECT_NEAR(intermediate_state_divergence(w, 0, samples, 0, 6), joint, 1e-12);
}

TEST(IntermediateDivergence, RequiresEnoughTraces) {
  const SyntheticWorld w(potts_world({2, 2}, 3, {1.0}));
  const std::vector<TokenGrid> states(9999, TokenGrid{w.shape(), {3, 3, 3, 3}});
  EXPECT_THROW(intermediate_state_divergence(w, 0, states, 6, 6), DomainError);
}

TEST(RocAuc, KnownValues) {
  const std::vector<double> perfect = {0.1, 0.2, 0.8, 0.9};
  const std::vector<int> labels = {0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(roc_auc(perfect, labels), 1.0);
  const std::vector<double> reversed = {0.9, 0.8, 0.2, 0.1};
  EXPECT_DOUBLE_EQ(roc_auc(reversed, labels), 0.0);
  const std::vector<double> ties = {0.5, 0.5, 0.5, 0.5};
  EXPECT_DOUBLE_EQ(roc_auc(ties, labels), 0.5);
  const std::vector<double> mixed = {0.1, 0.4, 0.35, 0.8};
  EXPECT_DOUBLE_EQ(roc_auc(mixed, labels), 0.75);
}

}  // namespace
}  // namespace tcl
