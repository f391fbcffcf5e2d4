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
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "tcl/error.h"
#include "tcl/rng.h"
#include "tcl/schedule.h"

namespace tcl {
namespace {

TEST(Gamma, Boundaries) {
  EXPECT_EQ(gamma(0.0), 0.0);
  EXPECT_DOUBLE_EQ(gamma(1.0), 1.0);
  EXPECT_NEAR(gamma(0.5), std::sqrt(2.0) / 2.0, 1e-15);
  EXPECT_EQ(gamma(0.0, GammaKind::linear), 0.0);
  EXPECT_EQ(gamma(1.0, GammaKind::linear), 1.0);
  EXPECT_DOUBLE_EQ(gamma(0.3, GammaKind::linear), 0.3);
}

TEST(Gamma, RejectsOutOfRange) {
  EXPECT_THROW(gamma(-0.01), DomainError);
  EXPECT_THROW(gamma(1.01), DomainError);
}

TEST(Gamma, MonotoneOnGrid) {
  for (auto kind : {GammaKind::cosine, GammaKind::linear}) {
    double prev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double g = gamma(i / 1000.0, kind);
      EXPECT_GE(g, prev);
      EXPECT_GE(g, 0.0);
      EXPECT_LE(g, 1.0);
      prev = g;
    }
  }
}

TEST(MaskCount, Examples) {
  EXPECT_EQ(mask_count(0, 6, 9), 0u);
  EXPECT_EQ(mask_count(6, 6, 9), 9u);
  EXPECT_EQ(mask_count(3, 6, 9), 7u);
  EXPECT_EQ(mask_count(1, 2, 9), 7u);
  EXPECT_THROW(mask_count(7, 6, 9), DomainError);
}

TEST(MaskCount, LinearIntegerRatioIsExact) {
  // 9 * 2/3 must not round up to 7 through floating error.
  EXPECT_EQ(mask_count(2, 3, 9, GammaKind::linear), 6u);
  EXPECT_EQ(ceil_count(0.6, 10), 6u);
  EXPECT_EQ(ceil_count(0.61, 10), 7u);
  EXPECT_EQ(ceil_count(1.0, 10), 10u);
}

TEST(MaskCount, NondecreasingAndTerminates) {
  for (int total = 1; total <= 20; ++total) {
    for (std::size_t n : {1u, 4u, 9u, 16u, 256u}) {
      std::size_t prev = 0;
      EXPECT_EQ(mask_count(0, total, n), 0u);
      EXPECT_EQ(mask_count(total, total, n), n);
      for (int t = 0; t <= total; ++t) {
        const auto k = mask_count(t, total, n);
        EXPECT_GE(k, prev);
        EXPECT_LE(k, n);
        prev = k;
      }
    }
  }
}

TEST(SelectionNoise, ZeroCases) {
  Rng rng(1);
  for (double v : selection_noise(0, 6, 4.0, 9, rng)) EXPECT_EQ(v, 0.0);
  for (double v : selection_noise(6, 6, 0.0, 9, rng)) EXPECT_EQ(v, 0.0);
}

TEST(SelectionNoise, UniformRangeAndMean) {
  Rng rng(2);
  const auto noise = selection_noise(6, 6, 1.0, 100000, rng);
  const auto [lo, hi] = std::minmax_element(noise.begin(), noise.end());
  EXPECT_GE(*lo, -0.5);
  EXPECT_LE(*hi, 0.5);
  const double mean = std::accumulate(noise.begin(), noise.end(), 0.0) / noise.size();
  EXPECT_NEAR(mean, 0.0, 0.005);
}

TEST(SelectionNoise, AmplitudeScalesWithTime) {
  Rng rng(3);
  const auto noise = selection_noise(2, 8, 4.0, 20000, rng);
  for (double v : noise) EXPECT_LE(std::fabs(v), 0.5);
  const double spread = *std::max_element(noise.begin(), noise.end()) -
                        *std::min_element(noise.begin(), noise.end());
  EXPECT_GT(spread, 0.99);
}

TEST(Temperature, Examples) {
  EXPECT_DOUBLE_EQ(temperature(0, 6, 1.0, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(temperature(6, 6, 1.0, 0.5), 1.5);
  EXPECT_DOUBLE_EQ(temperature(3, 6, 1.0, 0.5), 1.0);
  EXPECT_THROW(temperature(6, 6, -1.0, 0.5), DomainError);
}

TEST(ScheduleConfig, Validation) {
  Schedule s;
  EXPECT_NO_THROW(s.validate());
  s.temp_intercept = 0.0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = Schedule{};
  s.temp_slope = -0.5;
  EXPECT_THROW(s.validate(), ConfigError);
  s = Schedule{};
  s.total_steps = 0;
  EXPECT_THROW(s.validate(), ConfigError);
  EXPECT_THROW(parse_gamma_kind("sqrt"), ConfigError);
  EXPECT_EQ(parse_gamma_kind("linear"), GammaKind::linear);
  EXPECT_EQ(to_string(GammaKind::cosine), "cosine");
}

}  // namespace
}  // namespace tcl
