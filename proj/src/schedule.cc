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

#include "tcl/schedule.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tcl/error.h"

namespace tcl {

namespace {

// Products like 9 * sin(pi/6) land a few ulps away from the integer they
// represent; ceil must not round those up to the next count.
constexpr double kCeilSlack = 1e-9;

}  // namespace

GammaKind parse_gamma_kind(const std::string& name) {
  if (name == "cosine") return GammaKind::cosine;
  if (name == "linear") return GammaKind::linear;
  throw ConfigError("schedule.gamma must be 'cosine' or 'linear', got '" + name + "'");
}

std::string to_string(GammaKind kind) {
  return kind == GammaKind::cosine ? "cosine" : "linear";
}

void Schedule::validate() const {
  if (total_steps < 1) throw ConfigError("schedule.steps must be at least 1");
  if (!(noise_scale >= 0.0)) throw ConfigError("schedule.noise_scale must be nonnegative");
  if (!(temp_intercept > 0.0)) throw ConfigError("schedule.temp_intercept must be positive");
  if (!(temp_slope + temp_intercept > 0.0)) {
    throw ConfigError("schedule.temp_slope + temp_intercept must be positive");
  }
}

double gamma(double u, GammaKind kind) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError("gamma: argument " + std::to_string(u) + " outside [0,1]");
  }
  if (kind == GammaKind::linear) return u;
  if (u == 1.0) return 1.0;
  return std::sin(std::numbers::pi * u / 2.0);
}

std::size_t ceil_count(double fraction, std::size_t n) {
  const double raw = std::ceil(fraction * static_cast<double>(n) - kCeilSlack);
  if (raw <= 0.0) return 0;
  return std::min(n, static_cast<std::size_t>(raw));
}

std::size_t mask_count(int t, int total_steps, std::size_t n, GammaKind kind) {
  if (total_steps < 1 || t < 0 || t > total_steps) {
    throw DomainError("mask_count: t=" + std::to_string(t) + " outside [0," +
                      std::to_string(total_steps) + "]");
  }
  return ceil_count(gamma(static_cast<double>(t) / total_steps, kind), n);
}

std::vector<double> selection_noise(int t, int total_steps, double noise_scale,
                                    std::size_t n, Rng& rng) {
  if (total_steps < 1 || t < 0 || t > total_steps) {
    throw DomainError("selection_noise: t outside [0,T]");
  }
  std::vector<double> noise(n, 0.0);
  const double amplitude = noise_scale * static_cast<double>(t) / total_steps;
  if (amplitude == 0.0) return noise;
  for (double& v : noise) v = amplitude * (rng.uniform() - 0.5);
  return noise;
}

double temperature(int t, int total_steps, double slope, double intercept) {
  const double value = slope * static_cast<double>(t) / total_steps + intercept;
  if (!(value > 0.0)) {
    throw DomainError("temperature schedule gives nonpositive value " +
                      std::to_string(value) + " at t=" + std::to_string(t));
  }
  return value;
}

}  // namespace tcl
