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

#ifndef TCL_SCHEDULE_H_
#define TCL_SCHEDULE_H_

// Masking-rate, selection-noise and temperature schedules. Time runs from
// t = T (everything masked) down to t = 0 (nothing masked).

#include <cstddef>
#include <string>
#include <vector>

#include "tcl/rng.h"

namespace tcl {

enum class GammaKind { cosine, linear };

GammaKind parse_gamma_kind(const std::string& name);
std::string to_string(GammaKind kind);

struct Schedule {
  int total_steps = 6;
  GammaKind gamma_kind = GammaKind::cosine;
  double noise_scale = 0.0;
  double temp_slope = 1.0;      // a
  double temp_intercept = 0.5;  // b

  void validate() const;  // throws ConfigError naming the field
};

// Masked fraction at normalised time u in [0,1]. Cosine form: sin(pi*u/2).
double gamma(double u, GammaKind kind = GammaKind::cosine);

// ceil(gamma(t/T) * n), clamped to [0, n].
std::size_t mask_count(int t, int total_steps, std::size_t n,
                       GammaKind kind = GammaKind::cosine);

// Same rounding rule for an arbitrary fraction; shared with refinement.
std::size_t ceil_count(double fraction, std::size_t n);

// Entries i.i.d. uniform on [-0.5, 0.5] * noise_scale * t / T.
std::vector<double> selection_noise(int t, int total_steps, double noise_scale,
                                    std::size_t n, Rng& rng);

// a * t / T + b; throws DomainError when not positive.
double temperature(int t, int total_steps, double slope, double intercept);

}  // namespace tcl

#endif  // TCL_SCHEDULE_H_
