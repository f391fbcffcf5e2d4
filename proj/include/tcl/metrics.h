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

#ifndef TCL_METRICS_H_
#define TCL_METRICS_H_

// Divergences between sampler output and the enumerated ground truth.

#include <cstddef>
#include <span>
#include <vector>

#include "tcl/schedule.h"
#include "tcl/tokenspace.h"
#include "tcl/worlds.h"

namespace tcl {

inline constexpr double kPluginSmoothing = 1e-9;
inline constexpr std::size_t kMinMetricSamples = 100;
inline constexpr std::size_t kMinTraceSamples = 10'000;

struct MetricsRecord {
  std::size_t sample_count = 0;
  double joint_tv = 0.0;               // 0.5 * sum |p_hat - q|
  double forward_cross_entropy = 0.0;  // mean -ln q(sample); +inf if any q = 0
  double plugin_kl = 0.0;              // KL(q || smoothed p_hat)
  double marginal_tv = 0.0;            // per-position TV, averaged
  double distinct_ratio = 0.0;         // unique samples / total
  double class_consistency = 0.0;      // mean posterior of the target class
};

// All samples must be complete grids of the world's shape; at least
// kMinMetricSamples of them.
MetricsRecord compare_to_truth(std::span<const TokenGrid> samples,
                               const SyntheticWorld& world, int label);

// Per-class compare_to_truth combined with the class prior as weights
// (renormalised over the classes present). When the class counts follow the
// prior, the combined joint_tv is the TV over (class, grid) pairs.
MetricsRecord compare_by_class(std::span<const TokenGrid> samples, std::span<const int> labels,
                               const SyntheticWorld& world);

// n labels in proportion to `prior` by largest remainder, sorted by class.
std::vector<int> allocate_labels(std::size_t n, std::span<const double> prior);

// Smoothed empirical distribution: (p_hat + lambda) / (1 + lambda * states).
double plugin_kl(std::span<const double> truth, std::span<const double> counts,
                 double total, double lambda = kPluginSmoothing);

// KL(q(x_t) || p_hat(x_t)) where q(x_t) pushes the class-c joint through a
// uniformly random mask with mask_count(t) zeros and p_hat is the empirical
// distribution of `states` (partially masked grids taken at step t).
double intermediate_state_divergence(const SyntheticWorld& world, int label,
                                     std::span<const TokenGrid> states, int t,
                                     int total_steps,
                                     GammaKind kind = GammaKind::cosine);

// Area under the ROC curve, ties counted as one half. labels are 0/1.
// Returns 0.5 when either class is absent.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

}  // namespace tcl

#endif  // TCL_METRICS_H_
