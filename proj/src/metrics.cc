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

#include "tcl/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tcl/error.h"
#include "tcl/numerics/kernels.h"

namespace tcl {

double plugin_kl(std::span<const double> truth, std::span<const double> counts,
                 double total, double lambda) {
  const double states = static_cast<double>(truth.size());
  const double norm = 1.0 + lambda * states;
  kernels::CompensatedSum kl;
  for (std::size_t s = 0; s < truth.size(); ++s) {
    const double q = truth[s];
    if (q <= 0.0) continue;
    const double p = (counts[s] / total + lambda) / norm;
    kl.add(q * std::log(q / p));
  }
  return std::max(0.0, kl.value());
}

MetricsRecord compare_to_truth(std::span<const TokenGrid> samples,
                               const SyntheticWorld& world, int label) {
  if (samples.size() < kMinMetricSamples) {
    throw DomainError("compare_to_truth needs at least " + std::to_string(kMinMetricSamples) +
                      " samples, got " + std::to_string(samples.size()));
  }
  const auto& q = world.joint(label).probs;
  const std::size_t n = world.positions();
  const auto k = static_cast<std::size_t>(world.spec().vocab_size);
  std::vector<double> counts(world.state_count(), 0.0);
  std::vector<double> marg(n * k, 0.0);
  std::vector<std::size_t> indices;
  indices.reserve(samples.size());
  kernels::CompensatedSum nll, consistency;
  for (const TokenGrid& g : samples) {
    if (!g.complete(world.vocab()) || g.size() != n) {
      throw DomainError("compare_to_truth: every sample must be a complete grid");
    }
    const std::size_t s = world.state_index(g.tokens);
    indices.push_back(s);
    counts[s] += 1.0;
    for (std::size_t j = 0; j < n; ++j) marg[j * k + static_cast<std::size_t>(g.tokens[j])] += 1.0;
    nll.add(q[s] > 0.0 ? -std::log(q[s]) : std::numeric_limits<double>::infinity());
    consistency.add(world.class_posterior(g).probs[static_cast<std::size_t>(label)]);
  }
  const double total = static_cast<double>(samples.size());
  MetricsRecord m;
  m.sample_count = samples.size();
  std::vector<double> empirical(counts.size());
  for (std::size_t s = 0; s < counts.size(); ++s) empirical[s] = counts[s] / total;
  m.joint_tv = 0.5 * kernels::abs_diff_sum(empirical, q);
  m.forward_cross_entropy = nll.value() / total;
  m.plugin_kl = plugin_kl(q, counts, total);

  // True per-position marginals from the table.
  std::vector<double> true_marg(n * k, 0.0);
  for (std::size_t s = 0; s < q.size(); ++s) {
    std::size_t rest = s;
    for (std::size_t j = n; j-- > 0;) {
      true_marg[j * k + rest % k] += q[s];
      rest /= k;
    }
  }
  double mtv = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double d = 0.0;
    for (std::size_t v = 0; v < k; ++v) d += std::fabs(marg[j * k + v] / total - true_marg[j * k + v]);
    mtv += 0.5 * d;
  }
  m.marginal_tv = mtv / static_cast<double>(n);
  std::sort(indices.begin(), indices.end());
  const auto unique = static_cast<double>(
      std::unique(indices.begin(), indices.end()) - indices.begin());
  m.distinct_ratio = unique / total;
  m.class_consistency = consistency.value() / total;
  return m;
}

MetricsRecord compare_by_class(std::span<const TokenGrid> samples, std::span<const int> labels,
                               const SyntheticWorld& world) {
  if (samples.size() != labels.size()) {
    throw DomainError("compare_by_class: one label per sample required");
  }
  const auto classes = static_cast<std::size_t>(world.num_classes());
  std::vector<std::vector<TokenGrid>> groups(classes);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= classes) {
      throw DomainError("compare_by_class: label out of range");
    }
    groups[static_cast<std::size_t>(labels[i])].push_back(samples[i]);
  }
  MetricsRecord out;
  double weight = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    if (groups[c].empty()) continue;
    const MetricsRecord m = compare_to_truth(groups[c], world, static_cast<int>(c));
    const double w = world.prior()[c];
    weight += w;
    out.joint_tv += w * m.joint_tv;
    out.forward_cross_entropy += w * m.forward_cross_entropy;
    out.plugin_kl += w * m.plugin_kl;
    out.marginal_tv += w * m.marginal_tv;
    out.distinct_ratio += w * m.distinct_ratio;
    out.class_consistency += w * m.class_consistency;
  }
  if (weight <= 0.0) throw DomainError("compare_by_class: no samples");
  out.sample_count = samples.size();
  out.joint_tv /= weight;
  out.forward_cross_entropy /= weight;
  out.plugin_kl /= weight;
  out.marginal_tv /= weight;
  out.distinct_ratio /= weight;
  out.class_consistency /= weight;
  return out;
}

std::vector<int> allocate_labels(std::size_t n, std::span<const double> prior) {
  if (prior.empty()) throw DomainError("allocate_labels: empty prior");
  std::vector<std::size_t> counts(prior.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < prior.size(); ++c) {
    const double exact = prior[c] * static_cast<double>(n);
    counts[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[c];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++counts[remainders[i % prior.size()].second];
  std::vector<int> labels;
  labels.reserve(n);
  for (std::size_t c = 0; c < prior.size(); ++c) labels.insert(labels.end(), counts[c], static_cast<int>(c));
  return labels;
}

double intermediate_state_divergence(const SyntheticWorld& world, int label,
                                     std::span<const TokenGrid> states, int t,
                                     int total_steps, GammaKind kind) {
  if (states.size() < kMinTraceSamples) {
    throw DomainError("intermediate_state_divergence needs at least " +
                      std::to_string(kMinTraceSamples) + " traces, got " +
                      std::to_string(states.size()));
  }
  const std::size_t n = world.positions();
  const auto k = static_cast<std::size_t>(world.spec().vocab_size);
  const std::size_t masked = mask_count(t, total_steps, n, kind);
  const Token mask_id = world.vocab().mask_id();
  std::size_t space = 1;
  for (std::size_t j = 0; j < n; ++j) space *= k + 1;
  if (space > 4 * kMaxWorldStates) {
    throw DomainError("intermediate_state_divergence: masked state space too large");
  }
  auto masked_index = [&](std::span<const Token> tokens) {
    std::size_t idx = 0;
    for (Token tk : tokens) idx = idx * (k + 1) + static_cast<std::size_t>(tk);
    return idx;
  };

  // Exact q(x_t): average over all masks with `masked` zeros.
  std::vector<double> truth(space, 0.0);
  std::vector<std::uint8_t> bits(n, 1);
  std::fill(bits.begin(), bits.begin() + static_cast<long>(masked), 0);
  std::sort(bits.begin(), bits.end());
  std::size_t num_masks = 0;
  const auto& q = world.joint(label).probs;
  std::vector<Token> digits(n);
  do {
    ++num_masks;
    for (std::size_t s = 0; s < q.size(); ++s) {
      std::size_t rest = s;
      for (std::size_t j = n; j-- > 0;) {
        digits[j] = bits[j] ? static_cast<Token>(rest % k) : mask_id;
        rest /= k;
      }
      truth[masked_index(digits)] += q[s];
    }
  } while (std::next_permutation(bits.begin(), bits.end()));
  for (double& v : truth) v /= static_cast<double>(num_masks);

  std::vector<double> counts(space, 0.0);
  for (const TokenGrid& g : states) {
    if (g.size() != n) throw DomainError("intermediate_state_divergence: wrong grid length");
    std::size_t mc = 0;
    for (Token tk : g.tokens) {
      if (tk < 0 || tk > mask_id) throw DomainError("intermediate_state_divergence: invalid token");
      mc += tk == mask_id;
    }
    if (mc != masked) {
      throw DomainError("intermediate_state_divergence: state has " + std::to_string(mc) +
                        " masked positions, step t expects " + std::to_string(masked));
    }
    counts[masked_index(g.tokens)] += 1.0;
  }
  // The support of x_t is C(n, masked) * K^(n - masked) states; smoothing is
  // spread over that support only.
  std::size_t support = num_masks;
  for (std::size_t j = 0; j < n - masked; ++j) support *= k;
  const double total = static_cast<double>(states.size());
  const double norm = 1.0 + kPluginSmoothing * static_cast<double>(support);
  kernels::CompensatedSum kl;
  for (std::size_t s = 0; s < space; ++s) {
    if (truth[s] <= 0.0) continue;
    const double p = (counts[s] / total + kPluginSmoothing) / norm;
    kl.add(truth[s] * std::log(truth[s] / p));
  }
  return std::max(0.0, kl.value());
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DomainError("roc_auc: length mismatch");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positives = 0.0, negatives = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    for (std::size_t r = i; r < j; ++r) {
      if (labels[order[r]] == 1) {
        positives += 1.0;
        rank_sum += avg_rank;
      } else {
        negatives += 1.0;
      }
    }
    i = j;
  }
  if (positives == 0.0 || negatives == 0.0) return 0.5;
  return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

}  // namespace tcl
