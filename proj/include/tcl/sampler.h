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

#ifndef TCL_SAMPLER_H_
#define TCL_SAMPLER_H_

// Iterative decoding from all-[MASK] to a complete grid. Each step fills the
// masked positions from a token proposer, scores positions, and re-masks the
// k lowest scores. The critic selector ranks all N positions (kept tokens may
// be re-masked); the confidence and random selectors rank only the positions
// masked at that step, so kept tokens are locked.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcl/nets.h"
#include "tcl/schedule.h"
#include "tcl/tokenspace.h"
#include "tcl/worlds.h"

namespace tcl {

enum class Selector { critic, confidence, random, oracle_conditional };

Selector parse_selector(const std::string& name);
std::string to_string(Selector s);

struct SamplerConfig {
  Schedule schedule;  // total_steps, gamma, noise, temperature a and b
  Selector selector = Selector::critic;
  std::uint64_t seed = 0;
  // Optional explicit mask counts k for t = T-1 down to 0 (length T). Empty
  // means ceil(gamma(t/T) * N). Must be nonincreasing and end at 0.
  std::vector<std::size_t> mask_counts;

  void validate() const;  // throws ConfigError naming the field
  nlohmann::json to_json() const;
  static SamplerConfig from_json(const nlohmann::json& j);
};

struct SelectionStep {
  int t = 0;                  // step index, the grid before is x_t
  std::size_t k = 0;          // masked count after the step
  std::vector<double> scores; // noisy scores; +inf marks locked positions
  double threshold = 0.0;     // largest masked score, -inf when k = 0
  MaskVector mask;            // m_{t-1}
  TokenGrid before;           // x_t
  TokenGrid proposal;         // x_hat0
  TokenGrid after;            // x_{t-1}
};

struct Trace {
  std::vector<SelectionStep> steps;
};

struct SampleOutput {
  TokenGrid grid;
  Trace trace;  // empty unless traces were requested
};

// Supplies per-position logits (or log-probabilities) for grids that contain
// [MASK]. Rows of visible positions are ignored.
class TokenProposer {
 public:
  virtual ~TokenProposer() = default;
  virtual Tensor logits(std::span<const Token> xt, std::span<const int> classes) const = 0;
  virtual std::size_t positions() const = 0;
  virtual int vocab_size() const = 0;
  virtual GridShape shape() const = 0;
};

class GeneratorProposer : public TokenProposer {
 public:
  GeneratorProposer(const GeneratorModel& model, GridShape shape);
  Tensor logits(std::span<const Token> xt, std::span<const int> classes) const override;
  std::size_t positions() const override { return shape_.count(); }
  int vocab_size() const override { return model_->net.config().outputs; }
  GridShape shape() const override { return shape_; }

 private:
  const GeneratorModel* model_;
  GridShape shape_;
};

// Exact conditionals log q(x_j | visible, c). Small worlds are tabulated up
// front; larger ones are computed on demand.
class OracleProposer : public TokenProposer {
 public:
  explicit OracleProposer(const SyntheticWorld& world);
  Tensor logits(std::span<const Token> xt, std::span<const int> classes) const override;
  std::size_t positions() const override { return world_->positions(); }
  int vocab_size() const override { return world_->vocab().size; }
  GridShape shape() const override { return world_->shape(); }
  bool tabulated() const { return !table_.empty(); }

 private:
  void fill_row(std::span<const Token> grid, int label, std::span<double> out) const;

  const SyntheticWorld* world_;
  // table_[c][partial index] holds N*K log-probabilities, NaN where the
  // evidence is impossible.
  std::vector<std::vector<std::vector<double>>> table_;
};

// Per-position keep scores in [0, 1] for complete grids.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::vector<double> scores(std::span<const Token> grids,
                                     std::span<const int> classes) const = 0;
};

class CriticScorer : public Scorer {
 public:
  explicit CriticScorer(const CriticModel& model) : model_(&model) {}
  std::vector<double> scores(std::span<const Token> grids,
                             std::span<const int> classes) const override;

 private:
  const CriticModel* model_;
};

// Mask sizes for t = 0..T under `config` (index t).
std::vector<std::size_t> mask_schedule(const SamplerConfig& config, std::size_t n);

// Rank-k selection: sorts by (score ascending, position ascending) and masks
// the first k. Returns the mask and the threshold (largest masked score).
MaskVector select_rank_k(std::span<const double> scores, std::size_t k, double* threshold);

// Single runs using the caller's RNG.
SampleOutput sample_critic(const GeneratorModel& generator, const CriticModel& critic, int label,
                           const SamplerConfig& config, Rng& rng, bool keep_trace = true);
SampleOutput sample_confidence(const GeneratorModel& generator, int label,
                               const SamplerConfig& config, Rng& rng, bool keep_trace = true);

// Generic single run. `scorer` is required for the critic selector only.
SampleOutput sample_one(const TokenProposer& proposer, const Scorer* scorer, int label,
                        const SamplerConfig& config, Rng& rng, bool keep_trace);

// Many runs. Run i draws from its own stream derive_seed(config.seed,
// "sample", i), so results do not depend on `workers` or batching.
std::vector<SampleOutput> sample_many(const TokenProposer& proposer, const Scorer* scorer,
                                      const SamplerConfig& config, std::span<const int> labels,
                                      bool keep_traces = false, int workers = 1);

// Re-masks the ceil(ratio * N) lowest-critic-score positions of a complete
// grid, then decodes with mask counts ceil(gamma(t/steps) * ratio * N).
// Temperature and noise follow `schedule` with T = steps.
SampleOutput refine(const GeneratorModel& generator, const CriticModel& critic,
                    const TokenGrid& x_in, int label, double ratio, int steps,
                    const Schedule& schedule, Rng& rng, bool keep_trace = false);

std::vector<SampleOutput> refine_many(const GeneratorModel& generator, const CriticModel& critic,
                                      std::span<const TokenGrid> inputs,
                                      std::span<const int> labels, double ratio, int steps,
                                      const Schedule& schedule, std::uint64_t seed,
                                      int workers = 1);

using ClassifierFn = std::function<std::vector<double>(const TokenGrid&)>;

// Index of the candidate with the highest classifier score for `label`;
// first wins on ties.
std::size_t best_candidate(std::span<const TokenGrid> candidates, const ClassifierFn& classifier,
                           int label);

TokenGrid reject_sample(const std::function<TokenGrid(Rng&)>& sample_fn,
                        const ClassifierFn& classifier, int label, int candidates, Rng& rng);

// Acceptance rate 1/n -> n candidates. Rate must be in (0, 1].
int candidates_for_rate(double accept_rate);

enum class OrderPolicy { raster, reverse, shuffled };
std::vector<std::size_t> reveal_order(std::size_t n, OrderPolicy policy, std::uint64_t seed);

// Exact ancestral sampling, one position per step in a fixed order.
TokenGrid sample_oracle_conditional(const AncestralOracle& oracle, int label, Rng& rng);
std::vector<TokenGrid> sample_oracle_many(const AncestralOracle& oracle,
                                          std::span<const int> labels, std::uint64_t seed,
                                          int workers = 1);

// x_t of every trace at step t (t = 0 gives the final grids).
std::vector<TokenGrid> states_at(std::span<const SampleOutput> runs, int t);

// A kept token was re-masked or changed later in the trace.
bool lock_violated(const Trace& trace);

nlohmann::json step_to_json(const SelectionStep& step);

}  // namespace tcl

#endif  // TCL_SAMPLER_H_
