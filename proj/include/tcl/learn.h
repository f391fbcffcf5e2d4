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

#ifndef TCL_LEARN_H_
#define TCL_LEARN_H_

// Training loops for the masked generator and the token critic, plus
// held-out evaluation.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcl/nets.h"
#include "tcl/numerics/optim.h"
#include "tcl/schedule.h"
#include "tcl/worlds.h"

namespace tcl {

struct TrainConfig {
  int epochs = 20;
  int steps_per_epoch = 100;
  int batch_size = 64;
  OptimizerConfig optimizer;
  int eval_interval = 100;  // steps between held-out evaluations
  int eval_batches = 4;
  int patience = 10;        // evaluations without improvement before stopping
  std::uint64_t seed = 0;
  double critic_temperature = 1.0;  // temperature of the generator fill
  GammaKind gamma_kind = GammaKind::cosine;

  int total_steps() const { return epochs * steps_per_epoch; }
  void validate() const;  // throws ConfigError naming the field
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

// One loss-trace row. split is "train" or "heldout".
struct TraceRow {
  int step = 0;
  std::string split;
  std::string metric;
  double value = 0.0;
};

struct TrainResult {
  std::vector<TraceRow> trace;
  int steps_run = 0;
  int skipped_batches = 0;  // batches with no masked position
  int best_step = 0;
  double best_heldout = 0.0;
  bool stopped_early = false;
};

// Called after every held-out evaluation with the current parameters.
using CheckpointFn = std::function<void(int step, const Transformer& net)>;

// (x0, c) from the world, t ~ U(0,1), r = ceil(N * gamma(t)) masked positions
// chosen uniformly, x_t = x0 with those positions replaced by [MASK].
struct MaskedBatch {
  std::size_t batch = 0;
  std::size_t positions = 0;
  std::vector<Token> x0;
  std::vector<Token> xt;
  std::vector<int> classes;
  std::vector<std::uint8_t> visible;  // 1 = kept, 0 = masked; batch * N
};

std::size_t draw_mask_size(std::size_t n, Rng& rng, GammaKind kind = GammaKind::cosine);
MaskedBatch make_masked_batch(const SyntheticWorld& world, std::size_t batch, Rng& rng,
                              GammaKind kind = GammaKind::cosine);

// Masked cross-entropy training of `model` in place. On return the model
// holds the parameters with the best held-out loss.
TrainResult train_generator(GeneratorModel& model, const SyntheticWorld& world,
                            const TrainConfig& config, const CheckpointFn& on_eval = {});

// Critic training against a frozen generator. Throws Error if the generator
// weights change during the run.
TrainResult train_critic(CriticModel& critic, const GeneratorModel& generator,
                         const SyntheticWorld& world, const TrainConfig& config,
                         const CheckpointFn& on_eval = {});

// x_hat0: generator draws at the masked positions of x_t, x_t elsewhere.
std::vector<Token> fill_masked(const GeneratorModel& generator, const MaskedBatch& batch,
                               double temperature, Rng& rng);

struct GeneratorEval {
  double masked_ce = 0.0;       // nats per masked position
  double mean_true_prob = 0.0;  // mean probability of the true token
  std::size_t masked_positions = 0;
};

struct CriticEval {
  double bce = 0.0;
  double auc = 0.5;
  std::size_t positions = 0;
};

GeneratorEval evaluate_generator(const GeneratorModel& model, const SyntheticWorld& world,
                                 int n_batches, int batch_size, std::uint64_t seed,
                                 GammaKind kind = GammaKind::cosine);

CriticEval evaluate_critic(const CriticModel& critic, const GeneratorModel& generator,
                           const SyntheticWorld& world, int n_batches, int batch_size,
                           std::uint64_t seed, double temperature = 1.0,
                           GammaKind kind = GammaKind::cosine);

// Best cross-entropy a position-wise predictor can reach: the entropy of the
// exact conditional at each masked position, averaged per masked position
// over the training mask distribution (Monte Carlo over `samples` draws).
// With class_conditional=false the visible tokens alone are the evidence.
double factorized_baseline(const SyntheticWorld& world, int samples, std::uint64_t seed,
                           bool class_conditional, GammaKind kind = GammaKind::cosine);

}  // namespace tcl

#endif  // TCL_LEARN_H_
