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

#include "tcl/learn.h"

#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include "tcl/error.h"
#include "tcl/metrics.h"
#include "tcl/numerics/ops.h"

namespace tcl {

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError("train." + field + ": " + what);
}

double log_softmax_at(std::span<const double> row, std::size_t target) {
  double top = row[0];
  for (double v : row) top = std::max(top, v);
  double z = 0.0;
  for (double v : row) z += std::exp(v - top);
  return row[target] - top - std::log(z);
}

double bce_term(double z, double y) {
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

using StepLoss = std::function<std::optional<Var>(Tape&, Rng&)>;
using Heldout = std::function<double()>;

TrainResult run_loop(Transformer& net, const TrainConfig& config, const std::string& metric,
                     const StepLoss& step_loss, const Heldout& heldout,
                     const CheckpointFn& on_eval) {
  config.validate();
  Adam adam(config.optimizer);
  Rng dropout_rng(derive_seed(config.seed, "dropout"));
  TrainResult result;
  result.best_heldout = std::numeric_limits<double>::infinity();
  std::vector<Tensor> best;
  int evals_without_gain = 0;
  std::size_t updates = 0;

  const int total = config.total_steps();
  for (int step = 1; step <= total; ++step) {
    result.steps_run = step;
    Tape tape;
    std::optional<Var> loss = step_loss(tape, dropout_rng);
    if (loss) {
      const double value = loss->value()[0];
      if (!std::isfinite(value)) {
        throw DivergenceError("non-finite " + metric + " at step " + std::to_string(step),
                              static_cast<std::size_t>(step));
      }
      tape.backward(*loss);
      try {
        adam.step(net.parameters(), ++updates);
      } catch (const DomainError& e) {
        throw DivergenceError(std::string(e.what()) + " at step " + std::to_string(step),
                              static_cast<std::size_t>(step));
      }
      result.trace.push_back({step, "train", metric, value});
    } else {
      ++result.skipped_batches;
    }

    if (step % config.eval_interval != 0 && step != total) continue;
    const double h = heldout();
    if (!std::isfinite(h)) {
      throw DivergenceError("non-finite held-out " + metric + " at step " + std::to_string(step),
                            static_cast<std::size_t>(step));
    }
    result.trace.push_back({step, "heldout", metric, h});
    if (on_eval) on_eval(step, net);
    if (h < result.best_heldout) {
      result.best_heldout = h;
      result.best_step = step;
      best.clear();
      for (const auto& p : net.parameters()) best.push_back(p.value);
      evals_without_gain = 0;
    } else if (++evals_without_gain >= config.patience) {
      result.stopped_early = true;
      break;
    }
  }
  if (!best.empty()) {
    auto& params = net.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) params[i].value = best[i];
  }
  return result;
}

}  // namespace

void TrainConfig::validate() const {
  require(epochs >= 1, "epochs", "must be >= 1");
  require(steps_per_epoch >= 1, "steps_per_epoch", "must be >= 1");
  require(batch_size >= 1, "batch_size", "must be >= 1");
  require(eval_interval >= 1, "eval_interval", "must be >= 1");
  require(eval_batches >= 1, "eval_batches", "must be >= 1");
  require(patience >= 1, "patience", "must be >= 1");
  require(critic_temperature > 0.0, "critic_temperature", "must be positive");
  optimizer.validate();
}

nlohmann::json TrainConfig::to_json() const {
  return {{"epochs", epochs},
          {"steps_per_epoch", steps_per_epoch},
          {"batch_size", batch_size},
          {"eval_interval", eval_interval},
          {"eval_batches", eval_batches},
          {"patience", patience},
          {"critic_temperature", critic_temperature},
          {"gamma", to_string(gamma_kind)},
          {"optimizer",
           {{"learning_rate", optimizer.learning_rate},
            {"beta1", optimizer.beta1},
            {"beta2", optimizer.beta2},
            {"epsilon", optimizer.epsilon},
            {"weight_decay", optimizer.weight_decay}}}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  try {
    c.epochs = j.value("epochs", c.epochs);
    c.steps_per_epoch = j.value("steps_per_epoch", c.steps_per_epoch);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.eval_interval = j.value("eval_interval", c.eval_interval);
    c.eval_batches = j.value("eval_batches", c.eval_batches);
    c.patience = j.value("patience", c.patience);
    c.critic_temperature = j.value("critic_temperature", c.critic_temperature);
    c.gamma_kind = parse_gamma_kind(j.value("gamma", to_string(c.gamma_kind)));
    if (j.contains("optimizer")) {
      const auto& o = j.at("optimizer");
      c.optimizer.learning_rate = o.value("learning_rate", c.optimizer.learning_rate);
      c.optimizer.beta1 = o.value("beta1", c.optimizer.beta1);
      c.optimizer.beta2 = o.value("beta2", c.optimizer.beta2);
      c.optimizer.epsilon = o.value("epsilon", c.optimizer.epsilon);
      c.optimizer.weight_decay = o.value("weight_decay", c.optimizer.weight_decay);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("train: ") + e.what());
  }
  c.validate();
  return c;
}

std::size_t draw_mask_size(std::size_t n, Rng& rng, GammaKind kind) {
  return ceil_count(gamma(rng.uniform(), kind), n);
}

MaskedBatch make_masked_batch(const SyntheticWorld& world, std::size_t batch, Rng& rng,
                              GammaKind kind) {
  const std::size_t n = world.positions();
  const Vocabulary vocab = world.vocab();
  MaskedBatch out;
  out.batch = batch;
  out.positions = n;
  out.x0.reserve(batch * n);
  out.xt.reserve(batch * n);
  out.visible.reserve(batch * n);
  out.classes.reserve(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    LabeledGrid s = world.sample(rng);
    const MaskVector m = random_mask(n, draw_mask_size(n, rng, kind), rng);
    const TokenGrid xt = apply_mask(s.grid, m, vocab);
    out.x0.insert(out.x0.end(), s.grid.tokens.begin(), s.grid.tokens.end());
    out.xt.insert(out.xt.end(), xt.tokens.begin(), xt.tokens.end());
    out.visible.insert(out.visible.end(), m.bits.begin(), m.bits.end());
    out.classes.push_back(s.label);
  }
  return out;
}

std::vector<Token> fill_masked(const GeneratorModel& generator, const MaskedBatch& batch,
                               double temperature, Rng& rng) {
  const Tensor logits = generator_logits(generator, batch.xt, batch.classes);
  const std::size_t k = logits.cols();
  std::vector<Token> out = batch.xt;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (batch.visible[i]) continue;
    out[i] = sample_token(logits.data().subspan(i * k, k), temperature, rng).token;
  }
  return out;
}

TrainResult train_generator(GeneratorModel& model, const SyntheticWorld& world,
                            const TrainConfig& config, const CheckpointFn& on_eval) {
  config.validate();
  if (model.net.config().positions != static_cast<int>(world.positions()) ||
      model.net.config().outputs != world.vocab().size ||
      model.net.config().num_classes != world.num_classes()) {
    throw ConfigError("generator: model dimensions do not match the world");
  }
  Rng batch_rng(derive_seed(config.seed, "generator-batch"));
  const auto bs = static_cast<std::size_t>(config.batch_size);
  StepLoss step = [&](Tape& tape, Rng& dropout_rng) -> std::optional<Var> {
    MaskedBatch b = make_masked_batch(world, bs, batch_rng, config.gamma_kind);
    std::vector<double> weights(b.visible.size());
    bool any = false;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      weights[i] = b.visible[i] ? 0.0 : 1.0;
      any = any || !b.visible[i];
    }
    if (!any) return std::nullopt;
    Var logits = model.net.forward(tape, b.xt, b.classes, &dropout_rng);
    return ops::cross_entropy(logits, b.x0, weights);
  };
  const std::uint64_t heldout_seed = derive_seed(config.seed, "generator-heldout");
  Heldout heldout = [&] {
    return evaluate_generator(model, world, config.eval_batches, config.batch_size,
                              heldout_seed, config.gamma_kind)
        .masked_ce;
  };
  return run_loop(model.net, config, "masked_ce", step, heldout, on_eval);
}

TrainResult train_critic(CriticModel& critic, const GeneratorModel& generator,
                         const SyntheticWorld& world, const TrainConfig& config,
                         const CheckpointFn& on_eval) {
  config.validate();
  const auto& cc = critic.net.config();
  const auto& gc = generator.net.config();
  if (cc.positions != gc.positions || cc.vocab_in != gc.outputs ||
      cc.num_classes != gc.num_classes || cc.positions != static_cast<int>(world.positions()) ||
      cc.vocab_in != world.vocab().size) {
    throw ConfigError("critic: model dimensions do not match the generator or world");
  }
  const std::uint64_t before = generator.net.checksum();
  Rng batch_rng(derive_seed(config.seed, "critic-batch"));
  const auto bs = static_cast<std::size_t>(config.batch_size);
  StepLoss step = [&](Tape& tape, Rng& dropout_rng) -> std::optional<Var> {
    MaskedBatch b = make_masked_batch(world, bs, batch_rng, config.gamma_kind);
    const std::vector<Token> x_hat = fill_masked(generator, b, config.critic_temperature, batch_rng);
    std::vector<double> targets(b.visible.begin(), b.visible.end());
    Var logits = critic.net.forward(tape, x_hat, b.classes, &dropout_rng);
    return ops::bce_with_logits(logits, targets);
  };
  const std::uint64_t heldout_seed = derive_seed(config.seed, "critic-heldout");
  Heldout heldout = [&] {
    return evaluate_critic(critic, generator, world, config.eval_batches, config.batch_size,
                           heldout_seed, config.critic_temperature, config.gamma_kind)
        .bce;
  };
  TrainResult result = run_loop(critic.net, config, "bce", step, heldout, on_eval);
  if (generator.net.checksum() != before) {
    throw Error("generator integrity check failed: weights changed during critic training");
  }
  return result;
}

GeneratorEval evaluate_generator(const GeneratorModel& model, const SyntheticWorld& world,
                                 int n_batches, int batch_size, std::uint64_t seed,
                                 GammaKind kind) {
  Rng rng(seed);
  GeneratorEval out;
  double ce = 0.0;
  double prob = 0.0;
  for (int i = 0; i < n_batches; ++i) {
    MaskedBatch b = make_masked_batch(world, static_cast<std::size_t>(batch_size), rng, kind);
    const Tensor logits = generator_logits(model, b.xt, b.classes);
    const std::size_t k = logits.cols();
    for (std::size_t p = 0; p < b.visible.size(); ++p) {
      if (b.visible[p]) continue;
      const double lp = log_softmax_at(logits.data().subspan(p * k, k),
                                       static_cast<std::size_t>(b.x0[p]));
      ce -= lp;
      prob += std::exp(lp);
      ++out.masked_positions;
    }
  }
  if (out.masked_positions > 0) {
    out.masked_ce = ce / static_cast<double>(out.masked_positions);
    out.mean_true_prob = prob / static_cast<double>(out.masked_positions);
  }
  return out;
}

CriticEval evaluate_critic(const CriticModel& critic, const GeneratorModel& generator,
                           const SyntheticWorld& world, int n_batches, int batch_size,
                           std::uint64_t seed, double temperature, GammaKind kind) {
  Rng rng(seed);
  std::vector<double> scores;
  std::vector<int> labels;
  double bce = 0.0;
  for (int i = 0; i < n_batches; ++i) {
    MaskedBatch b = make_masked_batch(world, static_cast<std::size_t>(batch_size), rng, kind);
    const std::vector<Token> x_hat = fill_masked(generator, b, temperature, rng);
    const Tensor logits = critic_logits(critic, x_hat, b.classes);
    for (std::size_t p = 0; p < b.visible.size(); ++p) {
      bce += bce_term(logits[p], b.visible[p]);
      scores.push_back(logits[p]);
      labels.push_back(b.visible[p]);
    }
  }
  CriticEval out;
  out.positions = scores.size();
  if (!scores.empty()) out.bce = bce / static_cast<double>(scores.size());
  out.auc = roc_auc(scores, labels);
  return out;
}

double factorized_baseline(const SyntheticWorld& world, int samples, std::uint64_t seed,
                           bool class_conditional, GammaKind kind) {
  if (samples < 1) throw DomainError("factorized_baseline: samples must be >= 1");
  Rng rng(seed);
  const std::size_t n = world.positions();
  double entropy = 0.0;
  std::size_t masked = 0;
  for (int i = 0; i < samples; ++i) {
    LabeledGrid s = world.sample(rng);
    const MaskVector m = random_mask(n, draw_mask_size(n, rng, kind), rng);
    const TokenGrid xt = apply_mask(s.grid, m, world.vocab());
    for (std::size_t j = 0; j < n; ++j) {
      if (m.bits[j]) continue;
      const std::vector<double> q = class_conditional ? world.exact_conditional(s.label, xt, j)
                                                      : world.class_free_conditional(xt, j);
      for (double v : q) {
        if (v > 0.0) entropy -= v * std::log(v);
      }
      ++masked;
    }
  }
  return masked > 0 ? entropy / static_cast<double>(masked) : 0.0;
}

}  // namespace tcl
