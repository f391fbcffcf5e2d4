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

#include "tcl/sampler.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <utility>

#include <omp.h>

#include "tcl/error.h"

namespace tcl {

namespace {

constexpr std::size_t kChunk = 32;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxOracleTable = 4'000'000;

struct RunState {
  TokenGrid x;
  int label = 0;
  Rng* rng = nullptr;
  Trace* trace = nullptr;
};

// Runs t = T..1 for every run in lockstep so the proposer and scorer see
// whole batches. Each run consumes only its own RNG, in a fixed order:
// token draws at masked positions, random scores, then selection noise.
void decode(const TokenProposer& proposer, const Scorer* scorer, Selector selector,
            const Schedule& schedule, const std::vector<std::size_t>& counts,
            std::span<RunState> runs) {
  const std::size_t n = proposer.positions();
  const Vocabulary vocab{proposer.vocab_size()};
  const Token mask = vocab.mask_id();
  const int total = schedule.total_steps;
  const std::size_t batch = runs.size();
  std::vector<Token> tokens(batch * n);
  std::vector<int> classes(batch);
  for (std::size_t b = 0; b < batch; ++b) classes[b] = runs[b].label;

  for (int t = total; t >= 1; --t) {
    for (std::size_t b = 0; b < batch; ++b) {
      std::copy(runs[b].x.tokens.begin(), runs[b].x.tokens.end(), tokens.begin() + b * n);
    }
    const Tensor logits = proposer.logits(tokens, classes);
    const std::size_t k_codes = logits.cols();
    const double temp = temperature(t, total, schedule.temp_slope, schedule.temp_intercept);

    std::vector<Token> proposal = tokens;
    std::vector<double> scores(batch * n, kInf);
    for (std::size_t b = 0; b < batch; ++b) {
      Rng& rng = *runs[b].rng;
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t i = b * n + j;
        if (tokens[i] != mask) continue;
        const TokenDraw d = sample_token(logits.data().subspan(i * k_codes, k_codes), temp, rng);
        proposal[i] = d.token;
        if (selector == Selector::confidence) scores[i] = d.prob;
      }
      if (selector == Selector::random) {
        for (std::size_t j = 0; j < n; ++j) {
          if (tokens[b * n + j] == mask) scores[b * n + j] = rng.uniform();
        }
      }
    }
    if (selector == Selector::critic) scores = scorer->scores(proposal, classes);

    const std::size_t k = counts[static_cast<std::size_t>(t - 1)];
    for (std::size_t b = 0; b < batch; ++b) {
      RunState& run = runs[b];
      std::span<double> s(scores.data() + b * n, n);
      const std::vector<double> noise =
          selection_noise(t, total, schedule.noise_scale, n, *run.rng);
      for (std::size_t j = 0; j < n; ++j) s[j] += noise[j];
      double threshold = -kInf;
      MaskVector m = select_rank_k(s, k, &threshold);
      TokenGrid x_hat{run.x.shape, std::vector<Token>(proposal.begin() + b * n,
                                                      proposal.begin() + (b + 1) * n)};
      TokenGrid next = apply_mask(x_hat, m, vocab);
      if (run.trace) {
        SelectionStep step;
        step.t = t;
        step.k = k;
        step.scores.assign(s.begin(), s.end());
        step.threshold = threshold;
        step.mask = m;
        step.before = run.x;
        step.proposal = std::move(x_hat);
        step.after = next;
        run.trace->steps.push_back(std::move(step));
      }
      run.x = std::move(next);
    }
  }
  for (const RunState& run : runs) {
    if (!run.x.complete(vocab)) {
      throw Error("internal invariant violated: sampler finished with masked positions");
    }
  }
}

void check_selector(Selector selector, const Scorer* scorer) {
  if (selector == Selector::oracle_conditional) {
    throw ConfigError("sampler.selector: oracle_conditional uses the ancestral oracle sampler");
  }
  if (selector == Selector::critic && scorer == nullptr) {
    throw ConfigError("sampler.selector: critic selector requires a critic model");
  }
}

template <class Body>
void parallel_chunks(std::size_t chunks, int workers, Body&& body) {
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, workers))
  for (std::size_t c = 0; c < chunks; ++c) {
    try {
      body(c);
    } catch (...) {
#pragma omp critical(tcl_sampler_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

Selector parse_selector(const std::string& name) {
  if (name == "critic") return Selector::critic;
  if (name == "confidence") return Selector::confidence;
  if (name == "random") return Selector::random;
  if (name == "oracle_conditional") return Selector::oracle_conditional;
  throw ConfigError("sampler.selector: unknown selector '" + name + "'");
}

std::string to_string(Selector s) {
  switch (s) {
    case Selector::critic: return "critic";
    case Selector::confidence: return "confidence";
    case Selector::random: return "random";
    case Selector::oracle_conditional: return "oracle_conditional";
  }
  return "unknown";
}

void SamplerConfig::validate() const {
  schedule.validate();
  if (mask_counts.empty()) return;
  if (mask_counts.size() != static_cast<std::size_t>(schedule.total_steps)) {
    throw ConfigError("sampler.mask_counts: need one count per step");
  }
  if (mask_counts.back() != 0) throw ConfigError("sampler.mask_counts: last count must be 0");
  for (std::size_t i = 1; i < mask_counts.size(); ++i) {
    if (mask_counts[i] > mask_counts[i - 1]) {
      throw ConfigError("sampler.mask_counts: must be nonincreasing");
    }
  }
}

nlohmann::json SamplerConfig::to_json() const {
  nlohmann::json j = {{"steps", schedule.total_steps},
                      {"gamma", to_string(schedule.gamma_kind)},
                      {"noise_scale", schedule.noise_scale},
                      {"temp_slope", schedule.temp_slope},
                      {"temp_intercept", schedule.temp_intercept},
                      {"selector", to_string(selector)}};
  if (!mask_counts.empty()) j["mask_counts"] = mask_counts;
  return j;
}

SamplerConfig SamplerConfig::from_json(const nlohmann::json& j) {
  SamplerConfig c;
  try {
    c.schedule.total_steps = j.value("steps", c.schedule.total_steps);
    c.schedule.gamma_kind = parse_gamma_kind(j.value("gamma", to_string(c.schedule.gamma_kind)));
    c.schedule.noise_scale = j.value("noise_scale", c.schedule.noise_scale);
    c.schedule.temp_slope = j.value("temp_slope", c.schedule.temp_slope);
    c.schedule.temp_intercept = j.value("temp_intercept", c.schedule.temp_intercept);
    c.selector = parse_selector(j.value("selector", to_string(c.selector)));
    if (j.contains("mask_counts")) c.mask_counts = j.at("mask_counts").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("sampler: ") + e.what());
  }
  c.validate();
  return c;
}

GeneratorProposer::GeneratorProposer(const GeneratorModel& model, GridShape shape)
    : model_(&model), shape_(shape) {
  if (static_cast<int>(shape.count()) != model.net.config().positions) {
    throw ConfigError("generator: grid shape does not match model positions");
  }
}

Tensor GeneratorProposer::logits(std::span<const Token> xt, std::span<const int> classes) const {
  return generator_logits(*model_, xt, classes);
}

OracleProposer::OracleProposer(const SyntheticWorld& world) : world_(&world) {
  const std::size_t n = world.positions();
  const auto k = static_cast<std::size_t>(world.vocab().size);
  std::size_t states = 1;
  for (std::size_t j = 0; j < n; ++j) {
    states *= k + 1;
    if (states * n * k * static_cast<std::size_t>(world.num_classes()) > kMaxOracleTable) return;
  }
  table_.resize(static_cast<std::size_t>(world.num_classes()));
  std::vector<Token> grid(n);
  for (int c = 0; c < world.num_classes(); ++c) {
    auto& rows = table_[static_cast<std::size_t>(c)];
    rows.resize(states);
    for (std::size_t s = 0; s < states; ++s) {
      std::size_t rest = s;
      for (std::size_t j = n; j-- > 0;) {
        grid[j] = static_cast<Token>(rest % (k + 1));
        rest /= k + 1;
      }
      rows[s].assign(n * k, 0.0);
      fill_row(grid, c, rows[s]);
    }
  }
}

void OracleProposer::fill_row(std::span<const Token> grid, int label, std::span<double> out) const {
  const std::size_t n = world_->positions();
  const auto k = static_cast<std::size_t>(world_->vocab().size);
  const Token mask = world_->vocab().mask_id();
  TokenGrid partial{world_->shape(), std::vector<Token>(grid.begin(), grid.end())};
  for (std::size_t j = 0; j < n; ++j) {
    if (grid[j] != mask) continue;
    try {
      const std::vector<double> q = world_->exact_conditional(label, partial, j);
      for (std::size_t v = 0; v < k; ++v) out[j * k + v] = q[v] > 0.0 ? std::log(q[v]) : -kInf;
    } catch (const DomainError&) {
      std::fill(out.begin() + static_cast<std::ptrdiff_t>(j * k),
                out.begin() + static_cast<std::ptrdiff_t>((j + 1) * k),
                std::numeric_limits<double>::quiet_NaN());
    }
  }
}

Tensor OracleProposer::logits(std::span<const Token> xt, std::span<const int> classes) const {
  const std::size_t n = world_->positions();
  const auto k = static_cast<std::size_t>(world_->vocab().size);
  if (xt.size() != classes.size() * n) throw ShapeError("oracle proposer: batch size mismatch");
  Tensor out({classes.size() * n, k}, 0.0);
  for (std::size_t b = 0; b < classes.size(); ++b) {
    std::span<const Token> grid = xt.subspan(b * n, n);
    std::span<double> rows = out.data().subspan(b * n * k, n * k);
    if (!table_.empty()) {
      std::size_t idx = 0;
      for (Token t : grid) {
        if (t < 0 || t > static_cast<Token>(k)) throw DomainError("oracle proposer: bad token");
        idx = idx * (k + 1) + static_cast<std::size_t>(t);
      }
      const auto& row = table_.at(static_cast<std::size_t>(classes[b])).at(idx);
      std::copy(row.begin(), row.end(), rows.begin());
    } else {
      fill_row(grid, classes[b], rows);
    }
    for (double v : rows) {
      if (std::isnan(v)) throw DomainError("impossible evidence");
    }
  }
  return out;
}

std::vector<double> CriticScorer::scores(std::span<const Token> grids,
                                         std::span<const int> classes) const {
  const Tensor logits = critic_logits(*model_, grids, classes);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sigmoid(logits[i]);
  return out;
}

std::vector<std::size_t> mask_schedule(const SamplerConfig& config, std::size_t n) {
  const int total = config.schedule.total_steps;
  std::vector<std::size_t> counts(static_cast<std::size_t>(total) + 1);
  if (config.mask_counts.empty()) {
    for (int t = 0; t <= total; ++t) {
      counts[static_cast<std::size_t>(t)] = mask_count(t, total, n, config.schedule.gamma_kind);
    }
    return counts;
  }
  counts[static_cast<std::size_t>(total)] = n;
  for (int t = 0; t < total; ++t) {
    const std::size_t k = config.mask_counts[static_cast<std::size_t>(total - 1 - t)];
    if (k > n) throw ConfigError("sampler.mask_counts: count exceeds grid size");
    counts[static_cast<std::size_t>(t)] = k;
  }
  return counts;
}

MaskVector select_rank_k(std::span<const double> scores, std::size_t k, double* threshold) {
  const std::size_t n = scores.size();
  if (k > n) throw DomainError("select_rank_k: k exceeds the number of positions");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b] || (scores[a] == scores[b] && a < b);
  });
  MaskVector m = MaskVector::all_visible(n);
  double tau = -kInf;
  for (std::size_t i = 0; i < k; ++i) {
    m.bits[order[i]] = 0;
    tau = std::max(tau, scores[order[i]]);
  }
  if (threshold) *threshold = tau;
  return m;
}

SampleOutput sample_one(const TokenProposer& proposer, const Scorer* scorer, int label,
                        const SamplerConfig& config, Rng& rng, bool keep_trace) {
  config.validate();
  check_selector(config.selector, scorer);
  const std::size_t n = proposer.positions();
  const Vocabulary vocab{proposer.vocab_size()};
  SampleOutput out;
  RunState run{TokenGrid{proposer.shape(), std::vector<Token>(n, vocab.mask_id())}, label, &rng,
               keep_trace ? &out.trace : nullptr};
  decode(proposer, scorer, config.selector, config.schedule, mask_schedule(config, n),
         std::span<RunState>(&run, 1));
  out.grid = std::move(run.x);
  return out;
}

SampleOutput sample_critic(const GeneratorModel& generator, const CriticModel& critic, int label,
                           const SamplerConfig& config, Rng& rng, bool keep_trace) {
  const auto n = static_cast<std::size_t>(generator.net.config().positions);
  GeneratorProposer proposer(generator, GridShape{1, static_cast<int>(n)});
  CriticScorer scorer(critic);
  SamplerConfig c = config;
  c.selector = Selector::critic;
  return sample_one(proposer, &scorer, label, c, rng, keep_trace);
}

SampleOutput sample_confidence(const GeneratorModel& generator, int label,
                               const SamplerConfig& config, Rng& rng, bool keep_trace) {
  const auto n = static_cast<std::size_t>(generator.net.config().positions);
  GeneratorProposer proposer(generator, GridShape{1, static_cast<int>(n)});
  SamplerConfig c = config;
  c.selector = Selector::confidence;
  return sample_one(proposer, nullptr, label, c, rng, keep_trace);
}

std::vector<SampleOutput> sample_many(const TokenProposer& proposer, const Scorer* scorer,
                                      const SamplerConfig& config, std::span<const int> labels,
                                      bool keep_traces, int workers) {
  config.validate();
  check_selector(config.selector, scorer);
  const std::size_t n = proposer.positions();
  const Vocabulary vocab{proposer.vocab_size()};
  const std::vector<std::size_t> counts = mask_schedule(config, n);
  std::vector<SampleOutput> out(labels.size());
  const std::size_t chunks = (labels.size() + kChunk - 1) / kChunk;
  parallel_chunks(chunks, workers, [&](std::size_t c) {
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(labels.size(), begin + kChunk);
    std::vector<Rng> rngs;
    rngs.reserve(end - begin);
    std::vector<RunState> runs;
    runs.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      rngs.emplace_back(derive_seed(config.seed, "sample", i));
      runs.push_back({TokenGrid{proposer.shape(), std::vector<Token>(n, vocab.mask_id())},
                      labels[i], &rngs.back(), keep_traces ? &out[i].trace : nullptr});
    }
    decode(proposer, scorer, config.selector, config.schedule, counts, runs);
    for (std::size_t i = begin; i < end; ++i) out[i].grid = std::move(runs[i - begin].x);
  });
  return out;
}

namespace {

std::vector<std::size_t> refine_counts(double ratio, int steps, const Schedule& schedule,
                                       std::size_t n) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw DomainError("refine: ratio must be in (0, 1]");
  if (steps < 1) throw DomainError("refine: steps must be >= 1");
  std::vector<std::size_t> counts(static_cast<std::size_t>(steps) + 1);
  for (int t = 0; t <= steps; ++t) {
    const double u = static_cast<double>(t) / steps;
    counts[static_cast<std::size_t>(t)] = ceil_count(gamma(u, schedule.gamma_kind) * ratio, n);
  }
  return counts;
}

TokenGrid initial_refine_mask(const CriticScorer& scorer, const TokenGrid& x_in, int label,
                              std::size_t k, const Vocabulary& vocab) {
  const int c[1] = {label};
  const std::vector<double> s = scorer.scores(x_in.tokens, c);
  return apply_mask(x_in, select_rank_k(s, k, nullptr), vocab);
}

}  // namespace

SampleOutput refine(const GeneratorModel& generator, const CriticModel& critic,
                    const TokenGrid& x_in, int label, double ratio, int steps,
                    const Schedule& schedule, Rng& rng, bool keep_trace) {
  const Vocabulary vocab{generator.net.config().outputs};
  if (!x_in.complete(vocab)) throw DomainError("refine: input grid must be complete");
  const std::size_t n = x_in.size();
  const std::vector<std::size_t> counts = refine_counts(ratio, steps, schedule, n);
  Schedule s = schedule;
  s.total_steps = steps;
  s.validate();
  GeneratorProposer proposer(generator, x_in.shape);
  CriticScorer scorer(critic);
  SampleOutput out;
  RunState run{initial_refine_mask(scorer, x_in, label, counts.back(), vocab), label, &rng,
               keep_trace ? &out.trace : nullptr};
  decode(proposer, &scorer, Selector::critic, s, counts, std::span<RunState>(&run, 1));
  out.grid = std::move(run.x);
  return out;
}

std::vector<SampleOutput> refine_many(const GeneratorModel& generator, const CriticModel& critic,
                                      std::span<const TokenGrid> inputs,
                                      std::span<const int> labels, double ratio, int steps,
                                      const Schedule& schedule, std::uint64_t seed,
                                      int workers) {
  if (inputs.size() != labels.size()) throw ShapeError("refine_many: one label per input");
  const Vocabulary vocab{generator.net.config().outputs};
  if (inputs.empty()) return {};
  const std::size_t n = inputs[0].size();
  const std::vector<std::size_t> counts = refine_counts(ratio, steps, schedule, n);
  Schedule s = schedule;
  s.total_steps = steps;
  s.validate();
  GeneratorProposer proposer(generator, inputs[0].shape);
  CriticScorer scorer(critic);
  std::vector<SampleOutput> out(inputs.size());
  const std::size_t chunks = (inputs.size() + kChunk - 1) / kChunk;
  parallel_chunks(chunks, workers, [&](std::size_t c) {
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(inputs.size(), begin + kChunk);
    std::vector<Rng> rngs;
    rngs.reserve(end - begin);
    std::vector<RunState> runs;
    runs.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      if (!inputs[i].complete(vocab) || inputs[i].shape != inputs[0].shape) {
        throw DomainError("refine: input grid must be complete and of the model's shape");
      }
      rngs.emplace_back(derive_seed(seed, "refine", i));
      runs.push_back({initial_refine_mask(scorer, inputs[i], labels[i], counts.back(), vocab),
                      labels[i], &rngs.back(), nullptr});
    }
    decode(proposer, &scorer, Selector::critic, s, counts, runs);
    for (std::size_t i = begin; i < end; ++i) out[i].grid = std::move(runs[i - begin].x);
  });
  return out;
}

std::size_t best_candidate(std::span<const TokenGrid> candidates, const ClassifierFn& classifier,
                           int label) {
  if (candidates.empty()) throw DomainError("best_candidate: no candidates");
  std::size_t best = 0;
  double best_score = -kInf;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double s = classifier(candidates[i]).at(static_cast<std::size_t>(label));
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return best;
}

TokenGrid reject_sample(const std::function<TokenGrid(Rng&)>& sample_fn,
                        const ClassifierFn& classifier, int label, int candidates, Rng& rng) {
  if (candidates < 1) throw DomainError("reject_sample: need at least one candidate");
  std::vector<TokenGrid> pool;
  pool.reserve(static_cast<std::size_t>(candidates));
  for (int i = 0; i < candidates; ++i) pool.push_back(sample_fn(rng));
  return pool[best_candidate(pool, classifier, label)];
}

int candidates_for_rate(double accept_rate) {
  if (!(accept_rate > 0.0 && accept_rate <= 1.0)) {
    throw DomainError("accept rate must be in (0, 1]");
  }
  return static_cast<int>(std::llround(1.0 / accept_rate));
}

std::vector<std::size_t> reveal_order(std::size_t n, OrderPolicy policy, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (policy == OrderPolicy::reverse) std::reverse(order.begin(), order.end());
  if (policy == OrderPolicy::shuffled) {
    Rng rng(derive_seed(seed, "order"));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  }
  return order;
}

TokenGrid sample_oracle_conditional(const AncestralOracle& oracle, int label, Rng& rng) {
  return oracle.sample(label, rng);
}

std::vector<TokenGrid> sample_oracle_many(const AncestralOracle& oracle,
                                          std::span<const int> labels, std::uint64_t seed,
                                          int workers) {
  std::vector<TokenGrid> out(labels.size());
  const std::size_t chunks = (labels.size() + kChunk - 1) / kChunk;
  parallel_chunks(chunks, workers, [&](std::size_t c) {
    const std::size_t end = std::min(labels.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      Rng rng(derive_seed(seed, "oracle", i));
      out[i] = oracle.sample(labels[i], rng);
    }
  });
  return out;
}

std::vector<TokenGrid> states_at(std::span<const SampleOutput> runs, int t) {
  std::vector<TokenGrid> out;
  out.reserve(runs.size());
  for (const SampleOutput& r : runs) {
    if (t == 0) {
      out.push_back(r.grid);
      continue;
    }
    auto it = std::find_if(r.trace.steps.begin(), r.trace.steps.end(),
                           [t](const SelectionStep& s) { return s.t == t; });
    if (it == r.trace.steps.end()) throw DomainError("states_at: no trace step at t");
    out.push_back(it->before);
  }
  return out;
}

bool lock_violated(const Trace& trace) {
  // Visible positions of x_t are copied into x_hat0 unchanged, masked ones
  // receive a code, so before == proposal exactly at the kept positions.
  for (const SelectionStep& s : trace.steps) {
    for (std::size_t j = 0; j < s.before.size(); ++j) {
      if (s.before.tokens[j] == s.proposal.tokens[j] && s.mask.bits[j] == 0) return true;
    }
  }
  return false;
}

nlohmann::json step_to_json(const SelectionStep& step) {
  nlohmann::json scores = nlohmann::json::array();
  for (double v : step.scores) {
    if (std::isfinite(v)) {
      scores.push_back(v);
    } else {
      scores.push_back(nullptr);
    }
  }
  nlohmann::json out = {{"t", step.t},
                        {"k", step.k},
                        {"scores", scores},
                        {"threshold", std::isfinite(step.threshold)
                                          ? nlohmann::json(step.threshold)
                                          : nlohmann::json(nullptr)},
                        {"mask", step.mask.bits},
                        {"before", step.before.tokens},
                        {"proposal", step.proposal.tokens},
                        {"after", step.after.tokens}};
  return out;
}

}  // namespace tcl
