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

#include "tcl/cli/commands.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <vector>

#include <omp.h>

#include "tcl/cli/artifacts.h"
#include "tcl/cli/run_config.h"
#include "tcl/error.h"
#include "tcl/learn.h"
#include "tcl/metrics.h"
#include "tcl/nets.h"
#include "tcl/sampler.h"
#include "tcl/worlds.h"

namespace tcl::cli {

namespace fs = std::filesystem;

namespace {

struct Context {
  RunConfig config;
  Provenance prov;
  fs::path out;
};

Context setup(const CommandOptions& opt, const std::string& command) {
  Context ctx;
  ctx.config = opt.config_path.empty() ? RunConfig::defaults() : RunConfig::load(opt.config_path);
  if (opt.seed) ctx.config.seed = *opt.seed;
  if (opt.workers < 1) throw ConfigError("--workers: must be >= 1");
  ctx.prov = {config_hash(ctx.config), ctx.config.seed, command};
  ctx.out = opt.out;
  ensure_directory(ctx.out);
  return ctx;
}

nlohmann::json metadata(const Context& ctx, const std::string& kind) {
  nlohmann::json j = provenance_json(ctx.prov);
  j["kind"] = kind;
  j["world"] = ctx.config.world.to_json();
  return j;
}

void check_dimensions(const TransformerConfig& got, const TransformerConfig& want,
                      const std::string& what) {
  if (got.positions != want.positions || got.vocab_in != want.vocab_in ||
      got.outputs != want.outputs || got.num_classes != want.num_classes || got.head != want.head) {
    throw ConfigError(what + ": checkpoint dimensions do not match the configured world");
  }
}

GeneratorModel load_generator(const CommandOptions& opt, const RunConfig& config) {
  if (opt.generator.empty()) throw ConfigError("--generator: checkpoint path required");
  LoadedCheckpoint ck = load_checkpoint(opt.generator);
  check_dimensions(ck.net.config(), config.generator, "generator");
  return GeneratorModel{std::move(ck.net)};
}

CriticModel load_critic(const CommandOptions& opt, const RunConfig& config) {
  if (opt.critic.empty()) throw ConfigError("--critic: checkpoint path required");
  LoadedCheckpoint ck = load_checkpoint(opt.critic);
  check_dimensions(ck.net.config(), config.critic, "critic");
  return CriticModel{std::move(ck.net)};
}

std::vector<int> labels_for(const RunConfig& config, const SyntheticWorld& world, std::size_t n,
                            std::optional<int> override_label) {
  const int label = override_label.value_or(config.label);
  if (label >= world.num_classes() || label < -1) throw ConfigError("--label: out of range");
  if (label >= 0) return std::vector<int>(n, label);
  return allocate_labels(n, world.prior());
}

std::vector<LabeledGrid> labeled(const std::vector<TokenGrid>& grids, std::span<const int> labels,
                                 GridShape shape) {
  std::vector<LabeledGrid> out;
  out.reserve(grids.size());
  for (std::size_t i = 0; i < grids.size(); ++i) {
    TokenGrid g = grids[i];
    g.shape = shape;
    out.push_back({std::move(g), labels[i]});
  }
  return out;
}

// Final grids of `sampler` runs (or the ancestral oracle) for `labels`.
std::vector<SampleOutput> draw(const SyntheticWorld& world, const GeneratorModel* generator,
                               const CriticModel* critic, const SamplerConfig& sc,
                               std::span<const int> labels, bool traces, int workers) {
  if (sc.selector == Selector::oracle_conditional) {
    AncestralOracle oracle(world, reveal_order(world.positions(), OrderPolicy::raster, 0));
    std::vector<TokenGrid> grids = sample_oracle_many(oracle, labels, sc.seed, workers);
    std::vector<SampleOutput> out(grids.size());
    for (std::size_t i = 0; i < grids.size(); ++i) out[i].grid = std::move(grids[i]);
    return out;
  }
  if (generator == nullptr) throw ConfigError("--generator: required for this selector");
  GeneratorProposer proposer(*generator, world.shape());
  std::optional<CriticScorer> scorer;
  if (sc.selector == Selector::critic) {
    if (critic == nullptr) throw ConfigError("--critic: required for the critic selector");
    scorer.emplace(*critic);
  }
  return sample_many(proposer, scorer ? &*scorer : nullptr, sc, labels, traces, workers);
}

std::vector<TokenGrid> grids_of(const std::vector<SampleOutput>& runs) {
  std::vector<TokenGrid> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(r.grid);
  return out;
}

void write_metrics_header(std::vector<std::string>& cols) {
  for (const char* c : {"sample_count", "joint_tv", "forward_cross_entropy", "plugin_kl",
                        "marginal_tv", "distinct_ratio", "class_consistency"}) {
    cols.emplace_back(c);
  }
}

void write_metrics_cells(CsvWriter& csv, const MetricsRecord& m) {
  csv.cell(m.sample_count)
      .cell(m.joint_tv)
      .cell(m.forward_cross_entropy)
      .cell(m.plugin_kl)
      .cell(m.marginal_tv)
      .cell(m.distinct_ratio)
      .cell(m.class_consistency);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Two-sided exact sign test, ties dropped.
double sign_test_p(int wins, int losses) {
  const int n = wins + losses;
  if (n == 0) return 1.0;
  const int top = std::max(wins, losses);
  double tail = 0.0;
  for (int i = top; i <= n; ++i) {
    tail += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) -
                     n * std::log(2.0));
  }
  return std::min(1.0, 2.0 * tail);
}

double mean_nll(const SyntheticWorld& world, const std::vector<TokenGrid>& grids,
                std::span<const int> labels) {
  double s = 0.0;
  for (std::size_t i = 0; i < grids.size(); ++i) {
    const double p = world.prob(labels[i], grids[i].tokens);
    s += p > 0.0 ? -std::log(p) : std::numeric_limits<double>::infinity();
  }
  return grids.empty() ? 0.0 : s / static_cast<double>(grids.size());
}

}  // namespace

int cmd_train_generator(const CommandOptions& opt) {
  Context ctx = setup(opt, "train-generator");
  const RunConfig& cfg = ctx.config;
  SyntheticWorld world(cfg.world);
  TrainConfig tc = cfg.train_generator;
  tc.seed = derive_seed(cfg.seed, "train-generator");
  GeneratorModel model = make_generator(cfg.generator, derive_seed(cfg.seed, "init-generator"));
  const fs::path weights = ctx.out / "generator.tclw";
  const nlohmann::json meta = metadata(ctx, "generator");
  TrainResult result = train_generator(model, world, tc, [&](int step, const Transformer& net) {
    nlohmann::json m = meta;
    m["step"] = step;
    save_checkpoint(ctx.out / "generator_latest.tclw", net, m);
  });
  const GeneratorEval ev = evaluate_generator(model, world, 8, tc.batch_size,
                                              derive_seed(cfg.seed, "eval-generator"),
                                              tc.gamma_kind);
  nlohmann::json m = meta;
  m["train"] = tc.to_json();
  m["result"] = {{"steps_run", result.steps_run},
                 {"best_step", result.best_step},
                 {"best_heldout", result.best_heldout},
                 {"stopped_early", result.stopped_early},
                 {"skipped_batches", result.skipped_batches}};
  save_checkpoint(weights, model.net, m);
  write_loss_trace(ctx.out / "generator_loss.csv", ctx.prov, result.trace);

  CsvWriter csv(ctx.out / "generator_metrics.csv", ctx.prov, {"metric", "value"});
  csv.cell("heldout_masked_ce").cell(ev.masked_ce).end_row();
  csv.cell("heldout_mean_true_prob").cell(ev.mean_true_prob).end_row();
  csv.cell("heldout_masked_positions").cell(ev.masked_positions).end_row();
  if (cfg.world.kind == WorldKind::pattern) {
    const std::uint64_t bs = derive_seed(cfg.seed, "baseline");
    csv.cell("factorized_baseline_visible_only")
        .cell(factorized_baseline(world, 4000, bs, false, tc.gamma_kind))
        .end_row();
    csv.cell("factorized_baseline_with_class")
        .cell(factorized_baseline(world, 4000, bs, true, tc.gamma_kind))
        .end_row();
  }
  csv.close();
  std::cout << weights.string() << "\n";
  return kOk;
}

int cmd_train_critic(const CommandOptions& opt) {
  Context ctx = setup(opt, "train-critic");
  const RunConfig& cfg = ctx.config;
  SyntheticWorld world(cfg.world);
  const GeneratorModel generator = load_generator(opt, cfg);
  const std::uint64_t gen_checksum = generator.net.checksum();
  TrainConfig tc = cfg.train_critic;
  tc.seed = derive_seed(cfg.seed, "train-critic");
  CriticModel critic = make_critic(cfg.critic, derive_seed(cfg.seed, "init-critic"));
  const nlohmann::json meta = metadata(ctx, "critic");
  TrainResult result = train_critic(critic, generator, world, tc, [&](int step, const Transformer& net) {
    nlohmann::json m = meta;
    m["step"] = step;
    save_checkpoint(ctx.out / "critic_latest.tclw", net, m);
  });
  if (generator.net.checksum() != gen_checksum) {
    throw Error("generator integrity check failed");
  }
  const CriticEval ev = evaluate_critic(critic, generator, world, 8, tc.batch_size,
                                        derive_seed(cfg.seed, "eval-critic"),
                                        tc.critic_temperature, tc.gamma_kind);
  nlohmann::json m = meta;
  m["train"] = tc.to_json();
  m["generator_checksum"] = gen_checksum;
  m["result"] = {{"steps_run", result.steps_run},
                 {"best_step", result.best_step},
                 {"best_heldout", result.best_heldout},
                 {"stopped_early", result.stopped_early}};
  const fs::path weights = ctx.out / "critic.tclw";
  save_checkpoint(weights, critic.net, m);
  write_loss_trace(ctx.out / "critic_loss.csv", ctx.prov, result.trace);
  CsvWriter csv(ctx.out / "critic_metrics.csv", ctx.prov, {"metric", "value"});
  csv.cell("heldout_bce").cell(ev.bce).end_row();
  csv.cell("heldout_auc").cell(ev.auc).end_row();
  csv.cell("heldout_positions").cell(ev.positions).end_row();
  csv.close();
  std::cout << weights.string() << "\n";
  return kOk;
}

int cmd_sample(const CommandOptions& opt) {
  Context ctx = setup(opt, "sample");
  const RunConfig& cfg = ctx.config;
  SyntheticWorld world(cfg.world);
  SamplerConfig sc = cfg.sampler;
  if (opt.selector) sc.selector = parse_selector(*opt.selector);
  if (opt.steps) sc.schedule.total_steps = *opt.steps;
  sc.seed = derive_seed(cfg.seed, "sample");
  sc.validate();
  const int n = opt.n.value_or(cfg.samples);
  if (n < 0) throw ConfigError("--n: must be >= 0");
  const std::vector<int> labels = labels_for(cfg, world, static_cast<std::size_t>(n), opt.label);

  std::optional<GeneratorModel> generator;
  std::optional<CriticModel> critic;
  if (sc.selector != Selector::oracle_conditional) generator = load_generator(opt, cfg);
  if (sc.selector == Selector::critic) critic = load_critic(opt, cfg);
  const std::vector<SampleOutput> runs =
      draw(world, generator ? &*generator : nullptr, critic ? &*critic : nullptr, sc, labels,
           opt.trace, opt.workers);
  write_samples(ctx.out / "samples.jsonl", ctx.prov, labeled(grids_of(runs), labels, world.shape()));
  if (opt.trace) {
    std::ofstream out(ctx.out / "traces.jsonl", std::ios::binary);
    if (!out) throw IoError("cannot write traces.jsonl");
    out << nlohmann::json{{"header", provenance_json(ctx.prov)}}.dump() << "\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
      for (const SelectionStep& s : runs[i].trace.steps) {
        nlohmann::json j = step_to_json(s);
        j["run"] = i;
        j["class"] = labels[i];
        out << j.dump() << "\n";
      }
    }
    if (!out) throw IoError("write failed: traces.jsonl");
  }
  std::cout << (ctx.out / "samples.jsonl").string() << "\n";
  return kOk;
}

int cmd_eval(const CommandOptions& opt) {
  Context ctx = setup(opt, "eval");
  const RunConfig& cfg = ctx.config;
  SyntheticWorld world(cfg.world);
  if (opt.samples.empty()) throw ConfigError("--samples: input file required");
  const std::vector<LabeledGrid> input = read_samples(opt.samples);
  if (input.empty()) throw ConfigError("--samples: file holds no grids");
  const int label = opt.label.value_or(input.front().label);
  std::vector<TokenGrid> grids;
  grids.reserve(input.size());
  for (const LabeledGrid& g : input) {
    if (g.label != label) {
      throw ConfigError("--samples: mixed classes in input; eval needs a single class");
    }
    if (g.grid.shape != world.shape()) throw ConfigError("--samples: grid shape differs from world");
    grids.push_back(g.grid);
  }
  if (label < 0 || label >= world.num_classes()) throw ConfigError("--label: out of range");
  const MetricsRecord m = compare_to_truth(grids, world, label);
  std::vector<std::string> cols = {"sampler", "config_hash", "seed", "class"};
  write_metrics_header(cols);
  CsvWriter csv(ctx.out / "metrics.csv", ctx.prov, cols);
  csv.cell(fs::path(opt.samples).stem().string()).cell(ctx.prov.config_hash).cell(cfg.seed).cell(label);
  write_metrics_cells(csv, m);
  csv.end_row();
  csv.close();
  std::cout << (ctx.out / "metrics.csv").string() << "\n";
  return kOk;
}

int cmd_compare(const CommandOptions& opt) {
  Context ctx = setup(opt, "compare");
  const RunConfig& cfg = ctx.config;
  SyntheticWorld world(cfg.world);
  const GeneratorModel generator = load_generator(opt, cfg);
  const CriticModel critic = load_critic(opt, cfg);
  const int steps = opt.steps.value_or(cfg.compare.steps);
  const int n = opt.n.value_or(cfg.compare.samples);
  const std::vector<int> labels = allocate_labels(static_cast<std::size_t>(n), world.prior());

  std::vector<std::string> cols = {"sampler", "steps", "seed", "config_hash"};
  write_metrics_header(cols);
  CsvWriter csv(ctx.out / "compare.csv", ctx.prov, cols);
  std::vector<double> tv_critic, tv_base;
  for (std::uint64_t seed : cfg.compare.seeds) {
    struct Row {
      Selector selector;
      int steps;
    };
    for (Row row : {Row{Selector::critic, steps}, Row{Selector::confidence, 2 * steps},
                    Row{Selector::oracle_conditional, static_cast<int>(world.positions())}}) {
      SamplerConfig sc = cfg.sampler;
      sc.selector = row.selector;
      sc.schedule.total_steps = row.steps;
      sc.mask_counts.clear();
      sc.seed = derive_seed(seed, "compare");
      const auto runs = draw(world, &generator, &critic, sc, labels, false, opt.workers);
      const MetricsRecord m = compare_by_class(grids_of(runs), labels, world);
      if (row.selector == Selector::critic) tv_critic.push_back(m.joint_tv);
      if (row.selector == Selector::confidence) tv_base.push_back(m.joint_tv);
      csv.cell(to_string(row.selector)).cell(row.steps).cell(seed).cell(ctx.prov.config_hash);
      write_metrics_cells(csv, m);
      csv.end_row();
    }
  }
  csv.close();

  int wins = 0, losses = 0, ties = 0;
  for (std::size_t i = 0; i < tv_critic.size(); ++i) {
    if (tv_critic[i] < tv_base[i]) {
      ++wins;
    } else if (tv_critic[i] > tv_base[i]) {
      ++losses;
    } else {
      ++ties;
    }
  }
  CsvWriter sum(ctx.out / "compare_summary.csv", ctx.prov, {"statistic", "value"});
  sum.cell("critic_steps").cell(steps).end_row();
  sum.cell("baseline_steps").cell(2 * steps).end_row();
  sum.cell("seeds").cell(tv_critic.size()).end_row();
  sum.cell("median_joint_tv_critic").cell(median(tv_critic)).end_row();
  sum.cell("median_joint_tv_baseline").cell(median(tv_base)).end_row();
  sum.cell("critic_wins").cell(wins).end_row();
  sum.cell("baseline_wins").cell(losses).end_row();
  sum.cell("ties").cell(ties).end_row();
  if (tv_critic.size() < 2) {
    sum.cell("sign_test_p").cell("N/A").end_row();
  } else {
    sum.cell("sign_test_p").cell(sign_test_p(wins, losses)).end_row();
  }
  sum.cell("all_seeds_favor_critic").cell(wins == static_cast<int>(tv_critic.size()) ? "yes" : "no").end_row();
  sum.close();
  std::cout << (ctx.out / "compare_summary.csv").string() << "\n";
  return kOk;
}

int cmd_sweep(const CommandOptions& opt) {
  Context ctx = setup(opt, "sweep");
  const RunConfig& cfg = ctx.config;
  SyntheticWorld world(cfg.world);
  bool need_gen = false, need_critic = false;
  for (Selector s : cfg.sweep.selectors) {
    need_gen = need_gen || s != Selector::oracle_conditional;
    need_critic = need_critic || s == Selector::critic;
  }
  std::optional<GeneratorModel> generator;
  std::optional<CriticModel> critic;
  if (need_gen) generator = load_generator(opt, cfg);
  if (need_critic) critic = load_critic(opt, cfg);
  const int n = opt.n.value_or(cfg.sweep.samples);
  const std::vector<int> labels = allocate_labels(static_cast<std::size_t>(n), world.prior());

  CsvWriter csv(ctx.out / "sweep.csv", ctx.prov,
                {"selector", "steps", "temp_intercept", "noise_scale", "seed", "config_hash",
                 "cross_entropy", "distinct_ratio", "joint_tv", "class_consistency"});
  for (Selector sel : cfg.sweep.selectors) {
    // The oracle ignores steps, temperature and noise: one row.
    const bool oracle = sel == Selector::oracle_conditional;
    const std::vector<int> step_axis =
        oracle ? std::vector<int>{cfg.sweep.steps.front()} : cfg.sweep.steps;
    const std::vector<double> b_axis =
        oracle ? std::vector<double>{cfg.sweep.temp_intercept.front()} : cfg.sweep.temp_intercept;
    const std::vector<double> noise_axis =
        oracle ? std::vector<double>{cfg.sweep.noise_scale.front()} : cfg.sweep.noise_scale;
    for (int steps : step_axis) {
      for (double b : b_axis) {
        for (double noise : noise_axis) {
          SamplerConfig sc = cfg.sampler;
          sc.selector = sel;
          sc.schedule.total_steps = steps;
          sc.schedule.temp_intercept = b;
          sc.schedule.noise_scale = noise;
          sc.mask_counts.clear();
          sc.seed = derive_seed(cfg.seed, "sweep");
          sc.validate();
          const auto runs = draw(world, generator ? &*generator : nullptr,
                                 critic ? &*critic : nullptr, sc, labels, false, opt.workers);
          const MetricsRecord m = compare_by_class(grids_of(runs), labels, world);
          csv.cell(to_string(sel)).cell(steps).cell(b).cell(noise).cell(cfg.seed)
              .cell(ctx.prov.config_hash).cell(m.forward_cross_entropy).cell(m.distinct_ratio)
              .cell(m.joint_tv).cell(m.class_consistency);
          csv.end_row();
        }
      }
    }
  }
  csv.close();
  std::cout << (ctx.out / "sweep.csv").string() << "\n";
  return kOk;
}

int cmd_refine(const CommandOptions& opt) {
  Context ctx = setup(opt, "refine");
  const RunConfig& cfg = ctx.config;
  SyntheticWorld world(cfg.world);
  const GeneratorModel generator = load_generator(opt, cfg);
  const CriticModel critic = load_critic(opt, cfg);
  if (opt.samples.empty()) throw ConfigError("--samples: input file required");
  const std::vector<LabeledGrid> input = read_samples(opt.samples);
  const double ratio = opt.ratio.value_or(cfg.refine.ratio);
  const int steps = opt.steps.value_or(cfg.refine.steps);
  if (!(ratio > 0.0 && ratio <= 1.0)) throw ConfigError("--ratio: must be in (0, 1]");
  if (steps < 1) throw ConfigError("--steps: must be >= 1");
  std::vector<TokenGrid> grids;
  std::vector<int> labels;
  for (const LabeledGrid& g : input) {
    if (g.grid.shape != world.shape() || !g.grid.complete(world.vocab())) {
      throw ConfigError("--samples: grids must be complete and match the world shape");
    }
    if (g.label < 0 || g.label >= world.num_classes()) throw ConfigError("--samples: bad class");
    grids.push_back(g.grid);
    labels.push_back(g.label);
  }
  const auto refined = refine_many(generator, critic, grids, labels, ratio, steps,
                                   cfg.sampler.schedule, derive_seed(cfg.seed, "refine"),
                                   opt.workers);
  const std::vector<TokenGrid> out_grids = grids_of(refined);
  write_samples(ctx.out / "refined.jsonl", ctx.prov, labeled(out_grids, labels, world.shape()));
  CsvWriter csv(ctx.out / "refine_metrics.csv", ctx.prov, {"metric", "value"});
  const double before = mean_nll(world, grids, labels);
  const double after = mean_nll(world, out_grids, labels);
  csv.cell("ratio").cell(ratio).end_row();
  csv.cell("steps").cell(steps).end_row();
  csv.cell("samples").cell(grids.size()).end_row();
  csv.cell("mean_oracle_nll_before").cell(before).end_row();
  csv.cell("mean_oracle_nll_after").cell(after).end_row();
  csv.cell("delta").cell(after - before).end_row();
  csv.close();
  std::cout << (ctx.out / "refined.jsonl").string() << "\n";
  return kOk;
}

int cmd_reject(const CommandOptions& opt) {
  Context ctx = setup(opt, "reject");
  const RunConfig& cfg = ctx.config;
  SyntheticWorld world(cfg.world);
  SamplerConfig sc = cfg.sampler;
  if (opt.selector) sc.selector = parse_selector(*opt.selector);
  if (opt.steps) sc.schedule.total_steps = *opt.steps;
  sc.seed = derive_seed(cfg.seed, "reject");
  sc.validate();
  const double rate = opt.accept_rate.value_or(cfg.reject.accept_rate);
  if (!(rate > 0.0 && rate <= 1.0)) throw ConfigError("--accept-rate: must be in (0, 1]");
  const int m = candidates_for_rate(rate);
  const int n = opt.n.value_or(cfg.samples);
  if (n < 0) throw ConfigError("--n: must be >= 0");
  const std::vector<int> labels = labels_for(cfg, world, static_cast<std::size_t>(n), opt.label);
  std::vector<int> pool_labels;
  pool_labels.reserve(labels.size() * static_cast<std::size_t>(m));
  for (int c : labels) pool_labels.insert(pool_labels.end(), static_cast<std::size_t>(m), c);

  std::optional<GeneratorModel> generator;
  std::optional<CriticModel> critic;
  if (sc.selector != Selector::oracle_conditional) generator = load_generator(opt, cfg);
  if (sc.selector == Selector::critic) critic = load_critic(opt, cfg);
  const auto pool = grids_of(draw(world, generator ? &*generator : nullptr,
                                  critic ? &*critic : nullptr, sc, pool_labels, false, opt.workers));
  const ClassifierFn classifier = [&](const TokenGrid& g) { return world.class_posterior(g).probs; };
  std::vector<TokenGrid> chosen;
  chosen.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    std::span<const TokenGrid> cands(pool.data() + i * static_cast<std::size_t>(m),
                                     static_cast<std::size_t>(m));
    chosen.push_back(cands[best_candidate(cands, classifier, labels[i])]);
  }
  write_samples(ctx.out / "samples.jsonl", ctx.prov, labeled(chosen, labels, world.shape()));
  std::cout << (ctx.out / "samples.jsonl").string() << "\n";
  return kOk;
}

int run_guarded(const std::string& command, int (*fn)(const CommandOptions&),
                const CommandOptions& opt) {
  try {
    omp_set_num_threads(std::max(1, opt.workers));
    return fn(opt);
  } catch (const ConfigError& e) {
    std::cerr << command << ": config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DivergenceError& e) {
    std::cerr << command << ": training diverged at step " << e.step() << ": " << e.what() << "\n";
    return kDivergence;
  } catch (const IoError& e) {
    std::cerr << command << ": I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const DomainError& e) {
    std::cerr << command << ": invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const ShapeError& e) {
    std::cerr << command << ": invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << command << ": error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace tcl::cli
