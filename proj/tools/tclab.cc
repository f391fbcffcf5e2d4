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

// tclab: train, sample and evaluate masked token generators and critics on
// synthetic worlds.

#include <string>

#include "CLI11.hpp"
#include "tcl/cli/commands.h"

namespace {

using tcl::cli::CommandOptions;

void add_common(CLI::App* sub, CommandOptions& opt) {
  sub->add_option("--config", opt.config_path, "Run configuration (JSON)");
  sub->add_option("--seed", opt.seed, "Global seed (overrides the config)");
  sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
  sub->add_option("--workers", opt.workers, "Worker threads")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tclab: masked token generation with a learned critic"};
  app.require_subcommand(1);
  CommandOptions opt;

  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const CommandOptions&);
  };
  const Entry entries[] = {
      {"train-generator", "Train the masked token generator", tcl::cli::cmd_train_generator},
      {"train-critic", "Train the critic against a frozen generator", tcl::cli::cmd_train_critic},
      {"sample", "Draw samples", tcl::cli::cmd_sample},
      {"eval", "Compare samples of one class with the exact joint", tcl::cli::cmd_eval},
      {"compare", "Critic sampler at T against the confidence baseline at 2T",
       tcl::cli::cmd_compare},
      {"sweep", "Quality/diversity sweep over temperature and noise", tcl::cli::cmd_sweep},
      {"refine", "Re-mask and re-decode low-scoring tokens of existing samples",
       tcl::cli::cmd_refine},
      {"reject", "Classifier-based rejection sampling", tcl::cli::cmd_reject},
  };
  std::vector<std::pair<CLI::App*, const Entry*>> subs;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, opt);
    const std::string name = e.name;
    if (name != "train-generator" && name != "eval") {
      sub->add_option("--generator", opt.generator, "Generator checkpoint (.tclw)");
    }
    if (name == "sample" || name == "compare" || name == "sweep" || name == "refine" ||
        name == "reject") {
      sub->add_option("--critic", opt.critic, "Critic checkpoint (.tclw)");
    }
    if (name == "sample" || name == "reject") {
      sub->add_option("--selector", opt.selector,
                      "critic | confidence | random | oracle_conditional");
      sub->add_option("--label", opt.label, "Class for every sample (default: prior)");
    }
    if (name == "sample" || name == "reject" || name == "compare" || name == "sweep") {
      sub->add_option("--n", opt.n, "Number of samples");
    }
    if (name == "sample" || name == "reject" || name == "compare" || name == "refine") {
      sub->add_option("--steps", opt.steps, "Decoding steps");
    }
    if (name == "sample") sub->add_flag("--trace", opt.trace, "Also write per-step traces");
    if (name == "eval" || name == "refine") {
      sub->add_option("--samples", opt.samples, "Input samples (JSON Lines)")->required();
    }
    if (name == "eval") sub->add_option("--class", opt.label, "Expected class");
    if (name == "refine") sub->add_option("--ratio", opt.ratio, "Fraction re-masked first");
    if (name == "reject") {
      sub->add_option("--accept-rate", opt.accept_rate, "1/n for n candidates per sample");
    }
    subs.emplace_back(sub, &e);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tcl::cli::kConfigError;
  }
  for (const auto& [sub, entry] : subs) {
    if (sub->parsed()) return tcl::cli::run_guarded(entry->name, entry->fn, opt);
  }
  return tcl::cli::kConfigError;
}
