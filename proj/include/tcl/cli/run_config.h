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

#ifndef TCL_CLI_RUN_CONFIG_H_
#define TCL_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcl/learn.h"
#include "tcl/nets.h"
#include "tcl/sampler.h"
#include "tcl/worlds.h"

namespace tcl::cli {

struct SweepGrid {
  std::vector<double> temp_intercept = {0.25, 0.5, 1.0};
  std::vector<double> noise_scale = {0.0, 2.0, 4.0, 8.0};
  std::vector<int> steps = {6};
  std::vector<Selector> selectors = {Selector::critic, Selector::confidence};
  int samples = 10000;
};

struct CompareSettings {
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  int samples = 100000;
  int steps = 6;  // the baseline runs at twice this
};

struct RefineSettings {
  double ratio = 0.6;
  int steps = 9;
};

struct RejectSettings {
  double accept_rate = 0.2;
};

// Everything a command needs. Loaded from JSON; missing keys take defaults.
struct RunConfig {
  WorldSpec world;
  TransformerConfig generator;
  TransformerConfig critic;
  TrainConfig train_generator;
  TrainConfig train_critic;
  SamplerConfig sampler;
  SweepGrid sweep;
  CompareSettings compare;
  RefineSettings refine;
  RejectSettings reject;
  int samples = 1000;
  int label = -1;  // -1: labels follow the class prior
  std::uint64_t seed = 0;

  void validate() const;
  // Canonical form: every field present, keys sorted. The seed is kept out
  // so the hash identifies the configuration alone.
  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig defaults();
  static RunConfig load(const std::filesystem::path& path);
};

std::string canonical_dump(const nlohmann::json& j);
// 16 hex digits of FNV-1a over the canonical serialisation.
std::string config_hash(const RunConfig& config);

}  // namespace tcl::cli

#endif  // TCL_CLI_RUN_CONFIG_H_
