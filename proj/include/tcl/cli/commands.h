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

#ifndef TCL_CLI_COMMANDS_H_
#define TCL_CLI_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <string>

namespace tcl::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kDivergence = 3,
  kIoError = 4,
};

struct CommandOptions {
  std::string config_path;  // empty: defaults
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  int workers = 1;

  std::string generator;  // checkpoint paths
  std::string critic;
  std::string samples;    // input JSONL for eval / refine
  std::optional<std::string> selector;
  std::optional<int> n;
  std::optional<int> steps;
  std::optional<int> label;
  std::optional<double> ratio;
  std::optional<double> accept_rate;
  bool trace = false;
};

int cmd_train_generator(const CommandOptions& opt);
int cmd_train_critic(const CommandOptions& opt);
int cmd_sample(const CommandOptions& opt);
int cmd_eval(const CommandOptions& opt);
int cmd_compare(const CommandOptions& opt);
int cmd_sweep(const CommandOptions& opt);
int cmd_refine(const CommandOptions& opt);
int cmd_reject(const CommandOptions& opt);

// Runs `fn`, mapping library errors onto exit codes and printing the message.
int run_guarded(const std::string& command, int (*fn)(const CommandOptions&),
                const CommandOptions& opt);

}  // namespace tcl::cli

#endif  // TCL_CLI_COMMANDS_H_
