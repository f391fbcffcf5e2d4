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

#ifndef TCL_NUMERICS_OPTIM_H_
#define TCL_NUMERICS_OPTIM_H_

#include <cstddef>
#include <span>
#include <vector>

#include "tcl/numerics/autograd.h"

namespace tcl {

struct OptimizerConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.96;
  double epsilon = 1e-8;
  double weight_decay = 0.0;  // decoupled, applied as lr * wd * p

  void validate() const;  // throws ConfigError naming the field
};

// Adam with bias correction. Holds first/second moments per parameter, in the
// order the parameters are passed to step().
class Adam {
 public:
  explicit Adam(OptimizerConfig config);

  // One update using the gradients in `params`; clears the gradients after.
  // step_index is 1-based. A non-finite gradient throws DomainError naming
  // the parameter before any parameter is modified.
  void step(std::span<Parameter> params, std::size_t step_index);

  const OptimizerConfig& config() const { return config_; }

 private:
  OptimizerConfig config_;
  std::vector<Tensor> first_;
  std::vector<Tensor> second_;
};

void zero_grads(std::span<Parameter> params);

}  // namespace tcl

#endif  // TCL_NUMERICS_OPTIM_H_
