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

#include "tcl/numerics/optim.h"

#include <cmath>

#include "tcl/error.h"

namespace tcl {

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("optimizer.learning_rate must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0)) throw ConfigError("optimizer.beta1 must be in (0,1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw ConfigError("optimizer.beta2 must be in (0,1)");
  if (!(epsilon > 0.0)) throw ConfigError("optimizer.epsilon must be positive");
  if (!(weight_decay >= 0.0)) throw ConfigError("optimizer.weight_decay must be nonnegative");
}

Adam::Adam(OptimizerConfig config) : config_(config) { config_.validate(); }

void zero_grads(std::span<Parameter> params) {
  for (Parameter& p : params) {
    if (!p.grad.same_shape(p.value)) {
      p.grad = Tensor::zeros_like(p.value);
    } else {
      p.grad.fill(0.0);
    }
  }
}

void Adam::step(std::span<Parameter> params, std::size_t step_index) {
  if (step_index == 0) throw DomainError("adam step index is 1-based");
  if (first_.empty()) {
    for (const Parameter& p : params) {
      first_.push_back(Tensor::zeros_like(p.value));
      second_.push_back(Tensor::zeros_like(p.value));
    }
  }
  if (first_.size() != params.size()) {
    throw DomainError("adam: parameter list changed between steps");
  }
  for (const Parameter& p : params) {
    if (p.grad.same_shape(p.value) && !p.grad.all_finite()) {
      throw DomainError("non-finite gradient in parameter '" + p.name + "'");
    }
  }
  const double t = static_cast<double>(step_index);
  const double c1 = 1.0 - std::pow(config_.beta1, t);
  const double c2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params[i];
    if (!p.grad.same_shape(p.value)) continue;  // untouched by backward
    Tensor& m = first_[i];
    Tensor& v = second_[i];
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const double g = p.grad[j];
      m[j] = config_.beta1 * m[j] + (1.0 - config_.beta1) * g;
      v[j] = config_.beta2 * v[j] + (1.0 - config_.beta2) * g * g;
      const double mhat = m[j] / c1;
      const double vhat = v[j] / c2;
      p.value[j] -= config_.learning_rate *
                    (mhat / (std::sqrt(vhat) + config_.epsilon) +
                     config_.weight_decay * p.value[j]);
    }
  }
  zero_grads(params);
}

}  // namespace tcl
