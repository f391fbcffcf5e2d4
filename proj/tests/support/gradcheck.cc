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

#include "gradcheck.h"

#include <algorithm>
#include <cmath>

namespace tcl::testing {

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-6});
  return std::fabs(analytic - numeric) / denom;
}

GradCheckResult grad_check(std::vector<Parameter>& params, const std::function<Var(Tape&)>& loss,
                           double step) {
  for (auto& p : params) p.grad = Tensor(p.value.shape(), 0.0);
  {
    Tape tape;
    Var l = loss(tape);
    tape.backward(l);
  }
  GradCheckResult result;
  auto eval = [&] {
    Tape tape(false);
    return loss(tape).value()[0];
  };
  for (auto& p : params) {
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double saved = p.value[i];
      p.value[i] = saved + step;
      const double up = eval();
      p.value[i] = saved - step;
      const double down = eval();
      p.value[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      result.max_rel_error = std::max(result.max_rel_error, relative_error(p.grad[i], numeric));
      ++result.checked;
    }
  }
  return result;
}

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double scale) {
  Tensor t(std::move(shape), 0.0);
  for (double& v : t.data()) v = scale * rng.uniform(-1.0, 1.0);
  return t;
}

Parameter make_parameter(std::string name, Tensor value) {
  Parameter p;
  p.name = std::move(name);
  p.grad = Tensor(value.shape(), 0.0);
  p.value = std::move(value);
  return p;
}

}  // namespace tcl::testing
