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

#ifndef TCL_TESTS_SUPPORT_GRADCHECK_H_
#define TCL_TESTS_SUPPORT_GRADCHECK_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "tcl/numerics/autograd.h"
#include "tcl/numerics/tensor.h"
#include "tcl/rng.h"

namespace tcl::testing {

inline constexpr double kFdStep = 1e-5;
inline constexpr double kFdTolerance = 1e-4;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

// Compares backward() against central differences for every element of
// every parameter. `loss` must build a scalar on the given tape using
// tape.parameter(p) for each p in `params`.
GradCheckResult grad_check(std::vector<Parameter>& params,
                           const std::function<Var(Tape&)>& loss,
                           double step = kFdStep);

// |a - n| / max(|a|, |n|, 1e-6)
double relative_error(double analytic, double numeric);

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double scale = 1.0);
Parameter make_parameter(std::string name, Tensor value);

}  // namespace tcl::testing

#endif  // TCL_TESTS_SUPPORT_GRADCHECK_H_
