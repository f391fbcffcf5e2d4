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


#ifndef TCL_TESTS_SUPPORT_OP_CASES_H_
#define TCL_TESTS_SUPPORT_OP_CASES_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gradcheck.h"
#include "tcl/nets.h"

namespace tcl::testing {

// One differentiable op with a random-input factory. The body maps the
// parameter vars to the op output.
struct OpCase {
  std::string name;
  std::function<std::vector<Parameter>(Rng&)> make;
  std::function<Var(Tape&, std::vector<Var>&)> body;
};

const std::vector<OpCase>& op_cases();

// Finite-difference check over `instances` random draws of one op.
std::vector<GradCheckResult> check_op_case(const OpCase& op, int instances);

// 2 layers, 2 heads, d=4, f=6, N=4, K=3, two classes, weights uniform in +-0.5.
// The generator check runs with dropout 0.2 under a fixed mask seed.
GradCheckResult check_generator_miniature(std::uint64_t seed);
GradCheckResult check_critic_miniature(std::uint64_t seed);

}  // namespace tcl::testing

#endif  // TCL_TESTS_SUPPORT_OP_CASES_H_
