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

#ifndef TCL_NUMERICS_OPS_H_
#define TCL_NUMERICS_OPS_H_

// Differentiable ops over Tape variables. Shapes are checked eagerly and a
// mismatch throws ShapeError naming the shapes involved. Matrices are 2-D;
// "row" ops treat a rank-1 tensor as a single row.

#include <cstddef>
#include <span>
#include <vector>

#include "tcl/numerics/autograd.h"
#include "tcl/rng.h"

namespace tcl::ops {

inline constexpr double kLayerNormEpsilon = 1e-6;

Var matmul(Var a, Var b);                 // [m,k] x [k,n]
Var add(Var a, Var b);                    // same shape
Var add_bias(Var x, Var bias);            // [m,n] + [n] broadcast over rows
Var multiply(Var a, Var b);               // elementwise, same shape
Var scale(Var a, double factor);
Var linear(Var x, Var weight, Var bias);  // x [m,k] W [k,n] + b [n]
Var gelu(Var x);                          // exact erf form
Var softmax(Var x);                       // row-wise
Var layer_norm(Var x, Var gamma, Var beta,
               double epsilon = kLayerNormEpsilon);  // row-wise
// Rows of `table` selected by `indices`; also used to gather activations.
Var embedding(Var table, std::span<const int> indices);
Var concat(const std::vector<Var>& parts, std::size_t axis);  // axis 0 or 1
Var slice(Var x, std::size_t axis, std::size_t begin, std::size_t end);
Var sum(Var x);
// Inverted dropout. Identity when rate == 0 or rng == nullptr.
Var dropout(Var x, double rate, Rng* rng);

// Bidirectional multi-head attention over `batch` sequences of `seq` rows
// each: q, k, v are [batch*seq, d]; heads split the columns evenly.
Var attention(Var q, Var k, Var v, std::size_t batch, std::size_t seq,
              std::size_t heads);

// Weighted mean of -log softmax(logits)[target] over rows with weight > 0.
// Throws DomainError("no supervised positions") when all weights are zero.
Var cross_entropy(Var logits, std::span<const int> targets,
                  std::span<const double> weights);

// Mean binary cross-entropy on raw logits, log-sum-exp stable form.
Var bce_with_logits(Var logits, std::span<const double> targets);

}  // namespace tcl::ops

#endif  // TCL_NUMERICS_OPS_H_
