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

#include "tcl/numerics/autograd.h"

#include "tcl/error.h"

namespace tcl {

const Tensor& Var::value() const { return tape_->value(*this); }
const Tensor& Var::grad() const { return tape_->grad(*this); }

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::parameter(Parameter& p) {
  Node n;
  n.value = p.value;
  n.needs_grad = recording_;
  n.param = &p;
  return push(std::move(n));
}

Var Tape::record(Tensor value, std::initializer_list<Var> inputs,
                 Backward backward) {
  return record(std::move(value), std::vector<Var>(inputs), std::move(backward));
}

Var Tape::record(Tensor value, const std::vector<Var>& inputs,
                 Backward backward) {
  Node n;
  n.value = std::move(value);
  if (recording_) {
    for (const Var& in : inputs) {
      if (in.tape() != this) {
        throw DomainError("op input belongs to a different tape");
      }
      n.needs_grad = n.needs_grad || nodes_[in.id()].needs_grad;
    }
    if (n.needs_grad) n.backward = std::move(backward);
  }
  return push(std::move(n));
}

Tensor& Tape::grad_buffer(Var v) {
  Node& n = nodes_[v.id()];
  if (n.grad.size() != n.value.size() || !n.grad.same_shape(n.value)) {
    n.grad = Tensor::zeros_like(n.value);
  }
  return n.grad;
}

void Tape::backward(Var loss) {
  if (loss.tape() != this) throw DomainError("loss belongs to a different tape");
  if (nodes_[loss.id()].value.size() != 1) {
    throw DomainError("backward requires a scalar loss, got shape " +
                      nodes_[loss.id()].value.shape_string());
  }
  if (!recording_) throw DomainError("backward on a tape that does not record");
  grad_buffer(loss)[0] = 1.0;
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.needs_grad || n.grad.size() == 0) continue;
    if (n.param != nullptr) {
      Parameter& p = *n.param;
      if (!p.grad.same_shape(p.value)) p.grad = Tensor::zeros_like(p.value);
      for (std::size_t j = 0; j < p.grad.size(); ++j) p.grad[j] += n.grad[j];
    } else if (n.backward) {
      n.backward(*this, n.grad, n.value);
    }
  }
}

}  // namespace tcl
