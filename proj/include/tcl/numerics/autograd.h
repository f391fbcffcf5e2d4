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

#ifndef TCL_NUMERICS_AUTOGRAD_H_
#define TCL_NUMERICS_AUTOGRAD_H_

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include "tcl/numerics/tensor.h"

namespace tcl {

// A trainable tensor with its accumulated gradient.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;  // same shape as value once touched by backward()
};

class Tape;

// Handle to a node on a Tape. Cheap to copy; only valid while the tape lives.
class Var {
 public:
  Var() = default;
  const Tensor& value() const;
  const Tensor& grad() const;
  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Define-by-run computation graph. Nodes are appended in evaluation order,
// which is already a topological order, so backward() is one reverse sweep.
// A tape built with record_gradients=false stores values only (inference).
class Tape {
 public:
  using Backward = std::function<void(Tape&, const Tensor& out_grad,
                                      const Tensor& out_value)>;

  explicit Tape(bool record_gradients = true) : recording_(record_gradients) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return recording_; }

  Var constant(Tensor value);
  // Leaf whose gradient is added into p.grad during backward().
  Var parameter(Parameter& p);
  // Appends an op result. `backward` is dropped when no input needs a
  // gradient or the tape is not recording.
  Var record(Tensor value, std::initializer_list<Var> inputs, Backward backward);
  Var record(Tensor value, const std::vector<Var>& inputs, Backward backward);

  bool needs_grad(Var v) const { return nodes_[v.id()].needs_grad; }
  const Tensor& value(Var v) const { return nodes_[v.id()].value; }
  const Tensor& grad(Var v) const { return nodes_[v.id()].grad; }
  // Gradient buffer of v, zero-initialised on first use.
  Tensor& grad_buffer(Var v);

  // Seeds d(loss)/d(loss) = 1 and propagates to every reachable parameter.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool needs_grad = false;
    Backward backward;
    Parameter* param = nullptr;
  };

  Var push(Node node);

  bool recording_;
  std::vector<Node> nodes_;
};

}  // namespace tcl

#endif  // TCL_NUMERICS_AUTOGRAD_H_
