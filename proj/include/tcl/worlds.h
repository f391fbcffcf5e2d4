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

#ifndef TCL_WORLDS_H_
#define TCL_WORLDS_H_

// Synthetic class-conditional token distributions small enough to enumerate.
// Every class has a dense probability table over K^N states; state indices are
// mixed-radix with position 0 as the most significant digit.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcl/rng.h"
#include "tcl/tokenspace.h"

namespace tcl {

inline constexpr std::size_t kMaxWorldStates = 10'000'000;

enum class WorldKind { pattern, potts };

struct WorldSpec {
  std::string name;
  WorldKind kind = WorldKind::potts;
  GridShape shape;
  int vocab_size = 0;
  int num_classes = 0;
  std::vector<double> class_prior;  // empty means uniform
  // pattern: one base grid per class; each cell independently replaced by a
  // uniform random code with probability `corruption`.
  std::vector<std::vector<Token>> patterns;
  double corruption = 0.0;
  // potts: p(x | c) proportional to exp(J_c * #agreeing nearest-neighbour pairs).
  std::vector<double> couplings;

  void validate() const;  // throws ConfigError naming the field
  std::size_t state_count() const;
  nlohmann::json to_json() const;
  static WorldSpec from_json(const nlohmann::json& j);
};

// 3x3, K=5, C=4: horizontal stripes, vertical stripes, checkerboard, diagonal;
// per-cell corruption 0.1.
WorldSpec world_a();
// 3x3, K=4, C=2 Potts with J = +0.8 and -0.8.
WorldSpec world_b();
WorldSpec potts_world(GridShape shape, int vocab_size, std::vector<double> couplings);

struct JointTable {
  int label = 0;
  std::vector<double> probs;
};

// Dense table for class c. Throws DomainError with a memory estimate when the
// state space exceeds kMaxWorldStates.
JointTable enumerate_joint(const WorldSpec& spec, int label);

namespace serial {
JointTable enumerate_joint(const WorldSpec& spec, int label);
}  // namespace serial

struct ClassPosterior {
  std::vector<double> probs;
  bool degenerate = false;  // grid impossible under every class; probs uniform
};

class SyntheticWorld {
 public:
  explicit SyntheticWorld(WorldSpec spec);

  const WorldSpec& spec() const { return spec_; }
  Vocabulary vocab() const { return {spec_.vocab_size}; }
  GridShape shape() const { return spec_.shape; }
  std::size_t positions() const { return spec_.shape.count(); }
  int num_classes() const { return spec_.num_classes; }
  std::size_t state_count() const { return state_count_; }
  const std::vector<double>& prior() const { return prior_; }
  const JointTable& joint(int label) const;

  std::size_t state_index(std::span<const Token> tokens) const;
  TokenGrid decode(std::size_t state) const;
  double prob(int label, std::span<const Token> tokens) const;

  // Class from the prior, then a state by inverse CDF over the dense table.
  LabeledGrid sample(Rng& rng) const;
  TokenGrid sample_class(int label, Rng& rng) const;

  // q(visible assignment | c): the table summed over the [MASK] positions.
  double evidence(int label, const TokenGrid& partial) const;
  // q(x_j = k | visible, c) for k in 0..K-1. Position j must be masked.
  // Throws DomainError("impossible evidence") when the evidence has zero mass.
  std::vector<double> exact_conditional(int label, const TokenGrid& partial,
                                        std::size_t j) const;
  // Same, with the class marginalised out using the prior.
  std::vector<double> class_free_conditional(const TokenGrid& partial,
                                             std::size_t j) const;
  ClassPosterior class_posterior(const TokenGrid& x0) const;

 private:
  void check_label(int label) const;
  // Pattern worlds factorise given the class.
  double cell_prob(int label, std::size_t pos, Token t) const;

  WorldSpec spec_;
  std::size_t state_count_ = 0;
  std::vector<double> prior_;
  std::vector<JointTable> tables_;
  std::vector<std::vector<double>> cdfs_;
};

// Exact ancestral sampler revealing positions in a fixed order, each drawn
// from q(x_j | revealed, c). Prefix marginals are precomputed, so a draw is
// O(N K).
class AncestralOracle {
 public:
  AncestralOracle(const SyntheticWorld& world, std::vector<std::size_t> order);
  TokenGrid sample(int label, Rng& rng) const;
  const std::vector<std::size_t>& order() const { return order_; }

 private:
  const SyntheticWorld* world_;
  std::vector<std::size_t> order_;
  // prefix_[c][j] has K^j entries: mass of the first j positions in order.
  std::vector<std::vector<std::vector<double>>> prefix_;
};

}  // namespace tcl

#endif  // TCL_WORLDS_H_
