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

#ifndef TCL_NETS_H_
#define TCL_NETS_H_

// The masked-token generator and the token critic. Both are the same
// pre-LayerNorm bidirectional transformer over [class token, x_1 .. x_N]
// with learnable positional embeddings; they differ in input vocabulary
// (the generator also embeds [MASK]) and output head.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "json.hpp"
#include "tcl/numerics/autograd.h"
#include "tcl/numerics/tensor.h"
#include "tcl/rng.h"
#include "tcl/tokenspace.h"

namespace tcl {

enum class HeadKind { categorical, binary };

struct TransformerConfig {
  int layers = 4;
  int heads = 4;
  int embed_dim = 128;
  int hidden_dim = 512;
  int positions = 9;       // N grid tokens; the class token is extra
  int max_positions = 10;  // >= N + 1
  int vocab_in = 6;        // K + 1 for the generator, K for the critic
  int num_classes = 1;
  HeadKind head = HeadKind::categorical;
  int outputs = 5;         // K for categorical, 1 for binary
  double dropout = 0.1;

  void validate() const;  // throws ConfigError naming the field
  nlohmann::json to_json() const;
  static TransformerConfig from_json(const nlohmann::json& j);
};

// Desk-scale defaults: generator 4 layers / 4 heads / 128 / 512, critic
// 3 layers / 4 heads / 96 / 384.
TransformerConfig generator_config(int positions, int vocab_size, int num_classes);
TransformerConfig critic_config(int positions, int vocab_size, int num_classes);

class Transformer {
 public:
  Transformer(TransformerConfig config, std::uint64_t init_seed);

  const TransformerConfig& config() const { return config_; }
  std::vector<Parameter>& parameters() { return params_; }
  const std::vector<Parameter>& parameters() const { return params_; }
  Parameter& parameter(const std::string& name);

  // Training forward: parameters are trainable leaves on `tape`. tokens holds
  // batch * N ids, classes one label per sequence. Returns [batch*N, outputs].
  Var forward(Tape& tape, std::span<const Token> tokens, std::span<const int> classes,
              Rng* dropout_rng);
  // Inference forward with dropout off. Same output layout.
  Tensor infer(std::span<const Token> tokens, std::span<const int> classes) const;

  std::uint64_t checksum() const;

 private:
  Var build(Tape& tape, const std::vector<Var>& leaves, std::span<const Token> tokens,
            std::span<const int> classes, Rng* dropout_rng) const;
  void check_inputs(std::span<const Token> tokens, std::span<const int> classes) const;

  TransformerConfig config_;
  std::vector<Parameter> params_;
};

struct GeneratorModel {
  Transformer net;
  Vocabulary vocab() const { return {net.config().outputs}; }
};

struct CriticModel {
  Transformer net;
  Vocabulary vocab() const { return {net.config().vocab_in}; }
};

GeneratorModel make_generator(const TransformerConfig& config, std::uint64_t seed);
CriticModel make_critic(const TransformerConfig& config, std::uint64_t seed);

// Logits [N, K] for one grid that may contain [MASK].
Tensor generator_forward(const GeneratorModel& model, const TokenGrid& x_t, int label);
// One logit per position for a complete grid. [MASK] is rejected.
Tensor critic_forward(const CriticModel& model, const TokenGrid& x_hat0, int label);

// Batched versions: tokens is batch * N, one label per grid.
Tensor generator_logits(const GeneratorModel& model, std::span<const Token> tokens,
                        std::span<const int> classes);
Tensor critic_logits(const CriticModel& model, std::span<const Token> tokens,
                     std::span<const int> classes);

inline constexpr double kArgmaxTemperature = 1e-6;

struct TokenDraw {
  Token token = 0;
  double prob = 0.0;  // probability of `token` under softmax(logits), T = 1
};

// One categorical draw from softmax(logits / temperature); argmax when the
// temperature is below kArgmaxTemperature. A -inf logit has probability 0.
TokenDraw sample_token(std::span<const double> logits, double temperature, Rng& rng);

// Draws each requested row of logits [N, K] independently.
std::vector<Token> sample_tokens(const Tensor& logits, double temperature, Rng& rng,
                                 std::span<const std::size_t> positions);

double sigmoid(double x);

// Weights file plus a JSON sidecar (same basename, .json) holding the model
// config and caller-supplied metadata.
void save_checkpoint(const std::filesystem::path& weights_path, const Transformer& net,
                     const nlohmann::json& metadata);
struct LoadedCheckpoint {
  Transformer net;
  nlohmann::json metadata;
};
LoadedCheckpoint load_checkpoint(const std::filesystem::path& weights_path);
std::filesystem::path sidecar_path(const std::filesystem::path& weights_path);

}  // namespace tcl

#endif  // TCL_NETS_H_
