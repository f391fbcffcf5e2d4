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

#include "tcl/nets.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <utility>

#include "tcl/error.h"
#include "tcl/numerics/ops.h"
#include "tcl/numerics/weights_io.h"

namespace tcl {

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError("model." + field + ": " + what);
}

HeadKind parse_head(const std::string& s) {
  if (s == "categorical") return HeadKind::categorical;
  if (s == "binary") return HeadKind::binary;
  throw ConfigError("model.head: unknown head '" + s + "'");
}

const char* head_name(HeadKind h) {
  return h == HeadKind::categorical ? "categorical" : "binary";
}

Parameter make_param(std::string name, std::vector<std::size_t> shape) {
  Parameter p;
  p.name = std::move(name);
  p.value = Tensor(shape, 0.0);
  p.grad = Tensor(std::move(shape), 0.0);
  return p;
}

// Per-layer parameter block offsets.
constexpr std::size_t kPerLayer = 12;
constexpr std::size_t kFirstLayer = 3;

}  // namespace

void TransformerConfig::validate() const {
  require(layers >= 1, "layers", "must be >= 1");
  require(heads >= 1, "heads", "must be >= 1");
  require(embed_dim >= 1, "embed_dim", "must be >= 1");
  require(embed_dim % heads == 0, "embed_dim", "must be divisible by heads");
  require(hidden_dim >= 1, "hidden_dim", "must be >= 1");
  require(positions >= 1, "positions", "must be >= 1");
  require(max_positions >= positions + 1, "max_positions", "must be >= positions + 1");
  require(vocab_in >= 2, "vocab_in", "must be >= 2");
  require(num_classes >= 1, "num_classes", "must be >= 1");
  if (head == HeadKind::categorical) {
    require(outputs >= 2, "outputs", "categorical head needs >= 2 outputs");
  } else {
    require(outputs == 1, "outputs", "binary head has exactly 1 output");
  }
  require(dropout >= 0.0 && dropout < 1.0, "dropout", "must be in [0, 1)");
}

nlohmann::json TransformerConfig::to_json() const {
  return {{"layers", layers},         {"heads", heads},
          {"embed_dim", embed_dim},   {"hidden_dim", hidden_dim},
          {"positions", positions},   {"max_positions", max_positions},
          {"vocab_in", vocab_in},     {"num_classes", num_classes},
          {"head", head_name(head)},  {"outputs", outputs},
          {"dropout", dropout}};
}

TransformerConfig TransformerConfig::from_json(const nlohmann::json& j) {
  TransformerConfig c;
  try {
    c.layers = j.value("layers", c.layers);
    c.heads = j.value("heads", c.heads);
    c.embed_dim = j.value("embed_dim", c.embed_dim);
    c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
    c.positions = j.value("positions", c.positions);
    c.max_positions = j.value("max_positions", c.positions + 1);
    c.vocab_in = j.value("vocab_in", c.vocab_in);
    c.num_classes = j.value("num_classes", c.num_classes);
    c.head = parse_head(j.value("head", std::string(head_name(c.head))));
    c.outputs = j.value("outputs", c.outputs);
    c.dropout = j.value("dropout", c.dropout);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  c.validate();
  return c;
}

TransformerConfig generator_config(int positions, int vocab_size, int num_classes) {
  TransformerConfig c;
  c.layers = 4;
  c.heads = 4;
  c.embed_dim = 128;
  c.hidden_dim = 512;
  c.positions = positions;
  c.max_positions = positions + 1;
  c.vocab_in = vocab_size + 1;
  c.num_classes = num_classes;
  c.head = HeadKind::categorical;
  c.outputs = vocab_size;
  return c;
}

TransformerConfig critic_config(int positions, int vocab_size, int num_classes) {
  TransformerConfig c;
  c.layers = 3;
  c.heads = 4;
  c.embed_dim = 96;
  c.hidden_dim = 384;
  c.positions = positions;
  c.max_positions = positions + 1;
  c.vocab_in = vocab_size;
  c.num_classes = num_classes;
  c.head = HeadKind::binary;
  c.outputs = 1;
  return c;
}

Transformer::Transformer(TransformerConfig config, std::uint64_t init_seed)
    : config_(std::move(config)) {
  config_.validate();
  const auto d = static_cast<std::size_t>(config_.embed_dim);
  const auto f = static_cast<std::size_t>(config_.hidden_dim);
  params_.push_back(make_param("tok_emb", {static_cast<std::size_t>(config_.vocab_in), d}));
  params_.push_back(make_param("cls_emb", {static_cast<std::size_t>(config_.num_classes), d}));
  params_.push_back(make_param("pos_emb", {static_cast<std::size_t>(config_.max_positions), d}));
  for (int l = 0; l < config_.layers; ++l) {
    const std::string p = "block" + std::to_string(l) + ".";
    params_.push_back(make_param(p + "ln1.gamma", {d}));
    params_.push_back(make_param(p + "ln1.beta", {d}));
    params_.push_back(make_param(p + "attn.qkv.weight", {d, 3 * d}));
    params_.push_back(make_param(p + "attn.qkv.bias", {3 * d}));
    params_.push_back(make_param(p + "attn.out.weight", {d, d}));
    params_.push_back(make_param(p + "attn.out.bias", {d}));
    params_.push_back(make_param(p + "ln2.gamma", {d}));
    params_.push_back(make_param(p + "ln2.beta", {d}));
    params_.push_back(make_param(p + "mlp.fc1.weight", {d, f}));
    params_.push_back(make_param(p + "mlp.fc1.bias", {f}));
    params_.push_back(make_param(p + "mlp.fc2.weight", {f, d}));
    params_.push_back(make_param(p + "mlp.fc2.bias", {d}));
  }
  params_.push_back(make_param("ln_f.gamma", {d}));
  params_.push_back(make_param("ln_f.beta", {d}));
  params_.push_back(
      make_param("head.weight", {d, static_cast<std::size_t>(config_.outputs)}));
  params_.push_back(make_param("head.bias", {static_cast<std::size_t>(config_.outputs)}));

  Rng rng(derive_seed(init_seed, "init"));
  for (auto& p : params_) {
    const std::string& n = p.name;
    const bool is_gamma = n.ends_with(".gamma");
    const bool is_zero = n.ends_with(".bias") || n.ends_with(".beta");
    for (double& v : p.value.data()) {
      v = is_gamma ? 1.0 : is_zero ? 0.0 : rng.truncated_normal(0.02);
    }
  }
}

Parameter& Transformer::parameter(const std::string& name) {
  for (auto& p : params_) {
    if (p.name == name) return p;
  }
  throw DomainError("no parameter named '" + name + "'");
}

void Transformer::check_inputs(std::span<const Token> tokens,
                               std::span<const int> classes) const {
  const auto n = static_cast<std::size_t>(config_.positions);
  if (classes.empty()) throw ShapeError("empty batch");
  if (tokens.size() != classes.size() * n) {
    throw ShapeError("expected " + std::to_string(classes.size() * n) + " tokens for a batch of " +
                     std::to_string(classes.size()) + ", got " + std::to_string(tokens.size()));
  }
  for (Token t : tokens) {
    if (t < 0 || t >= config_.vocab_in) {
      if (config_.head == HeadKind::binary && t == config_.vocab_in) {
        throw DomainError("critic input contains [MASK]; it scores complete grids only");
      }
      throw DomainError("token " + std::to_string(t) + " outside input vocabulary of size " +
                        std::to_string(config_.vocab_in));
    }
  }
  for (int c : classes) {
    if (c < 0 || c >= config_.num_classes) {
      throw DomainError("class label " + std::to_string(c) + " outside [0, " +
                        std::to_string(config_.num_classes) + ")");
    }
  }
}

Var Transformer::build(Tape& tape, const std::vector<Var>& w, std::span<const Token> tokens,
                       std::span<const int> classes, Rng* dropout_rng) const {
  const std::size_t batch = classes.size();
  const auto n = static_cast<std::size_t>(config_.positions);
  const std::size_t seq = n + 1;
  const auto d = static_cast<std::size_t>(config_.embed_dim);
  const double rate = dropout_rng ? config_.dropout : 0.0;

  Var tok = ops::embedding(w[0], tokens);
  Var cls = ops::embedding(w[1], classes);
  // Stack [cls rows; token rows] then reorder to per-sequence layout.
  Var stacked = ops::concat({cls, tok}, 0);
  std::vector<int> order(batch * seq);
  std::vector<int> pos_ids(batch * seq);
  for (std::size_t b = 0; b < batch; ++b) {
    order[b * seq] = static_cast<int>(b);
    pos_ids[b * seq] = 0;
    for (std::size_t j = 0; j < n; ++j) {
      order[b * seq + 1 + j] = static_cast<int>(batch + b * n + j);
      pos_ids[b * seq + 1 + j] = static_cast<int>(j + 1);
    }
  }
  Var h = ops::add(ops::embedding(stacked, order), ops::embedding(w[2], pos_ids));
  h = ops::dropout(h, rate, dropout_rng);
  (void)tape;

  for (int l = 0; l < config_.layers; ++l) {
    const std::size_t o = kFirstLayer + kPerLayer * static_cast<std::size_t>(l);
    Var a = ops::layer_norm(h, w[o + 0], w[o + 1]);
    Var qkv = ops::linear(a, w[o + 2], w[o + 3]);
    Var att = ops::attention(ops::slice(qkv, 1, 0, d), ops::slice(qkv, 1, d, 2 * d),
                             ops::slice(qkv, 1, 2 * d, 3 * d), batch, seq,
                             static_cast<std::size_t>(config_.heads));
    Var proj = ops::dropout(ops::linear(att, w[o + 4], w[o + 5]), rate, dropout_rng);
    h = ops::add(h, proj);
    Var a2 = ops::layer_norm(h, w[o + 6], w[o + 7]);
    Var mlp = ops::linear(ops::gelu(ops::linear(a2, w[o + 8], w[o + 9])), w[o + 10], w[o + 11]);
    h = ops::add(h, ops::dropout(mlp, rate, dropout_rng));
  }
  const std::size_t f = kFirstLayer + kPerLayer * static_cast<std::size_t>(config_.layers);
  h = ops::layer_norm(h, w[f], w[f + 1]);
  std::vector<int> token_rows(batch * n);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t j = 0; j < n; ++j) token_rows[b * n + j] = static_cast<int>(b * seq + 1 + j);
  }
  return ops::linear(ops::embedding(h, token_rows), w[f + 2], w[f + 3]);
}

Var Transformer::forward(Tape& tape, std::span<const Token> tokens,
                         std::span<const int> classes, Rng* dropout_rng) {
  check_inputs(tokens, classes);
  std::vector<Var> leaves;
  leaves.reserve(params_.size());
  for (auto& p : params_) leaves.push_back(tape.parameter(p));
  return build(tape, leaves, tokens, classes, dropout_rng);
}

Tensor Transformer::infer(std::span<const Token> tokens, std::span<const int> classes) const {
  check_inputs(tokens, classes);
  Tape tape(false);
  std::vector<Var> leaves;
  leaves.reserve(params_.size());
  for (const auto& p : params_) leaves.push_back(tape.constant(p.value));
  return build(tape, leaves, tokens, classes, nullptr).value();
}

std::uint64_t Transformer::checksum() const { return tcl::checksum(params_); }

GeneratorModel make_generator(const TransformerConfig& config, std::uint64_t seed) {
  if (config.head != HeadKind::categorical) {
    throw ConfigError("generator.head: must be categorical");
  }
  if (config.vocab_in != config.outputs + 1) {
    throw ConfigError("generator.vocab_in: must be K + 1 (codes plus [MASK])");
  }
  return GeneratorModel{Transformer(config, seed)};
}

CriticModel make_critic(const TransformerConfig& config, std::uint64_t seed) {
  if (config.head != HeadKind::binary) throw ConfigError("critic.head: must be binary");
  return CriticModel{Transformer(config, seed)};
}

Tensor generator_forward(const GeneratorModel& model, const TokenGrid& x_t, int label) {
  const int c[1] = {label};
  return model.net.infer(x_t.tokens, c);
}

Tensor critic_forward(const CriticModel& model, const TokenGrid& x_hat0, int label) {
  const int c[1] = {label};
  Tensor out = model.net.infer(x_hat0.tokens, c);
  return Tensor({out.rows()}, std::vector<double>(out.data().begin(), out.data().end()));
}

Tensor generator_logits(const GeneratorModel& model, std::span<const Token> tokens,
                        std::span<const int> classes) {
  return model.net.infer(tokens, classes);
}

Tensor critic_logits(const CriticModel& model, std::span<const Token> tokens,
                     std::span<const int> classes) {
  Tensor out = model.net.infer(tokens, classes);
  return Tensor({out.rows()}, std::vector<double>(out.data().begin(), out.data().end()));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

TokenDraw sample_token(std::span<const double> logits, double temperature, Rng& rng) {
  if (logits.empty()) throw ShapeError("sample_token: empty logits");
  for (double v : logits) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      throw DomainError("sample_token: NaN or +inf logit");
    }
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  if (!std::isfinite(top)) throw DomainError("sample_token: every code has zero probability");
  double z1 = 0.0;
  for (double v : logits) z1 += std::exp(v - top);

  TokenDraw draw;
  if (temperature < kArgmaxTemperature) {
    draw.token = static_cast<Token>(std::max_element(logits.begin(), logits.end()) -
                                    logits.begin());
  } else {
    std::vector<double> w(logits.size());
    double z = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
      w[i] = std::exp((logits[i] - top) / temperature);
      z += w[i];
    }
    const double u = rng.uniform() * z;
    double acc = 0.0;
    draw.token = static_cast<Token>(logits.size() - 1);
    for (std::size_t i = 0; i < w.size(); ++i) {
      acc += w[i];
      if (u < acc) {
        draw.token = static_cast<Token>(i);
        break;
      }
    }
  }
  draw.prob = std::exp(logits[static_cast<std::size_t>(draw.token)] - top) / z1;
  return draw;
}

std::vector<Token> sample_tokens(const Tensor& logits, double temperature, Rng& rng,
                                 std::span<const std::size_t> positions) {
  if (logits.rank() != 2) throw ShapeError("sample_tokens: logits must be [N, K]");
  const std::size_t k = logits.cols();
  std::vector<Token> out;
  out.reserve(positions.size());
  for (std::size_t pos : positions) {
    if (pos >= logits.rows()) throw ShapeError("sample_tokens: position out of range");
    out.push_back(sample_token(logits.data().subspan(pos * k, k), temperature, rng).token);
  }
  return out;
}

std::filesystem::path sidecar_path(const std::filesystem::path& weights_path) {
  auto p = weights_path;
  p.replace_extension(".json");
  if (p == weights_path) p += ".json";
  return p;
}

void save_checkpoint(const std::filesystem::path& weights_path, const Transformer& net,
                     const nlohmann::json& metadata) {
  save_weights(weights_path, net.parameters());
  nlohmann::json side = metadata;
  side["model"] = net.config().to_json();
  side["weights_version"] = kWeightsVersion;
  side["checksum"] = net.checksum();
  std::ofstream out(sidecar_path(weights_path));
  if (!out) throw IoError("cannot write " + sidecar_path(weights_path).string());
  out << side.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + sidecar_path(weights_path).string());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& weights_path) {
  const auto side_path = sidecar_path(weights_path);
  std::ifstream in(side_path);
  if (!in) throw IoError("missing model sidecar " + side_path.string());
  nlohmann::json side;
  try {
    side = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed sidecar " + side_path.string() + ": " + e.what());
  }
  if (!side.contains("model")) throw IoError("sidecar lacks model config: " + side_path.string());
  TransformerConfig config;
  try {
    config = TransformerConfig::from_json(side["model"]);
  } catch (const ConfigError& e) {
    throw IoError(std::string("sidecar model config invalid: ") + e.what());
  }
  Transformer net(config, 0);
  assign_weights(net.parameters(), load_weights(weights_path));
  if (side.contains("checksum") && side["checksum"].get<std::uint64_t>() != net.checksum()) {
    throw IoError("checksum mismatch for " + weights_path.string());
  }
  return {std::move(net), std::move(side)};
}

}  // namespace tcl
