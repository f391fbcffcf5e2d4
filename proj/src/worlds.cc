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

#include "tcl/worlds.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tcl/error.h"
#include "tcl/numerics/kernels.h"

namespace tcl {

namespace {

using Edge = std::pair<std::size_t, std::size_t>;

std::vector<Edge> grid_edges(GridShape shape) {
  std::vector<Edge> edges;
  for (int r = 0; r < shape.height; ++r) {
    for (int c = 0; c < shape.width; ++c) {
      const std::size_t i = static_cast<std::size_t>(r * shape.width + c);
      if (c + 1 < shape.width) edges.emplace_back(i, i + 1);
      if (r + 1 < shape.height) edges.emplace_back(i, i + static_cast<std::size_t>(shape.width));
    }
  }
  return edges;
}

// Unnormalised weight of one state, decoded into `digits`.
class StateWeigher {
 public:
  StateWeigher(const WorldSpec& spec, int label)
      : spec_(spec), label_(label), n_(spec.shape.count()),
        k_(static_cast<std::size_t>(spec.vocab_size)), edges_(grid_edges(spec.shape)) {}

  double operator()(std::size_t state, std::vector<Token>& digits) const {
    for (std::size_t j = n_; j-- > 0;) {
      digits[j] = static_cast<Token>(state % k_);
      state /= k_;
    }
    if (spec_.kind == WorldKind::potts) {
      int agree = 0;
      for (const auto& [a, b] : edges_) agree += digits[a] == digits[b];
      return std::exp(spec_.couplings[static_cast<std::size_t>(label_)] * agree);
    }
    const auto& base = spec_.patterns[static_cast<std::size_t>(label_)];
    const double rho = spec_.corruption;
    const double off = rho / static_cast<double>(k_);
    double w = 1.0;
    for (std::size_t j = 0; j < n_; ++j) w *= (digits[j] == base[j] ? 1.0 - rho + off : off);
    return w;
  }

  std::size_t positions() const { return n_; }

 private:
  const WorldSpec& spec_;
  int label_;
  std::size_t n_;
  std::size_t k_;
  std::vector<Edge> edges_;
};

void check_enumerable(const WorldSpec& spec) {
  spec.validate();
  double states = 1.0;
  for (std::size_t j = 0; j < spec.shape.count(); ++j) states *= spec.vocab_size;
  if (states > static_cast<double>(kMaxWorldStates)) {
    std::ostringstream msg;
    msg << "world '" << spec.name << "' has " << states
        << " states per class, above the enumeration bound of " << kMaxWorldStates
        << "; a dense table would need about " << states * 8.0 / (1 << 20) << " MiB per class";
    throw DomainError(msg.str());
  }
}

void check_table_label(const WorldSpec& spec, int label) {
  if (label < 0 || label >= spec.num_classes) {
    throw DomainError("class " + std::to_string(label) + " outside 0.." +
                      std::to_string(spec.num_classes - 1));
  }
}

}  // namespace

void WorldSpec::validate() const {
  if (shape.height < 1 || shape.width < 1) throw ConfigError("world.height and world.width must be positive");
  if (vocab_size < 1) throw ConfigError("world.vocab must be positive");
  if (num_classes < 1) throw ConfigError("world.classes must be positive");
  if (!class_prior.empty()) {
    if (class_prior.size() != static_cast<std::size_t>(num_classes)) {
      throw ConfigError("world.prior must have one entry per class");
    }
    double total = 0.0;
    for (double p : class_prior) {
      if (!(p >= 0.0)) throw ConfigError("world.prior entries must be nonnegative");
      total += p;
    }
    if (std::fabs(total - 1.0) > 1e-9) throw ConfigError("world.prior must sum to 1");
  }
  if (kind == WorldKind::pattern) {
    if (patterns.size() != static_cast<std::size_t>(num_classes)) {
      throw ConfigError("world.patterns must have one grid per class");
    }
    for (const auto& p : patterns) {
      if (p.size() != shape.count()) throw ConfigError("world.patterns entries must have height*width tokens");
      for (Token t : p) {
        if (t < 0 || t >= vocab_size) throw ConfigError("world.patterns tokens must be valid codes");
      }
    }
    if (!(corruption >= 0.0 && corruption <= 1.0)) throw ConfigError("world.corruption must be in [0,1]");
  } else {
    if (couplings.size() != static_cast<std::size_t>(num_classes)) {
      throw ConfigError("world.couplings must have one entry per class");
    }
    for (double j : couplings) {
      if (!std::isfinite(j)) throw ConfigError("world.couplings must be finite");
    }
  }
}

std::size_t WorldSpec::state_count() const {
  std::size_t s = 1;
  for (std::size_t j = 0; j < shape.count(); ++j) {
    s *= static_cast<std::size_t>(vocab_size);
    if (s > kMaxWorldStates) return s;
  }
  return s;
}

nlohmann::json WorldSpec::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["kind"] = kind == WorldKind::pattern ? "pattern" : "potts";
  j["height"] = shape.height;
  j["width"] = shape.width;
  j["vocab"] = vocab_size;
  j["classes"] = num_classes;
  j["prior"] = class_prior;
  if (kind == WorldKind::pattern) {
    j["patterns"] = patterns;
    j["corruption"] = corruption;
  } else {
    j["couplings"] = couplings;
  }
  return j;
}

WorldSpec WorldSpec::from_json(const nlohmann::json& j) {
  if (j.contains("preset")) {
    const auto preset = j.at("preset").get<std::string>();
    if (preset == "A") return world_a();
    if (preset == "B") return world_b();
    throw ConfigError("world.preset must be 'A' or 'B', got '" + preset + "'");
  }
  WorldSpec s;
  try {
    s.name = j.value("name", std::string("custom"));
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "pattern") {
      s.kind = WorldKind::pattern;
    } else if (kind == "potts") {
      s.kind = WorldKind::potts;
    } else {
      throw ConfigError("world.kind must be 'pattern' or 'potts', got '" + kind + "'");
    }
    s.shape = {j.at("height").get<int>(), j.at("width").get<int>()};
    s.vocab_size = j.at("vocab").get<int>();
    s.num_classes = j.at("classes").get<int>();
    s.class_prior = j.value("prior", std::vector<double>{});
    if (s.kind == WorldKind::pattern) {
      s.patterns = j.at("patterns").get<std::vector<std::vector<Token>>>();
      s.corruption = j.at("corruption").get<double>();
    } else {
      s.couplings = j.at("couplings").get<std::vector<double>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("world: ") + e.what());
  }
  s.validate();
  return s;
}

WorldSpec world_a() {
  WorldSpec s;
  s.name = "A";
  s.kind = WorldKind::pattern;
  s.shape = {3, 3};
  s.vocab_size = 5;
  s.num_classes = 4;
  s.corruption = 0.1;
  s.patterns.assign(4, std::vector<Token>(9));
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const std::size_t i = static_cast<std::size_t>(r * 3 + c);
      s.patterns[0][i] = r % 2 == 0 ? 0 : 1;        // horizontal stripes
      s.patterns[1][i] = c % 2 == 0 ? 2 : 3;        // vertical stripes
      s.patterns[2][i] = (r + c) % 2 == 0 ? 4 : 0;  // checkerboard
      s.patterns[3][i] = 1 + (c - r + 3) % 3;       // diagonal
    }
  }
  return s;
}

WorldSpec world_b() {
  WorldSpec s = potts_world({3, 3}, 4, {0.8, -0.8});
  s.name = "B";
  return s;
}

WorldSpec potts_world(GridShape shape, int vocab_size, std::vector<double> couplings) {
  WorldSpec s;
  s.name = "potts";
  s.kind = WorldKind::potts;
  s.shape = shape;
  s.vocab_size = vocab_size;
  s.num_classes = static_cast<int>(couplings.size());
  s.couplings = std::move(couplings);
  return s;
}

JointTable enumerate_joint(const WorldSpec& spec, int label) {
  check_enumerable(spec);
  check_table_label(spec, label);
  const std::size_t states = spec.state_count();
  const StateWeigher weigh(spec, label);
  JointTable table{label, std::vector<double>(states)};
  const long total = static_cast<long>(states);
#pragma omp parallel
  {
    std::vector<Token> digits(weigh.positions());
#pragma omp for schedule(static)
    for (long s = 0; s < total; ++s) {
      table.probs[static_cast<std::size_t>(s)] = weigh(static_cast<std::size_t>(s), digits);
    }
  }
  const double z = kernels::stable_sum(table.probs);
#pragma omp parallel for schedule(static)
  for (long s = 0; s < total; ++s) table.probs[static_cast<std::size_t>(s)] /= z;
  return table;
}

namespace serial {

JointTable enumerate_joint(const WorldSpec& spec, int label) {
  check_enumerable(spec);
  check_table_label(spec, label);
  const std::size_t states = spec.state_count();
  const StateWeigher weigh(spec, label);
  JointTable table{label, std::vector<double>(states)};
  std::vector<Token> digits(weigh.positions());
  for (std::size_t s = 0; s < states; ++s) table.probs[s] = weigh(s, digits);
  const double z = kernels::serial::stable_sum(table.probs);
  for (double& p : table.probs) p /= z;
  return table;
}

}  // namespace serial

SyntheticWorld::SyntheticWorld(WorldSpec spec) : spec_(std::move(spec)) {
  check_enumerable(spec_);
  state_count_ = spec_.state_count();
  prior_ = spec_.class_prior;
  if (prior_.empty()) prior_.assign(static_cast<std::size_t>(spec_.num_classes), 1.0 / spec_.num_classes);
  for (int c = 0; c < spec_.num_classes; ++c) {
    tables_.push_back(enumerate_joint(spec_, c));
    std::vector<double> cdf(state_count_);
    std::partial_sum(tables_.back().probs.begin(), tables_.back().probs.end(), cdf.begin());
    cdfs_.push_back(std::move(cdf));
  }
}

void SyntheticWorld::check_label(int label) const { check_table_label(spec_, label); }

const JointTable& SyntheticWorld::joint(int label) const {
  check_label(label);
  return tables_[static_cast<std::size_t>(label)];
}

std::size_t SyntheticWorld::state_index(std::span<const Token> tokens) const {
  if (tokens.size() != positions()) throw DomainError("state_index: wrong grid length");
  std::size_t s = 0;
  for (Token t : tokens) {
    if (t < 0 || t >= spec_.vocab_size) throw DomainError("state_index: grid is not complete");
    s = s * static_cast<std::size_t>(spec_.vocab_size) + static_cast<std::size_t>(t);
  }
  return s;
}

TokenGrid SyntheticWorld::decode(std::size_t state) const {
  TokenGrid g{spec_.shape, std::vector<Token>(positions())};
  const auto k = static_cast<std::size_t>(spec_.vocab_size);
  for (std::size_t j = positions(); j-- > 0;) {
    g.tokens[j] = static_cast<Token>(state % k);
    state /= k;
  }
  return g;
}

double SyntheticWorld::prob(int label, std::span<const Token> tokens) const {
  return joint(label).probs[state_index(tokens)];
}

TokenGrid SyntheticWorld::sample_class(int label, Rng& rng) const {
  check_label(label);
  const auto& cdf = cdfs_[static_cast<std::size_t>(label)];
  const double u = rng.uniform() * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return decode(static_cast<std::size_t>(it - cdf.begin()));
}

LabeledGrid SyntheticWorld::sample(Rng& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  int label = spec_.num_classes - 1;
  for (int c = 0; c < spec_.num_classes; ++c) {
    acc += prior_[static_cast<std::size_t>(c)];
    if (u < acc) {
      label = c;
      break;
    }
  }
  return {sample_class(label, rng), label};
}

double SyntheticWorld::cell_prob(int label, std::size_t pos, Token t) const {
  const double off = spec_.corruption / spec_.vocab_size;
  return spec_.patterns[static_cast<std::size_t>(label)][pos] == t
             ? 1.0 - spec_.corruption + off
             : off;
}

double SyntheticWorld::evidence(int label, const TokenGrid& partial) const {
  check_label(label);
  validate_grid(partial, vocab());
  if (partial.size() != positions()) throw DomainError("evidence: wrong grid length");
  const Token mask = vocab().mask_id();
  if (spec_.kind == WorldKind::pattern) {
    double p = 1.0;
    for (std::size_t j = 0; j < positions(); ++j) {
      if (partial.tokens[j] != mask) p *= cell_prob(label, j, partial.tokens[j]);
    }
    return p;
  }
  const auto k = static_cast<std::size_t>(spec_.vocab_size);
  std::vector<std::size_t> place(positions());
  std::size_t base = 0, w = 1;
  std::vector<std::size_t> hidden_places;
  for (std::size_t j = positions(); j-- > 0;) {
    place[j] = w;
    if (partial.tokens[j] == mask) {
      hidden_places.push_back(w);
    } else {
      base += static_cast<std::size_t>(partial.tokens[j]) * w;
    }
    w *= k;
  }
  const auto& probs = tables_[static_cast<std::size_t>(label)].probs;
  std::size_t combos = 1;
  for (std::size_t h = 0; h < hidden_places.size(); ++h) combos *= k;
  kernels::CompensatedSum total;
  for (std::size_t combo = 0; combo < combos; ++combo) {
    std::size_t idx = base, rest = combo;
    for (std::size_t place_value : hidden_places) {
      idx += (rest % k) * place_value;
      rest /= k;
    }
    total.add(probs[idx]);
  }
  return total.value();
}

std::vector<double> SyntheticWorld::exact_conditional(int label, const TokenGrid& partial,
                                                      std::size_t j) const {
  check_label(label);
  if (j >= positions()) throw DomainError("exact_conditional: position out of range");
  if (partial.tokens.size() != positions()) throw DomainError("exact_conditional: wrong grid length");
  if (partial.tokens[j] != vocab().mask_id()) {
    throw DomainError("exact_conditional: position " + std::to_string(j) + " is visible");
  }
  std::vector<double> out(static_cast<std::size_t>(spec_.vocab_size));
  if (spec_.kind == WorldKind::pattern) {
    if (evidence(label, partial) <= 0.0) throw DomainError("impossible evidence");
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = cell_prob(label, j, static_cast<Token>(k));
  } else {
    TokenGrid probe = partial;
    for (std::size_t k = 0; k < out.size(); ++k) {
      probe.tokens[j] = static_cast<Token>(k);
      out[k] = evidence(label, probe);
    }
  }
  double total = 0.0;
  for (double p : out) total += p;
  if (!(total > 0.0)) throw DomainError("impossible evidence");
  for (double& p : out) p /= total;
  return out;
}

std::vector<double> SyntheticWorld::class_free_conditional(const TokenGrid& partial,
                                                           std::size_t j) const {
  std::vector<double> weights(static_cast<std::size_t>(spec_.num_classes));
  double total = 0.0;
  for (int c = 0; c < spec_.num_classes; ++c) {
    weights[static_cast<std::size_t>(c)] = prior_[static_cast<std::size_t>(c)] * evidence(c, partial);
    total += weights[static_cast<std::size_t>(c)];
  }
  if (!(total > 0.0)) throw DomainError("impossible evidence");
  std::vector<double> out(static_cast<std::size_t>(spec_.vocab_size), 0.0);
  for (int c = 0; c < spec_.num_classes; ++c) {
    const double w = weights[static_cast<std::size_t>(c)] / total;
    if (w == 0.0) continue;
    const auto cond = exact_conditional(c, partial, j);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += w * cond[k];
  }
  return out;
}

ClassPosterior SyntheticWorld::class_posterior(const TokenGrid& x0) const {
  if (!x0.complete(vocab())) throw DomainError("class_posterior: grid is not complete");
  const std::size_t s = state_index(x0.tokens);
  ClassPosterior post;
  post.probs.resize(static_cast<std::size_t>(spec_.num_classes));
  double total = 0.0;
  for (int c = 0; c < spec_.num_classes; ++c) {
    const auto i = static_cast<std::size_t>(c);
    post.probs[i] = prior_[i] * tables_[i].probs[s];
    total += post.probs[i];
  }
  if (!(total > 0.0)) {
    post.degenerate = true;
    std::fill(post.probs.begin(), post.probs.end(), 1.0 / spec_.num_classes);
    return post;
  }
  for (double& p : post.probs) p /= total;
  return post;
}

AncestralOracle::AncestralOracle(const SyntheticWorld& world, std::vector<std::size_t> order)
    : world_(&world), order_(std::move(order)) {
  const std::size_t n = world.positions();
  std::vector<std::size_t> sorted = order_;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted.size() != n || sorted[i] != i) {
      throw DomainError("ancestral oracle: order must be a permutation of 0..N-1");
    }
  }
  const auto k = static_cast<std::size_t>(world.spec().vocab_size);
  // place value of each original position in the original index
  std::vector<std::size_t> place(n);
  for (std::size_t j = n, w = 1; j-- > 0; w *= k) place[j] = w;
  for (int c = 0; c < world.num_classes(); ++c) {
    const auto& probs = world.joint(c).probs;
    std::vector<std::vector<double>> levels(n + 1);
    // Reindex the table so that order_[0] is the most significant digit.
    std::vector<double> permuted(probs.size());
    std::vector<std::size_t> digit(n, 0);
    for (std::size_t s = 0; s < probs.size(); ++s) {
      std::size_t orig = 0;
      for (std::size_t j = 0; j < n; ++j) orig += digit[j] * place[order_[j]];
      permuted[s] = probs[orig];
      for (std::size_t j = n; j-- > 0;) {
        if (++digit[j] < k) break;
        digit[j] = 0;
      }
    }
    levels[n] = std::move(permuted);
    for (std::size_t level = n; level-- > 0;) {
      const auto& next = levels[level + 1];
      std::vector<double> cur(next.size() / k, 0.0);
      for (std::size_t p = 0; p < cur.size(); ++p) {
        kernels::CompensatedSum acc;
        for (std::size_t d = 0; d < k; ++d) acc.add(next[p * k + d]);
        cur[p] = acc.value();
      }
      levels[level] = std::move(cur);
    }
    prefix_.push_back(std::move(levels));
  }
}

TokenGrid AncestralOracle::sample(int label, Rng& rng) const {
  if (label < 0 || label >= world_->num_classes()) throw DomainError("ancestral oracle: bad class");
  const auto& levels = prefix_[static_cast<std::size_t>(label)];
  const std::size_t n = world_->positions();
  const auto k = static_cast<std::size_t>(world_->spec().vocab_size);
  TokenGrid g{world_->shape(), std::vector<Token>(n)};
  std::size_t prefix = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& next = levels[j + 1];
    double total = 0.0;
    for (std::size_t d = 0; d < k; ++d) total += next[prefix * k + d];
    const double u = rng.uniform() * total;
    double acc = 0.0;
    std::size_t chosen = k - 1;
    for (std::size_t d = 0; d < k; ++d) {
      acc += next[prefix * k + d];
      if (u < acc) {
        chosen = d;
        break;
      }
    }
    // never pick a zero-mass digit through round-off at the top end
    while (next[prefix * k + chosen] == 0.0 && chosen > 0) --chosen;
    prefix = prefix * k + chosen;
    g.tokens[order_[j]] = static_cast<Token>(chosen);
  }
  return g;
}

}  // namespace tcl
