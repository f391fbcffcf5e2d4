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

#include "tcl/cli/run_config.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "tcl/error.h"
#include "tcl/metrics.h"
#include "tcl/rng.h"

namespace tcl::cli {

namespace {

int min_class_count(int n, const WorldSpec& world) {
  std::vector<double> prior = world.class_prior;
  if (prior.empty()) prior.assign(static_cast<std::size_t>(world.num_classes), 1.0 / world.num_classes);
  const std::vector<int> labels = allocate_labels(static_cast<std::size_t>(std::max(n, 0)), prior);
  std::vector<int> counts(prior.size(), 0);
  for (int c : labels) ++counts[static_cast<std::size_t>(c)];
  return *std::min_element(counts.begin(), counts.end());
}

const std::set<std::string> kTopLevelKeys = {
    "world",   "generator", "critic", "train_generator", "train_critic", "sampler",
    "sweep",   "compare",   "refine", "reject",          "samples",      "label",
    "seed"};

TransformerConfig overlay(const TransformerConfig& base, const nlohmann::json& j,
                          const std::string& field) {
  if (j.is_null()) return base;
  if (!j.is_object()) throw ConfigError(field + ": must be an object");
  nlohmann::json merged = base.to_json();
  merged.merge_patch(j);
  try {
    return TransformerConfig::from_json(merged);
  } catch (const ConfigError& e) {
    throw ConfigError(field + ": " + e.what());
  }
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

}  // namespace

void RunConfig::validate() const {
  world.validate();
  const int n = static_cast<int>(world.shape.count());
  if (generator.positions != n || generator.outputs != world.vocab_size ||
      generator.vocab_in != world.vocab_size + 1 || generator.num_classes != world.num_classes) {
    throw ConfigError("generator: dimensions (positions, vocab_in, outputs, num_classes) "
                      "must match the world");
  }
  if (generator.head != HeadKind::categorical) throw ConfigError("generator.head: must be categorical");
  if (critic.positions != n || critic.vocab_in != world.vocab_size || critic.outputs != 1 ||
      critic.num_classes != world.num_classes) {
    throw ConfigError("critic: dimensions (positions, vocab_in, num_classes) must match the world");
  }
  if (critic.head != HeadKind::binary) throw ConfigError("critic.head: must be binary");
  train_generator.validate();
  train_critic.validate();
  sampler.validate();
  if (sweep.temp_intercept.empty() || sweep.noise_scale.empty() || sweep.steps.empty() ||
      sweep.selectors.empty()) {
    throw ConfigError("sweep: every grid axis needs at least one value");
  }
  for (double b : sweep.temp_intercept) {
    if (!(b > 0.0)) throw ConfigError("sweep.temp_intercept: values must be positive");
  }
  for (double s : sweep.noise_scale) {
    if (s < 0.0) throw ConfigError("sweep.noise_scale: values must be nonnegative");
  }
  for (int s : sweep.steps) {
    if (s < 1) throw ConfigError("sweep.steps: values must be >= 1");
  }
  if (min_class_count(sweep.samples, world) < 100) {
    throw ConfigError("sweep.samples: every class needs >= 100 samples");
  }
  if (compare.seeds.empty()) throw ConfigError("compare.seeds: need at least one seed");
  if (min_class_count(compare.samples, world) < 100) {
    throw ConfigError("compare.samples: every class needs >= 100 samples");
  }
  if (compare.steps < 1) throw ConfigError("compare.steps: must be >= 1");
  if (!(refine.ratio > 0.0 && refine.ratio <= 1.0)) throw ConfigError("refine.ratio: must be in (0, 1]");
  if (refine.steps < 1) throw ConfigError("refine.steps: must be >= 1");
  if (!(reject.accept_rate > 0.0 && reject.accept_rate <= 1.0)) {
    throw ConfigError("reject.accept_rate: must be in (0, 1]");
  }
  if (samples < 0) throw ConfigError("samples: must be >= 0");
  if (label < -1 || label >= world.num_classes) {
    throw ConfigError("label: must be -1 or a class index");
  }
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json selectors = nlohmann::json::array();
  for (Selector s : sweep.selectors) selectors.push_back(to_string(s));
  return {{"world", world.to_json()},
          {"generator", generator.to_json()},
          {"critic", critic.to_json()},
          {"train_generator", train_generator.to_json()},
          {"train_critic", train_critic.to_json()},
          {"sampler", sampler.to_json()},
          {"sweep",
           {{"temp_intercept", sweep.temp_intercept},
            {"noise_scale", sweep.noise_scale},
            {"steps", sweep.steps},
            {"selectors", selectors},
            {"samples", sweep.samples}}},
          {"compare",
           {{"seeds", compare.seeds}, {"samples", compare.samples}, {"steps", compare.steps}}},
          {"refine", {{"ratio", refine.ratio}, {"steps", refine.steps}}},
          {"reject", {{"accept_rate", reject.accept_rate}}},
          {"samples", samples},
          {"label", label}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kTopLevelKeys.contains(key)) throw ConfigError("config: unknown key '" + key + "'");
  }
  RunConfig c;
  c.world = j.contains("world") ? WorldSpec::from_json(j.at("world")) : world_a();
  c.world.validate();
  const int n = static_cast<int>(c.world.shape.count());
  c.generator = overlay(generator_config(n, c.world.vocab_size, c.world.num_classes),
                        j.value("generator", nlohmann::json()), "generator");
  c.critic = overlay(critic_config(n, c.world.vocab_size, c.world.num_classes),
                     j.value("critic", nlohmann::json()), "critic");
  c.train_generator = TrainConfig::from_json(j.value("train_generator", nlohmann::json::object()));
  c.train_critic = TrainConfig::from_json(j.value("train_critic", nlohmann::json::object()));
  c.sampler = SamplerConfig::from_json(j.value("sampler", nlohmann::json::object()));

  const auto sw = j.value("sweep", nlohmann::json::object());
  c.sweep.temp_intercept = get_or(sw, "temp_intercept", c.sweep.temp_intercept, "sweep");
  c.sweep.noise_scale = get_or(sw, "noise_scale", c.sweep.noise_scale, "sweep");
  c.sweep.steps = get_or(sw, "steps", c.sweep.steps, "sweep");
  c.sweep.samples = get_or(sw, "samples", c.sweep.samples, "sweep");
  if (sw.contains("selectors")) {
    c.sweep.selectors.clear();
    for (const auto& s : get_or(sw, "selectors", std::vector<std::string>{}, "sweep")) {
      c.sweep.selectors.push_back(parse_selector(s));
    }
  }
  const auto cmp = j.value("compare", nlohmann::json::object());
  c.compare.seeds = get_or(cmp, "seeds", c.compare.seeds, "compare");
  c.compare.samples = get_or(cmp, "samples", c.compare.samples, "compare");
  c.compare.steps = get_or(cmp, "steps", c.compare.steps, "compare");
  const auto ref = j.value("refine", nlohmann::json::object());
  c.refine.ratio = get_or(ref, "ratio", c.refine.ratio, "refine");
  c.refine.steps = get_or(ref, "steps", c.refine.steps, "refine");
  const auto rej = j.value("reject", nlohmann::json::object());
  c.reject.accept_rate = get_or(rej, "accept_rate", c.reject.accept_rate, "reject");
  c.samples = get_or(j, "samples", c.samples, "config");
  c.label = get_or(j, "label", c.label, "config");
  c.seed = get_or<std::uint64_t>(j, "seed", 0, "config");
  c.validate();
  return c;
}

RunConfig RunConfig::defaults() { return from_json(nlohmann::json::object()); }

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: malformed JSON in " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

std::string canonical_dump(const nlohmann::json& j) { return j.dump(); }

std::string config_hash(const RunConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_dump(config.to_json()))));
  return buf;
}

}  // namespace tcl::cli
