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

#include "tcl/tokenspace.h"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>

#include "json.hpp"
#include "tcl/error.h"

namespace tcl {

bool TokenGrid::complete(const Vocabulary& vocab) const {
  return std::all_of(tokens.begin(), tokens.end(),
                     [&](Token t) { return vocab.is_code(t); });
}

std::size_t MaskVector::masked_count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 0));
}

void validate_grid(const TokenGrid& grid, const Vocabulary& vocab) {
  if (grid.tokens.size() != grid.shape.count()) {
    throw DomainError("grid holds " + std::to_string(grid.tokens.size()) +
                      " tokens but its shape has " + std::to_string(grid.shape.count()));
  }
  for (Token t : grid.tokens) {
    if (t < 0 || t > vocab.mask_id()) {
      throw DomainError("token " + std::to_string(t) + " outside 0.." +
                        std::to_string(vocab.mask_id()));
    }
  }
}

TokenGrid apply_mask(const TokenGrid& x0, const MaskVector& m, const Vocabulary& vocab) {
  if (m.size() != x0.size()) {
    throw DomainError("apply_mask: mask length " + std::to_string(m.size()) +
                      " differs from grid length " + std::to_string(x0.size()));
  }
  if (!x0.complete(vocab)) throw DomainError("apply_mask: input grid contains [MASK]");
  TokenGrid out = x0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (m.bits[i] == 0) out.tokens[i] = vocab.mask_id();
  }
  return out;
}

TokenGrid merge(const TokenGrid& x_tilde, const TokenGrid& x_t, const MaskVector& m,
                const Vocabulary& vocab) {
  if (x_tilde.size() != x_t.size() || m.size() != x_t.size()) {
    throw DomainError("merge: length mismatch");
  }
  if (!x_tilde.complete(vocab)) throw DomainError("merge: prediction contains [MASK]");
  TokenGrid out = x_tilde;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (m.bits[i] == 0) continue;
    if (!vocab.is_code(x_t.tokens[i])) {
      throw DomainError("merge: position " + std::to_string(i) +
                        " is visible in the mask but holds [MASK]");
    }
    out.tokens[i] = x_t.tokens[i];
  }
  return out;
}

MaskVector random_mask(std::size_t n, std::size_t masked, Rng& rng) {
  if (masked > n) {
    throw DomainError("random_mask: cannot mask " + std::to_string(masked) + " of " +
                      std::to_string(n) + " positions");
  }
  // Partial Fisher-Yates: the first `masked` entries are a uniform subset.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  MaskVector m = MaskVector::all_visible(n);
  for (std::size_t i = 0; i < masked; ++i) {
    const std::size_t j = i + rng.below(n - i);
    std::swap(order[i], order[j]);
    m.bits[order[i]] = 0;
  }
  return m;
}

MaskVector mask_of(const TokenGrid& grid, const Vocabulary& vocab) {
  MaskVector m = MaskVector::all_visible(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.tokens[i] == vocab.mask_id()) m.bits[i] = 0;
  }
  return m;
}

std::string grid_to_json_line(const LabeledGrid& g) {
  nlohmann::ordered_json j;
  j["class"] = g.label;
  j["tokens"] = g.grid.tokens;
  j["height"] = g.grid.shape.height;
  j["width"] = g.grid.shape.width;
  return j.dump();
}

LabeledGrid grid_from_json_line(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
    LabeledGrid g;
    g.label = j.at("class").get<int>();
    g.grid.tokens = j.at("tokens").get<std::vector<Token>>();
    g.grid.shape.height = j.at("height").get<int>();
    g.grid.shape.width = j.at("width").get<int>();
    if (g.grid.shape.count() != g.grid.tokens.size()) {
      throw IoError("grid line: token count does not match height*width");
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed grid line: ") + e.what());
  }
}

void write_grids_jsonl(std::ostream& out, std::span<const LabeledGrid> grids,
                       const std::optional<std::string>& header_line) {
  if (header_line) out << *header_line << '\n';
  for (const LabeledGrid& g : grids) out << grid_to_json_line(g) << '\n';
  if (!out) throw IoError("failed writing grids");
}

std::vector<LabeledGrid> read_grids_jsonl(std::istream& in) {
  std::vector<LabeledGrid> grids;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line.find("\"header\"") != std::string::npos) {
      const auto j = nlohmann::json::parse(line, nullptr, false);
      if (!j.is_discarded() && j.is_object() && j.contains("header")) continue;
    }
    grids.push_back(grid_from_json_line(line));
  }
  return grids;
}

}  // namespace tcl
