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

#ifndef TCL_TOKENSPACE_H_
#define TCL_TOKENSPACE_H_

// Codebooks, token grids and binary masks. Mask bits use 1 = visible/kept and
// 0 = masked, so a masked grid is x0 where the bit is 1 and [MASK] elsewhere.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tcl/rng.h"

namespace tcl {

using Token = std::int32_t;

struct Vocabulary {
  int size = 0;  // K; valid codes are 0..K-1
  Token mask_id() const { return static_cast<Token>(size); }
  bool is_code(Token t) const { return t >= 0 && t < size; }
};

struct GridShape {
  int height = 0;
  int width = 0;
  std::size_t count() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
  bool operator==(const GridShape&) const = default;
};

struct TokenGrid {
  GridShape shape;
  std::vector<Token> tokens;  // row-major, length shape.count()

  bool operator==(const TokenGrid&) const = default;
  std::size_t size() const { return tokens.size(); }
  // No token is the mask sentinel and all are valid codes.
  bool complete(const Vocabulary& vocab) const;
};

struct MaskVector {
  std::vector<std::uint8_t> bits;  // 1 = visible, 0 = masked

  static MaskVector all_visible(std::size_t n) { return {std::vector<std::uint8_t>(n, 1)}; }
  static MaskVector all_masked(std::size_t n) { return {std::vector<std::uint8_t>(n, 0)}; }
  std::size_t size() const { return bits.size(); }
  std::size_t masked_count() const;
  bool operator==(const MaskVector&) const = default;
};

// Checks every token is <= mask_id; throws DomainError otherwise.
void validate_grid(const TokenGrid& grid, const Vocabulary& vocab);

// Visible bits copy x0, masked bits become the sentinel. x0 must be complete.
TokenGrid apply_mask(const TokenGrid& x0, const MaskVector& m, const Vocabulary& vocab);

// Visible bits copy x_t, masked bits come from x_tilde. Throws if x_t disagrees
// with m (a visible position holding [MASK]) or x_tilde is incomplete.
TokenGrid merge(const TokenGrid& x_tilde, const TokenGrid& x_t, const MaskVector& m,
                const Vocabulary& vocab);

// Exactly `masked` zeros at positions drawn uniformly without replacement.
MaskVector random_mask(std::size_t n, std::size_t masked, Rng& rng);

// The mask implied by a grid: 0 where the grid holds the sentinel.
MaskVector mask_of(const TokenGrid& grid, const Vocabulary& vocab);

// JSON Lines: {"class": c, "tokens": [...], "height": h, "width": w}.
struct LabeledGrid {
  TokenGrid grid;
  int label = 0;
};

std::string grid_to_json_line(const LabeledGrid& g);
LabeledGrid grid_from_json_line(const std::string& line);
// Writes one line per grid. `header_line`, when given, is written first.
void write_grids_jsonl(std::ostream& out, std::span<const LabeledGrid> grids,
                       const std::optional<std::string>& header_line = std::nullopt);
// Skips blank lines and lines carrying a top-level "header" object.
std::vector<LabeledGrid> read_grids_jsonl(std::istream& in);

}  // namespace tcl

#endif  // TCL_TOKENSPACE_H_
