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


#include <cstdint>
#include <cstring>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "gradcheck.h"
#include "tcl/error.h"
#include "tcl/numerics/weights_io.h"
#include "tcl/rng.h"

namespace tcl {
namespace {

using testing::make_parameter;
using testing::random_tensor;

std::vector<Parameter> sample_params() {
  Rng rng(12);
  std::vector<Parameter> params = {make_parameter("embed", random_tensor({4, 3}, rng)),
                                   make_parameter("bias", random_tensor({3}, rng)),
                                   make_parameter("scalar", Tensor::scalar(0.0))};
  params[1].value[0] = -0.0;
  params[1].value[1] = std::numeric_limits<double>::denorm_min();
  params[2].value[0] = 1.0 / 3.0;
  return params;
}

bool bit_equal(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape() &&
         std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(double)) == 0;
}

TEST(WeightsIo, StreamRoundTripIsBitExact) {
  auto params = sample_params();
  std::stringstream buffer;
  write_weights(buffer, params);
  auto loaded = read_weights(buffer);
  ASSERT_EQ(loaded.size(), params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    EXPECT_EQ(loaded[i].name, params[i].name);
    EXPECT_TRUE(bit_equal(loaded[i].value, params[i].value)) << params[i].name;
  }
}

TEST(WeightsIo, LayoutStartsWithMagicAndCounts) {
  auto params = sample_params();
  std::stringstream buffer;
  write_weights(buffer, params);
  const std::string bytes = buffer.str();
  ASSERT_GE(bytes.size(), 12u);
  EXPECT_EQ(bytes.substr(0, 4), "TCLW");
  std::uint32_t version = 0, count = 0;
  std::memcpy(&version, bytes.data() + 4, 4);
  std::memcpy(&count, bytes.data() + 8, 4);
  EXPECT_EQ(version, kWeightsVersion);
  EXPECT_EQ(count, 3u);
  std::uint32_t name_len = 0;
  std::memcpy(&name_len, bytes.data() + 12, 4);
  EXPECT_EQ(name_len, 5u);
  EXPECT_EQ(bytes.substr(16, 5), "embed");
  // header + per-parameter (name, rank, dims, data)
  const std::size_t expected = 12 + (4 + 5 + 4 + 8 + 12 * 8) + (4 + 4 + 4 + 4 + 3 * 8) +
                               (4 + 6 + 4 + 4 + 8);
  EXPECT_EQ(bytes.size(), expected);
}

TEST(WeightsIo, FileRoundTripAndAssign) {
  auto params = sample_params();
  const auto path = std::filesystem::temp_directory_path() / "tclab_weights_io_test.tclw";
  save_weights(path, params);
  auto loaded = load_weights(path);
  auto target = sample_params();
  for (auto& p : target) p.value.fill(9.0);
  assign_weights(target, loaded);
  for (std::size_t i = 0; i < params.size(); ++i) {
    EXPECT_TRUE(bit_equal(target[i].value, params[i].value));
  }
  EXPECT_EQ(checksum(target), checksum(params));
  std::filesystem::remove(path);
}

TEST(WeightsIo, ChecksumSeesSingleBitChange) {
  auto params = sample_params();
  const auto before = checksum(params);
  params[0].value[5] = std::nextafter(params[0].value[5], 10.0);
  EXPECT_NE(checksum(params), before);
}

TEST(WeightsIo, BadMagicRejected) {
  std::stringstream buffer("XXXX\x01\0\0\0\0\0\0\0");
  EXPECT_THROW(read_weights(buffer), IoError);
}

TEST(WeightsIo, TruncatedFileRejected) {
  auto params = sample_params();
  std::stringstream buffer;
  write_weights(buffer, params);
  std::string bytes = buffer.str();
  bytes.resize(bytes.size() - 3);
  std::stringstream cut(bytes);
  EXPECT_THROW(read_weights(cut), IoError);
}

TEST(WeightsIo, AssignRejectsShapeMismatch) {
  auto params = sample_params();
  std::stringstream buffer;
  write_weights(buffer, params);
  auto loaded = read_weights(buffer);
  std::vector<Parameter> target = sample_params();
  target[1] = make_parameter("bias", Tensor({4}));
  EXPECT_THROW(assign_weights(target, loaded), IoError);
}

TEST(WeightsIo, MissingFileIsIoError) {
  EXPECT_THROW(load_weights("/nonexistent/dir/x.tclw"), IoError);
}

}  // namespace
}  // namespace tcl
