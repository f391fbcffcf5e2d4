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

#include "tcl/numerics/kernels.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tcl/error.h"

namespace tcl::kernels {

namespace {

void check_same_length(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw ShapeError("abs_diff_sum: lengths " + std::to_string(p.size()) + " and " +
                     std::to_string(q.size()) + " differ");
  }
}

// Below this many multiply-adds the fork/join cost dominates.
constexpr std::size_t kParallelWork = 1 << 15;

inline void row_nn(const double* a, const double* b, double* c, std::size_t k,
                   std::size_t n, bool accumulate) {
  if (!accumulate) {
    for (std::size_t j = 0; j < n; ++j) c[j] = 0.0;
  }
  for (std::size_t p = 0; p < k; ++p) {
    const double aval = a[p];
    const double* brow = b + p * n;
    for (std::size_t j = 0; j < n; ++j) c[j] += aval * brow[j];
  }
}

inline void row_nt(const double* a, const double* b, double* c, std::size_t k,
                   std::size_t n, bool accumulate) {
  for (std::size_t j = 0; j < n; ++j) {
    const double* brow = b + j * k;
    double acc = 0.0;
    for (std::size_t p = 0; p < k; ++p) acc += a[p] * brow[p];
    c[j] = accumulate ? c[j] + acc : acc;
  }
}

inline void row_tn(const double* a, const double* b, double* c, std::size_t i,
                   std::size_t m, std::size_t k, std::size_t n,
                   bool accumulate) {
  if (!accumulate) {
    for (std::size_t j = 0; j < n; ++j) c[j] = 0.0;
  }
  for (std::size_t p = 0; p < k; ++p) {
    const double aval = a[p * m + i];
    const double* brow = b + p * n;
    for (std::size_t j = 0; j < n; ++j) c[j] += aval * brow[j];
  }
}

double block_sum(const double* v, std::size_t n) {
  CompensatedSum s;
  for (std::size_t i = 0; i < n; ++i) s.add(v[i]);
  return s.value();
}

double block_abs_diff(const double* p, const double* q, std::size_t n) {
  CompensatedSum s;
  for (std::size_t i = 0; i < n; ++i) s.add(std::fabs(p[i] - q[i]));
  return s.value();
}

double combine(const std::vector<double>& partials) {
  CompensatedSum s;
  for (double x : partials) s.add(x);
  return s.value();
}

std::size_t num_blocks(std::size_t n) { return (n + kSumBlock - 1) / kSumBlock; }

}  // namespace

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::fabs(sum_) >= std::fabs(x)) {
    carry_ += (sum_ - t) + x;
  } else {
    carry_ += (x - t) + sum_;
  }
  sum_ = t;
}

void gemm_nn(std::span<const double> a, std::span<const double> b,
             std::span<double> c, std::size_t m, std::size_t k, std::size_t n,
             bool accumulate) {
  const long rows = static_cast<long>(m);
#pragma omp parallel for schedule(static) if (m * k * n > kParallelWork)
  for (long i = 0; i < rows; ++i) {
    row_nn(a.data() + i * k, b.data(), c.data() + i * n, k, n, accumulate);
  }
}

void gemm_nt(std::span<const double> a, std::span<const double> b,
             std::span<double> c, std::size_t m, std::size_t k, std::size_t n,
             bool accumulate) {
  const long rows = static_cast<long>(m);
#pragma omp parallel for schedule(static) if (m * k * n > kParallelWork)
  for (long i = 0; i < rows; ++i) {
    row_nt(a.data() + i * k, b.data(), c.data() + i * n, k, n, accumulate);
  }
}

void gemm_tn(std::span<const double> a, std::span<const double> b,
             std::span<double> c, std::size_t m, std::size_t k, std::size_t n,
             bool accumulate) {
  const long rows = static_cast<long>(m);
#pragma omp parallel for schedule(static) if (m * k * n > kParallelWork)
  for (long i = 0; i < rows; ++i) {
    row_tn(a.data(), b.data(), c.data() + i * n, static_cast<std::size_t>(i),
           m, k, n, accumulate);
  }
}

double stable_sum(std::span<const double> values) {
  const std::size_t blocks = num_blocks(values.size());
  std::vector<double> partials(blocks);
  const long nb = static_cast<long>(blocks);
#pragma omp parallel for schedule(static) if (blocks > 1)
  for (long b = 0; b < nb; ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kSumBlock;
    const std::size_t len = std::min(kSumBlock, values.size() - begin);
    partials[b] = block_sum(values.data() + begin, len);
  }
  return combine(partials);
}

double abs_diff_sum(std::span<const double> p, std::span<const double> q) {
  check_same_length(p, q);
  const std::size_t blocks = num_blocks(p.size());
  std::vector<double> partials(blocks);
  const long nb = static_cast<long>(blocks);
#pragma omp parallel for schedule(static) if (blocks > 1)
  for (long b = 0; b < nb; ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kSumBlock;
    const std::size_t len = std::min(kSumBlock, p.size() - begin);
    partials[b] = block_abs_diff(p.data() + begin, q.data() + begin, len);
  }
  return combine(partials);
}

namespace serial {

void gemm_nn(std::span<const double> a, std::span<const double> b,
             std::span<double> c, std::size_t m, std::size_t k, std::size_t n,
             bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    row_nn(a.data() + i * k, b.data(), c.data() + i * n, k, n, accumulate);
  }
}

void gemm_nt(std::span<const double> a, std::span<const double> b,
             std::span<double> c, std::size_t m, std::size_t k, std::size_t n,
             bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    row_nt(a.data() + i * k, b.data(), c.data() + i * n, k, n, accumulate);
  }
}

void gemm_tn(std::span<const double> a, std::span<const double> b,
             std::span<double> c, std::size_t m, std::size_t k, std::size_t n,
             bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    row_tn(a.data(), b.data(), c.data() + i * n, i, m, k, n, accumulate);
  }
}

double stable_sum(std::span<const double> values) {
  std::vector<double> partials;
  for (std::size_t begin = 0; begin < values.size(); begin += kSumBlock) {
    const std::size_t len = std::min(kSumBlock, values.size() - begin);
    partials.push_back(block_sum(values.data() + begin, len));
  }
  return combine(partials);
}

double abs_diff_sum(std::span<const double> p, std::span<const double> q) {
  check_same_length(p, q);
  std::vector<double> partials;
  for (std::size_t begin = 0; begin < p.size(); begin += kSumBlock) {
    const std::size_t len = std::min(kSumBlock, p.size() - begin);
    partials.push_back(block_abs_diff(p.data() + begin, q.data() + begin, len));
  }
  return combine(partials);
}

}  // namespace serial

}  // namespace tcl::kernels
