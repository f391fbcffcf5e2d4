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

#ifndef TCL_NUMERICS_KERNELS_H_
#define TCL_NUMERICS_KERNELS_H_

// Dense inner loops. Each kernel has an OpenMP version (tcl::kernels) and a
// serial reference (tcl::kernels::serial). Both accumulate every output
// element in the same order, so they agree bit for bit regardless of the
// thread count; tests and the benchmark rely on that.

#include <cstddef>
#include <span>

namespace tcl::kernels {

// c[m,n] (+)= a[m,k] * b[k,n]
void gemm_nn(std::span<const double> a, std::span<const double> b,
             std::span<double> c, std::size_t m, std::size_t k, std::size_t n,
             bool accumulate);
// c[m,n] (+)= a[m,k] * b[n,k]^T
void gemm_nt(std::span<const double> a, std::span<const double> b,
             std::span<double> c, std::size_t m, std::size_t k, std::size_t n,
             bool accumulate);
// c[m,n] (+)= a[k,m]^T * b[k,n]
void gemm_tn(std::span<const double> a, std::span<const double> b,
             std::span<double> c, std::size_t m, std::size_t k, std::size_t n,
             bool accumulate);

// Compensated sum over fixed-size blocks. Block boundaries do not depend on
// the number of threads, so the result is reproducible.
double stable_sum(std::span<const double> values);

// sum_i |p_i - q_i|, blocked like stable_sum.
double abs_diff_sum(std::span<const double> p, std::span<const double> q);

inline constexpr std::size_t kSumBlock = 4096;

namespace serial {

void gemm_nn(std::span<const double> a, std::span<const double> b,
             std::span<double> c, std::size_t m, std::size_t k, std::size_t n,
             bool accumulate);
void gemm_nt(std::span<const double> a, std::span<const double> b,
             std::span<double> c, std::size_t m, std::size_t k, std::size_t n,
             bool accumulate);
void gemm_tn(std::span<const double> a, std::span<const double> b,
             std::span<double> c, std::size_t m, std::size_t k, std::size_t n,
             bool accumulate);
double stable_sum(std::span<const double> values);
double abs_diff_sum(std::span<const double> p, std::span<const double> q);

}  // namespace serial

// Neumaier accumulator used by the blocked sums and by metric aggregation.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace tcl::kernels

#endif  // TCL_NUMERICS_KERNELS_H_
