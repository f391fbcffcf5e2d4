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


// OpenMP kernels against their serial references. Thread count follows
// OMP_NUM_THREADS.

#include <vector>

#include <benchmark/benchmark.h>

#include "tcl/numerics/kernels.h"
#include "tcl/rng.h"
#include "tcl/worlds.h"

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  tcl::Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

template <bool kParallel>
void BM_GemmNN(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_vector(n * n, 1), b = random_vector(n * n, 2);
  std::vector<double> c(n * n);
  for (auto _ : state) {
    if constexpr (kParallel) {
      tcl::kernels::gemm_nn(a, b, c, n, n, n, false);
    } else {
      tcl::kernels::serial::gemm_nn(a, b, c, n, n, n, false);
    }
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}
BENCHMARK(BM_GemmNN<true>)->Name("gemm_nn/openmp")->Arg(64)->Arg(256);
BENCHMARK(BM_GemmNN<false>)->Name("gemm_nn/serial")->Arg(64)->Arg(256);

template <bool kParallel>
void BM_AbsDiffSum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = random_vector(n, 3), q = random_vector(n, 4);
  for (auto _ : state) {
    double s = kParallel ? tcl::kernels::abs_diff_sum(p, q) : tcl::kernels::serial::abs_diff_sum(p, q);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_AbsDiffSum<true>)->Name("abs_diff_sum/openmp")->Arg(1 << 18)->Arg(1953125);
BENCHMARK(BM_AbsDiffSum<false>)->Name("abs_diff_sum/serial")->Arg(1 << 18)->Arg(1953125);

template <bool kParallel>
void BM_EnumerateJoint(benchmark::State& state) {
  const tcl::WorldSpec spec = state.range(0) == 0 ? tcl::world_a() : tcl::world_b();
  for (auto _ : state) {
    auto table = kParallel ? tcl::enumerate_joint(spec, 0) : tcl::serial::enumerate_joint(spec, 0);
    benchmark::DoNotOptimize(table.probs.data());
  }
}
BENCHMARK(BM_EnumerateJoint<true>)->Name("enumerate_joint/openmp")->Arg(0)->Arg(1)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnumerateJoint<false>)->Name("enumerate_joint/serial")->Arg(0)->Arg(1)
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
