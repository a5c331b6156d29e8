// Copyright 2026 The mrg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <benchmark/benchmark.h>

#include "mrg/chaos.hpp"
#include "mrg/kernels.hpp"
#include "mrg/limits.hpp"
#include "mrg/partition.hpp"

namespace {

void BM_PinningDp(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto kernel = mrg::build_kernel(mrg::ModelKind::kRenewalHalf, N, 1e-6);
  const auto overlap = mrg::overlap_table(kernel);
  const auto eta = mrg::make_eta_params(mrg::DisorderLaw::kGaussian,
                                        mrg::beta_schedule(overlap, N, 0.5));
  std::uint64_t r = 0;
  for (auto _ : state) {
    const mrg::DisorderField field{1, r++, mrg::DisorderLaw::kGaussian, mrg::FieldMode::kOmega};
    benchmark::DoNotOptimize(mrg::pinning_Z_all_starts(kernel, field, eta, N).at(0));
  }
}
BENCHMARK(BM_PinningDp)->RangeMultiplier(4)->Range(1 << 8, 1 << 14)->Unit(benchmark::kMillisecond);

void BM_PolymerDp(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto kernel = mrg::build_kernel(mrg::ModelKind::kSrw2d, N, 1e-6);
  const auto overlap = mrg::overlap_table(kernel);
  const auto eta = mrg::make_eta_params(mrg::DisorderLaw::kGaussian,
                                        mrg::beta_schedule(overlap, N, 0.5));
  std::uint64_t r = 0;
  for (auto _ : state) {
    const mrg::DisorderField field{1, r++, mrg::DisorderLaw::kGaussian, mrg::FieldMode::kOmega};
    benchmark::DoNotOptimize(mrg::polymer_Z_all_starts(kernel, field, eta, N).at(0));
  }
}
BENCHMARK(BM_PolymerDp)->RangeMultiplier(2)->Range(1 << 5, 1 << 8)->Unit(benchmark::kMillisecond);

void BM_SecondMomentExact(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto kernel = mrg::build_kernel(mrg::ModelKind::kRenewalHalf, N, 1e-6);
  const auto overlap = mrg::overlap_table(kernel);
  const double gamma = 0.25 / overlap.R[N];
  for (auto _ : state) benchmark::DoNotOptimize(mrg::second_moment_exact(overlap, gamma, N));
}
BENCHMARK(BM_SecondMomentExact)->RangeMultiplier(4)->Range(1 << 8, 1 << 16);

void BM_KernelK(benchmark::State& state) {
  const mrg::CovKernel ck{static_cast<int>(state.range(0)), 1.0};
  const mrg::LimitPoint a{0.1, -0.2, 0.3};
  const mrg::LimitPoint b{-0.05, 0.1, 0.55};
  for (auto _ : state) benchmark::DoNotOptimize(mrg::kernel_K(ck, a, b));
}
BENCHMARK(BM_KernelK)->DenseRange(0, 2);

void BM_BlockLimitSample(benchmark::State& state) {
  const mrg::BlockLimitSampler sampler(static_cast<int>(state.range(0)), 0.5, 6);
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(3, i++));
}
BENCHMARK(BM_BlockLimitSample)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
