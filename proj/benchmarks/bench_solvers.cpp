// Copyright 2026 The MPPI-CBF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "mppi_cbf/conic.hpp"

namespace {

using namespace mppi_cbf;

std::vector<TrustRegionSdp> instances(int rows, MatrixNorm norm) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<TrustRegionSdp> out(64);
  for (auto& p : out) {
    p.mu0 = DynVector::Zero(2);
    p.p0 = DynMatrix::Identity(2, 2);
    p.c = 2.88;
    p.norm = norm;
    for (int i = 0; i < rows; ++i) {
      BarrierRow r;
      r.a = DynVector(2);
      r.a << unit(gen), unit(gen);
      r.b = 0.5 * std::abs(unit(gen));
      p.rows.push_back(r);
    }
  }
  return out;
}

void BM_TrustRegionSdp(benchmark::State& state) {
  const auto problems = instances(static_cast<int>(state.range(0)),
                                  state.range(1) ? MatrixNorm::kSpectral : MatrixNorm::kFrobenius);
  SdpSettings settings;
  settings.single_row_shortcut = state.range(2) != 0;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_trust_region_sdp(problems[i++ % problems.size()], settings));
  }
}
BENCHMARK(BM_TrustRegionSdp)
    ->ArgNames({"rows", "spectral", "shortcut"})
    ->Args({1, 0, 1})
    ->Args({1, 0, 0})
    ->Args({3, 0, 1})
    ->Args({1, 1, 0})
    ->Args({3, 1, 0});

void BM_StandardFormSdp(benchmark::State& state) {
  const auto problems = instances(1, MatrixNorm::kFrobenius);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& p = problems[i++ % problems.size()];
    benchmark::DoNotOptimize(solve_standard_sdp(to_standard_sdp(trust_region_lmi(p))));
  }
}
BENCHMARK(BM_StandardFormSdp);

void BM_ShieldQp(benchmark::State& state) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<QpProblem> problems(64);
  for (auto& p : problems) {
    p.center = DynVector::Zero(2);
    for (int i = 0; i < state.range(0); ++i) {
      LinearConstraint r;
      r.a = DynVector(2);
      r.a << unit(gen), unit(gen);
      r.rhs = 0.3 * unit(gen);
      p.rows.push_back(r);
    }
  }
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(solve_qp(problems[i++ % problems.size()]));
}
BENCHMARK(BM_ShieldQp)->Arg(1)->Arg(3)->Arg(6);

}  // namespace
