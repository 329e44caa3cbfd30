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

#include <vector>

#include <benchmark/benchmark.h>

#include "mppi_cbf/controller.hpp"
#include "mppi_cbf/harness.hpp"

namespace {

using namespace mppi_cbf;

// One planning step near the obstacle of the single-obstacle scenario.
void BM_PlanStep(benchmark::State& state) {
  const ScenarioPreset preset = builtin_scenarios().at("single_obstacle");
  PlannerConfig config;
  config.variant = static_cast<Variant>(state.range(0));
  config.samples = static_cast<int>(state.range(1));
  config.workers = static_cast<int>(state.range(2));
  const Planner planner(config, unicycle_model(), make_cost_model(preset.scenario, preset.cost),
                        preset.scenario.obstacles);
  const std::vector<ControlInput> mean(config.horizon, ControlInput{1.0, 0.0});
  const State x{1.4, 1.2, 0.7};
  std::uint64_t step = 0;
  for (auto _ : state) benchmark::DoNotOptimize(planner.plan(x, mean, step++));
  state.SetItemsProcessed(state.iterations() * config.samples);
}
BENCHMARK(BM_PlanStep)
    ->ArgNames({"variant", "K", "workers"})
    ->Args({0, 100, 1})
    ->Args({0, 500, 1})
    ->Args({1, 100, 1})
    ->Args({2, 100, 1})
    ->Args({2, 500, 1})
    ->Args({2, 500, 4})
    ->Unit(benchmark::kMillisecond);

void BM_Episode(benchmark::State& state) {
  const ScenarioPreset preset = builtin_scenarios().at("single_obstacle");
  PlannerConfig config;
  config.variant = static_cast<Variant>(state.range(0));
  config.samples = 100;
  for (auto _ : state) benchmark::DoNotOptimize(run_episode(preset.scenario, config, preset.cost));
}
BENCHMARK(BM_Episode)->Arg(0)->Arg(2)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace
