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

#include <algorithm>
#include <cmath>
#include <limits>

#include "mppi_cbf/harness.hpp"
#include "mppi_cbf/random.hpp"

namespace mppi_cbf {
namespace {

bool trajectory_safe(std::span<const State> trajectory,
                     std::span<const CircularObstacle> obstacles) {
  return std::all_of(trajectory.begin(), trajectory.end(), [&](const State& s) {
    return in_safe_set(obstacles, s.x, s.y);
  });
}

}  // namespace

double SnapshotRecord::safe_fraction() const {
  if (safe.empty()) return 1.0;
  const auto n = std::count(safe.begin(), safe.end(), true);
  return static_cast<double>(n) / static_cast<double>(safe.size());
}

SnapshotRecord capture_snapshot(const SampleBatch& batch,
                                std::span<const CircularObstacle> obstacles,
                                double time) {
  SnapshotRecord snap;
  snap.time = time;
  for (int k = 0; k < batch.samples; ++k) {
    const auto traj = batch.trajectory(k);
    snap.trajectories.emplace_back(traj.begin(), traj.end());
    snap.costs.push_back(batch.costs[static_cast<std::size_t>(k)]);
    snap.safe.push_back(trajectory_safe(traj, obstacles));
  }
  return snap;
}

double safe_sample_fraction(const SampleBatch& batch,
                            std::span<const CircularObstacle> obstacles) {
  if (batch.samples == 0) return 1.0;
  int safe = 0;
  for (int k = 0; k < batch.samples; ++k) {
    safe += trajectory_safe(batch.trajectory(k), obstacles) ? 1 : 0;
  }
  return static_cast<double>(safe) / batch.samples;
}

EpisodeRecord run_episode(const Scenario& scenario, const PlannerConfig& config,
                          const CostParams& cost, const EpisodeOptions& options) {
  scenario.validate();
  const ControlAffineModel model = unicycle_model();
  const CostModel cost_model = make_cost_model(scenario, cost);
  const Planner planner(config, model, cost_model, scenario.obstacles);

  EpisodeRecord record;
  EpisodeSummary& summary = record.summary;
  summary.min_h = min_barrier(scenario.obstacles, scenario.start.x, scenario.start.y);

  std::vector<ControlInput> mean(static_cast<std::size_t>(config.horizon));
  State x = scenario.start;
  double safe_sum = 0.0;
  int step = 0;
  while (scenario.distance_to_target(x) > scenario.goal_tolerance &&
         step < scenario.max_steps) {
    PlanResult plan = planner.plan(x, mean, static_cast<std::uint64_t>(step));
    if (step == options.snapshot_step) {
      record.snapshot = capture_snapshot(plan.batch, scenario.obstacles, step * config.dt);
    }

    CounterRng rng(config.seed, CounterRng::Domain::kExecution,
                   static_cast<std::uint64_t>(step), 0);
    const ControlVector noise = config.mu0 + planner.p0() * rng.normal2();
    x = mppi_cbf::step(model, x, plan.applied, noise, config.dt);
    ++step;

    EpisodeRow row;
    row.step = step;
    row.t = step * config.dt;
    row.state = x;
    row.control = plan.applied;
    const ControlVector u = plan.applied.vector();
    row.q = cost_model.state_cost(x, plan.applied) +
            0.5 * u.dot(cost_model.control_cost_weight * u);
    row.min_h = min_barrier(scenario.obstacles, x.x, x.y);
    row.safe_frac = safe_sample_fraction(plan.batch, scenario.obstacles);
    row.fallback = plan.fallback;
    record.rows.push_back(row);

    summary.total_cost += row.q * config.dt;
    summary.min_h = std::min(summary.min_h, row.min_h);
    summary.violations += row.min_h < 0.0 ? 1 : 0;
    summary.fallbacks += row.fallback ? 1 : 0;
    summary.sdp_solves += plan.batch.sdp_solves;
    summary.sdp_infeasible += plan.batch.sdp_infeasible;
    safe_sum += row.safe_frac;
    mean = std::move(plan.next_mean);
  }
  summary.steps = step;
  summary.completed = scenario.distance_to_target(x) <= scenario.goal_tolerance;
  summary.mean_safe_frac = step > 0 ? safe_sum / step : 1.0;
  return record;
}

}  // namespace mppi_cbf
