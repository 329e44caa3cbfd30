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

#include <cmath>
#include <stdexcept>

#include "mppi_cbf/harness.hpp"

namespace mppi_cbf {

double Scenario::distance_to_target(const State& s) const {
  return std::hypot(target_x - s.x, target_y - s.y);
}

void Scenario::validate() const {
  if (!start.finite() || !std::isfinite(target_x) || !std::isfinite(target_y) ||
      !std::isfinite(v_desired)) {
    throw std::invalid_argument("scenario: non-finite start, target or velocity");
  }
  if (!(goal_tolerance > 0.0)) {
    throw std::invalid_argument("scenario: goal_tolerance must be positive");
  }
  if (max_steps < 1) throw std::invalid_argument("scenario: max_steps must be >= 1");
  for (const auto& o : obstacles) mppi_cbf::validate(o);
  if (!in_safe_set(obstacles, start.x, start.y)) {
    throw std::invalid_argument("scenario: start lies inside an obstacle");
  }
}

CostModel make_cost_model(const Scenario& scenario, const CostParams& params) {
  CostModel cost;
  cost.state_cost = tracking_cost(scenario.target_x, scenario.target_y,
                                  scenario.v_desired, params.position_weight,
                                  params.velocity_weight);
  cost.control_cost_weight = params.control_cost_weight;
  cost.penalty = params.penalty;
  cost.lambda = params.lambda;
  return cost;
}

std::map<std::string, ScenarioPreset> builtin_scenarios() {
  std::map<std::string, ScenarioPreset> out;

  ScenarioPreset single;
  single.scenario.name = "single_obstacle";
  single.scenario.obstacles = {{2.2, 2.0, 0.5}};
  out.emplace(single.scenario.name, single);

  ScenarioPreset narrow;
  narrow.scenario.name = "narrow_passage";
  narrow.scenario.obstacles = {{1.5, 2.3, 0.5}, {2.4, 1.6, 0.5}, {3.3, 0.9, 0.5}};
  narrow.sampling_horizon = 40;
  out.emplace(narrow.scenario.name, narrow);
  return out;
}

}  // namespace mppi_cbf
