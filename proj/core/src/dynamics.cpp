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

#include "mppi_cbf/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mppi_cbf {

bool State::finite() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(theta);
}

bool ControlInput::finite() const {
  return std::isfinite(v) && std::isfinite(omega);
}

ControlAffineModel unicycle_model() {
  ControlAffineModel model;
  model.drift = [](const State&) -> StateVector { return StateVector::Zero(); };
  model.input_matrix = [](const State& s) -> InputMatrix {
    InputMatrix g;
    g << std::cos(s.theta), 0.0,
         std::sin(s.theta), 0.0,
         0.0, 1.0;
    return g;
  };
  model.noise_dim = kControlDim;
  return model;
}

double angle_distance(double a, double b) {
  double d = std::remainder(a - b, 2.0 * std::numbers::pi);
  return std::abs(d);
}

State step(const ControlAffineModel& model, const State& state,
           const ControlInput& u, const ControlVector& noise, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("step: dt must be positive and finite, got " +
                                std::to_string(dt));
  }
  if (!state.finite() || !u.finite() || !noise.allFinite()) {
    throw std::invalid_argument("step: non-finite state, control or noise");
  }
  ControlVector effective = u.vector() + noise;
  if (model.bounds) {
    effective = effective.cwiseMax(model.bounds->lower)
                    .cwiseMin(model.bounds->upper);
  }
  const StateVector x = state.vector();
  const StateVector next =
      x + (model.drift(state) + model.input_matrix(state) * effective) * dt;
  return State::from_vector(next);
}

std::vector<State> rollout(const ControlAffineModel& model, const State& x0,
                           std::span<const ControlInput> mean_controls,
                           std::span<const ControlVector> noises, double dt) {
  if (mean_controls.size() != noises.size()) {
    throw std::invalid_argument("rollout: controls and noises differ in length");
  }
  std::vector<State> states;
  states.reserve(mean_controls.size() + 1);
  states.push_back(x0);
  for (std::size_t t = 0; t < mean_controls.size(); ++t) {
    states.push_back(step(model, states.back(), mean_controls[t], noises[t], dt));
  }
  return states;
}

}  // namespace mppi_cbf
