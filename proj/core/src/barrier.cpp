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

#include "mppi_cbf/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mppi_cbf {

void validate(const CircularObstacle& obstacle) {
  if (!std::isfinite(obstacle.cx) || !std::isfinite(obstacle.cy) ||
      !std::isfinite(obstacle.r) || !(obstacle.r > 0.0)) {
    throw std::invalid_argument(
        "obstacle must have finite center and positive radius");
  }
}

double barrier_value(const CircularObstacle& obstacle, double x, double y) {
  const double dx = x - obstacle.cx;
  const double dy = y - obstacle.cy;
  return dx * dx + dy * dy - obstacle.r * obstacle.r;
}

StateVector barrier_gradient(const CircularObstacle& obstacle,
                             const State& state) {
  return {2.0 * (state.x - obstacle.cx), 2.0 * (state.y - obstacle.cy), 0.0};
}

BarrierRow barrier_row(const ControlAffineModel& model,
                       const CircularObstacle& obstacle, const State& state,
                       const ClassKappa& alpha) {
  const StateVector grad = barrier_gradient(obstacle, state);
  const double h = barrier_value(obstacle, state.x, state.y);
  const double lf_h = grad.dot(model.drift(state));
  const Eigen::Matrix<double, 1, kControlDim> lg_h =
      grad.transpose() * model.input_matrix(state);

  BarrierRow row;
  row.a = lg_h.transpose();
  row.b = -alpha(h) - lf_h;
  row.h_value = h;
  return row;
}

bool in_safe_set(std::span<const CircularObstacle> obstacles, double x,
                 double y) {
  return std::all_of(obstacles.begin(), obstacles.end(), [&](const auto& o) {
    return barrier_value(o, x, y) >= 0.0;
  });
}

double min_barrier(std::span<const CircularObstacle> obstacles, double x,
                   double y) {
  double h = std::numeric_limits<double>::infinity();
  for (const auto& o : obstacles) h = std::min(h, barrier_value(o, x, y));
  return h;
}

}  // namespace mppi_cbf
