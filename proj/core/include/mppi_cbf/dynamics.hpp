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

#ifndef MPPI_CBF_DYNAMICS_HPP_
#define MPPI_CBF_DYNAMICS_HPP_

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace mppi_cbf {

inline constexpr int kStateDim = 3;
inline constexpr int kControlDim = 2;

using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using ControlVector = Eigen::Matrix<double, kControlDim, 1>;
using InputMatrix = Eigen::Matrix<double, kStateDim, kControlDim>;

// Planar pose. theta is never wrapped; compare headings with angle_distance.
struct State {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  StateVector vector() const { return {x, y, theta}; }
  static State from_vector(const StateVector& s) { return {s(0), s(1), s(2)}; }
  bool finite() const;
};

struct ControlInput {
  double v = 0.0;
  double omega = 0.0;

  ControlVector vector() const { return {v, omega}; }
  static ControlInput from_vector(const ControlVector& u) { return {u(0), u(1)}; }
  bool finite() const;
};

// Box bounds on the control, applied after noise is added.
struct ControlBounds {
  ControlVector lower;
  ControlVector upper;
};

/// dx = f(x) dt + G(x) (u dt + dW): drift f, input matrix G, and the
/// dimension of the control-space noise.
struct ControlAffineModel {
  std::function<StateVector(const State&)> drift;
  std::function<InputMatrix(const State&)> input_matrix;
  int noise_dim = kControlDim;
  std::optional<ControlBounds> bounds;
};

/// Driftless unicycle, G(x) = [[cos th, 0], [sin th, 0], [0, 1]].
ControlAffineModel unicycle_model();

/// Smallest absolute difference between two headings, in [0, pi].
double angle_distance(double a, double b);

/// One explicit Euler step x + (f(x) + G(x)(u + noise)) dt.
/// Throws std::invalid_argument on non-finite input or dt <= 0.
State step(const ControlAffineModel& model, const State& state,
           const ControlInput& u, const ControlVector& noise, double dt);

/// Applies `step` along the horizon; element 0 of the result is x0.
std::vector<State> rollout(const ControlAffineModel& model, const State& x0,
                           std::span<const ControlInput> mean_controls,
                           std::span<const ControlVector> noises, double dt);

}  // namespace mppi_cbf

#endif  // MPPI_CBF_DYNAMICS_HPP_
