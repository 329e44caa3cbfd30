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

#ifndef MPPI_CBF_BARRIER_HPP_
#define MPPI_CBF_BARRIER_HPP_

#include <span>

#include <Eigen/Core>

#include "mppi_cbf/dynamics.hpp"

namespace mppi_cbf {

// Conic routines accept control dimensions up to this bound without heap
// allocation.
inline constexpr int kMaxControlDim = 3;

using DynVector =
    Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxControlDim, 1>;
using DynMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                Eigen::ColMajor, kMaxControlDim, kMaxControlDim>;

struct CircularObstacle {
  double cx = 0.0;
  double cy = 0.0;
  double r = 1.0;
};

/// Throws std::invalid_argument unless r > 0 and all fields are finite.
void validate(const CircularObstacle& obstacle);

/// Extended class-K function used in the barrier condition.
struct ClassKappa {
  enum class Kind { kLinear, kCubic };

  Kind kind = Kind::kLinear;
  double gamma = 1.0;

  double operator()(double h) const {
    return kind == Kind::kLinear ? gamma * h : gamma * h * h * h;
  }
};

// Linearized barrier condition: u is admissible iff a . u >= b.
struct BarrierRow {
  DynVector a;
  double b = 0.0;
  double h_value = 0.0;

  // Rows with |a| below this are treated as carrying no control authority.
  static constexpr double kDegenerateNorm = 1e-9;

  bool degenerate() const { return a.norm() < kDegenerateNorm; }
};

/// h(x, y) = (x - cx)^2 + (y - cy)^2 - r^2.
double barrier_value(const CircularObstacle& obstacle, double x, double y);

/// Gradient of h with respect to the full state (x, y, theta).
StateVector barrier_gradient(const CircularObstacle& obstacle,
                             const State& state);

/// Builds a = L_g h(x) and b = -alpha(h(x)) - L_f h(x) for one obstacle.
BarrierRow barrier_row(const ControlAffineModel& model,
                       const CircularObstacle& obstacle, const State& state,
                       const ClassKappa& alpha);

/// True iff h_i(x, y) >= 0 for every obstacle.
bool in_safe_set(std::span<const CircularObstacle> obstacles, double x,
                 double y);

/// Minimum h over the obstacles; +infinity when there are none.
double min_barrier(std::span<const CircularObstacle> obstacles, double x,
                   double y);

}  // namespace mppi_cbf

#endif  // MPPI_CBF_BARRIER_HPP_
