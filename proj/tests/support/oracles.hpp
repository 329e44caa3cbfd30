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

#ifndef MPPI_CBF_TESTS_SUPPORT_ORACLES_HPP_
#define MPPI_CBF_TESTS_SUPPORT_ORACLES_HPP_

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "mppi_cbf/conic.hpp"

namespace mppi_cbf::oracle {

/// Minimizer of |u - center|^2 over a square grid of spacing `step` on
/// box_center + [-half_width, half_width]^2, restricted to points meeting
/// every row. Returns false when no grid point is feasible.
bool grid_qp(const QpProblem& problem, const Eigen::Vector2d& box_center,
             double half_width, double step, Eigen::Vector2d& best);

/// grid_qp on [-10, 10]^2 at spacing 0.02, then refined around the
/// incumbent down to spacing 2e-7.
bool refined_grid_qp(const QpProblem& problem, Eigen::Vector2d& best);

/// Exact minimum of |mu - mu0|_1 over {mu in R^2 : a_i . mu >= rhs_i} by
/// enumerating vertices of the arrangement formed by the rows and the lines
/// through mu0. Returns +infinity when infeasible.
double l1_lp(const Eigen::Vector2d& mu0, const std::vector<Eigen::Vector2d>& a,
             const std::vector<double>& rhs, Eigen::Vector2d* argmin = nullptr);

struct SdpGridResult {
  double cost;
  Eigen::Vector2d mu;
  Eigen::Matrix2d p;
};

/// Brute-force optimum of the m = 2 trust-region program: a grid over the
/// three entries of lower-triangular P (nonnegative diagonal), refined around
/// the incumbent, with the mean part solved exactly by l1_lp for each P.
SdpGridResult grid_sdp(const TrustRegionSdp& problem, int points = 21, int levels = 8);

/// Largest singular value of a 2x2 matrix from the closed-form expression.
double singular_max_2x2(const Eigen::Matrix2d& m);

/// Standard normal quantile by bisection on erfc.
double normal_quantile(double p);

struct PhiloxVector {
  std::array<std::uint32_t, 4> counter;
  std::array<std::uint32_t, 2> key;
  std::array<std::uint32_t, 4> expected;
};

/// Published known-answer vectors for Philox4x32-10.
std::vector<PhiloxVector> philox_vectors();

}  // namespace mppi_cbf::oracle

#endif  // MPPI_CBF_TESTS_SUPPORT_ORACLES_HPP_
