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
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "mppi_cbf/conic.hpp"
#include "oracles.hpp"

namespace mppi_cbf {
namespace {

LinearConstraint row(double a0, double a1, double rhs) {
  LinearConstraint r;
  r.a = DynVector(2);
  r.a << a0, a1;
  r.rhs = rhs;
  return r;
}

DynVector vec2(double x, double y) {
  DynVector v(2);
  v << x, y;
  return v;
}

TEST(Qp, InactiveRowReturnsCenter) {
  QpProblem p{vec2(1.0, 0.0), {row(-4.4, 0.0, -8.59)}};
  const QpResult r = solve_qp(p);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.u(0), 1.0, 1e-12);
  EXPECT_NEAR(r.u(1), 0.0, 1e-12);
}

TEST(Qp, ProjectsOntoActiveHalfspace) {
  QpProblem p{vec2(0.0, 0.0), {row(1.0, 0.0, 2.0)}};
  const QpResult r = solve_qp(p);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.u(0), 2.0, 1e-12);
  EXPECT_NEAR(r.u(1), 0.0, 1e-12);
}

TEST(Qp, EmptyRowsReturnCenter) {
  QpProblem p{vec2(-3.0, 7.0), {}};
  const QpResult r = solve_qp(p);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_EQ(r.u, p.center);
}

TEST(Qp, ContradictoryRowsAreInfeasible) {
  QpProblem p{vec2(0.0, 0.0), {row(1.0, 0.0, 1.0), row(-1.0, 0.0, 1.0)}};
  EXPECT_EQ(solve_qp(p).status, SolveStatus::kInfeasible);
}

TEST(Qp, RejectsBadInput) {
  QpProblem nan{vec2(NAN, 0.0), {}};
  EXPECT_THROW(solve_qp(nan), std::invalid_argument);
  QpProblem big{DynVector::Zero(0), {}};
  EXPECT_THROW(solve_qp(big), std::invalid_argument);
}

TEST(Qp, MatchesGridOracleOnRandomFeasibleInstances) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  int checked = 0;
  while (checked < 40) {
    QpProblem p{vec2(4.0 * unit(gen), 4.0 * unit(gen)), {}};
    const int rows = 1 + static_cast<int>(gen() % 4);
    for (int i = 0; i < rows; ++i) {
      // Rows pass near a random interior point, so the set is nonempty.
      const double ax = unit(gen), ay = unit(gen);
      const double px = 3.0 * unit(gen), py = 3.0 * unit(gen);
      p.rows.push_back(row(ax, ay, ax * px + ay * py - 0.5 * std::abs(unit(gen))));
    }
    Eigen::Vector2d oracle;
    if (!oracle::refined_grid_qp(p, oracle)) continue;
    const QpResult r = solve_qp(p);
    ASSERT_EQ(r.status, SolveStatus::kOptimal);
    const Eigen::Vector2d c = p.center;
    const double solver = (Eigen::Vector2d(r.u) - c).norm();
    const double grid = (oracle - c).norm();
    EXPECT_NEAR(solver, grid, 1e-4);
    EXPECT_NEAR((Eigen::Vector2d(r.u) - oracle).norm(), 0.0, 1e-3);
    for (const auto& rw : p.rows) EXPECT_GE(rw.a.dot(r.u), rw.rhs - 1e-9);
    ++checked;
  }
}

}  // namespace
}  // namespace mppi_cbf
