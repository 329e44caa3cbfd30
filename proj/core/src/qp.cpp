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

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "mppi_cbf/conic.hpp"

namespace mppi_cbf {
namespace {

constexpr int kMaxEnumeratedRows = 16;

using Gram = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                           Eigen::ColMajor, kMaxControlDim, kMaxControlDim>;

void check_problem(const QpProblem& problem) {
  const auto m = problem.center.size();
  if (m < 1 || m > kMaxControlDim) {
    throw std::invalid_argument("solve_qp: control dimension out of range");
  }
  if (!problem.center.allFinite()) {
    throw std::invalid_argument("solve_qp: non-finite center");
  }
  if (problem.rows.size() > kMaxEnumeratedRows) {
    throw std::invalid_argument("solve_qp: too many rows for enumeration");
  }
  for (const auto& row : problem.rows) {
    if (row.a.size() != m || !row.a.allFinite() || !std::isfinite(row.rhs)) {
      throw std::invalid_argument("solve_qp: malformed constraint row");
    }
  }
}

double row_scale(const LinearConstraint& row) {
  return 1.0 + row.a.norm() + std::abs(row.rhs);
}

}  // namespace

QpResult solve_qp(const QpProblem& problem) {
  check_problem(problem);
  const int m = static_cast<int>(problem.center.size());
  const int n = static_cast<int>(problem.rows.size());
  constexpr double kTol = 1e-10;

  auto feasible = [&](const DynVector& u) {
    for (const auto& row : problem.rows) {
      if (row.a.dot(u) < row.rhs - kTol * row_scale(row)) return false;
    }
    return true;
  };

  QpResult best;
  double best_distance = std::numeric_limits<double>::infinity();

  // Every KKT point is determined by a linearly independent active set of at
  // most m rows with nonnegative multipliers.
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    const int k = std::popcount(mask);
    if (k > m) continue;

    int active[kMaxControlDim] = {};
    for (int i = 0, j = 0; i < n; ++i) {
      if (mask & (1u << i)) active[j++] = i;
    }

    DynVector u = problem.center;
    if (k > 0) {
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor,
                    kMaxControlDim, kMaxControlDim>
          a_active(k, m);
      DynVector residual(k);
      for (int j = 0; j < k; ++j) {
        const auto& row = problem.rows[active[j]];
        a_active.row(j) = row.a.transpose();
        residual(j) = row.rhs - row.a.dot(problem.center);
      }
      const Gram gram = a_active * a_active.transpose();
      Eigen::FullPivLU<Gram> lu(gram);
      lu.setThreshold(1e-12);
      if (lu.rank() < k) continue;
      const DynVector lambda = lu.solve(residual);
      if ((lambda.array() < -kTol).any()) continue;
      u += a_active.transpose() * lambda;
    }
    if (!feasible(u)) continue;

    const double distance = (u - problem.center).squaredNorm();
    if (distance < best_distance) {
      best_distance = distance;
      best.u = u;
      best.status = SolveStatus::kOptimal;
    }
  }
  if (best.status != SolveStatus::kOptimal) {
    best.u = problem.center;
  }
  return best;
}

}  // namespace mppi_cbf
