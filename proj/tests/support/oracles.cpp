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

#include "oracles.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>

namespace mppi_cbf::oracle {

bool grid_qp(const QpProblem& problem, const Eigen::Vector2d& box_center,
             double half_width, double step, Eigen::Vector2d& best) {
  const int n = static_cast<int>(std::lround(2.0 * half_width / step));
  double best_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const Eigen::Vector2d u(box_center(0) - half_width + i * step,
                              box_center(1) - half_width + j * step);
      bool ok = true;
      for (const auto& row : problem.rows) {
        if (row.a.dot(u) < row.rhs) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      const double v = (u - problem.center).squaredNorm();
      if (v < best_value) {
        best_value = v;
        best = u;
      }
    }
  }
  return std::isfinite(best_value);
}

bool refined_grid_qp(const QpProblem& problem, Eigen::Vector2d& best) {
  if (!grid_qp(problem, Eigen::Vector2d::Zero(), 10.0, 0.02, best)) return false;
  // Each stage spans 100 cells of the previous one around the incumbent.
  double step = 0.02;
  for (int stage = 0; stage < 5; ++stage) {
    Eigen::Vector2d fine = best;
    if (grid_qp(problem, best, 100.0 * step, step / 10.0, fine)) best = fine;
    step /= 10.0;
  }
  return true;
}

double l1_lp(const Eigen::Vector2d& mu0, const std::vector<Eigen::Vector2d>& a,
             const std::vector<double>& rhs, Eigen::Vector2d* argmin) {
  // Lines n . x = d: the constraint boundaries and the two axes through mu0.
  std::vector<Eigen::Vector2d> normals = a;
  std::vector<double> offsets = rhs;
  normals.emplace_back(1.0, 0.0);
  offsets.push_back(mu0(0));
  normals.emplace_back(0.0, 1.0);
  offsets.push_back(mu0(1));

  auto feasible = [&](const Eigen::Vector2d& x) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].dot(x) < rhs[i] - 1e-9 * (1.0 + std::abs(rhs[i]))) return false;
    }
    return true;
  };
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](const Eigen::Vector2d& x) {
    if (!feasible(x)) return;
    const double v = (x - mu0).cwiseAbs().sum();
    if (v < best) {
      best = v;
      if (argmin) *argmin = x;
    }
  };
  consider(mu0);
  for (std::size_t i = 0; i < normals.size(); ++i) {
    for (std::size_t j = i + 1; j < normals.size(); ++j) {
      Eigen::Matrix2d m;
      m.row(0) = normals[i].transpose();
      m.row(1) = normals[j].transpose();
      const double det = m.determinant();
      if (std::abs(det) < 1e-14) continue;
      consider(m.inverse() * Eigen::Vector2d(offsets[i], offsets[j]));
    }
  }
  return best;
}

namespace {

double grid_cost(const TrustRegionSdp& problem, const Eigen::Matrix2d& p,
                 Eigen::Vector2d* mu) {
  std::vector<Eigen::Vector2d> a;
  std::vector<double> rhs;
  for (const auto& row : problem.rows) {
    const Eigen::Vector2d ai(row.a(0), row.a(1));
    a.push_back(ai);
    rhs.push_back(row.b + problem.c * (p.transpose() * ai).squaredNorm());
  }
  const Eigen::Vector2d mu0(problem.mu0(0), problem.mu0(1));
  const Eigen::Matrix2d p0 = Eigen::Matrix2d(problem.p0);
  const double lp = l1_lp(mu0, a, rhs, mu);
  const Eigen::Matrix2d d = p - p0;
  const double norm = problem.norm == MatrixNorm::kFrobenius ? d.norm()
                                                             : singular_max_2x2(d);
  return lp + norm;
}

}  // namespace

SdpGridResult grid_sdp(const TrustRegionSdp& problem, int points, int levels) {
  const Eigen::Matrix2d p0 = Eigen::Matrix2d(problem.p0);
  // Entries (p00, p10, p11); shrinking never needs to leave [0, |P0|] on the
  // diagonal or [-|P0|, |P0|] below it.
  const double span = std::max(p0.norm(), 1e-3);
  Eigen::Vector3d lo(0.0, -span, 0.0);
  Eigen::Vector3d hi(span, span, span);
  SdpGridResult best{std::numeric_limits<double>::infinity(), {}, p0};
  for (int level = 0; level < levels; ++level) {
    const Eigen::Vector3d h = (hi - lo) / (points - 1);
    for (int i = 0; i < points; ++i) {
      for (int j = 0; j < points; ++j) {
        for (int k = 0; k < points; ++k) {
          Eigen::Matrix2d p;
          p << lo(0) + i * h(0), 0.0, lo(1) + j * h(1), lo(2) + k * h(2);
          Eigen::Vector2d mu;
          const double v = grid_cost(problem, p, &mu);
          if (v < best.cost) best = {v, mu, p};
        }
      }
    }
    // Also probe the reference itself, which the grid may miss.
    Eigen::Vector2d mu;
    const double v0 = grid_cost(problem, p0, &mu);
    if (v0 < best.cost) best = {v0, mu, p0};

    const Eigen::Vector3d center(best.p(0, 0), best.p(1, 0), best.p(1, 1));
    lo = center - 2.0 * h;
    hi = center + 2.0 * h;
    lo(0) = std::max(lo(0), 0.0);
    lo(2) = std::max(lo(2), 0.0);
  }
  return best;
}

double singular_max_2x2(const Eigen::Matrix2d& m) {
  // sigma_max^2 = (|M|_F^2 + sqrt(|M|_F^4 - 4 det(M)^2)) / 2.
  const double f = m.squaredNorm();
  const double det = m.determinant();
  return std::sqrt(0.5 * (f + std::sqrt(std::max(0.0, f * f - 4.0 * det * det))));
}

double normal_quantile(double p) {
  double lo = -40.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
    (cdf < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<PhiloxVector> philox_vectors() {
  return {
      {{0u, 0u, 0u, 0u}, {0u, 0u}, {0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}},
      {{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
       {0xffffffffu, 0xffffffffu},
       {0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}},
      {{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
       {0xa4093822u, 0x299f31d0u},
       {0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}},
  };
}

}  // namespace mppi_cbf::oracle
