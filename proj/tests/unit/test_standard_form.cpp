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

#include <random>

#include <gtest/gtest.h>

#include "mppi_cbf/conic.hpp"
#include "oracles.hpp"

namespace mppi_cbf {
namespace {

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

TEST(StandardForm, ScalarInequalityGetsScalarSlack) {
  // x <= 1
  InequalitySdp p;
  p.cost = Eigen::VectorXd::Constant(1, -1.0);
  p.constraints.push_back({scalar(1.0), {scalar(1.0)}});
  const StandardSdp s = to_standard_sdp(p);
  ASSERT_EQ(s.block_sizes, std::vector<int>{1});
  EXPECT_DOUBLE_EQ(s.slack(Eigen::VectorXd::Constant(1, 0.25))(0, 0), 0.75);

  const auto eq = s.equality_form();
  ASSERT_EQ(eq.constraint_matrices.size(), 1u);
  EXPECT_DOUBLE_EQ(eq.rhs(0), 1.0);
  // X = diag(x+, x-, s) with x = 0.25 and s = 0.75 meets x + s = 1.
  const Eigen::Vector3d diag(0.25, 0.0, 0.75);
  const Eigen::MatrixXd x = diag.asDiagonal();
  EXPECT_DOUBLE_EQ((eq.constraint_matrices[0].cwiseProduct(x)).sum(), 1.0);
  EXPECT_DOUBLE_EQ((eq.objective.cwiseProduct(x)).sum(), -0.25);

  const StandardSdpSolution sol = solve_standard_sdp(s);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  EXPECT_NEAR(sol.x(0), 1.0, 1e-5);
}

TEST(StandardForm, SpectralEpigraphOfTwoByTwoMapIsOneFourByFourBlock) {
  AffineMatrixMap map;
  map.constant = Eigen::Matrix2d::Zero();
  map.coefficients = {Eigen::Matrix2d::Identity()};
  const EpigraphLmi lmi = lift_norm_epigraph(map, MatrixNorm::kSpectral);
  EXPECT_EQ(lmi.dimension(), 4);
  const StandardSdp s = to_standard_sdp(epigraph_problem(lmi));
  EXPECT_EQ(s.block_sizes, std::vector<int>{4});
  EXPECT_EQ(s.slack_dimension(), 4);
  EXPECT_EQ(s.num_variables(), 2);
}

TEST(StandardForm, MinimalTValues) {
  AffineMatrixMap zero;
  zero.constant = Eigen::Matrix2d::Zero();
  const Eigen::VectorXd none(0);
  EXPECT_EQ(lift_norm_epigraph(zero, MatrixNorm::kSpectral).minimal_t(none), 0.0);

  AffineMatrixMap diag;
  diag.constant = Eigen::Vector2d(3.0, 1.0).asDiagonal();
  const EpigraphLmi lmi = lift_norm_epigraph(diag, MatrixNorm::kSpectral);
  EXPECT_NEAR(lmi.minimal_t(none), 3.0, 1e-12);
  EXPECT_GE(min_eigenvalue(lmi.block(none, 3.0)), -1e-12);
  EXPECT_LT(min_eigenvalue(lmi.block(none, 2.99)), 0.0);

  std::mt19937_64 gen(4);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 50; ++i) {
    AffineMatrixMap m;
    Eigen::Matrix2d a;
    a << n01(gen), n01(gen), n01(gen), n01(gen);
    m.constant = a;
    const double t = lift_norm_epigraph(m, MatrixNorm::kSpectral).minimal_t(none);
    EXPECT_NEAR(t, oracle::singular_max_2x2(a), 1e-6);
    const double f = lift_norm_epigraph(m, MatrixNorm::kFrobenius).minimal_t(none);
    EXPECT_NEAR(f, a.norm(), 1e-12);
  }
}

TEST(StandardForm, EpigraphSolveRecoversSpectralNorm) {
  AffineMatrixMap m;
  Eigen::Matrix2d a;
  a << 1.0, 2.0, -0.5, 0.3;
  m.constant = a;
  const StandardSdpSolution sol =
      solve_standard_sdp(to_standard_sdp(epigraph_problem(lift_norm_epigraph(m, MatrixNorm::kSpectral))));
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  EXPECT_NEAR(sol.cost, oracle::singular_max_2x2(a), 1e-5);
}

TEST(StandardForm, EqualityFormMatchesSlackForm) {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> n01;
  AffineMatrixMap m;
  m.constant = Eigen::Matrix2d::Random();
  m.coefficients = {Eigen::Matrix2d::Random(), Eigen::Matrix2d::Random()};
  const StandardSdp s =
      to_standard_sdp(epigraph_problem(lift_norm_epigraph(m, MatrixNorm::kSpectral)));
  const int n = s.num_variables();
  const int dim = s.slack_dimension();
  const auto eq = s.equality_form();
  EXPECT_EQ(static_cast<int>(eq.constraint_matrices.size()), dim * (dim + 1) / 2);

  Eigen::VectorXd x(n);
  for (int k = 0; k < n; ++k) x(k) = n01(gen);
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(2 * n + dim, 2 * n + dim);
  for (int k = 0; k < n; ++k) {
    big(k, k) = std::max(x(k), 0.0);
    big(n + k, n + k) = std::max(-x(k), 0.0);
  }
  big.bottomRightCorner(dim, dim) = s.slack(x);
  for (std::size_t i = 0; i < eq.constraint_matrices.size(); ++i) {
    EXPECT_NEAR(eq.constraint_matrices[i].cwiseProduct(big).sum(), eq.rhs(i), 1e-12);
  }
  EXPECT_NEAR(eq.objective.cwiseProduct(big).sum(), s.cost.dot(x), 1e-12);
}

TEST(StandardForm, GenericSolverAgreesWithTrustRegionSolver) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    TrustRegionSdp p;
    p.mu0 = DynVector(2);
    p.mu0 << unit(gen), unit(gen);
    p.p0 = DynMatrix(2, 2);
    p.p0 << 0.5 + 0.5 * std::abs(unit(gen)), 0.0, 0.3 * unit(gen),
        0.5 + 0.5 * std::abs(unit(gen));
    p.c = 0.5;
    p.norm = trial % 2 == 0 ? MatrixNorm::kFrobenius : MatrixNorm::kSpectral;
    const int rows = 1 + trial % 3;
    const Eigen::Vector2d witness(p.mu0(0) + 2.0 * unit(gen), p.mu0(1) + 2.0 * unit(gen));
    for (int i = 0; i < rows; ++i) {
      BarrierRow r;
      r.a = DynVector(2);
      r.a << unit(gen), unit(gen);
      r.b = r.a.dot(witness) - 0.2 * std::abs(unit(gen));
      p.rows.push_back(r);
    }
    const SdpSolution direct = solve_trust_region_sdp(p);
    const StandardSdpSolution generic = solve_standard_sdp(to_standard_sdp(trust_region_lmi(p)));
    ASSERT_EQ(direct.status, SolveStatus::kOptimal);
    ASSERT_EQ(generic.status, SolveStatus::kOptimal) << "trial " << trial;
    DynVector mu;
    DynMatrix pm;
    decode_trust_region(p, generic.x, mu, pm);
    EXPECT_NEAR(trust_region_cost(p, mu, pm), direct.cost, 1e-4) << "trial " << trial;
    EXPECT_NEAR(generic.cost, direct.cost, 1e-4) << "trial " << trial;
  }
}

}  // namespace
}  // namespace mppi_cbf
