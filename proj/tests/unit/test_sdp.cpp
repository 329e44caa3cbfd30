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

BarrierRow make_row(double a0, double a1, double b) {
  BarrierRow r;
  r.a = DynVector(2);
  r.a << a0, a1;
  r.b = b;
  return r;
}

TrustRegionSdp example_problem() {
  TrustRegionSdp p;
  p.mu0 = DynVector(2);
  p.mu0 << -1.0, 0.0;
  p.p0 = DynMatrix::Identity(2, 2);
  p.rows = {make_row(1.0, 0.0, 0.0)};
  p.c = 1.0;
  return p;
}

TrustRegionSdp random_problem(std::mt19937_64& gen, int max_rows) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  TrustRegionSdp p;
  p.mu0 = DynVector(2);
  p.mu0 << unit(gen), unit(gen);
  p.p0 = DynMatrix(2, 2);
  p.p0 << 0.3 + std::abs(unit(gen)), 0.0, 0.5 * unit(gen), 0.3 + std::abs(unit(gen));
  p.c = 0.2 + std::abs(unit(gen));
  const int rows = 1 + static_cast<int>(gen() % max_rows);
  // Every row holds at (witness, P = 0), so the program is feasible.
  const Eigen::Vector2d witness(p.mu0(0) + 2.0 * unit(gen), p.mu0(1) + 2.0 * unit(gen));
  for (int i = 0; i < rows; ++i) {
    p.rows.push_back(make_row(unit(gen), unit(gen), 0.0));
    BarrierRow& r = p.rows.back();
    r.b = r.a.dot(witness) - 0.2 * std::abs(unit(gen));
  }
  return p;
}

TEST(Sdp, SingleRowExample) {
  for (bool shortcut : {true, false}) {
    SdpSettings s;
    s.single_row_shortcut = shortcut;
    const SdpSolution sol = solve_trust_region_sdp(example_problem(), s);
    ASSERT_EQ(sol.status, SolveStatus::kOptimal);
    EXPECT_NEAR(sol.cost, 1.75, 1e-5);
    EXPECT_NEAR(sol.mu(0), 0.25, 1e-3);
    EXPECT_NEAR(sol.mu(1), 0.0, 1e-3);
    EXPECT_NEAR(sol.p(0, 0), 0.5, 1e-3);
    EXPECT_NEAR(sol.p(1, 0), 0.0, 1e-3);
    EXPECT_NEAR(sol.p(1, 1), 1.0, 1e-3);
    EXPECT_EQ(sol.single_row, shortcut);
  }
}

TEST(Sdp, SingleRowExampleMatchesGridOracle) {
  const oracle::SdpGridResult g = oracle::grid_sdp(example_problem());
  EXPECT_NEAR(g.cost, 1.75, 1e-3);
}

TEST(Sdp, FeasibleReferenceIsReturnedUnchanged) {
  TrustRegionSdp p = example_problem();
  p.mu0 << 5.0, 0.0;
  const SdpSolution sol = solve_trust_region_sdp(p);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  EXPECT_TRUE(sol.reference_feasible);
  EXPECT_EQ(sol.cost, 0.0);
  EXPECT_EQ(sol.mu, p.mu0);
  EXPECT_EQ(sol.p, p.p0);
}

TEST(Sdp, VacuousRowReturnsReference) {
  TrustRegionSdp p = example_problem();
  p.rows[0].b = -1e6;
  const SdpSolution sol = solve_trust_region_sdp(p);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  EXPECT_EQ(sol.cost, 0.0);
  EXPECT_EQ(sol.mu, p.mu0);
  EXPECT_EQ(sol.p, p.p0);
}

TEST(Sdp, ContradictoryRowsAreInfeasible) {
  TrustRegionSdp p = example_problem();
  p.rows = {make_row(1.0, 0.0, 1.0), make_row(-1.0, 0.0, 1.0)};
  EXPECT_EQ(solve_trust_region_sdp(p).status, SolveStatus::kInfeasible);
}

TEST(Sdp, RejectsNonFiniteData) {
  TrustRegionSdp p = example_problem();
  p.rows[0].b = NAN;
  EXPECT_THROW(solve_trust_region_sdp(p), std::invalid_argument);
}

TEST(Sdp, MatchesGridOracleAndSchurBlocksArePsd) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 30; ++trial) {
    const TrustRegionSdp p = random_problem(gen, 3);
    const SdpSolution sol = solve_trust_region_sdp(p);
    ASSERT_EQ(sol.status, SolveStatus::kOptimal) << "trial " << trial;
    const oracle::SdpGridResult g = oracle::grid_sdp(p);
    EXPECT_NEAR(sol.cost, g.cost, 1e-3) << "trial " << trial;
    EXPECT_NEAR(trust_region_cost(p, sol.mu, sol.p), sol.cost, 1e-9);
    for (const BarrierRow& r : p.rows) {
      EXPECT_GE(schur_residual(r, sol.mu, sol.p, p.c), -1e-6);
      EXPECT_GE(min_eigenvalue(schur_block(r, sol.mu, sol.p, p.c)), -1e-6);
    }
    EXPECT_EQ(sol.p(0, 1), 0.0);
    EXPECT_GE(sol.p(0, 0), 0.0);
    EXPECT_GE(sol.p(1, 1), 0.0);
  }
}

TEST(Sdp, SpectralNormMatchesGridOracle) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 10; ++trial) {
    TrustRegionSdp p = random_problem(gen, 2);
    p.norm = MatrixNorm::kSpectral;
    const SdpSolution sol = solve_trust_region_sdp(p);
    ASSERT_EQ(sol.status, SolveStatus::kOptimal);
    EXPECT_FALSE(sol.single_row);
    EXPECT_NEAR(sol.cost, oracle::grid_sdp(p).cost, 1e-3) << "trial " << trial;
  }
}

TEST(Sdp, ShortcutAgreesWithBarrierMethod) {
  std::mt19937_64 gen(23);
  SdpSettings ipm;
  ipm.single_row_shortcut = false;
  int shortcut_used = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const TrustRegionSdp p = random_problem(gen, 3);
    const SdpSolution fast = solve_trust_region_sdp(p);
    const SdpSolution slow = solve_trust_region_sdp(p, ipm);
    ASSERT_EQ(fast.status, SolveStatus::kOptimal);
    ASSERT_EQ(slow.status, SolveStatus::kOptimal);
    EXPECT_NEAR(fast.cost, slow.cost, 1e-5);
    shortcut_used += fast.single_row ? 1 : 0;
  }
  EXPECT_GT(shortcut_used, 50);
}

TEST(Sdp, CostIsMonotoneInConstraintLevel) {
  TrustRegionSdp p = example_problem();
  double previous = -1.0;
  for (double b = -0.5; b <= 2.0; b += 0.25) {
    p.rows[0].b = b;
    const SdpSolution sol = solve_trust_region_sdp(p);
    ASSERT_EQ(sol.status, SolveStatus::kOptimal);
    EXPECT_GE(sol.cost, previous - 1e-9);
    previous = sol.cost;
  }
}

TEST(Sdp, Deterministic) {
  std::mt19937_64 gen(3);
  const TrustRegionSdp p = random_problem(gen, 3);
  SdpSettings ipm;
  ipm.single_row_shortcut = false;
  const SdpSolution a = solve_trust_region_sdp(p, ipm);
  const SdpSolution b = solve_trust_region_sdp(p, ipm);
  EXPECT_EQ(a.mu, b.mu);
  EXPECT_EQ(a.p, b.p);
  EXPECT_EQ(a.cost, b.cost);
}

TEST(Sdp, LowerFactorReproducesCovariance) {
  DynMatrix sigma(2, 2);
  sigma << 4.0, 1.0, 1.0, 2.0;
  const DynMatrix l = lower_factor(sigma);
  EXPECT_EQ(l(0, 1), 0.0);
  EXPECT_GE(l(0, 0), 0.0);
  EXPECT_GE(l(1, 1), 0.0);
  EXPECT_LT((l * l.transpose() - sigma).norm(), 1e-12);

  DynMatrix singular(2, 2);
  singular << 1.0, 1.0, 1.0, 1.0;
  const DynMatrix ls = lower_factor(singular);
  EXPECT_LT((ls * ls.transpose() - singular).norm(), 1e-9);

  DynMatrix indefinite(2, 2);
  indefinite << 1.0, 0.0, 0.0, -1.0;
  EXPECT_THROW(lower_factor(indefinite), std::invalid_argument);
}

TEST(Sdp, SpectralNormMatchesClosedForm) {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 50; ++i) {
    Eigen::Matrix2d m;
    m << n01(gen), n01(gen), n01(gen), n01(gen);
    EXPECT_NEAR(spectral_norm(m), oracle::singular_max_2x2(m), 1e-10);
  }
}

}  // namespace
}  // namespace mppi_cbf
