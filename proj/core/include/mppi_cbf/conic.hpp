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

// Small dense convex solvers used by the safety filters.
//
//  * solve_qp: Euclidean projection onto a polyhedron {u : a_i . u >= rhs_i},
//    solved exactly by enumerating active sets (control dimension <= 3).
//  * solve_trust_region_sdp: the distribution-reshaping program
//
//        min  |mu - mu0|_1 + |P - P0|_p
//        s.t. a_i . mu - c |a_i^T P|^2 >= b_i      for every row i
//             P lower triangular, diag(P) >= 0
//
//    Each row constraint is the Schur complement of
//    [[I, sqrt(c) P^T a_i], [sqrt(c) a_i^T P, a_i . mu - b_i]] >= 0, so the
//    problem is an SDP; it is solved with a log-barrier interior-point method
//    on the scalar Schur form.
//  * to_standard_sdp / solve_standard_sdp: the same problem written as generic
//    LMIs with slack blocks, solved by a generic log-det barrier. Used as an
//    independent cross-check of the specialized path.

#ifndef MPPI_CBF_CONIC_HPP_
#define MPPI_CBF_CONIC_HPP_

#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "mppi_cbf/barrier.hpp"

namespace mppi_cbf {

enum class SolveStatus { kOptimal, kInfeasible, kMaxIterations };

std::string_view to_string(SolveStatus status);

// ---------------------------------------------------------------- QP -------

// a . u >= rhs
struct LinearConstraint {
  DynVector a;
  double rhs = 0.0;
};

struct QpProblem {
  DynVector center;
  std::vector<LinearConstraint> rows;
};

struct QpResult {
  SolveStatus status = SolveStatus::kInfeasible;
  DynVector u;
};

/// Minimizes |u - center|^2 subject to every row. Throws std::invalid_argument
/// for non-finite data or a dimension outside [1, kMaxControlDim].
QpResult solve_qp(const QpProblem& problem);

// ---------------------------------------------------------- trust region ---

enum class MatrixNorm { kFrobenius, kSpectral };

struct TrustRegionSdp {
  DynVector mu0;
  DynMatrix p0;  // lower triangular, nonnegative diagonal
  std::vector<BarrierRow> rows;
  double c = 1.0;
  MatrixNorm norm = MatrixNorm::kFrobenius;
};

struct SdpSettings {
  double gap_tolerance = 1e-6;
  double barrier_growth = 10.0;
  int max_newton_steps = 100;  // per centering stage
  int max_outer_iterations = 20;
  // Frobenius problems whose optimum is fixed by one row are solved exactly
  // through the column-separable structure of P^T a; others use the
  // barrier method.
  bool single_row_shortcut = true;
};

struct SdpSolution {
  DynVector mu;
  DynMatrix p;
  double cost = 0.0;
  SolveStatus status = SolveStatus::kInfeasible;
  int newton_steps = 0;
  // (mu0, P0) already satisfied every row; returned unchanged.
  bool reference_feasible = false;
  // Returned by the single-row shortcut rather than the barrier method.
  bool single_row = false;
};

SdpSolution solve_trust_region_sdp(const TrustRegionSdp& problem,
                                   const SdpSettings& settings = {});

/// |mu - mu0|_1 + |P - P0|_p.
double trust_region_cost(const TrustRegionSdp& problem, const DynVector& mu,
                         const DynMatrix& p);

/// a . mu - c |a^T P|^2 - b. Nonnegative iff the row's block LMI holds.
double schur_residual(const BarrierRow& row, const DynVector& mu,
                      const DynMatrix& p, double c);

/// [[I, sqrt(c) P^T a], [sqrt(c) a^T P, a . mu - b]].
Eigen::MatrixXd schur_block(const BarrierRow& row, const DynVector& mu,
                            const DynMatrix& p, double c);

double min_eigenvalue(const Eigen::MatrixXd& symmetric);

/// Lower-triangular P with nonnegative diagonal and P P^T = sigma, for any
/// symmetric positive semidefinite sigma. Throws if sigma is indefinite.
DynMatrix lower_factor(const DynMatrix& sigma);

/// Spectral norm (largest singular value) of a small matrix.
double spectral_norm(const Eigen::MatrixXd& m);

// ------------------------------------------------------ norm epigraphs -----

// M(x) = constant + sum_k x_k coefficients[k].
struct AffineMatrixMap {
  Eigen::MatrixXd constant;
  std::vector<Eigen::MatrixXd> coefficients;

  Eigen::MatrixXd evaluate(const Eigen::VectorXd& x) const;
  int num_variables() const { return static_cast<int>(coefficients.size()); }
};

// Linear matrix inequality certifying |M(x)|_p <= t:
//   spectral:  [[t I, M(x)], [M(x)^T, t I]] >= 0
//   frobenius: [[t, vec(M(x))^T], [vec(M(x)), t I]] >= 0 (second-order cone)
struct EpigraphLmi {
  MatrixNorm norm = MatrixNorm::kSpectral;
  AffineMatrixMap map;

  int dimension() const;
  Eigen::MatrixXd block(const Eigen::VectorXd& x, double t) const;
  /// Smallest t for which block(x, t) is positive semidefinite.
  double minimal_t(const Eigen::VectorXd& x) const;
};

EpigraphLmi lift_norm_epigraph(AffineMatrixMap map, MatrixNorm norm);

// ------------------------------------------------------- standard form -----

// sum_i x_i coefficients[i] <= bound, one symmetric block per constraint.
struct LmiConstraint {
  Eigen::MatrixXd bound;
  std::vector<Eigen::MatrixXd> coefficients;
};

// min cost^T x  s.t. every LmiConstraint.
struct InequalitySdp {
  Eigen::VectorXd cost;
  std::vector<LmiConstraint> constraints;

  int num_variables() const { return static_cast<int>(cost.size()); }
};

// Slack form: sum_i x_i F_i + S = B with S = diag(S_1, ..., S_q) >= 0.
//
// equality_form() expresses the same problem as min C . X s.t. A_k . X = b_k,
// X >= 0, with X = diag(diag(x+), diag(x-), S) and x = x+ - x-.
struct StandardSdp {
  Eigen::VectorXd cost;
  Eigen::MatrixXd bound;                     // B, block diagonal
  std::vector<Eigen::MatrixXd> coefficients;  // F_i, block diagonal
  std::vector<int> block_sizes;

  struct EqualityForm {
    Eigen::MatrixXd objective;
    std::vector<Eigen::MatrixXd> constraint_matrices;
    Eigen::VectorXd rhs;
  };

  int num_variables() const { return static_cast<int>(cost.size()); }
  int slack_dimension() const { return static_cast<int>(bound.rows()); }
  EqualityForm equality_form() const;
  Eigen::MatrixXd slack(const Eigen::VectorXd& x) const;
};

StandardSdp to_standard_sdp(const InequalitySdp& problem);

/// min t s.t. the epigraph LMI; variables are (x, t).
InequalitySdp epigraph_problem(const EpigraphLmi& lmi);

/// The trust-region program written as LMIs over the variable vector
/// z = (mu, vech(P) row-major lower, l1 slacks s, norm bound t).
InequalitySdp trust_region_lmi(const TrustRegionSdp& problem);

/// Recovers (mu, P) from the trust_region_lmi variable vector.
void decode_trust_region(const TrustRegionSdp& problem, const Eigen::VectorXd& z,
                         DynVector& mu, DynMatrix& p);

struct StandardSdpSolution {
  Eigen::VectorXd x;
  double cost = 0.0;
  SolveStatus status = SolveStatus::kInfeasible;
};

/// Generic dense log-det barrier method on the slack form (phase 1 finds a
/// strictly feasible slack, phase 2 follows the central path).
StandardSdpSolution solve_standard_sdp(const StandardSdp& problem,
                                       const SdpSettings& settings = {});

}  // namespace mppi_cbf

#endif  // MPPI_CBF_CONIC_HPP_
