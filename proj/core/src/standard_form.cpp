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
#include <functional>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "mppi_cbf/conic.hpp"
#include "newton.hpp"

namespace mppi_cbf {
namespace {

// Captures an affine symmetric-matrix-valued function G(z) as the constraint
// G(z) >= 0  <=>  sum_k z_k (-G_k) <= G_0.
LmiConstraint affine_lmi(int num_variables,
                         const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& g) {
  LmiConstraint lmi;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(num_variables);
  lmi.bound = g(zero);
  lmi.coefficients.reserve(num_variables);
  for (int k = 0; k < num_variables; ++k) {
    Eigen::VectorXd e = zero;
    e(k) = 1.0;
    lmi.coefficients.push_back(-(g(e) - lmi.bound));
  }
  return lmi;
}

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

// tau c^T x - log det(B - sum x_i F_i) - sum_i log(R^2 - x_i^2), plus an
// optional shift variable s appended to x that enters as + s I (phase 1
// minimizes tau s + c^T x). The box term keeps every centering problem
// bounded.
struct LogDetModel {
  const StandardSdp& problem;
  bool phase_one = false;
  static constexpr double kBox = 1e6;

  Eigen::MatrixXd slack(const Eigen::VectorXd& z) const {
    const int n = problem.num_variables();
    Eigen::MatrixXd s = problem.slack(z.head(n));
    if (phase_one) s.diagonal().array() += z(n);
    return s;
  }

  double barrier_parameter() const {
    return problem.slack_dimension() + 2.0 * problem.num_variables();
  }

  double evaluate(const Eigen::VectorXd& z, double tau, Eigen::VectorXd* grad,
                  Eigen::MatrixXd* hess) const {
    const int n = problem.num_variables();
    const int nz = static_cast<int>(z.size());
    const Eigen::MatrixXd s = slack(z);
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    const auto diag = llt.matrixLLT().diagonal();
    if ((diag.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();

    const Eigen::ArrayXd x = z.head(n).array();
    if ((x.abs() >= kBox).any()) return std::numeric_limits<double>::infinity();
    double value = -2.0 * diag.array().log().sum();
    value -= ((kBox - x).log() + (kBox + x).log()).sum();
    // Phase 1 also carries the objective at unit weight so that it ends near
    // the first point of the phase-2 central path.
    value += phase_one ? tau * z(n) + problem.cost.dot(z.head(n))
                       : tau * problem.cost.dot(z.head(n));
    if (grad == nullptr) return value;

    // dS/dz_k = -F_k for problem variables, +I for the phase-one shift.
    const int dim = problem.slack_dimension();
    const Eigen::MatrixXd y = llt.solve(Eigen::MatrixXd::Identity(dim, dim));
    std::vector<Eigen::MatrixXd> yd(nz);
    for (int k = 0; k < n; ++k) yd[k] = -y * problem.coefficients[k];
    if (phase_one) yd[n] = y;

    grad->setZero(nz);
    hess->setZero(nz, nz);
    if (phase_one) {
      (*grad)(n) = tau;
      grad->head(n) = problem.cost;
    } else {
      grad->head(n) = tau * problem.cost;
    }
    grad->head(n).array() += 1.0 / (kBox - x) - 1.0 / (kBox + x);
    hess->diagonal().head(n).array() += 1.0 / (kBox - x).square() + 1.0 / (kBox + x).square();
    for (int k = 0; k < nz; ++k) {
      (*grad)(k) -= yd[k].trace();
      for (int l = 0; l <= k; ++l) {
        const double h = (yd[k].array() * yd[l].transpose().array()).sum();
        (*hess)(k, l) += h;
        if (l != k) (*hess)(l, k) += h;
      }
    }
    return value;
  }
};

}  // namespace

Eigen::MatrixXd AffineMatrixMap::evaluate(const Eigen::VectorXd& x) const {
  if (x.size() != num_variables()) {
    throw std::invalid_argument("AffineMatrixMap: wrong number of variables");
  }
  Eigen::MatrixXd m = constant;
  for (int k = 0; k < num_variables(); ++k) m += x(k) * coefficients[k];
  return m;
}

int EpigraphLmi::dimension() const {
  const auto r = map.constant.rows();
  const auto c = map.constant.cols();
  return static_cast<int>(norm == MatrixNorm::kSpectral ? r + c : 1 + r * c);
}

Eigen::MatrixXd EpigraphLmi::block(const Eigen::VectorXd& x, double t) const {
  const Eigen::MatrixXd m = map.evaluate(x);
  const auto r = m.rows();
  const auto c = m.cols();
  const int dim = dimension();
  Eigen::MatrixXd out = t * Eigen::MatrixXd::Identity(dim, dim);
  if (norm == MatrixNorm::kSpectral) {
    out.topRightCorner(r, c) = m;
    out.bottomLeftCorner(c, r) = m.transpose();
  } else {
    const Eigen::VectorXd v = m.reshaped();
    out.block(0, 1, 1, r * c) = v.transpose();
    out.block(1, 0, r * c, 1) = v;
  }
  return out;
}

double EpigraphLmi::minimal_t(const Eigen::VectorXd& x) const {
  const Eigen::MatrixXd m = map.evaluate(x);
  return norm == MatrixNorm::kSpectral ? spectral_norm(m) : m.norm();
}

EpigraphLmi lift_norm_epigraph(AffineMatrixMap map, MatrixNorm norm) {
  for (const auto& k : map.coefficients) {
    if (k.rows() != map.constant.rows() || k.cols() != map.constant.cols()) {
      throw std::invalid_argument("lift_norm_epigraph: coefficient shape mismatch");
    }
  }
  return EpigraphLmi{norm, std::move(map)};
}

InequalitySdp epigraph_problem(const EpigraphLmi& lmi) {
  const int n = lmi.map.num_variables();
  InequalitySdp out;
  out.cost = Eigen::VectorXd::Zero(n + 1);
  out.cost(n) = 1.0;
  out.constraints.push_back(affine_lmi(n + 1, [&](const Eigen::VectorXd& z) {
    return lmi.block(z.head(n), z(n));
  }));
  return out;
}

InequalitySdp trust_region_lmi(const TrustRegionSdp& problem) {
  const int m = static_cast<int>(problem.mu0.size());
  const int lower = m * (m + 1) / 2;
  const int n = 2 * m + lower + 1;
  const int t_index = n - 1;
  auto p_index = [m](int i, int j) { return m + i * (i + 1) / 2 + j; };
  auto s_index = [m, lower](int j) { return m + lower + j; };

  auto unpack = [&](const Eigen::VectorXd& z, DynVector& mu, DynMatrix& p) {
    mu = z.head(m);
    p = DynMatrix::Zero(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j <= i; ++j) p(i, j) = z(p_index(i, j));
  };

  InequalitySdp out;
  out.cost = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < m; ++j) out.cost(s_index(j)) = 1.0;
  out.cost(t_index) = 1.0;

  for (const auto& row : problem.rows) {
    out.constraints.push_back(affine_lmi(n, [&](const Eigen::VectorXd& z) {
      DynVector mu;
      DynMatrix p;
      unpack(z, mu, p);
      return schur_block(row, mu, p, problem.c);
    }));
  }
  for (int j = 0; j < m; ++j) {
    for (double sign : {1.0, -1.0}) {
      out.constraints.push_back(affine_lmi(n, [&, j, sign](const Eigen::VectorXd& z) {
        return scalar(z(s_index(j)) - sign * (z(j) - problem.mu0(j)));
      }));
    }
  }
  for (int j = 0; j < m; ++j) {
    out.constraints.push_back(affine_lmi(n, [&, j](const Eigen::VectorXd& z) {
      return scalar(z(p_index(j, j)));
    }));
  }

  // |P - P0|_p <= t through the lifted epigraph of the map z -> P - P0.
  AffineMatrixMap map;
  map.constant = -Eigen::MatrixXd(problem.p0);
  for (int k = 0; k < n - 1; ++k) {
    map.coefficients.push_back(Eigen::MatrixXd::Zero(m, m));
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j) map.coefficients[p_index(i, j)](i, j) = 1.0;
  const EpigraphLmi epigraph = lift_norm_epigraph(std::move(map), problem.norm);
  out.constraints.push_back(affine_lmi(n, [&](const Eigen::VectorXd& z) {
    return epigraph.block(z.head(n - 1), z(t_index));
  }));
  return out;
}

void decode_trust_region(const TrustRegionSdp& problem, const Eigen::VectorXd& z,
                         DynVector& mu, DynMatrix& p) {
  const int m = static_cast<int>(problem.mu0.size());
  mu = z.head(m);
  p = DynMatrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j) p(i, j) = z(m + i * (i + 1) / 2 + j);
}

StandardSdp to_standard_sdp(const InequalitySdp& problem) {
  const int n = problem.num_variables();
  StandardSdp out;
  out.cost = problem.cost;
  int dim = 0;
  for (const auto& lmi : problem.constraints) {
    if (static_cast<int>(lmi.coefficients.size()) != n ||
        lmi.bound.rows() != lmi.bound.cols()) {
      throw std::invalid_argument("to_standard_sdp: malformed constraint");
    }
    out.block_sizes.push_back(static_cast<int>(lmi.bound.rows()));
    dim += static_cast<int>(lmi.bound.rows());
  }
  out.bound = Eigen::MatrixXd::Zero(dim, dim);
  out.coefficients.assign(n, Eigen::MatrixXd::Zero(dim, dim));
  int offset = 0;
  for (const auto& lmi : problem.constraints) {
    const auto size = lmi.bound.rows();
    out.bound.block(offset, offset, size, size) = lmi.bound;
    for (int k = 0; k < n; ++k) {
      out.coefficients[k].block(offset, offset, size, size) = lmi.coefficients[k];
    }
    offset += static_cast<int>(size);
  }
  return out;
}

Eigen::MatrixXd StandardSdp::slack(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd s = bound;
  for (int k = 0; k < num_variables(); ++k) s -= x(k) * coefficients[k];
  return s;
}

StandardSdp::EqualityForm StandardSdp::equality_form() const {
  const int n = num_variables();
  const int dim = slack_dimension();
  const int total = 2 * n + dim;
  EqualityForm out;
  out.objective = Eigen::MatrixXd::Zero(total, total);
  for (int k = 0; k < n; ++k) {
    out.objective(k, k) = cost(k);
    out.objective(n + k, n + k) = -cost(k);
  }
  // One equality per upper-triangular entry inside each slack block:
  //   sum_k (x+_k - x-_k) F_k(r, c) + S(r, c) = B(r, c).
  std::vector<double> rhs;
  int offset = 0;
  for (int size : block_sizes) {
    for (int r = offset; r < offset + size; ++r) {
      for (int c = r; c < offset + size; ++c) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(total, total);
        for (int k = 0; k < n; ++k) {
          a(k, k) = coefficients[k](r, c);
          a(n + k, n + k) = -coefficients[k](r, c);
        }
        if (r == c) {
          a(2 * n + r, 2 * n + c) = 1.0;
        } else {
          a(2 * n + r, 2 * n + c) = 0.5;
          a(2 * n + c, 2 * n + r) = 0.5;
        }
        out.constraint_matrices.push_back(std::move(a));
        rhs.push_back(bound(r, c));
      }
    }
    offset += size;
  }
  out.rhs = Eigen::Map<Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  return out;
}

StandardSdpSolution solve_standard_sdp(const StandardSdp& problem,
                                       const SdpSettings& settings) {
  const int n = problem.num_variables();
  StandardSdpSolution out;
  out.x = Eigen::VectorXd::Zero(n);
  int steps = 0;

  // Phase 1: minimize the shift s with B - sum x F + s I >= 0 until s < 0.
  LogDetModel phase_one{problem, true};
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n + 1);
  z(n) = std::max(0.0, -min_eigenvalue(problem.bound)) + 1.0;
  bool strict = min_eigenvalue(problem.bound) > 0.0;
  double tau = 1.0;
  for (int outer = 0; !strict && outer < settings.max_outer_iterations + 10; ++outer) {
    // Stop early: any strictly feasible slack is a valid phase-2 start.
    for (int it = 0; it < settings.max_newton_steps && !strict; ++it) {
      internal::center<LogDetModel, Eigen::VectorXd, Eigen::MatrixXd>(
          phase_one, z, tau, 1, steps);
      strict = min_eigenvalue(problem.slack(z.head(n))) > 0.0;
    }
    if (strict) break;
    if (phase_one.barrier_parameter() / tau <= 1e-10) break;
    tau *= settings.barrier_growth;
  }
  if (!strict) {
    out.status = SolveStatus::kInfeasible;
    return out;
  }

  LogDetModel phase_two{problem, false};
  Eigen::VectorXd x = z.head(n);
  const double nu = phase_two.barrier_parameter();
  tau = 1.0;
  out.status = SolveStatus::kMaxIterations;
  for (int outer = 0; outer < settings.max_outer_iterations; ++outer) {
    if (!internal::center<LogDetModel, Eigen::VectorXd, Eigen::MatrixXd>(
            phase_two, x, tau, settings.max_newton_steps, steps)) {
      break;
    }
    if (nu / tau <= settings.gap_tolerance) {
      out.status = SolveStatus::kOptimal;
      break;
    }
    tau *= settings.barrier_growth;
  }
  out.x = x;
  out.cost = problem.cost.dot(x);
  return out;
}

}  // namespace mppi_cbf
