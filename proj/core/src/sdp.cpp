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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "mppi_cbf/conic.hpp"
#include "newton.hpp"

namespace mppi_cbf {
namespace {

constexpr int kMaxVars = 3 * kMaxControlDim + kMaxControlDim * (kMaxControlDim + 1) / 2 + 1;
constexpr int kMaxPhaseOneVars = kMaxControlDim + 1;

using ZVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxVars, 1>;
using ZMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                           Eigen::ColMajor, kMaxVars, kMaxVars>;
using LmiMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::ColMajor, 2 * kMaxControlDim,
                             2 * kMaxControlDim>;

// Variable layout: z = (mu[0..m), vech(P) row-major lower, s[0..m), t).
struct Layout {
  int m = 0;
  int lower = 0;

  explicit Layout(int dim) : m(dim), lower(dim * (dim + 1) / 2) {}

  int size() const { return 2 * m + lower + 1; }
  int mu(int i) const { return i; }
  int p(int i, int j) const { return m + i * (i + 1) / 2 + j; }
  int s(int j) const { return m + lower + j; }
  int t() const { return 2 * m + lower; }
};

DynMatrix unpack_p(const Layout& lay, const ZVec& z) {
  DynMatrix p = DynMatrix::Zero(lay.m, lay.m);
  for (int i = 0; i < lay.m; ++i)
    for (int j = 0; j <= i; ++j) p(i, j) = z(lay.p(i, j));
  return p;
}

struct BarrierModel {
  const TrustRegionSdp& problem;
  Layout lay;

  double barrier_parameter() const {
    const int norm_nu = problem.norm == MatrixNorm::kFrobenius ? 2 : 2 * lay.m;
    return static_cast<double>(problem.rows.size()) + 3.0 * lay.m + norm_nu;
  }

  // Value of tau * objective + barrier. Returns +inf outside the domain. When
  // grad/hess are non-null they receive the derivatives.
  double evaluate(const ZVec& z, double tau, ZVec* grad, ZMat* hess) const {
    const int m = lay.m;
    const int n = lay.size();
    const bool derivs = grad != nullptr;
    if (derivs) {
      grad->setZero(n);
      hess->setZero(n, n);
    }
    constexpr double kInf = std::numeric_limits<double>::infinity();

    double value = 0.0;
    for (int j = 0; j < m; ++j) value += tau * z(lay.s(j));
    value += tau * z(lay.t());
    if (derivs) {
      for (int j = 0; j < m; ++j) (*grad)(lay.s(j)) += tau;
      (*grad)(lay.t()) += tau;
    }

    // Barrier rows: -log(a.mu - c |a^T P|^2 - b).
    const double c = problem.c;
    for (const auto& row : problem.rows) {
      DynVector w = DynVector::Zero(m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) w(j) += row.a(i) * z(lay.p(i, j));
      double g = -row.b - c * w.squaredNorm();
      for (int i = 0; i < m; ++i) g += row.a(i) * z(lay.mu(i));
      if (!(g > 0.0)) return kInf;
      value -= std::log(g);
      if (!derivs) continue;

      ZVec dg = ZVec::Zero(n);
      for (int i = 0; i < m; ++i) dg(lay.mu(i)) = row.a(i);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) dg(lay.p(i, j)) = -2.0 * c * row.a(i) * w(j);
      *grad -= dg / g;
      hess->noalias() += dg * dg.transpose() / (g * g);
      // -Hess(g)/g, Hess(g)[P_ij, P_kj] = -2 c a_i a_k.
      for (int j = 0; j < m; ++j)
        for (int i = j; i < m; ++i)
          for (int k = j; k < m; ++k)
            (*hess)(lay.p(i, j), lay.p(k, j)) += 2.0 * c * row.a(i) * row.a(k) / g;
    }

    // l1 epigraph: s_j >= +-(mu_j - mu0_j).
    for (int j = 0; j < m; ++j) {
      const double d = z(lay.mu(j)) - problem.mu0(j);
      const double ep = z(lay.s(j)) - d;
      const double em = z(lay.s(j)) + d;
      if (!(ep > 0.0) || !(em > 0.0)) return kInf;
      value -= std::log(ep) + std::log(em);
      if (!derivs) continue;
      const int is = lay.s(j);
      const int im = lay.mu(j);
      const double ip2 = 1.0 / (ep * ep);
      const double im2 = 1.0 / (em * em);
      (*grad)(is) -= 1.0 / ep + 1.0 / em;
      (*grad)(im) -= -1.0 / ep + 1.0 / em;
      (*hess)(is, is) += ip2 + im2;
      (*hess)(im, im) += ip2 + im2;
      (*hess)(is, im) += -ip2 + im2;
      (*hess)(im, is) += -ip2 + im2;
    }

    // Nonnegative diagonal of P.
    for (int j = 0; j < m; ++j) {
      const double pjj = z(lay.p(j, j));
      if (!(pjj > 0.0)) return kInf;
      value -= std::log(pjj);
      if (!derivs) continue;
      (*grad)(lay.p(j, j)) -= 1.0 / pjj;
      (*hess)(lay.p(j, j), lay.p(j, j)) += 1.0 / (pjj * pjj);
    }

    const double t = z(lay.t());
    if (!(t > 0.0)) return kInf;
    if (problem.norm == MatrixNorm::kFrobenius) {
      // -log(t^2 - |P - P0|_F^2)
      double q = t * t;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) {
          const double d = z(lay.p(i, j)) - problem.p0(i, j);
          q -= d * d;
        }
      if (!(q > 0.0)) return kInf;
      value -= std::log(q);
      if (!derivs) return value;
      ZVec dq = ZVec::Zero(n);
      dq(lay.t()) = 2.0 * t;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j)
          dq(lay.p(i, j)) = -2.0 * (z(lay.p(i, j)) - problem.p0(i, j));
      *grad -= dq / q;
      hess->noalias() += dq * dq.transpose() / (q * q);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) (*hess)(lay.p(i, j), lay.p(i, j)) += 2.0 / q;
      (*hess)(lay.t(), lay.t()) -= 2.0 / q;
      return value;
    }

    // Spectral: -log det [[t I, D], [D^T, t I]], D = P - P0.
    LmiMat f = LmiMat::Identity(2 * m, 2 * m) * t;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j <= i; ++j) {
        const double d = z(lay.p(i, j)) - problem.p0(i, j);
        f(i, m + j) = d;
        f(m + j, i) = d;
      }
    Eigen::LLT<LmiMat> llt(f);
    if (llt.info() != Eigen::Success) return kInf;
    const auto diag = llt.matrixLLT().diagonal();
    for (int k = 0; k < 2 * m; ++k) {
      if (!(diag(k) > 0.0)) return kInf;
      value -= 2.0 * std::log(diag(k));
    }
    if (!derivs) return value;

    const LmiMat y = llt.solve(LmiMat::Identity(2 * m, 2 * m));
    const LmiMat y2 = y * y;
    // Variable k is P_ij with dF = e_i e_{m+j}^T + e_{m+j} e_i^T, or t with dF = I.
    struct Entry { int index, u, v; };
    Entry entries[kMaxControlDim * (kMaxControlDim + 1) / 2];
    int count = 0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j <= i; ++j) entries[count++] = {lay.p(i, j), i, m + j};
    for (int a = 0; a < count; ++a) {
      const auto& ea = entries[a];
      (*grad)(ea.index) -= 2.0 * y(ea.v, ea.u);
      for (int b = 0; b < count; ++b) {
        const auto& eb = entries[b];
        (*hess)(ea.index, eb.index) +=
            2.0 * (y(ea.v, eb.u) * y(eb.v, ea.u) + y(ea.v, eb.v) * y(eb.u, ea.u));
      }
      (*hess)(ea.index, lay.t()) += 2.0 * y2(ea.u, ea.v);
      (*hess)(lay.t(), ea.index) += 2.0 * y2(ea.u, ea.v);
    }
    (*grad)(lay.t()) -= y.trace();
    (*hess)(lay.t(), lay.t()) += y2.trace();
    return value;
  }
};

// Phase 1: max sigma s.t. a_i . mu - b_i >= sigma, |mu - mu0|_inf <= radius.
// The closure of the trust-region feasible set projects onto {mu : a mu >= b}
// (take P -> 0), so a strictly positive sigma gives a strictly feasible mu.
struct PhaseOneModel {
  const TrustRegionSdp& problem;
  double radius;

  using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor,
                            kMaxPhaseOneVars, 1>;
  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                            Eigen::ColMajor, kMaxPhaseOneVars, kMaxPhaseOneVars>;

  int m() const { return static_cast<int>(problem.mu0.size()); }

  double barrier_parameter() const {
    return static_cast<double>(problem.rows.size()) + 2.0 * m();
  }

  double min_slack(const Vec& z) const {
    double slack = std::numeric_limits<double>::infinity();
    for (const auto& row : problem.rows)
      slack = std::min(slack, row.a.dot(z.head(m())) - row.b);
    return slack;
  }

  double evaluate(const Vec& z, double tau, Vec* grad, Mat* hess) const {
    const int n = m() + 1;
    const int is = m();
    const bool derivs = grad != nullptr;
    if (derivs) {
      grad->setZero(n);
      hess->setZero(n, n);
    }
    constexpr double kInf = std::numeric_limits<double>::infinity();
    double value = -tau * z(is);
    if (derivs) (*grad)(is) = -tau;
    for (const auto& row : problem.rows) {
      const double e = row.a.dot(z.head(m())) - row.b - z(is);
      if (!(e > 0.0)) return kInf;
      value -= std::log(e);
      if (!derivs) continue;
      Vec de(n);
      de.head(m()) = row.a;
      de(is) = -1.0;
      *grad -= de / e;
      hess->noalias() += de * de.transpose() / (e * e);
    }
    for (int j = 0; j < m(); ++j) {
      const double d = z(j) - problem.mu0(j);
      const double ep = radius - d;
      const double em = radius + d;
      if (!(ep > 0.0) || !(em > 0.0)) return kInf;
      value -= std::log(ep) + std::log(em);
      if (!derivs) continue;
      (*grad)(j) += 1.0 / ep - 1.0 / em;
      (*hess)(j, j) += 1.0 / (ep * ep) + 1.0 / (em * em);
    }
    return value;
  }
};

bool find_strict_mean(const TrustRegionSdp& problem, const SdpSettings& settings,
                      DynVector& mu, int& steps_used) {
  const int m = static_cast<int>(problem.mu0.size());
  double scale = 1.0 + problem.mu0.cwiseAbs().maxCoeff();
  for (const auto& row : problem.rows) {
    const double an = row.a.norm();
    if (an > 0.0) scale = std::max(scale, std::abs(row.b) / an);
  }
  PhaseOneModel model{problem, 1e3 * scale};
  PhaseOneModel::Vec z(m + 1);
  z.head(m) = problem.mu0;
  z(m) = model.min_slack(z) - 1.0;
  if (model.min_slack(z) > 0.0) {
    mu = problem.mu0;
    return true;
  }

  double tau = 1.0;
  const double nu = model.barrier_parameter();
  for (int outer = 0; outer < settings.max_outer_iterations + 10; ++outer) {
    // Any strictly positive slack suffices; stop as soon as one appears.
    PhaseOneModel::Vec grad;
    PhaseOneModel::Mat hess;
    for (int it = 0; it < settings.max_newton_steps; ++it) {
      if (model.min_slack(z) > 0.0) {
        mu = z.head(m);
        return true;
      }
      const double value = model.evaluate(z, tau, &grad, &hess);
      const PhaseOneModel::Vec dz = -hess.ldlt().solve(grad);
      ++steps_used;
      const double decrement = -grad.dot(dz);
      if (!(decrement > 2e-10)) break;
      double alpha = 1.0;
      int halvings = 0;
      while (!(model.evaluate(z + alpha * dz, tau, nullptr, nullptr) <=
               value + 0.25 * alpha * grad.dot(dz)) &&
             halvings < 60) {
        alpha *= 0.5;
        ++halvings;
      }
      if (halvings == 60) break;
      z += alpha * dz;
    }
    if (model.min_slack(z) > 0.0) {
      mu = z.head(m);
      return true;
    }
    if (nu / tau <= 1e-9 * scale) break;
    tau *= settings.barrier_growth;
  }
  return false;
}

void check_problem(const TrustRegionSdp& problem) {
  const auto m = problem.mu0.size();
  if (m < 1 || m > kMaxControlDim || problem.p0.rows() != m ||
      problem.p0.cols() != m) {
    throw std::invalid_argument("trust-region SDP: inconsistent dimensions");
  }
  if (!(problem.c > 0.0) || !std::isfinite(problem.c)) {
    throw std::invalid_argument("trust-region SDP: c must be positive");
  }
  if (!problem.mu0.allFinite() || !problem.p0.allFinite()) {
    throw std::invalid_argument("trust-region SDP: non-finite reference");
  }
  for (int i = 0; i < m; ++i) {
    if (problem.p0(i, i) < 0.0) {
      throw std::invalid_argument("trust-region SDP: P0 diagonal must be >= 0");
    }
    for (int j = i + 1; j < m; ++j) {
      if (problem.p0(i, j) != 0.0) {
        throw std::invalid_argument("trust-region SDP: P0 must be lower triangular");
      }
    }
  }
  for (const auto& row : problem.rows) {
    if (row.a.size() != m || !row.a.allFinite() || !std::isfinite(row.b)) {
      throw std::invalid_argument("trust-region SDP: malformed row");
    }
  }
}


// Exact optimum of the program restricted to `row` for the Frobenius norm.
// P^T a splits by column: w_j = sum_{i >= j} a_i P_ij touches only column j,
// so shrinking |P^T a|^2 to r costs F(r) with w_j = w0_j / (1 + nu d_j),
// d_j = sum_{i >= j} a_i^2. The mean pays g(r)^+ / |a|_inf with
// g(r) = b + c r - a . mu0. Stationarity of the hinge branch reads
// sum_j w0_j^2 d_j / (1 + nu d_j)^2 = (|a|_inf / 2c)^2.
// Returns false when a diagonal entry of the result would turn negative.
bool solve_single_row(const TrustRegionSdp& problem, const BarrierRow& row,
                      DynVector& mu, DynMatrix& p) {
  const int m = static_cast<int>(problem.mu0.size());
  const DynVector& a = row.a;
  int pivot = 0;
  for (int i = 1; i < m; ++i) {
    if (std::abs(a(i)) > std::abs(a(pivot))) pivot = i;
  }
  const double a_inf = std::abs(a(pivot));
  const DynVector w0 = problem.p0.transpose() * a;
  DynVector d(m);
  for (int j = 0; j < m; ++j) d(j) = a.tail(m - j).squaredNorm();

  auto shrunk = [&](double nu) {
    double r = 0.0;
    for (int j = 0; j < m; ++j) {
      const double w = w0(j) / (1.0 + nu * d(j));
      r += w * w;
    }
    return r;
  };
  auto slope = [&](double nu) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) {
      const double q = 1.0 + nu * d(j);
      s += w0(j) * w0(j) * d(j) / (q * q);
    }
    return s;
  };
  // Smallest nu with f(nu) <= target for a decreasing f.
  auto invert = [](auto&& f, double target) {
    if (f(0.0) <= target) return 0.0;
    double lo = 0.0;
    double hi = 1.0;
    while (f(hi) > target) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) return hi;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (f(mid) > target ? lo : hi) = mid;
    }
    return hi;
  };

  const double a_mu0 = a.dot(problem.mu0);
  const double k = a_inf / (2.0 * problem.c);
  double nu = invert(slope, k * k);
  double r = shrunk(nu);
  if (row.b + problem.c * r - a_mu0 <= 0.0) {
    // The optimum sits where the mean no longer has to move.
    r = (a_mu0 - row.b) / problem.c;
    nu = invert(shrunk, r);
  }

  p = problem.p0;
  for (int j = 0; j < m; ++j) {
    if (d(j) == 0.0) continue;
    const double w = w0(j) / (1.0 + nu * d(j));
    const double step = (w - w0(j)) / d(j);
    for (int i = j; i < m; ++i) p(i, j) += step * a(i);
    if (p(j, j) < 0.0) return false;
  }
  mu = problem.mu0;
  const double need = row.b + problem.c * (p.transpose() * a).squaredNorm() - a.dot(mu);
  if (need > 0.0) mu(pivot) += need / a(pivot);
  return true;
}

}  // namespace

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kMaxIterations: return "max_iterations";
  }
  return "unknown";
}

double trust_region_cost(const TrustRegionSdp& problem, const DynVector& mu,
                         const DynMatrix& p) {
  const double mean_term = (mu - problem.mu0).lpNorm<1>();
  const DynMatrix d = p - problem.p0;
  const double norm_term = problem.norm == MatrixNorm::kFrobenius
                               ? d.norm()
                               : spectral_norm(Eigen::MatrixXd(d));
  return mean_term + norm_term;
}

double schur_residual(const BarrierRow& row, const DynVector& mu,
                      const DynMatrix& p, double c) {
  const DynVector w = p.transpose() * row.a;
  return row.a.dot(mu) - c * w.squaredNorm() - row.b;
}

Eigen::MatrixXd schur_block(const BarrierRow& row, const DynVector& mu,
                            const DynMatrix& p, double c) {
  const auto m = mu.size();
  Eigen::MatrixXd block = Eigen::MatrixXd::Identity(m + 1, m + 1);
  const Eigen::VectorXd w = std::sqrt(c) * (p.transpose() * row.a);
  block.topRightCorner(m, 1) = w;
  block.bottomLeftCorner(1, m) = w.transpose();
  block(m, m) = row.a.dot(mu) - row.b;
  return block;
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetric,
                                                     Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

DynMatrix lower_factor(const DynMatrix& sigma) {
  const auto m = sigma.rows();
  if (sigma.cols() != m || m < 1 || m > kMaxControlDim || !sigma.allFinite()) {
    throw std::invalid_argument("lower_factor: expected a small square matrix");
  }
  const double scale = 1.0 + sigma.cwiseAbs().maxCoeff();
  const double tol = 1e-12 * scale;
  DynMatrix l = DynMatrix::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    double d = sigma(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d < -tol) throw std::invalid_argument("lower_factor: matrix is not PSD");
    l(j, j) = std::sqrt(std::max(d, 0.0));
    for (int i = j + 1; i < m; ++i) {
      double num = sigma(i, j);
      for (int k = 0; k < j; ++k) num -= l(i, k) * l(j, k);
      if (l(j, j) > std::sqrt(tol)) {
        l(i, j) = num / l(j, j);
      } else if (std::abs(num) > std::sqrt(tol)) {
        throw std::invalid_argument("lower_factor: matrix is not PSD");
      }
    }
  }
  return l;
}

SdpSolution solve_trust_region_sdp(const TrustRegionSdp& problem,
                                   const SdpSettings& settings) {
  check_problem(problem);
  SdpSolution out;
  out.mu = problem.mu0;
  out.p = problem.p0;

  bool reference_ok = true;
  for (const auto& row : problem.rows) {
    if (schur_residual(row, problem.mu0, problem.p0, problem.c) < 0.0) {
      reference_ok = false;
      break;
    }
  }
  if (reference_ok) {
    out.status = SolveStatus::kOptimal;
    out.cost = 0.0;
    out.reference_feasible = true;
    return out;
  }

  if (settings.single_row_shortcut && problem.norm == MatrixNorm::kFrobenius) {
    // The restriction to one row is a relaxation; a solution of it that
    // satisfies every other row is optimal.
    DynVector mu;
    DynMatrix p;
    for (const auto& row : problem.rows) {
      if (!solve_single_row(problem, row, mu, p)) continue;
      bool feasible = true;
      for (const auto& other : problem.rows) {
        if (&other != &row && schur_residual(other, mu, p, problem.c) < 0.0) {
          feasible = false;
          break;
        }
      }
      if (!feasible) continue;
      out.mu = mu;
      out.p = p;
      out.cost = trust_region_cost(problem, mu, p);
      out.status = SolveStatus::kOptimal;
      out.single_row = true;
      return out;
    }
  }

  DynVector mu;
  if (!find_strict_mean(problem, settings, mu, out.newton_steps)) {
    out.status = SolveStatus::kInfeasible;
    return out;
  }

  // Shrink P toward zero until every row keeps half of its mean margin.
  const Layout lay(static_cast<int>(problem.mu0.size()));
  const int m = lay.m;
  double theta = 1.0;
  double floor = 1e-3;
  DynMatrix p(m, m);
  for (int attempt = 0;; ++attempt) {
    p = theta * problem.p0;
    for (int j = 0; j < m; ++j) p(j, j) = std::max(p(j, j), floor);
    bool ok = true;
    for (const auto& row : problem.rows) {
      const double margin = row.a.dot(mu) - row.b;
      if (schur_residual(row, mu, p, problem.c) <= 0.5 * margin) {
        ok = false;
        break;
      }
    }
    if (ok) break;
    if (attempt > 200) {
      out.status = SolveStatus::kInfeasible;
      return out;
    }
    theta *= 0.5;
    floor *= 0.5;
  }

  ZVec z(lay.size());
  for (int i = 0; i < m; ++i) z(lay.mu(i)) = mu(i);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j) z(lay.p(i, j)) = p(i, j);
  for (int j = 0; j < m; ++j) z(lay.s(j)) = std::abs(mu(j) - problem.mu0(j)) + 1.0;
  const DynMatrix d = p - problem.p0;
  z(lay.t()) = (problem.norm == MatrixNorm::kFrobenius
                    ? d.norm()
                    : spectral_norm(Eigen::MatrixXd(d))) + 1.0;

  BarrierModel model{problem, lay};
  const double nu = model.barrier_parameter();
  double tau = 1.0;
  out.status = SolveStatus::kMaxIterations;
  for (int outer = 0; outer < settings.max_outer_iterations; ++outer) {
    if (!internal::center<BarrierModel, ZVec, ZMat>(model, z, tau, settings.max_newton_steps,
                                          out.newton_steps)) {
      break;
    }
    if (nu / tau <= settings.gap_tolerance) {
      out.status = SolveStatus::kOptimal;
      break;
    }
    tau *= settings.barrier_growth;
  }

  for (int i = 0; i < m; ++i) out.mu(i) = z(lay.mu(i));
  out.p = unpack_p(lay, z);
  out.cost = trust_region_cost(problem, out.mu, out.p);
  return out;
}

}  // namespace mppi_cbf
