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

#include "mppi_cbf/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "mppi_cbf/parallel.hpp"
#include "mppi_cbf/random.hpp"

namespace mppi_cbf {
namespace {

ControlVector draw(const DynVector& mu, const DynMatrix& p,
                   const Eigen::Vector2d& z) {
  return mu + p * z;
}

}  // namespace

std::string_view to_string(Variant variant) {
  switch (variant) {
    case Variant::kMppi: return "mppi";
    case Variant::kShielded: return "shielded";
    case Variant::kTrustRegion: return "trust_region";
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
  if (name == "mppi") return Variant::kMppi;
  if (name == "shielded") return Variant::kShielded;
  if (name == "trust_region") return Variant::kTrustRegion;
  return std::nullopt;
}

RunningCost tracking_cost(double target_x, double target_y, double v_desired,
                          double position_weight, double velocity_weight) {
  return [=](const State& s, const ControlInput& u) {
    const double dx = target_x - s.x;
    const double dy = target_y - s.y;
    const double dv = v_desired - u.v;
    return position_weight * (dx * dx + dy * dy) + velocity_weight * dv * dv;
  };
}

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double PlannerConfig::resolved_trust_c() const {
  return trust_c ? *trust_c : normal_quantile(1.0 - delta);
}

void PlannerConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("planner config: " + what);
  };
  if (samples < 1) fail("samples must be >= 1");
  if (horizon < 1) fail("horizon must be >= 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt must be positive");
  if (!(delta > 0.0 && delta < 1.0)) fail("delta must lie in (0, 1)");
  if (trust_c && !(*trust_c > 0.0)) fail("trust_c must be positive");
  if (!(alpha.gamma > 0.0)) fail("alpha gamma must be positive");
  if (workers < 1) fail("workers must be >= 1");
  if (!mu0.allFinite() || !sigma0.allFinite()) fail("non-finite noise parameters");
  if ((sigma0 - sigma0.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    fail("Sigma0 must be symmetric");
  }
}

double cost_to_go(const CostModel& cost, std::span<const State> trajectory,
                  std::span<const ControlInput> controls, double dt,
                  std::span<const CircularObstacle> obstacles) {
  if (trajectory.size() != controls.size() + 1) {
    throw std::invalid_argument("cost_to_go: trajectory must have T + 1 states");
  }
  double running = 0.0;
  for (std::size_t t = 1; t < trajectory.size(); ++t) {
    const State& x = trajectory[t];
    const ControlInput& u = controls[t - 1];
    double q = cost.state_cost ? cost.state_cost(x, u) : 0.0;
    const ControlVector uv = u.vector();
    q += 0.5 * uv.dot(cost.control_cost_weight * uv);
    if (cost.penalty > 0.0 && !in_safe_set(obstacles, x.x, x.y)) {
      q += cost.penalty;
    }
    running += q * dt;
  }
  const double terminal =
      cost.terminal_cost ? cost.terminal_cost(trajectory.back()) : 0.0;
  return terminal + running;
}

std::vector<double> compute_weights(std::span<const double> costs, double lambda) {
  if (costs.empty()) throw std::invalid_argument("compute_weights: no samples");
  if (!(lambda > 0.0)) throw std::invalid_argument("compute_weights: lambda <= 0");
  const double beta = *std::min_element(costs.begin(), costs.end());
  std::vector<double> w(costs.size());
  double total = 0.0;
  for (std::size_t k = 0; k < costs.size(); ++k) {
    w[k] = std::exp(-(costs[k] - beta) / lambda);
    total += w[k];
  }
  for (double& wk : w) wk /= total;
  return w;
}

std::vector<ControlInput> update_controls(std::span<const ControlInput> mean_controls,
                                          std::span<const ControlVector> perturbations,
                                          std::span<const double> weights) {
  const std::size_t horizon = mean_controls.size();
  if (perturbations.size() != weights.size() * horizon) {
    throw std::invalid_argument("update_controls: perturbations must be K x T");
  }
  std::vector<ControlInput> out(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    ControlVector delta = ControlVector::Zero();
    for (std::size_t k = 0; k < weights.size(); ++k) {
      delta += weights[k] * perturbations[k * horizon + t];
    }
    out[t] = ControlInput::from_vector(mean_controls[t].vector() + delta);
  }
  return out;
}

std::vector<ControlInput> shift_horizon(std::span<const ControlInput> mean_controls,
                                        const ControlInput& u_init) {
  if (mean_controls.empty()) {
    throw std::invalid_argument("shift_horizon: empty control sequence");
  }
  std::vector<ControlInput> out(mean_controls.begin() + 1, mean_controls.end());
  out.push_back(u_init);
  return out;
}

Planner::Planner(PlannerConfig config, ControlAffineModel model, CostModel cost,
                 std::vector<CircularObstacle> obstacles)
    : config_(std::move(config)),
      model_(std::move(model)),
      cost_(std::move(cost)),
      obstacles_(std::move(obstacles)) {
  config_.validate();
  if (!(cost_.lambda > 0.0)) throw std::invalid_argument("cost: lambda must be > 0");
  if (cost_.penalty < 0.0) throw std::invalid_argument("cost: penalty must be >= 0");
  for (const auto& o : obstacles_) validate(o);
  p0_ = lower_factor(DynMatrix(config_.sigma0));
  trust_c_ = config_.resolved_trust_c();
}

PlanResult Planner::plan(const State& x0, std::span<const ControlInput> mean_controls,
                         std::uint64_t step) const {
  switch (config_.variant) {
    case Variant::kMppi: return plan_mppi(x0, mean_controls, step);
    case Variant::kShielded: return plan_shielded(x0, mean_controls, step);
    case Variant::kTrustRegion: return plan_trust_region(x0, mean_controls, step);
  }
  throw std::logic_error("unknown variant");
}

PlanResult Planner::finish(SampleBatch batch,
                           std::span<const ControlInput> mean_controls,
                           double /*penalty*/) const {
  batch.weights = compute_weights(batch.costs, cost_.lambda);
  const auto updated =
      update_controls(mean_controls, batch.perturbations, batch.weights);
  PlanResult result;
  result.applied = updated.front();
  result.next_mean = shift_horizon(updated, ControlInput{});
  result.batch = std::move(batch);
  return result;
}

namespace {

SampleBatch make_batch(int samples, int horizon) {
  SampleBatch batch;
  batch.samples = samples;
  batch.horizon = horizon;
  const auto k = static_cast<std::size_t>(samples);
  const auto t = static_cast<std::size_t>(horizon);
  batch.perturbations.resize(k * t);
  batch.trajectories.resize(k * (t + 1));
  batch.costs.resize(k);
  batch.schur_residuals.assign(k * t, std::numeric_limits<double>::infinity());
  batch.braked.assign(k, 0);
  return batch;
}

void check_horizon(std::span<const ControlInput> mean_controls, int horizon) {
  if (static_cast<int>(mean_controls.size()) != horizon) {
    throw std::invalid_argument("planner: mean control sequence must have length " +
                                std::to_string(horizon));
  }
}

}  // namespace

PlanResult Planner::plan_mppi(const State& x0,
                              std::span<const ControlInput> mean_controls,
                              std::uint64_t step) const {
  const int horizon = config_.horizon;
  check_horizon(mean_controls, horizon);
  SampleBatch batch = make_batch(config_.samples, horizon);
  const DynVector mu0 = config_.mu0;

  parallel_for(static_cast<std::size_t>(config_.samples), config_.workers,
               [&](std::size_t k) {
    CounterRng rng(config_.seed, CounterRng::Domain::kSampling, step,
                   static_cast<std::uint32_t>(k));
    State* traj = batch.trajectories.data() + k * (horizon + 1);
    ControlVector* du = batch.perturbations.data() + k * horizon;
    std::vector<ControlInput> applied(static_cast<std::size_t>(horizon));
    traj[0] = x0;
    for (int t = 0; t < horizon; ++t) {
      du[t] = draw(mu0, p0_, rng.normal2());
      applied[t] = ControlInput::from_vector(mean_controls[t].vector() + du[t]);
      traj[t + 1] = mppi_cbf::step(model_, traj[t], mean_controls[t], du[t], config_.dt);
    }
    batch.costs[k] = cost_to_go(cost_, batch.trajectory(static_cast<int>(k)), applied,
                                config_.dt, obstacles_);
  });
  return finish(std::move(batch), mean_controls, cost_.penalty);
}

QpProblem Planner::shield_qp(const State& state, const ControlInput& nominal,
                             bool& brake) const {
  QpProblem qp;
  qp.center = nominal.vector();
  brake = false;
  const double z = normal_quantile(1.0 - config_.delta);
  for (const auto& obstacle : obstacles_) {
    const BarrierRow row = barrier_row(model_, obstacle, state, config_.alpha);
    if (row.degenerate()) {
      if (row.h_value <= 0.0) brake = true;
      continue;
    }
    const double variance = row.a.dot(config_.sigma0 * row.a);
    const double tighten =
        config_.exact_chance ? z * std::sqrt(variance) : trust_c_ * variance;
    qp.rows.push_back({row.a, row.b + tighten});
  }
  return qp;
}

PlanResult Planner::plan_shielded(const State& x0,
                                  std::span<const ControlInput> mean_controls,
                                  std::uint64_t step) const {
  PlanResult result = plan_mppi(x0, mean_controls, step);
  bool brake = false;
  const QpProblem qp = shield_qp(x0, result.applied, brake);
  if (brake) {
    result.applied = ControlInput{};
    result.fallback = true;
    return result;
  }
  if (qp.rows.empty()) return result;
  const QpResult solved = solve_qp(qp);
  if (solved.status != SolveStatus::kOptimal) {
    result.applied = ControlInput{};
    result.fallback = true;
    return result;
  }
  result.applied = ControlInput::from_vector(solved.u);
  return result;
}

TrustRegionSdp Planner::perturbation_sdp(const State& state,
                                         const ControlInput& nominal,
                                         bool& brake) const {
  TrustRegionSdp sdp;
  sdp.mu0 = config_.mu0;
  sdp.p0 = p0_;
  sdp.c = trust_c_;
  sdp.norm = config_.norm;
  brake = false;
  const ControlVector u = nominal.vector();
  for (const auto& obstacle : obstacles_) {
    BarrierRow row = barrier_row(model_, obstacle, state, config_.alpha);
    if (row.degenerate()) {
      if (row.h_value <= 0.0) brake = true;
      continue;
    }
    // a . (u + du) >= b  <=>  a . du >= b - a . u
    row.b -= row.a.dot(u);
    sdp.rows.push_back(std::move(row));
  }
  return sdp;
}

PlanResult Planner::plan_trust_region(const State& x0,
                                      std::span<const ControlInput> mean_controls,
                                      std::uint64_t step) const {
  const int horizon = config_.horizon;
  check_horizon(mean_controls, horizon);
  SampleBatch batch = make_batch(config_.samples, horizon);
  const DynVector mu0 = config_.mu0;

  struct Reshaped {
    DynVector mu;
    DynMatrix p;
    double residual = std::numeric_limits<double>::infinity();
    bool brake = false;
    bool solved = false;
    bool infeasible = false;
  };

  auto reshape = [&](const State& x, const ControlInput& nominal) {
    Reshaped out;
    const TrustRegionSdp sdp = perturbation_sdp(x, nominal, out.brake);
    if (out.brake) return out;
    if (sdp.rows.empty()) {
      out.mu = mu0;
      out.p = p0_;
      return out;
    }
    const SdpSolution sol = solve_trust_region_sdp(sdp, config_.sdp);
    out.solved = true;
    if (sol.status == SolveStatus::kInfeasible) {
      out.brake = true;
      out.infeasible = true;
      return out;
    }
    out.mu = sol.mu;
    out.p = sol.p;
    for (const auto& row : sdp.rows) {
      out.residual = std::min(out.residual, schur_residual(row, sol.mu, sol.p, sdp.c));
    }
    return out;
  };

  std::vector<Reshaped> shared;
  if (config_.shared_sdp) {
    State nominal = x0;
    for (int t = 0; t < horizon; ++t) {
      shared.push_back(reshape(nominal, mean_controls[t]));
      nominal = mppi_cbf::step(model_, nominal, mean_controls[t],
                               config_.mu0, config_.dt);
    }
  }

  std::vector<int> solves(static_cast<std::size_t>(config_.samples), 0);
  std::vector<int> infeasible(static_cast<std::size_t>(config_.samples), 0);

  parallel_for(static_cast<std::size_t>(config_.samples), config_.workers,
               [&](std::size_t k) {
    CounterRng rng(config_.seed, CounterRng::Domain::kSampling, step,
                   static_cast<std::uint32_t>(k));
    State* traj = batch.trajectories.data() + k * (horizon + 1);
    ControlVector* du = batch.perturbations.data() + k * horizon;
    double* residual = batch.schur_residuals.data() + k * horizon;
    std::vector<ControlInput> applied(static_cast<std::size_t>(horizon));
    bool braked = false;
    traj[0] = x0;
    for (int t = 0; t < horizon; ++t) {
      const Eigen::Vector2d z = rng.normal2();
      if (!braked) {
        const Reshaped r = config_.shared_sdp ? shared[t]
                                              : reshape(traj[t], mean_controls[t]);
        solves[k] += r.solved ? 1 : 0;
        infeasible[k] += r.infeasible ? 1 : 0;
        if (r.brake) {
          braked = true;
        } else {
          du[t] = draw(r.mu, r.p, z);
          residual[t] = r.residual;
        }
      }
      if (braked) du[t] = -mean_controls[t].vector();
      applied[t] = ControlInput::from_vector(mean_controls[t].vector() + du[t]);
      traj[t + 1] = mppi_cbf::step(model_, traj[t], mean_controls[t], du[t], config_.dt);
    }
    batch.braked[k] = braked ? 1 : 0;
    CostModel no_penalty = cost_;
    no_penalty.penalty = 0.0;
    batch.costs[k] = cost_to_go(no_penalty, batch.trajectory(static_cast<int>(k)),
                                applied, config_.dt, obstacles_);
  });
  for (std::size_t k = 0; k < solves.size(); ++k) {
    batch.sdp_solves += solves[k];
    batch.sdp_infeasible += infeasible[k];
  }
  return finish(std::move(batch), mean_controls, 0.0);
}

}  // namespace mppi_cbf
