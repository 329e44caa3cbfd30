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

#ifndef MPPI_CBF_CONTROLLER_HPP_
#define MPPI_CBF_CONTROLLER_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "mppi_cbf/barrier.hpp"
#include "mppi_cbf/conic.hpp"
#include "mppi_cbf/dynamics.hpp"

namespace mppi_cbf {

enum class Variant { kMppi, kShielded, kTrustRegion };

std::string_view to_string(Variant variant);
std::optional<Variant> parse_variant(std::string_view name);

using RunningCost = std::function<double(const State&, const ControlInput&)>;
using TerminalCost = std::function<double(const State&)>;

struct CostModel {
  RunningCost state_cost;
  TerminalCost terminal_cost;  // empty means zero
  Eigen::Matrix2d control_cost_weight = Eigen::Matrix2d::Zero();
  // Added per unsafe state; only the sampling baselines use it.
  double penalty = 0.0;
  double lambda = 1.0;
};

/// q(x, u) = w_p |p_d - p|^2 + w_v (v_d - v)^2.
RunningCost tracking_cost(double target_x, double target_y, double v_desired,
                          double position_weight, double velocity_weight);

/// Standard normal quantile.
double normal_quantile(double p);

struct PlannerConfig {
  Variant variant = Variant::kMppi;
  int samples = 100;
  int horizon = 20;
  double dt = 0.05;
  ControlVector mu0 = ControlVector::Zero();
  Eigen::Matrix2d sigma0 = Eigen::Matrix2d::Identity();
  std::optional<double> trust_c;  // defaults to z_{1 - delta}
  double delta = 0.002;
  ClassKappa alpha;
  std::uint64_t seed = 0;

  MatrixNorm norm = MatrixNorm::kFrobenius;
  // Shielded QP tightens with z sqrt(a S a^T) instead of c a S a^T.
  bool exact_chance = false;
  // One trust-region SDP per horizon step along the nominal rollout, shared
  // by all samples, instead of one per sample and step.
  bool shared_sdp = false;
  int workers = 1;
  SdpSettings sdp;

  double resolved_trust_c() const;
  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

// K sampled rollouts of horizon T. Per-sample arrays are indexed k * T + t
// (or k * (T + 1) + t for states).
struct SampleBatch {
  int samples = 0;
  int horizon = 0;
  std::vector<ControlVector> perturbations;
  std::vector<State> trajectories;
  std::vector<double> costs;
  std::vector<double> weights;
  // Smallest Schur residual among the rows of the SDP solved at (k, t);
  // +infinity when no SDP was needed there.
  std::vector<double> schur_residuals;
  std::vector<std::uint8_t> braked;
  int sdp_solves = 0;
  int sdp_infeasible = 0;

  const ControlVector& perturbation(int k, int t) const {
    return perturbations[static_cast<std::size_t>(k) * horizon + t];
  }
  std::span<const State> trajectory(int k) const {
    return {trajectories.data() + static_cast<std::size_t>(k) * (horizon + 1),
            static_cast<std::size_t>(horizon + 1)};
  }
};

/// phi(x_T) + sum_{t=1..T} [q(x_t, u_{t-1}) + u^T R u / 2 + penalty 1{unsafe}] dt.
double cost_to_go(const CostModel& cost, std::span<const State> trajectory,
                  std::span<const ControlInput> controls, double dt,
                  std::span<const CircularObstacle> obstacles);

/// Normalized exp(-(S_k - min S) / lambda).
std::vector<double> compute_weights(std::span<const double> costs, double lambda);

/// u*_t = u_t + sum_k w_k du_{t,k}; perturbations are indexed k * T + t.
std::vector<ControlInput> update_controls(std::span<const ControlInput> mean_controls,
                                          std::span<const ControlVector> perturbations,
                                          std::span<const double> weights);

/// Drops the first control and appends u_init.
std::vector<ControlInput> shift_horizon(std::span<const ControlInput> mean_controls,
                                        const ControlInput& u_init);

struct PlanResult {
  ControlInput applied;
  std::vector<ControlInput> next_mean;
  SampleBatch batch;
  bool fallback = false;
};

class Planner {
 public:
  Planner(PlannerConfig config, ControlAffineModel model, CostModel cost,
          std::vector<CircularObstacle> obstacles);

  const PlannerConfig& config() const { return config_; }
  const CostModel& cost() const { return cost_; }
  std::span<const CircularObstacle> obstacles() const { return obstacles_; }
  const DynMatrix& p0() const { return p0_; }

  /// Dispatches on config().variant. `step` selects the random streams.
  PlanResult plan(const State& x0, std::span<const ControlInput> mean_controls,
                  std::uint64_t step) const;

  PlanResult plan_mppi(const State& x0, std::span<const ControlInput> mean_controls,
                       std::uint64_t step) const;
  PlanResult plan_shielded(const State& x0,
                           std::span<const ControlInput> mean_controls,
                           std::uint64_t step) const;
  PlanResult plan_trust_region(const State& x0,
                               std::span<const ControlInput> mean_controls,
                               std::uint64_t step) const;

  /// Trust-region program for the perturbation at `state` when the nominal
  /// control is `nominal`: each barrier row is shifted so that it constrains
  /// nominal + perturbation. Sets `brake` when a degenerate row has h <= 0.
  TrustRegionSdp perturbation_sdp(const State& state, const ControlInput& nominal,
                                  bool& brake) const;

  /// Shield program around `nominal`, with rows tightened for the sampling
  /// noise. Sets `brake` when a degenerate row has h <= 0.
  QpProblem shield_qp(const State& state, const ControlInput& nominal,
                      bool& brake) const;

 private:
  PlanResult finish(SampleBatch batch, std::span<const ControlInput> mean_controls,
                    double penalty) const;

  PlannerConfig config_;
  ControlAffineModel model_;
  CostModel cost_;
  std::vector<CircularObstacle> obstacles_;
  DynMatrix p0_;
  double trust_c_;
};

}  // namespace mppi_cbf

#endif  // MPPI_CBF_CONTROLLER_HPP_
