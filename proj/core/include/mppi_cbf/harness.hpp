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

#ifndef MPPI_CBF_HARNESS_HPP_
#define MPPI_CBF_HARNESS_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mppi_cbf/barrier.hpp"
#include "mppi_cbf/controller.hpp"
#include "mppi_cbf/dynamics.hpp"

namespace mppi_cbf {

struct Scenario {
  std::string name;
  State start;
  double target_x = 4.0;
  double target_y = 4.0;
  double v_desired = 2.0;
  std::vector<CircularObstacle> obstacles;
  double goal_tolerance = 0.2;
  int max_steps = 400;

  double distance_to_target(const State& s) const;
  /// Throws std::invalid_argument when the start is unsafe or a bound is
  /// out of range.
  void validate() const;
};

struct CostParams {
  double position_weight = 10.0;
  double velocity_weight = 1.0;
  double penalty = 10000.0;
  double lambda = 1.0;
  Eigen::Matrix2d control_cost_weight = Eigen::Matrix2d::Zero();
};

CostModel make_cost_model(const Scenario& scenario, const CostParams& params);

struct ScenarioPreset {
  Scenario scenario;
  CostParams cost;
  int sampling_horizon = 20;  // mppi
  int barrier_horizon = 20;   // shielded, trust_region

  int horizon_for(Variant variant) const {
    return variant == Variant::kMppi ? sampling_horizon : barrier_horizon;
  }
};

/// "single_obstacle" and "narrow_passage".
std::map<std::string, ScenarioPreset> builtin_scenarios();

struct SnapshotRecord {
  double time = 0.0;
  std::vector<std::vector<State>> trajectories;
  std::vector<double> costs;
  std::vector<bool> safe;

  /// Share of safe trajectories; 1 when there are none.
  double safe_fraction() const;
};

/// Flags each sampled trajectory as safe iff all of its states are.
SnapshotRecord capture_snapshot(const SampleBatch& batch,
                                std::span<const CircularObstacle> obstacles,
                                double time = 0.0);

/// Safe share of a batch without copying trajectories.
double safe_sample_fraction(const SampleBatch& batch,
                            std::span<const CircularObstacle> obstacles);

// State after planning step `step`, reached at t = step * dt.
struct EpisodeRow {
  int step = 0;
  double t = 0.0;
  State state;
  ControlInput control;
  double q = 0.0;
  double min_h = 0.0;
  double safe_frac = 1.0;
  bool fallback = false;
};

struct EpisodeSummary {
  bool completed = false;
  int steps = 0;
  double total_cost = 0.0;
  double min_h = 0.0;
  int violations = 0;
  int fallbacks = 0;
  double mean_safe_frac = 1.0;
  long sdp_solves = 0;
  long sdp_infeasible = 0;
};

struct EpisodeRecord {
  std::vector<EpisodeRow> rows;
  EpisodeSummary summary;
  std::optional<SnapshotRecord> snapshot;
};

struct EpisodeOptions {
  // Planning step whose sample batch is captured (t = step * dt).
  int snapshot_step = 7;
};

/// Receding-horizon loop from scenario.start until the target is within
/// goal_tolerance or max_steps plans have been applied. Execution noise
/// N(mu0, Sigma0) perturbs every applied control.
EpisodeRecord run_episode(const Scenario& scenario, const PlannerConfig& config,
                          const CostParams& cost,
                          const EpisodeOptions& options = {});

// CSV and JSON persistence. Writers go through a temporary file and a rename.
void write_text_atomic(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

inline constexpr std::string_view kEpisodeHeader =
    "step,t,x,y,theta,v,omega,q,min_h,safe_frac,fallback";
inline constexpr std::string_view kSnapshotHeader =
    "sample,step,x,y,theta,cost,safe";

/// Decimal text with 9 significant digits.
std::string format_number(double value);

std::string episode_csv(const EpisodeRecord& record);
std::string snapshot_csv(const SnapshotRecord& record);
void write_episode_csv(const EpisodeRecord& record, const std::filesystem::path& path);
void write_snapshot_csv(const SnapshotRecord& record, const std::filesystem::path& path);
/// Rows only; the summary is not stored in the CSV.
EpisodeRecord read_episode_csv(const std::filesystem::path& path);
SnapshotRecord read_snapshot_csv(const std::filesystem::path& path);

nlohmann::json scenario_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json summary_json(const EpisodeSummary& summary);

// Vector graphics. Sample trajectories are colored by cost rank from blue
// (lowest) to red (highest).
struct CostSeries {
  std::string label;
  std::vector<double> values;
};

std::string trajectory_svg(const Scenario& scenario, const EpisodeRecord* episode,
                           const SnapshotRecord* snapshot);
std::string samples_svg(const Scenario& scenario, const SnapshotRecord& snapshot);
std::string cost_svg(const std::vector<CostSeries>& series, double dt);
/// "#rrggbb" for rank `rank` of `count`.
std::string rank_color(std::size_t rank, std::size_t count);
void render_svg(const Scenario& scenario, const EpisodeRecord* episode,
                const SnapshotRecord* snapshot, const std::filesystem::path& path);

}  // namespace mppi_cbf

#endif  // MPPI_CBF_HARNESS_HPP_
