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

#ifndef MPPI_CBF_CONFIG_HPP_
#define MPPI_CBF_CONFIG_HPP_

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "mppi_cbf/controller.hpp"
#include "mppi_cbf/harness.hpp"

namespace mppi_cbf {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything needed to run one episode.
struct RunSpec {
  ScenarioPreset preset;
  PlannerConfig planner;
  std::optional<int> horizon;  // overrides the preset horizon for the variant
  EpisodeOptions options;

  /// Planner settings with the horizon filled in.
  PlannerConfig resolved() const;
};

/// Builtin scenario with default planner settings. Throws ConfigError for
/// unknown names.
RunSpec default_run_spec(const std::string& scenario);

/// Parses the small TOML subset used by scenario files: [section] headers,
/// `key = value` lines, strings, numbers, booleans, arrays and inline tables.
/// Comments start with '#'.
nlohmann::json parse_config_text(std::string_view text);

/// Builds a RunSpec from a scenario file with sections [scenario],
/// [controller], [cost] and [run]. Unknown keys are rejected.
RunSpec parse_run_spec(std::string_view text);
RunSpec load_run_spec(const std::filesystem::path& path);

nlohmann::json run_spec_json(const RunSpec& spec);

}  // namespace mppi_cbf

#endif  // MPPI_CBF_CONFIG_HPP_
