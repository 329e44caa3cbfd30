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

#include <gtest/gtest.h>

#include "mppi_cbf/config.hpp"

namespace mppi_cbf {
namespace {

TEST(ConfigText, ParsesSubset) {
  const auto j = parse_config_text(R"(
# comment
[a]
s = "text"   # trailing
n = -1.5e1
i = 7
b = true
list = [1, 2.5, 3]
tables = [{x = 1, y = 2}, {x = 3, y = 4}]
)");
  EXPECT_EQ(j["a"]["s"], "text");
  EXPECT_EQ(j["a"]["n"].get<double>(), -15.0);
  EXPECT_TRUE(j["a"]["i"].is_number_integer());
  EXPECT_EQ(j["a"]["b"], true);
  EXPECT_EQ(j["a"]["list"].size(), 3u);
  EXPECT_EQ(j["a"]["tables"][1]["y"], 4);
}

TEST(ConfigText, RejectsMalformedInput) {
  EXPECT_THROW(parse_config_text("[a]\nx = \n"), ConfigError);
  EXPECT_THROW(parse_config_text("[a]\nx = 1\nx = 2\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[a\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[a]\nx = \"open\n"), ConfigError);
}

TEST(RunSpec, DefaultsFollowPreset) {
  const RunSpec s = default_run_spec("narrow_passage");
  EXPECT_EQ(s.preset.scenario.name, "narrow_passage");
  EXPECT_EQ(s.resolved().horizon, 40);
  EXPECT_THROW(default_run_spec("nowhere"), ConfigError);
}

TEST(RunSpec, ParsesEverySection) {
  const RunSpec s = parse_run_spec(R"(
[scenario]
name = "single_obstacle"
start = [0.0, 0.5, 0.1]
target = [3.0, 3.0]
max_steps = 50
obstacles = [{x = 1.5, y = 1.5, r = 0.3}]

[controller]
variant = "trust_region"
samples = 30
horizon = 12
alpha = "cubic"
gamma = 2.0
norm = "spectral"
seed = 9
shared_sdp = true

[cost]
penalty = 5.0
control_cost_weight = [[1.0, 0.0], [0.0, 2.0]]

[run]
snapshot_time = 0.5
)");
  EXPECT_EQ(s.preset.scenario.start.y, 0.5);
  EXPECT_EQ(s.preset.scenario.target_x, 3.0);
  EXPECT_EQ(s.preset.scenario.max_steps, 50);
  ASSERT_EQ(s.preset.scenario.obstacles.size(), 1u);
  EXPECT_EQ(s.preset.scenario.obstacles[0].r, 0.3);
  const PlannerConfig p = s.resolved();
  EXPECT_EQ(p.variant, Variant::kTrustRegion);
  EXPECT_EQ(p.samples, 30);
  EXPECT_EQ(p.horizon, 12);
  EXPECT_EQ(p.alpha.kind, ClassKappa::Kind::kCubic);
  EXPECT_EQ(p.alpha.gamma, 2.0);
  EXPECT_EQ(p.norm, MatrixNorm::kSpectral);
  EXPECT_EQ(p.seed, 9u);
  EXPECT_TRUE(p.shared_sdp);
  EXPECT_EQ(s.preset.cost.penalty, 5.0);
  EXPECT_EQ(s.preset.cost.control_cost_weight(1, 1), 2.0);
  EXPECT_EQ(s.options.snapshot_step, 10);
}

TEST(RunSpec, RejectsBadFiles) {
  EXPECT_THROW(parse_run_spec("[scenario]\nname = \"nowhere\"\n"), ConfigError);
  EXPECT_THROW(parse_run_spec("[controller]\nbogus = 1\n"), ConfigError);
  EXPECT_THROW(parse_run_spec("[extra]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse_run_spec("[controller]\nsamples = 0\n"), ConfigError);
  EXPECT_THROW(parse_run_spec("[controller]\nvariant = \"other\"\n"), ConfigError);
  EXPECT_THROW(parse_run_spec("[controller]\nsamples = 1.5\n"), ConfigError);
  EXPECT_THROW(parse_run_spec(
                   "[scenario]\nstart = [2.2, 2.0, 0.0]\n"),
               ConfigError);
  EXPECT_THROW(load_run_spec("/nonexistent/run.toml"), ConfigError);
}

TEST(RunSpec, JsonOmitsWorkerCount) {
  RunSpec a = default_run_spec("single_obstacle");
  RunSpec b = a;
  b.planner.workers = 8;
  EXPECT_EQ(run_spec_json(a).dump(), run_spec_json(b).dump());
  b.planner.seed = 1;
  EXPECT_NE(run_spec_json(a).dump(), run_spec_json(b).dump());
}

}  // namespace
}  // namespace mppi_cbf
