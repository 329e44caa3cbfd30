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
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "mppi_cbf/harness.hpp"

namespace mppi_cbf {
namespace fs = std::filesystem;

namespace {

[[noreturn]] void io_error(const fs::path& path, const std::string& what) {
  throw std::runtime_error(path.string() + ": " + what);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_double(const std::string& text, const fs::path& path, int line) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0') {
    io_error(path, "line " + std::to_string(line) + ": bad number '" + text + "'");
  }
  return v;
}

// Yields the data rows of a CSV with the expected header.
std::vector<std::vector<std::string>> read_csv(const fs::path& path,
                                               std::string_view header,
                                               std::size_t columns) {
  std::stringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || line != header) io_error(path, "unexpected header");
  std::vector<std::vector<std::string>> rows;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != columns) {
      io_error(path, "line " + std::to_string(n) + ": expected " +
                         std::to_string(columns) + " columns");
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

void write_text_atomic(const fs::path& path, std::string_view text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) io_error(path, "cannot open for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) io_error(path, "write failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    io_error(path, "rename failed");
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

std::string episode_csv(const EpisodeRecord& record) {
  std::string out(kEpisodeHeader);
  out += '\n';
  for (const auto& r : record.rows) {
    out += std::to_string(r.step);
    for (double v : {r.t, r.state.x, r.state.y, r.state.theta, r.control.v,
                     r.control.omega, r.q, r.min_h, r.safe_frac}) {
      out += ',';
      out += format_number(v);
    }
    out += r.fallback ? ",1\n" : ",0\n";
  }
  return out;
}

std::string snapshot_csv(const SnapshotRecord& record) {
  std::string out(kSnapshotHeader);
  out += '\n';
  for (std::size_t k = 0; k < record.trajectories.size(); ++k) {
    const auto& traj = record.trajectories[k];
    for (std::size_t t = 0; t < traj.size(); ++t) {
      out += std::to_string(k) + ',' + std::to_string(t);
      for (double v : {traj[t].x, traj[t].y, traj[t].theta, record.costs[k]}) {
        out += ',';
        out += format_number(v);
      }
      out += record.safe[k] ? ",1\n" : ",0\n";
    }
  }
  return out;
}

void write_episode_csv(const EpisodeRecord& record, const fs::path& path) {
  write_text_atomic(path, episode_csv(record));
}

void write_snapshot_csv(const SnapshotRecord& record, const fs::path& path) {
  write_text_atomic(path, snapshot_csv(record));
}

EpisodeRecord read_episode_csv(const fs::path& path) {
  EpisodeRecord record;
  int line = 1;
  for (const auto& c : read_csv(path, kEpisodeHeader, 11)) {
    ++line;
    auto num = [&](int i) { return parse_double(c[i], path, line); };
    EpisodeRow r;
    r.step = static_cast<int>(num(0));
    r.t = num(1);
    r.state = {num(2), num(3), num(4)};
    r.control = {num(5), num(6)};
    r.q = num(7);
    r.min_h = num(8);
    r.safe_frac = num(9);
    r.fallback = num(10) != 0.0;
    record.rows.push_back(r);
  }
  return record;
}

SnapshotRecord read_snapshot_csv(const fs::path& path) {
  SnapshotRecord record;
  int line = 1;
  for (const auto& c : read_csv(path, kSnapshotHeader, 7)) {
    ++line;
    auto num = [&](int i) { return parse_double(c[i], path, line); };
    const auto k = static_cast<std::size_t>(num(0));
    if (k == record.trajectories.size()) {
      record.trajectories.emplace_back();
      record.costs.push_back(num(5));
      record.safe.push_back(num(6) != 0.0);
    } else if (k + 1 != record.trajectories.size()) {
      io_error(path, "line " + std::to_string(line) + ": samples out of order");
    }
    record.trajectories.back().push_back({num(2), num(3), num(4)});
  }
  return record;
}

nlohmann::json scenario_json(const Scenario& s) {
  nlohmann::json obstacles = nlohmann::json::array();
  for (const auto& o : s.obstacles) {
    obstacles.push_back({{"x", o.cx}, {"y", o.cy}, {"r", o.r}});
  }
  return {{"name", s.name},
          {"start", {s.start.x, s.start.y, s.start.theta}},
          {"target", {s.target_x, s.target_y}},
          {"v_desired", s.v_desired},
          {"obstacles", obstacles},
          {"goal_tolerance", s.goal_tolerance},
          {"max_steps", s.max_steps}};
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  s.name = j.value("name", "");
  const auto& start = j.at("start");
  s.start = {start.at(0).get<double>(), start.at(1).get<double>(),
             start.at(2).get<double>()};
  s.target_x = j.at("target").at(0).get<double>();
  s.target_y = j.at("target").at(1).get<double>();
  s.v_desired = j.value("v_desired", s.v_desired);
  for (const auto& o : j.value("obstacles", nlohmann::json::array())) {
    s.obstacles.push_back({o.at("x").get<double>(), o.at("y").get<double>(),
                           o.at("r").get<double>()});
  }
  s.goal_tolerance = j.value("goal_tolerance", s.goal_tolerance);
  s.max_steps = j.value("max_steps", s.max_steps);
  return s;
}

nlohmann::json summary_json(const EpisodeSummary& s) {
  return {{"completed", s.completed},
          {"steps", s.steps},
          {"total_cost", finite_or_null(s.total_cost)},
          {"min_h", finite_or_null(s.min_h)},
          {"violations", s.violations},
          {"fallbacks", s.fallbacks},
          {"mean_safe_frac", s.mean_safe_frac},
          {"sdp_solves", s.sdp_solves},
          {"sdp_infeasible", s.sdp_infeasible}};
}

}  // namespace mppi_cbf
