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
#include <cstdio>
#include <numeric>

#include "mppi_cbf/harness.hpp"

namespace mppi_cbf {
namespace {

constexpr double kPixelsPerMeter = 100.0;
constexpr double kMargin = 1.0;

// Maps world coordinates onto the page with y pointing up.
struct Frame {
  double x_min, x_max, y_min, y_max;

  double px(double x) const { return (x - x_min) * kPixelsPerMeter; }
  double py(double y) const { return (y_max - y) * kPixelsPerMeter; }
  double width() const { return (x_max - x_min) * kPixelsPerMeter; }
  double height() const { return (y_max - y_min) * kPixelsPerMeter; }
};

Frame scenario_frame(const Scenario& s) {
  Frame f{std::min(s.start.x, s.target_x), std::max(s.start.x, s.target_x),
          std::min(s.start.y, s.target_y), std::max(s.start.y, s.target_y)};
  for (const auto& o : s.obstacles) {
    f.x_min = std::min(f.x_min, o.cx - o.r);
    f.x_max = std::max(f.x_max, o.cx + o.r);
    f.y_min = std::min(f.y_min, o.cy - o.r);
    f.y_max = std::max(f.y_max, o.cy + o.r);
  }
  f.x_min -= kMargin;
  f.x_max += kMargin;
  f.y_min -= kMargin;
  f.y_max += kMargin;
  return f;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  return s == "-0.00" ? "0.00" : s;
}

std::string header(double width, double height) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
         "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " +
         num(height) + "\">\n";
}

std::string polyline(const std::vector<std::pair<double, double>>& points,
                     const std::string& color, double width, const std::string& cls) {
  std::string out = "<polyline class=\"" + cls + "\" fill=\"none\" stroke=\"" + color +
                    "\" stroke-width=\"" + num(width) + "\" points=\"";
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i) out += ' ';
    out += num(points[i].first) + "," + num(points[i].second);
  }
  return out + "\"/>\n";
}

std::vector<std::size_t> cost_ranks(const std::vector<double>& costs) {
  std::vector<std::size_t> order(costs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
  std::vector<std::size_t> rank(costs.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
  return rank;
}

}  // namespace

std::string rank_color(std::size_t rank, std::size_t count) {
  const double s = count > 1 ? static_cast<double>(rank) / (count - 1) : 0.0;
  const int red = static_cast<int>(std::lround(255.0 * s));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x00%02x", red, 255 - red);
  return buf;
}

std::string trajectory_svg(const Scenario& scenario, const EpisodeRecord* episode,
                           const SnapshotRecord* snapshot) {
  const Frame f = scenario_frame(scenario);
  std::string out = header(f.width(), f.height());
  out += "<defs><clipPath id=\"frame\"><rect x=\"0\" y=\"0\" width=\"" + num(f.width()) +
         "\" height=\"" + num(f.height()) + "\"/></clipPath></defs>\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<g clip-path=\"url(#frame)\">\n";
  for (const auto& o : scenario.obstacles) {
    out += "<circle class=\"obstacle\" cx=\"" + num(f.px(o.cx)) + "\" cy=\"" +
           num(f.py(o.cy)) + "\" r=\"" + num(o.r * kPixelsPerMeter) +
           "\" fill=\"black\"/>\n";
  }
  if (snapshot) {
    const auto rank = cost_ranks(snapshot->costs);
    for (std::size_t k = 0; k < snapshot->trajectories.size(); ++k) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& s : snapshot->trajectories[k]) pts.emplace_back(f.px(s.x), f.py(s.y));
      out += polyline(pts, rank_color(rank[k], rank.size()), 1.0, "sample");
    }
  }
  if (episode) {
    std::vector<std::pair<double, double>> pts{
        {f.px(scenario.start.x), f.py(scenario.start.y)}};
    for (const auto& r : episode->rows) pts.emplace_back(f.px(r.state.x), f.py(r.state.y));
    out += polyline(pts, "#202020", 2.5, "episode");
  }
  out += "<circle class=\"target\" cx=\"" + num(f.px(scenario.target_x)) + "\" cy=\"" +
         num(f.py(scenario.target_y)) + "\" r=\"" +
         num(scenario.goal_tolerance * kPixelsPerMeter) +
         "\" fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"2.00\"/>\n";
  out += "</g>\n</svg>\n";
  return out;
}

std::string samples_svg(const Scenario& scenario, const SnapshotRecord& snapshot) {
  return trajectory_svg(scenario, nullptr, &snapshot);
}

std::string cost_svg(const std::vector<CostSeries>& series, double dt) {
  static const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b"};
  constexpr double kWidth = 640.0, kHeight = 400.0, kPad = 50.0;
  std::size_t longest = 1;
  double top = 0.0;
  for (const auto& s : series) {
    longest = std::max(longest, s.values.size());
    for (double v : s.values) {
      if (std::isfinite(v)) top = std::max(top, v);
    }
  }
  if (top <= 0.0) top = 1.0;
  const double t_max = longest * dt;
  auto px = [&](double t) { return kPad + t / t_max * (kWidth - 2 * kPad); };
  auto py = [&](double v) { return kHeight - kPad - v / top * (kHeight - 2 * kPad); };

  std::string out = header(kWidth, kHeight);
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<path class=\"axes\" d=\"M" + num(kPad) + "," + num(kPad) + " V" +
         num(kHeight - kPad) + " H" + num(kWidth - kPad) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  out += "<text x=\"" + num(kWidth / 2) + "\" y=\"" + num(kHeight - 12) +
         "\" text-anchor=\"middle\" font-size=\"12\">time [s]</text>\n";
  out += "<text x=\"" + num(kPad) + "\" y=\"" + num(kPad - 8) +
         "\" font-size=\"12\">cost (max " + format_number(top) + ")</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::string color = kPalette[i % std::size(kPalette)];
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < series[i].values.size(); ++k) {
      const double v = series[i].values[k];
      if (std::isfinite(v)) pts.emplace_back(px((k + 1) * dt), py(v));
    }
    out += polyline(pts, color, 1.5, "cost");
    out += "<text x=\"" + num(kWidth - kPad - 120) + "\" y=\"" +
           num(kPad + 16.0 * (i + 1)) + "\" font-size=\"12\" fill=\"" + color + "\">" +
           series[i].label + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

void render_svg(const Scenario& scenario, const EpisodeRecord* episode,
                const SnapshotRecord* snapshot, const std::filesystem::path& path) {
  write_text_atomic(path, trajectory_svg(scenario, episode, snapshot));
}

}  // namespace mppi_cbf
