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

#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "mppi_cbf/config.hpp"
#include "mppi_cbf/harness.hpp"
#include "mppi_cbf/parallel.hpp"

namespace mppi_cbf::cli {
namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SourceFlags {
  std::string config;
  std::string scenario;
  int workers = 1;

  void add(CLI::App& app) {
    auto* c = app.add_option("--config", config, "Scenario file");
    auto* s = app.add_option("--scenario", scenario,
                             "Builtin scenario (single_obstacle, narrow_passage)");
    c->excludes(s);
    app.add_option("--workers", workers, "Threads for sample rollouts")
        ->check(CLI::PositiveNumber);
  }

  RunSpec load() const {
    if (config.empty() && scenario.empty()) {
      throw UsageError("one of --config or --scenario is required");
    }
    RunSpec spec = config.empty() ? default_run_spec(scenario) : load_run_spec(config);
    spec.planner.workers = workers;
    return spec;
  }
};

Variant variant_or_throw(const std::string& name) {
  const auto v = parse_variant(name);
  if (!v) {
    throw UsageError("unknown variant '" + name +
                     "' (expected mppi, shielded or trust_region)");
  }
  return *v;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if constexpr (std::is_same_v<T, int>) {
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != item.size() || v < 1) {
        throw UsageError(std::string(flag) + ": bad entry '" + item + "'");
      }
      out.push_back(v);
    } else {
      out.push_back(item);
    }
  }
  if (out.empty()) throw UsageError(std::string(flag) + ": list is empty");
  return out;
}

void make_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error(dir.string() + ": " + ec.message());
}

std::string cell(double v) { return format_number(v); }

nlohmann::json summary_line(const char* command, const RunSpec& spec,
                            const EpisodeSummary& summary) {
  return {{"command", command},
          {"seed", spec.planner.seed},
          {"config", run_spec_json(spec)},
          {"summary", summary_json(summary)}};
}

struct RunOutcome {
  std::optional<EpisodeRecord> record;
  std::string error;
};

RunOutcome run_guarded(const RunSpec& spec) {
  try {
    return {run_episode(spec.preset.scenario, spec.resolved(), spec.preset.cost,
                        spec.options),
            {}};
  } catch (const std::exception& e) {
    return {std::nullopt, e.what()};
  }
}

// ---- run -------------------------------------------------------------------

struct RunFlags {
  SourceFlags source;
  std::string variant;
  int samples = 0;
  long long seed = -1;
  std::string out;
};

int cmd_run(const RunFlags& f, std::ostream& out) {
  RunSpec spec = f.source.load();
  if (!f.variant.empty()) spec.planner.variant = variant_or_throw(f.variant);
  if (f.samples > 0) spec.planner.samples = f.samples;
  if (f.seed >= 0) spec.planner.seed = static_cast<std::uint64_t>(f.seed);
  spec.resolved().validate();

  const fs::path dir(f.out);
  make_out_dir(dir);
  const EpisodeRecord record = run_episode(spec.preset.scenario, spec.resolved(),
                                           spec.preset.cost, spec.options);
  const SnapshotRecord snapshot = record.snapshot.value_or(SnapshotRecord{});
  write_episode_csv(record, dir / "episode.csv");
  write_snapshot_csv(snapshot, dir / "snapshot.csv");
  render_svg(spec.preset.scenario, &record, nullptr, dir / "trajectory.svg");
  write_text_atomic(dir / "summary.json-lines",
                    summary_line("run", spec, record.summary).dump() + "\n");

  const EpisodeSummary& s = record.summary;
  out << (s.completed ? "completed" : "not completed") << " in " << s.steps
      << " steps, cost " << cell(s.total_cost) << ", min h " << cell(s.min_h) << "\n";
  return s.completed ? kExitOk : kExitIncomplete;
}

// ---- sweep -----------------------------------------------------------------

struct SweepFlags {
  SourceFlags source;
  std::string variant;
  std::string samples = "50,100,200,500";
  int seeds = 1;
  long long seed = 0;
  int jobs = 1;
  std::string out;
};

int cmd_sweep(const SweepFlags& f, std::ostream& out) {
  RunSpec base = f.source.load();
  if (!f.variant.empty()) base.planner.variant = variant_or_throw(f.variant);
  const auto sample_list = parse_list<int>(f.samples, "--samples");

  std::vector<RunSpec> specs;
  for (int k : sample_list) {
    for (int i = 0; i < f.seeds; ++i) {
      RunSpec spec = base;
      spec.planner.samples = k;
      spec.planner.seed = static_cast<std::uint64_t>(f.seed + i);
      spec.resolved().validate();
      specs.push_back(spec);
    }
  }
  const fs::path dir(f.out);
  make_out_dir(dir);

  std::vector<RunOutcome> outcomes(specs.size());
  parallel_for(specs.size(), f.jobs,
               [&](std::size_t i) { outcomes[i] = run_guarded(specs[i]); });

  std::string csv = "variant,K,seed,completed,steps,total_cost,min_h,mean_safe_frac\n";
  std::string lines;
  bool all_completed = true;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const RunSpec& spec = specs[i];
    csv += std::string(to_string(spec.planner.variant)) + "," +
           std::to_string(spec.planner.samples) + "," + std::to_string(spec.planner.seed);
    if (!outcomes[i].record) {
      csv += ",0,0,nan,nan,nan\n";
      lines += nlohmann::json{{"command", "sweep"},
                              {"seed", spec.planner.seed},
                              {"samples", spec.planner.samples},
                              {"error", outcomes[i].error}}
                   .dump() + "\n";
      all_completed = false;
      continue;
    }
    const EpisodeSummary& s = outcomes[i].record->summary;
    csv += std::string(s.completed ? ",1," : ",0,") + std::to_string(s.steps) + "," +
           cell(s.total_cost) + "," + cell(s.min_h) + "," + cell(s.mean_safe_frac) + "\n";
    lines += summary_line("sweep", spec, s).dump() + "\n";
    all_completed = all_completed && s.completed;
  }

  // Mean over seeds for each sample count.
  for (std::size_t j = 0; j < sample_list.size(); ++j) {
    double completed = 0, steps = 0, cost = 0, min_h = 0, safe = 0;
    int n = 0;
    for (int i = 0; i < f.seeds; ++i) {
      const auto& o = outcomes[j * f.seeds + i];
      if (!o.record) continue;
      const EpisodeSummary& s = o.record->summary;
      completed += s.completed;
      steps += s.steps;
      cost += s.total_cost;
      min_h += s.min_h;
      safe += s.mean_safe_frac;
      ++n;
    }
    nlohmann::json mean = {{"command", "sweep-mean"},
                           {"variant", std::string(to_string(base.planner.variant))},
                           {"samples", sample_list[j]},
                           {"runs", n}};
    if (n > 0) {
      mean["completion_rate"] = completed / n;
      mean["steps"] = steps / n;
      mean["total_cost"] = std::isfinite(cost) ? nlohmann::json(cost / n) : nlohmann::json(nullptr);
      mean["min_h"] = std::isfinite(min_h) ? nlohmann::json(min_h / n) : nlohmann::json(nullptr);
      mean["mean_safe_frac"] = safe / n;
    }
    lines += mean.dump() + "\n";
  }

  write_text_atomic(dir / "sweep.csv", csv);
  write_text_atomic(dir / "summary.json-lines", lines);
  out << specs.size() << " runs written to " << (dir / "sweep.csv").string() << "\n";
  return all_completed ? kExitOk : kExitIncomplete;
}

// ---- compare ---------------------------------------------------------------

struct CompareFlags {
  SourceFlags source;
  std::string variants = "mppi,trust_region";
  int samples = 0;
  int seeds = 1;
  long long seed = 0;
  int jobs = 1;
  std::string out;
};

int cmd_compare(const CompareFlags& f, std::ostream& out) {
  const RunSpec base = f.source.load();
  std::vector<Variant> variants;
  for (const auto& name : parse_list<std::string>(f.variants, "--variants")) {
    variants.push_back(variant_or_throw(name));
  }
  if (variants.size() < 2) throw UsageError("--variants needs at least two entries");

  std::vector<RunSpec> specs;
  for (int i = 0; i < f.seeds; ++i) {
    for (Variant v : variants) {
      RunSpec spec = base;
      spec.planner.variant = v;
      if (f.samples > 0) spec.planner.samples = f.samples;
      spec.planner.seed = static_cast<std::uint64_t>(f.seed + i);
      spec.resolved().validate();
      specs.push_back(spec);
    }
  }
  const fs::path dir(f.out);
  make_out_dir(dir);

  std::vector<RunOutcome> outcomes(specs.size());
  parallel_for(specs.size(), f.jobs,
               [&](std::size_t i) { outcomes[i] = run_guarded(specs[i]); });

  std::string csv = "seed";
  for (std::size_t v = 1; v <= variants.size(); ++v) {
    const std::string n = std::to_string(v);
    csv += ",variant_" + n + ",completed_" + n + ",steps_" + n + ",total_cost_" + n +
           ",min_h_" + n + ",mean_safe_frac_" + n;
  }
  csv += "\n";
  std::string lines;
  bool all_completed = true;
  for (int i = 0; i < f.seeds; ++i) {
    csv += std::to_string(f.seed + i);
    for (std::size_t v = 0; v < variants.size(); ++v) {
      const std::size_t idx = static_cast<std::size_t>(i) * variants.size() + v;
      csv += "," + std::string(to_string(variants[v]));
      if (!outcomes[idx].record) {
        csv += ",0,0,nan,nan,nan";
        lines += nlohmann::json{{"command", "compare"},
                                {"seed", specs[idx].planner.seed},
                                {"variant", std::string(to_string(variants[v]))},
                                {"error", outcomes[idx].error}}
                     .dump() + "\n";
        all_completed = false;
        continue;
      }
      const EpisodeSummary& s = outcomes[idx].record->summary;
      csv += std::string(s.completed ? ",1," : ",0,") + std::to_string(s.steps) + "," +
             cell(s.total_cost) + "," + cell(s.min_h) + "," + cell(s.mean_safe_frac);
      lines += summary_line("compare", specs[idx], s).dump() + "\n";
      all_completed = all_completed && s.completed;
    }
    csv += "\n";
  }

  // Cost profile of the first seed for each variant.
  std::vector<CostSeries> series;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    CostSeries s;
    s.label = std::string(to_string(variants[v])) + " (seed " + std::to_string(f.seed) + ")";
    if (outcomes[v].record) {
      for (const auto& row : outcomes[v].record->rows) s.values.push_back(row.q);
    }
    series.push_back(std::move(s));
  }

  write_text_atomic(dir / "compare.csv", csv);
  write_text_atomic(dir / "compare.svg", cost_svg(series, base.planner.dt));
  write_text_atomic(dir / "summary.json-lines", lines);
  out << specs.size() << " runs written to " << (dir / "compare.csv").string() << "\n";
  return all_completed ? kExitOk : kExitIncomplete;
}

// ---- plot ------------------------------------------------------------------

struct PlotFlags {
  std::string run;
  std::string kind = "trajectory";
  std::string out;
};

fs::path require_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw std::runtime_error("missing file " + path.string());
  return path;
}

int cmd_plot(const PlotFlags& f, std::ostream& out) {
  const fs::path dir(f.run);
  require_file(dir / (f.kind == "samples" ? "snapshot.csv" : "episode.csv"));
  const std::string summary_text = read_text(require_file(dir / "summary.json-lines"));
  const auto first = nlohmann::json::parse(summary_text.substr(0, summary_text.find('\n')));
  const nlohmann::json& config = first.at("config");
  const Scenario scenario = scenario_from_json(config.at("scenario"));
  const double dt = config.at("controller").at("dt").get<double>();

  std::string svg;
  if (f.kind == "trajectory") {
    const EpisodeRecord episode = read_episode_csv(require_file(dir / "episode.csv"));
    svg = trajectory_svg(scenario, &episode, nullptr);
  } else if (f.kind == "samples") {
    const SnapshotRecord snapshot = read_snapshot_csv(require_file(dir / "snapshot.csv"));
    svg = samples_svg(scenario, snapshot);
  } else {
    const EpisodeRecord episode = read_episode_csv(require_file(dir / "episode.csv"));
    CostSeries s;
    s.label = config.at("controller").at("variant").get<std::string>();
    for (const auto& row : episode.rows) s.values.push_back(row.q);
    svg = cost_svg({s}, dt);
  }
  const fs::path target(f.out);
  if (target.has_parent_path()) make_out_dir(target.parent_path());
  write_text_atomic(target, svg);
  out << "wrote " << target.string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sampling-based planners with barrier-function safety"};
  app.name("mppi-cbf");
  app.require_subcommand(1);

  RunFlags run;
  auto* run_cmd = app.add_subcommand("run", "Run one episode");
  run.source.add(*run_cmd);
  run_cmd->add_option("--variant", run.variant, "mppi, shielded or trust_region");
  run_cmd->add_option("--samples", run.samples, "Sample count K")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", run.seed, "Random seed")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--out", run.out, "Output directory")->required();

  SweepFlags sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run every (sample count, seed) pair");
  sweep.source.add(*sweep_cmd);
  sweep_cmd->add_option("--variant", sweep.variant, "mppi, shielded or trust_region");
  sweep_cmd->add_option("--samples", sweep.samples, "Comma-separated sample counts")
      ->capture_default_str();
  sweep_cmd->add_option("--seeds", sweep.seeds, "Seeds per sample count")
      ->check(CLI::PositiveNumber)->capture_default_str();
  sweep_cmd->add_option("--seed", sweep.seed, "First seed")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  sweep_cmd->add_option("--jobs", sweep.jobs, "Concurrent runs")
      ->check(CLI::PositiveNumber)->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out, "Output directory")->required();

  CompareFlags compare;
  auto* compare_cmd = app.add_subcommand("compare", "Run several variants on matched seeds");
  compare.source.add(*compare_cmd);
  compare_cmd->add_option("--variants", compare.variants, "Comma-separated variants")
      ->capture_default_str();
  compare_cmd->add_option("--samples", compare.samples, "Sample count K")
      ->check(CLI::PositiveNumber);
  compare_cmd->add_option("--seeds", compare.seeds, "Number of seeds")
      ->check(CLI::PositiveNumber)->capture_default_str();
  compare_cmd->add_option("--seed", compare.seed, "First seed")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  compare_cmd->add_option("--jobs", compare.jobs, "Concurrent runs")
      ->check(CLI::PositiveNumber)->capture_default_str();
  compare_cmd->add_option("--out", compare.out, "Output directory")->required();

  PlotFlags plot;
  auto* plot_cmd = app.add_subcommand("plot", "Render graphics from a run directory");
  plot_cmd->add_option("--run", plot.run, "Directory written by `run`")->required();
  plot_cmd->add_option("--kind", plot.kind, "trajectory, samples or cost")
      ->check(CLI::IsMember({"trajectory", "samples", "cost"}))
      ->capture_default_str();
  plot_cmd->add_option("--out", plot.out, "Output file")->required();

  // CLI11 parses argv in reverse order from a vector.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*run_cmd) return cmd_run(run, out);
    if (*sweep_cmd) return cmd_sweep(sweep, out);
    if (*compare_cmd) return cmd_compare(compare, out);
    return cmd_plot(plot, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace mppi_cbf::cli
