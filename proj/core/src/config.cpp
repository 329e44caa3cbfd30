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

#include "mppi_cbf/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <set>

namespace mppi_cbf {
namespace {

using nlohmann::json;

class TextParser {
 public:
  explicit TextParser(std::string_view text) : text_(text) {}

  json parse() {
    json root = json::object();
    json* section = &root;
    for (;;) {
      skip_blank(true);
      if (at_end()) break;
      if (peek() == '[') {
        ++pos_;
        skip_blank(false);
        const std::string name = key();
        skip_blank(false);
        expect(']');
        if (root.contains(name)) fail("duplicate section [" + name + "]");
        root[name] = json::object();
        section = &root[name];
      } else {
        const std::string k = key();
        skip_blank(false);
        expect('=');
        skip_blank(false);
        if (section->contains(k)) fail("duplicate key '" + k + "'");
        (*section)[k] = value();
      }
      end_of_line();
    }
    return root;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    int line = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) line += text_[i] == '\n';
    throw ConfigError("line " + std::to_string(line) + ": " + what);
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  // Skips spaces and comments, and newlines too when `newlines` is set.
  void skip_blank(bool newlines) {
    while (!at_end()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || (newlines && c == '\n')) {
        ++pos_;
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  void end_of_line() {
    skip_blank(false);
    if (at_end()) return;
    if (peek() != '\n') fail("unexpected text after value");
    ++pos_;
  }

  std::string key() {
    if (peek() == '"') return string();
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                         peek() == '_' || peek() == '-')) {
      ++pos_;
    }
    if (pos_ == start) fail("expected a key");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string string() {
    expect('"');
    std::string out;
    for (;;) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      char c = text_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (at_end()) fail("unterminated string");
        c = text_[pos_++];
        switch (c) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unknown escape \\") + c);
        }
      } else {
        out += c;
      }
    }
  }

  json value() {
    const char c = peek();
    if (c == '"') return string();
    if (c == '[') return array();
    if (c == '{') return table();
    if (text_.substr(pos_, 4) == "true") { pos_ += 4; return true; }
    if (text_.substr(pos_, 5) == "false") { pos_ += 5; return false; }
    return number();
  }

  json array() {
    expect('[');
    json out = json::array();
    skip_blank(true);
    while (peek() != ']') {
      out.push_back(value());
      skip_blank(true);
      if (peek() == ',') {
        ++pos_;
        skip_blank(true);
      } else if (peek() != ']') {
        fail("expected ',' or ']'");
      }
    }
    ++pos_;
    return out;
  }

  json table() {
    expect('{');
    json out = json::object();
    skip_blank(false);
    while (peek() != '}') {
      const std::string k = key();
      skip_blank(false);
      expect('=');
      skip_blank(false);
      if (out.contains(k)) fail("duplicate key '" + k + "'");
      out[k] = value();
      skip_blank(false);
      if (peek() == ',') {
        ++pos_;
        skip_blank(false);
      } else if (peek() != '}') {
        fail("expected ',' or '}'");
      }
    }
    ++pos_;
    return out;
  }

  json number() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                         peek() == '+' || peek() == '-' || peek() == '.' ||
                         peek() == '_')) {
      ++pos_;
    }
    std::string token(text_.substr(start, pos_ - start));
    std::erase(token, '_');
    if (token.empty()) fail("expected a value");
    const bool integral = token.find_first_of(".eEn") == std::string::npos;
    char* end = nullptr;
    if (integral) {
      const long long v = std::strtoll(token.c_str(), &end, 10);
      if (*end == '\0') return v;
    } else {
      const double v = std::strtod(token.c_str(), &end);
      if (*end == '\0' && std::isfinite(v)) return v;
    }
    pos_ = start;
    fail("invalid value '" + token + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Typed access with the key path in error messages.
class Section {
 public:
  Section(const json& root, const char* name) : name_(name) {
    if (root.contains(name)) {
      if (!root[name].is_object()) throw ConfigError(std::string("[") + name + "] is not a section");
      j_ = &root[name];
    }
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_ && j_->contains(key);
  }

  double number(const char* key) {
    const json& v = at(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }

  long long integer(const char* key) {
    const json& v = at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<long long>();
  }

  bool boolean(const char* key) {
    const json& v = at(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const char* key) {
    const json& v = at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const char* key, std::size_t size) {
    const json& v = at(key);
    if (!v.is_array() || v.size() != size) {
      fail(key, "expected an array of " + std::to_string(size) + " numbers");
    }
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail(key, "expected numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  Eigen::Matrix2d matrix(const char* key) {
    const json& v = at(key);
    if (!v.is_array() || v.size() != 2) fail(key, "expected a 2x2 array");
    Eigen::Matrix2d m;
    for (int i = 0; i < 2; ++i) {
      if (!v[i].is_array() || v[i].size() != 2) fail(key, "expected a 2x2 array");
      for (int k = 0; k < 2; ++k) {
        if (!v[i][k].is_number()) fail(key, "expected numbers");
        m(i, k) = v[i][k].get<double>();
      }
    }
    return m;
  }

  const json& at(const char* key) {
    seen_.insert(key);
    return j_->at(key);
  }

  [[noreturn]] void fail(const char* key, const std::string& what) const {
    throw ConfigError(name_ + "." + key + ": " + what);
  }

  void reject_unknown() const {
    if (!j_) return;
    for (const auto& [key, _] : j_->items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key " + name_ + "." + key);
    }
  }

 private:
  std::string name_;
  const json* j_ = nullptr;
  std::set<std::string> seen_;
};

}  // namespace

PlannerConfig RunSpec::resolved() const {
  PlannerConfig out = planner;
  out.horizon = horizon ? *horizon : preset.horizon_for(planner.variant);
  return out;
}

RunSpec default_run_spec(const std::string& scenario) {
  const auto presets = builtin_scenarios();
  const auto it = presets.find(scenario);
  if (it == presets.end()) throw ConfigError("unknown scenario '" + scenario + "'");
  RunSpec spec;
  spec.preset = it->second;
  return spec;
}

json parse_config_text(std::string_view text) { return TextParser(text).parse(); }

RunSpec parse_run_spec(std::string_view text) {
  const json root = parse_config_text(text);
  for (const auto& [name, _] : root.items()) {
    if (name != "scenario" && name != "controller" && name != "cost" && name != "run") {
      throw ConfigError("unknown section [" + name + "]");
    }
  }

  Section sc(root, "scenario");
  RunSpec spec = default_run_spec(sc.has("name") ? sc.string("name") : "single_obstacle");
  Scenario& s = spec.preset.scenario;
  if (sc.has("start")) {
    const auto v = sc.numbers("start", 3);
    s.start = {v[0], v[1], v[2]};
  }
  if (sc.has("target")) {
    const auto v = sc.numbers("target", 2);
    s.target_x = v[0];
    s.target_y = v[1];
  }
  if (sc.has("v_desired")) s.v_desired = sc.number("v_desired");
  if (sc.has("goal_tolerance")) s.goal_tolerance = sc.number("goal_tolerance");
  if (sc.has("max_steps")) s.max_steps = static_cast<int>(sc.integer("max_steps"));
  if (sc.has("obstacles")) {
    const json& list = sc.at("obstacles");
    if (!list.is_array()) sc.fail("obstacles", "expected an array of tables");
    s.obstacles.clear();
    for (const auto& o : list) {
      if (!o.is_object() || o.size() != 3 || !o.contains("x") || !o.contains("y") ||
          !o.contains("r") || !o["x"].is_number() || !o["y"].is_number() ||
          !o["r"].is_number()) {
        sc.fail("obstacles", "each obstacle needs numeric x, y and r");
      }
      s.obstacles.push_back({o["x"].get<double>(), o["y"].get<double>(),
                             o["r"].get<double>()});
    }
  }
  sc.reject_unknown();

  Section ct(root, "controller");
  PlannerConfig& p = spec.planner;
  if (ct.has("variant")) {
    const auto v = parse_variant(ct.string("variant"));
    if (!v) ct.fail("variant", "expected mppi, shielded or trust_region");
    p.variant = *v;
  }
  if (ct.has("samples")) p.samples = static_cast<int>(ct.integer("samples"));
  if (ct.has("horizon")) spec.horizon = static_cast<int>(ct.integer("horizon"));
  if (ct.has("dt")) p.dt = ct.number("dt");
  if (ct.has("mu0")) {
    const auto v = ct.numbers("mu0", 2);
    p.mu0 = {v[0], v[1]};
  }
  if (ct.has("sigma0")) p.sigma0 = ct.matrix("sigma0");
  if (ct.has("trust_c")) p.trust_c = ct.number("trust_c");
  if (ct.has("delta")) p.delta = ct.number("delta");
  if (ct.has("alpha")) {
    const std::string kind = ct.string("alpha");
    if (kind == "linear") {
      p.alpha.kind = ClassKappa::Kind::kLinear;
    } else if (kind == "cubic") {
      p.alpha.kind = ClassKappa::Kind::kCubic;
    } else {
      ct.fail("alpha", "expected linear or cubic");
    }
  }
  if (ct.has("gamma")) p.alpha.gamma = ct.number("gamma");
  if (ct.has("seed")) {
    const long long seed = ct.integer("seed");
    if (seed < 0) ct.fail("seed", "must be nonnegative");
    p.seed = static_cast<std::uint64_t>(seed);
  }
  if (ct.has("norm")) {
    const std::string norm = ct.string("norm");
    if (norm == "frobenius") {
      p.norm = MatrixNorm::kFrobenius;
    } else if (norm == "spectral") {
      p.norm = MatrixNorm::kSpectral;
    } else {
      ct.fail("norm", "expected frobenius or spectral");
    }
  }
  if (ct.has("exact_chance")) p.exact_chance = ct.boolean("exact_chance");
  if (ct.has("shared_sdp")) p.shared_sdp = ct.boolean("shared_sdp");
  if (ct.has("workers")) p.workers = static_cast<int>(ct.integer("workers"));
  ct.reject_unknown();

  Section co(root, "cost");
  CostParams& c = spec.preset.cost;
  if (co.has("position_weight")) c.position_weight = co.number("position_weight");
  if (co.has("velocity_weight")) c.velocity_weight = co.number("velocity_weight");
  if (co.has("penalty")) c.penalty = co.number("penalty");
  if (co.has("lambda")) c.lambda = co.number("lambda");
  if (co.has("control_cost_weight")) c.control_cost_weight = co.matrix("control_cost_weight");
  co.reject_unknown();

  Section rn(root, "run");
  if (rn.has("snapshot_time")) {
    const double t = rn.number("snapshot_time");
    if (t < 0.0) rn.fail("snapshot_time", "must be nonnegative");
    spec.options.snapshot_step = static_cast<int>(std::lround(t / p.dt));
  }
  rn.reject_unknown();

  try {
    s.validate();
    spec.resolved().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

RunSpec load_run_spec(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  try {
    return parse_run_spec(text);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

json run_spec_json(const RunSpec& spec) {
  const PlannerConfig p = spec.resolved();
  const CostParams& c = spec.preset.cost;
  auto matrix = [](const Eigen::Matrix2d& m) {
    return json::array({json::array({m(0, 0), m(0, 1)}), json::array({m(1, 0), m(1, 1)})});
  };
  json controller = {
      {"variant", std::string(to_string(p.variant))},
      {"samples", p.samples},
      {"horizon", p.horizon},
      {"dt", p.dt},
      {"mu0", {p.mu0(0), p.mu0(1)}},
      {"sigma0", matrix(p.sigma0)},
      {"trust_c", p.resolved_trust_c()},
      {"delta", p.delta},
      {"alpha", p.alpha.kind == ClassKappa::Kind::kLinear ? "linear" : "cubic"},
      {"gamma", p.alpha.gamma},
      {"seed", p.seed},
      {"norm", p.norm == MatrixNorm::kFrobenius ? "frobenius" : "spectral"},
      {"exact_chance", p.exact_chance},
      {"shared_sdp", p.shared_sdp}};
  json cost = {{"position_weight", c.position_weight},
               {"velocity_weight", c.velocity_weight},
               {"penalty", c.penalty},
               {"lambda", c.lambda},
               {"control_cost_weight", matrix(c.control_cost_weight)}};
  return {{"scenario", scenario_json(spec.preset.scenario)},
          {"controller", controller},
          {"cost", cost},
          {"run", {{"snapshot_time", spec.options.snapshot_step * p.dt}}}};
}

}  // namespace mppi_cbf
