// Copyright 2026 The tpqd-sim Authors
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

#include "tpqd/scenario_file.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "text_util.hpp"

namespace tpqd {
namespace {

using detail::format_double;
using detail::parse_double;
using detail::parse_int;
using detail::trim;

struct Line {
  int number;
  std::string key;
  std::string value;
};

struct Section {
  int number = 0;
  std::string name;
  std::vector<Line> lines;
};

std::optional<bool> parse_bool(std::string_view s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  return std::nullopt;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

/// Applies the keys of one section, reporting bad values by line.
class Reader {
 public:
  Reader(std::vector<ParseError>& errors, const Line& line) : errors_(errors), line_(line) {}

  void fail(const std::string& msg) { errors_.push_back({line_.number, line_.key + ": " + msg}); }

  void number(double& out) {
    if (auto v = parse_double(line_.value)) {
      out = *v;
    } else {
      fail("expected a number, got '" + line_.value + "'");
    }
  }
  void millis(Duration& out) {
    if (auto v = parse_int(line_.value)) {
      out = Duration(*v);
    } else {
      fail("expected whole milliseconds, got '" + line_.value + "'");
    }
  }
  void boolean(bool& out) {
    if (auto v = parse_bool(line_.value)) {
      out = *v;
    } else {
      fail("expected true or false, got '" + line_.value + "'");
    }
  }
  template <typename T, typename P>
  void parsed(T& out, P parse, std::string_view what) {
    if (auto v = parse(line_.value)) {
      out = *v;
    } else {
      fail("unknown " + std::string(what) + " '" + line_.value + "'");
    }
  }

 private:
  std::vector<ParseError>& errors_;
  const Line& line_;
};

std::optional<int> level_key(std::string_view key) {
  if (!key.starts_with("level.")) return std::nullopt;
  auto n = parse_int(key.substr(6));
  if (!n || *n < 1 || *n > 64) return std::nullopt;
  return static_cast<int>(*n);
}

void read_scenario(ScenarioSpec& s, const Section& sec, std::vector<ParseError>& errors) {
  for (const auto& l : sec.lines) {
    Reader r(errors, l);
    if (l.key == "name") {
      s.name = l.value;
    } else if (l.key == "kind") {
      // consumed before the other sections
    } else if (l.key == "architecture") {
      r.parsed(s.architecture, parse_architecture, "architecture");
    } else if (l.key == "description") {
      s.description = l.value;
    } else {
      r.fail("unknown key in [scenario]");
    }
  }
}

void read_vehicle(ScenarioSpec& s, const Section& sec, std::vector<ParseError>& errors) {
  for (const auto& l : sec.lines) {
    Reader r(errors, l);
    if (l.key == "speed") {
      r.number(s.vehicle.speed);
    } else if (l.key == "max_decel") {
      r.number(s.vehicle.max_decel);
    } else {
      r.fail("unknown key in [vehicle]");
    }
  }
}

void read_object(ScenarioSpec& s, const Section& sec, std::vector<ParseError>& errors) {
  ObjectSpec o = s.object.value_or(ObjectSpec{});
  bool present = true;
  for (const auto& l : sec.lines) {
    Reader r(errors, l);
    if (l.key == "present") {
      r.boolean(present);
    } else if (l.key == "truth") {
      r.parsed(o.truth, parse_object_class, "object class");
    } else if (l.key == "distance") {
      r.number(o.distance);
    } else if (l.key == "speed") {
      r.number(o.speed);
    } else if (l.key == "adjacent") {
      r.boolean(o.adjacent);
    } else {
      r.fail("unknown key in [object]");
    }
  }
  if (present) {
    s.object = o;
  } else {
    s.object.reset();
  }
}

void read_detection(ScenarioSpec& s, const Section& sec, std::vector<ParseError>& errors) {
  for (const auto& l : sec.lines) {
    Reader r(errors, l);
    if (l.key == "distance") {
      r.number(s.detection.distance);
    } else if (l.key == "cooperative") {
      r.parsed(s.detection.cooperative, parse_cooperative_sensing, "cooperative sensing");
    } else {
      r.fail("unknown key in [detection]");
    }
  }
}

void read_constants(ScenarioSpec& s, const Section& sec, std::vector<ParseError>& errors) {
  auto& c = s.constants;
  for (const auto& l : sec.lines) {
    Reader r(errors, l);
    if (l.key == "safety_margin_s") {
      r.number(c.control.safety_margin_s);
    } else if (l.key == "horizon_ms") {
      r.millis(c.control.horizon);
    } else if (l.key == "smod_wcet_ms") {
      r.millis(c.control.smod_wcet);
    } else if (l.key == "refine") {
      r.boolean(c.control.refine);
    } else if (l.key == "planning_quantile") {
      r.number(c.planning_quantile);
    } else if (l.key == "guard") {
      r.boolean(c.guard);
    } else if (l.key == "slow_factor") {
      r.number(c.slow_factor);
    } else if (l.key == "dt_ms") {
      r.millis(c.dt);
    } else if (l.key == "max_time_ms") {
      r.millis(c.max_time);
    } else {
      r.fail("unknown key in [constants]");
    }
  }
}

void read_policy(ScenarioSpec& s, const Section& sec, std::vector<ParseError>& errors) {
  std::string kind = s.policy.kind == SchedulingPolicy::Kind::StaticEven ? "static_even"
                                                                          : "dynamic_weighted";
  std::vector<double> weights = s.policy.weights;
  for (const auto& l : sec.lines) {
    Reader r(errors, l);
    if (l.key == "kind") {
      if (l.value != "static_even" && l.value != "dynamic_weighted") {
        r.fail("unknown policy '" + l.value + "'");
      } else {
        kind = l.value;
      }
    } else if (l.key == "weights") {
      weights.clear();
      for (auto part : detail::split(l.value, ',')) {
        if (auto w = parse_double(part)) {
          weights.push_back(*w);
        } else {
          r.fail("bad weight '" + std::string(trim(part)) + "'");
        }
      }
    } else {
      r.fail("unknown key in [policy]");
    }
  }
  s.policy.kind = kind == "static_even" ? SchedulingPolicy::Kind::StaticEven
                                        : SchedulingPolicy::Kind::DynamicWeighted;
  s.policy.weights = s.policy.kind == SchedulingPolicy::Kind::StaticEven ? std::vector<double>{}
                                                                          : weights;
}

void read_tsim(Tsim& t, const Section& sec, std::vector<ParseError>& errors) {
  std::map<int, int> seen;
  for (const auto& l : sec.lines) {
    Reader r(errors, l);
    if (l.key == "smod_action") {
      r.parsed(t.smod.action, ActionSpec::parse, "action list");
    } else if (l.key == "smod_wcet_ms") {
      r.millis(t.smod.wcet);
    } else if (auto level = level_key(l.key)) {
      // "<latency model> <accuracy>"
      const auto space = l.value.rfind(' ');
      std::optional<LatencyModel> model;
      std::optional<double> acc;
      if (space != std::string::npos) {
        model = LatencyModel::parse(l.value.substr(0, space));
        acc = parse_double(l.value.substr(space + 1));
      }
      if (!model || !acc) {
        r.fail("expected '<latency model> <accuracy>', e.g. 'triangular(20,40,80) 0.99'");
        continue;
      }
      if (seen.count(*level)) r.fail("duplicate level");
      seen[*level] = l.number;
      if (static_cast<std::size_t>(*level) > t.profile.levels.size()) {
        t.profile.levels.resize(static_cast<std::size_t>(*level),
                                LevelProfile{LatencyModel::constant(1), 1.0});
      }
      t.profile.levels[static_cast<std::size_t>(*level - 1)] = LevelProfile{*model, *acc};
    } else {
      r.fail("unknown key in [tsim." + t.id + "]");
    }
  }
}

void read_ladder(ScenarioSpec& s, const Section& sec, std::vector<ParseError>& errors) {
  LevelLadder ladder = s.ladder.empty() ? load_level_ladder(s.kind) : s.ladder;
  for (const auto& l : sec.lines) {
    Reader r(errors, l);
    auto level = level_key(l.key);
    if (!level) {
      r.fail("unknown key in [ladder]");
      continue;
    }
    // "<actions> | <sensing label>"
    const auto bar = l.value.find('|');
    const std::string actions(trim(std::string_view(l.value).substr(0, bar)));
    auto spec = ActionSpec::parse(actions);
    if (!spec) {
      r.fail("bad action list '" + actions + "'");
      continue;
    }
    if (*level > static_cast<int>(ladder.size())) {
      r.fail("level beyond the " + std::string(to_string(s.kind)) + " ladder");
      continue;
    }
    auto& row = ladder[static_cast<std::size_t>(*level - 1)];
    row.action = *spec;
    if (bar != std::string::npos) row.sensing_label = std::string(trim(std::string_view(l.value).substr(bar + 1)));
  }
  s.ladder = std::move(ladder);
}

int section_line(const std::vector<Section>& sections, std::string_view name) {
  for (const auto& s : sections) {
    if (s.name == name) return s.number;
  }
  return 0;
}

/// Points a semantic error at the section it concerns.
int line_for(const std::vector<Section>& sections, const std::string& msg) {
  if (msg.starts_with("tsim ")) {
    const auto colon = msg.find(':');
    return section_line(sections, "tsim." + msg.substr(5, colon - 5));
  }
  for (std::string_view name : {"vehicle", "object", "detection", "constants", "policy", "ladder", "scenario"}) {
    if (msg.starts_with(name)) return section_line(sections, name);
  }
  return 0;
}

void comment(std::ostringstream& out, bool annotate, std::string_view text) {
  if (annotate) out << "# " << text << '\n';
}

}  // namespace

std::string ParseError::str() const {
  if (line <= 0) return message;
  return "line " + std::to_string(line) + ": " + message;
}

ScenarioParse parse_scenario_file(std::string_view text) {
  ScenarioParse result;
  auto& errors = result.errors;
  std::vector<Section> sections;

  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++number;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        errors.push_back({number, "malformed section header"});
        continue;
      }
      sections.push_back(Section{number, std::string(trim(line.substr(1, line.size() - 2))), {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back({number, "expected 'key = value'"});
      continue;
    }
    if (sections.empty()) {
      errors.push_back({number, "key outside of any section"});
      continue;
    }
    sections.back().lines.push_back(
        Line{number, std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1)))});
  }

  // The kind decides every default, so it is read first.
  ScenarioKind kind = ScenarioKind::ObstacleAvoidance;
  for (const auto& sec : sections) {
    if (sec.name != "scenario") continue;
    for (const auto& l : sec.lines) {
      if (l.key != "kind") continue;
      if (auto k = parse_scenario_kind(l.value)) {
        kind = *k;
      } else {
        errors.push_back({l.number, "kind: unknown scenario kind '" + l.value + "'"});
      }
    }
  }

  ScenarioSpec spec = default_scenario(kind);
  std::map<std::string, int> seen;
  bool tsims_reset = false;
  for (const auto& sec : sections) {
    const bool repeatable = false;
    if (!repeatable && seen.count(sec.name)) {
      errors.push_back({sec.number, "duplicate section [" + sec.name + "]"});
      continue;
    }
    seen[sec.name] = sec.number;
    if (sec.name == "scenario") {
      read_scenario(spec, sec, errors);
    } else if (sec.name == "vehicle") {
      read_vehicle(spec, sec, errors);
    } else if (sec.name == "object") {
      read_object(spec, sec, errors);
    } else if (sec.name == "detection") {
      read_detection(spec, sec, errors);
    } else if (sec.name == "constants") {
      read_constants(spec, sec, errors);
    } else if (sec.name == "policy") {
      read_policy(spec, sec, errors);
    } else if (sec.name == "ladder") {
      read_ladder(spec, sec, errors);
    } else if (sec.name.starts_with("tsim.") && sec.name.size() > 5) {
      // Listing any TSIM replaces the default chain; each starts from the
      // defaults of its position.
      if (!tsims_reset) {
        spec.tsims.clear();
        tsims_reset = true;
      }
      const auto defaults = default_tsims(kind, spec.constants.control.smod_wcet);
      Tsim t = defaults[std::min<std::size_t>(spec.tsims.size(), defaults.size() - 1)];
      t.id = sec.name.substr(5);
      read_tsim(t, sec, errors);
      spec.tsims.push_back(std::move(t));
    } else {
      errors.push_back({sec.number, "unknown section [" + sec.name + "]"});
    }
  }

  if (errors.empty()) {
    for (const auto& msg : scenario_errors(spec)) {
      errors.push_back({line_for(sections, msg), msg});
    }
  }
  if (errors.empty()) result.spec = std::move(spec);
  return result;
}

std::string emit_scenario_file(const ScenarioSpec& s, bool annotate) {
  std::ostringstream out;
  comment(out, annotate, "tpqd scenario file. Lines are 'key = value'; '#' starts a comment.");
  out << "[scenario]\n";
  out << "name = " << s.name << '\n';
  comment(out, annotate, "obstacle_avoidance | intersection_crossing | overtaking | crash_avoidance");
  out << "kind = " << to_string(s.kind) << '\n';
  comment(out, annotate, "savvy | all_or_nothing | simplex_like");
  out << "architecture = " << to_string(s.architecture) << '\n';
  out << "description = " << s.description << '\n';

  out << "\n[vehicle]\n";
  comment(out, annotate, "initial speed in m/s, braking deceleration in m/s^2");
  out << "speed = " << format_double(s.vehicle.speed) << '\n';
  out << "max_decel = " << format_double(s.vehicle.max_decel) << '\n';

  out << "\n[object]\n";
  if (!s.object) {
    comment(out, annotate, "empty road");
    out << "present = false\n";
  } else {
    comment(out, annotate, "leaf class, meters ahead at t=0, m/s along the corridor (negative = oncoming)");
    comment(out, annotate, "adjacent: in the passing lane, blocks only after a maneuver");
    out << "present = true\n";
    out << "truth = " << to_string(s.object->truth) << '\n';
    out << "distance = " << format_double(s.object->distance) << '\n';
    out << "speed = " << format_double(s.object->speed) << '\n';
    out << "adjacent = " << bool_str(s.object->adjacent) << '\n';
  }

  out << "\n[detection]\n";
  comment(out, annotate, "preliminary detection fires when the gap (m) is at most this distance");
  comment(out, annotate, "cooperative: none | rsu_short | rsu_long | active");
  out << "distance = " << format_double(s.detection.distance) << '\n';
  out << "cooperative = " << to_string(s.detection.cooperative) << '\n';

  const auto& c = s.constants;
  out << "\n[constants]\n";
  comment(out, annotate, "tth = distance/speed - speed/max_decel - safety_margin_s, tte = tth - smod_wcet_ms");
  out << "safety_margin_s = " << format_double(c.control.safety_margin_s) << '\n';
  out << "horizon_ms = " << c.control.horizon.count() << '\n';
  out << "smod_wcet_ms = " << c.control.smod_wcet.count() << '\n';
  comment(out, annotate, "refine: closing-speed kinematics may tighten tth");
  out << "refine = " << bool_str(c.control.refine) << '\n';
  comment(out, annotate, "latency quantile used to tune each model level");
  out << "planning_quantile = " << format_double(c.planning_quantile) << '\n';
  comment(out, annotate, "guard: emergency stop at tth for all_or_nothing");
  out << "guard = " << bool_str(c.guard) << '\n';
  out << "slow_factor = " << format_double(c.slow_factor) << '\n';
  out << "dt_ms = " << c.dt.count() << '\n';
  out << "max_time_ms = " << c.max_time.count() << '\n';

  out << "\n[policy]\n";
  comment(out, annotate, "static_even | dynamic_weighted (one positive weight per tsim)");
  if (s.policy.kind == SchedulingPolicy::Kind::StaticEven) {
    out << "kind = static_even\n";
  } else {
    out << "kind = dynamic_weighted\n";
    out << "weights = ";
    for (std::size_t i = 0; i < s.policy.weights.size(); ++i) {
      if (i) out << ',';
      out << format_double(s.policy.weights[i]);
    }
    out << '\n';
  }

  for (const auto& t : s.tsims) {
    out << "\n[tsim." << t.id << "]\n";
    comment(out, annotate, "level.N = <latency model in ms> <accuracy>");
    out << "smod_action = " << t.smod.action.str() << '\n';
    out << "smod_wcet_ms = " << t.smod.wcet.count() << '\n';
    for (int l = 1; l <= t.profile.top_level(); ++l) {
      const auto& lp = t.profile.at(l);
      out << "level." << l << " = " << lp.latency.str() << ' ' << format_double(lp.accuracy) << '\n';
    }
  }

  if (!s.ladder.empty()) {
    out << "\n[ladder]\n";
    comment(out, annotate, "level.N = <actions> | <sensing label>");
    for (const auto& row : s.ladder) {
      out << "level." << row.index << " = " << row.action.str() << " | " << row.sensing_label << '\n';
    }
  }
  return out.str();
}

ScenarioSpec load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  auto parsed = parse_scenario_file(buf.str());
  if (!parsed.ok()) {
    std::string msg = path + ":";
    for (const auto& e : parsed.errors) msg += "\n  " + e.str();
    throw DomainError(msg);
  }
  return std::move(*parsed.spec);
}

}  // namespace tpqd
