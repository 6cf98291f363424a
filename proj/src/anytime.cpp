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

#include "tpqd/anytime.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "text_util.hpp"

namespace tpqd {

double Rng::uniform01() {
  // 53 random mantissa bits, offset by half a step so 0 and 1 never occur.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  const auto k = static_cast<std::uint64_t>(uniform01() * static_cast<double>(n));
  return std::min(k, n - 1);
}

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined key
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

LatencyModel LatencyModel::constant(double ms) {
  if (!(ms > 0.0) || !std::isfinite(ms)) throw DomainError("constant latency must be > 0");
  return {Kind::Constant, ms, 0.0, 0.0};
}

LatencyModel LatencyModel::triangular(double min, double mode, double max) {
  if (!(min > 0.0) || !std::isfinite(max)) throw DomainError("triangular latency: min must be > 0");
  if (!(min <= mode && mode <= max)) throw DomainError("triangular latency: need min <= mode <= max");
  return {Kind::Triangular, min, mode, max};
}

LatencyModel LatencyModel::lognormal_like(double median, double spread) {
  if (!(median > 0.0) || !std::isfinite(median)) throw DomainError("lognormal latency: median must be > 0");
  if (!(spread >= 0.0) || !std::isfinite(spread)) throw DomainError("lognormal latency: spread must be >= 0");
  return {Kind::LogNormalLike, median, spread, 0.0};
}

double LatencyModel::from_uniform(double u) const {
  switch (kind_) {
    case Kind::Constant: return p0_;
    case Kind::Triangular: {
      const double lo = p0_, mode = p1_, hi = p2_;
      if (hi == lo) return lo;
      const double split = (mode - lo) / (hi - lo);
      if (u < split) return lo + std::sqrt(u * (hi - lo) * (mode - lo));
      return hi - std::sqrt((1.0 - u) * (hi - lo) * (hi - mode));
    }
    case Kind::LogNormalLike: {
      if (p1_ == 0.0) return p0_;
      static const boost::math::normal_distribution<double> standard;
      return p0_ * std::exp(p1_ * boost::math::quantile(standard, u));
    }
  }
  return p0_;
}

double LatencyModel::quantile(double q) const {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("latency quantile: q must be in (0, 1)");
  return from_uniform(q);
}

Duration LatencyModel::sample(Rng& rng) const {
  return Duration{static_cast<std::int64_t>(std::ceil(from_uniform(rng.uniform01())))};
}

std::string LatencyModel::str() const {
  using detail::format_double;
  switch (kind_) {
    case Kind::Constant: return "constant(" + format_double(p0_) + ")";
    case Kind::Triangular:
      return "triangular(" + format_double(p0_) + "," + format_double(p1_) + "," +
             format_double(p2_) + ")";
    case Kind::LogNormalLike:
      return "lognormal(" + format_double(p0_) + "," + format_double(p1_) + ")";
  }
  return "?";
}

std::optional<LatencyModel> LatencyModel::parse(std::string_view text) {
  text = detail::trim(text);
  const auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') return std::nullopt;
  const auto name = detail::trim(text.substr(0, open));
  std::vector<double> args;
  for (auto part : detail::split(text.substr(open + 1, text.size() - open - 2), ',')) {
    auto v = detail::parse_double(part);
    if (!v) return std::nullopt;
    args.push_back(*v);
  }
  try {
    if (name == "constant" && args.size() == 1) return constant(args[0]);
    if (name == "triangular" && args.size() == 3) return triangular(args[0], args[1], args[2]);
    if (name == "lognormal" && args.size() == 2) return lognormal_like(args[0], args[1]);
  } catch (const DomainError&) {
    return std::nullopt;
  }
  return std::nullopt;
}

Duration latency_quantile(const LatencyModel& model, double q) {
  return Duration{static_cast<std::int64_t>(std::ceil(model.quantile(q)))};
}

const LevelProfile& AnytimeProfile::at(int level) const {
  if (level < 1 || level > top_level()) {
    throw DomainError("profile has no level " + std::to_string(level));
  }
  return levels[static_cast<std::size_t>(level - 1)];
}

void validate_profile(const AnytimeProfile& profile) {
  const int expected = ladder_size(profile.scenario);
  if (profile.top_level() != expected) {
    throw DomainError("profile: one entry per ladder level required (" + std::string(to_string(profile.scenario)) +
                      " has " + std::to_string(expected) + ", got " +
                      std::to_string(profile.top_level()) + ")");
  }
  for (int level = 1; level <= profile.top_level(); ++level) {
    const double acc = profile.at(level).accuracy;
    if (!(acc >= 0.0 && acc <= 1.0)) {
      throw DomainError("profile: accuracy of L" + std::to_string(level) + " must be in [0, 1]");
    }
    if (level > 1 && profile.at(level).latency.median() < profile.at(level - 1).latency.median()) {
      throw DomainError("profile: monotone cost violated, median latency of L" +
                        std::to_string(level) + " is below L" + std::to_string(level - 1));
    }
  }
}

Observation truth_observation(ScenarioKind kind, ObjectClass truth, CooperativeSensing flags) {
  if (kind == ScenarioKind::ObstacleAvoidance) return {truth, resolving_depth(truth)};
  return {truth, reachable_level(kind, flags)};
}

Observation expected_at_level(ScenarioKind kind, const Observation& input, int level) {
  if (kind == ScenarioKind::ObstacleAvoidance) {
    const ObjectClass node = classify_at_depth(input.object, level);
    return {node, resolving_depth(node)};
  }
  return {input.object, std::min(input.row, level)};
}

std::vector<Observation> observations_at_level(ScenarioKind kind, const Observation& input,
                                               int level) {
  std::vector<Observation> out;
  if (kind == ScenarioKind::ObstacleAvoidance) {
    for (ObjectClass node : nodes_at_depth(level)) out.push_back({node, resolving_depth(node)});
  } else {
    // Rows above the input's row need sensing that is not available.
    for (int row = 1; row <= std::min(level, input.row); ++row) out.push_back({input.object, row});
  }
  return out;
}

InferenceResult infer(const AnytimeProfile& profile, const ModelConfig& config,
                      const Observation& input, Rng& rng) {
  const LevelProfile& lp = profile.at(config.level);
  InferenceResult result;
  result.level = config.level;
  result.elapsed = lp.latency.sample(rng);

  const Observation expected = expected_at_level(profile.scenario, input, config.level);
  const bool hit = rng.uniform01() < lp.accuracy;
  std::vector<Observation> wrong;
  if (!hit) {
    for (const auto& o : observations_at_level(profile.scenario, input, config.level)) {
      if (o != expected) wrong.push_back(o);
    }
  }
  if (hit || wrong.empty()) {
    result.observed = expected;
    result.correct = true;
  } else {
    result.observed = wrong[rng.below(wrong.size())];
    result.correct = false;
  }
  return result;
}

InferenceResult infer(const AnytimeProfile& profile, const ModelConfig& config, ObjectClass truth,
                      Rng& rng) {
  return infer(profile, config, truth_observation(profile.scenario, truth, CooperativeSensing::None),
               rng);
}

namespace {

struct Row {
  double lo, mode, hi, accuracy;
};

AnytimeProfile build(ScenarioKind kind, std::initializer_list<Row> rows, int stage) {
  // Downstream stages work on already-perceived input: cheaper, near-exact.
  const double scale = stage == 0 ? 1.0 : stage == 1 ? 0.5 : 0.25;
  AnytimeProfile p{kind, {}};
  for (const auto& r : rows) {
    p.levels.push_back({LatencyModel::triangular(r.lo * scale, r.mode * scale, r.hi * scale),
                        stage == 0 ? r.accuracy : 0.99});
  }
  return p;
}

}  // namespace

AnytimeProfile default_profile(ScenarioKind kind, int stage) {
  switch (kind) {
    case ScenarioKind::ObstacleAvoidance:
      return build(kind,
                   {{20, 40, 80, 0.99},
                    {40, 80, 150, 0.98},
                    {60, 120, 220, 0.97},
                    {100, 180, 320, 0.96},
                    {150, 260, 450, 0.95},
                    {250, 420, 750, 0.92},
                    {400, 700, 1200, 0.85}},
                   stage);
    case ScenarioKind::IntersectionCrossing:
    case ScenarioKind::Overtaking:
      return build(kind,
                   {{20, 40, 80, 0.99},
                    {80, 150, 300, 0.97},
                    {200, 350, 600, 0.95},
                    {500, 900, 1600, 0.90}},
                   stage);
    case ScenarioKind::CrashAvoidance:
      return build(kind,
                   {{20, 40, 80, 0.99},
                    {60, 120, 240, 0.97},
                    {150, 280, 500, 0.96},
                    {300, 520, 900, 0.94},
                    {500, 900, 1600, 0.90}},
                   stage);
  }
  throw DomainError("unknown scenario kind");
}

}  // namespace tpqd
