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

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tpqd/domain.hpp"
#include "tpqd/taxonomy.hpp"
#include "tpqd/time.hpp"

namespace tpqd {

/// Seeded random stream. Only the engine's raw output is used, so draws are
/// identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in the open interval (0, 1).
  double uniform01();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  /// Independent stream for (seed, stream) pairs.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::mt19937_64 engine_;
};

/// Latency distribution of one model configuration, in milliseconds.
class LatencyModel {
 public:
  enum class Kind : std::uint8_t { Constant, Triangular, LogNormalLike };

  static LatencyModel constant(double ms);
  static LatencyModel triangular(double min, double mode, double max);
  static LatencyModel lognormal_like(double median, double spread);

  Kind kind() const { return kind_; }
  double p0() const { return p0_; }
  double p1() const { return p1_; }
  double p2() const { return p2_; }

  double median() const { return quantile(0.5); }
  /// Exact quantile in ms. Requires 0 < q < 1.
  double quantile(double q) const;
  /// Inverse-CDF draw, rounded up to whole milliseconds.
  Duration sample(Rng& rng) const;

  /// "constant(100)", "triangular(20,40,80)", "lognormal(300,0.25)"
  std::string str() const;
  static std::optional<LatencyModel> parse(std::string_view text);

  friend bool operator==(const LatencyModel&, const LatencyModel&) = default;

 private:
  LatencyModel(Kind kind, double p0, double p1, double p2) : kind_(kind), p0_(p0), p1_(p1), p2_(p2) {}
  double from_uniform(double u) const;

  Kind kind_ = Kind::Constant;
  double p0_ = 1.0;
  double p1_ = 0.0;
  double p2_ = 0.0;
};

/// Conservative (rounded-up) q-quantile. Throws DomainError unless 0 < q < 1.
Duration latency_quantile(const LatencyModel& model, double q);

struct LevelProfile {
  LatencyModel latency;
  double accuracy = 1.0;

  friend bool operator==(const LevelProfile&, const LevelProfile&) = default;
};

/// Latency and accuracy per ladder level of one tunable model.
struct AnytimeProfile {
  ScenarioKind scenario = ScenarioKind::ObstacleAvoidance;
  std::vector<LevelProfile> levels;  // levels[0] is L1

  int top_level() const { return static_cast<int>(levels.size()); }
  const LevelProfile& at(int level) const;

  friend bool operator==(const AnytimeProfile&, const AnytimeProfile&) = default;
};

/// Throws DomainError naming the violated rule: one entry per ladder level,
/// accuracy in [0, 1], median latency non-decreasing in level.
void validate_profile(const AnytimeProfile& profile);

struct ModelConfig {
  int level = 1;
  std::uint64_t seed = 0;
};

/// What a model level reports. `object` carries the taxonomy node for
/// obstacle avoidance; `row` is the ladder row the observation maps to.
struct Observation {
  ObjectClass object = ObjectClass::UnknownObject;
  int row = 1;

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// Ground truth as seen by the first stage of a pipeline.
Observation truth_observation(ScenarioKind kind, ObjectClass truth, CooperativeSensing flags);

/// Correct output of a model at `level` given `input`.
Observation expected_at_level(ScenarioKind kind, const Observation& input, int level);

/// Every observation a model at `level` can emit.
std::vector<Observation> observations_at_level(ScenarioKind kind, const Observation& input,
                                               int level);

struct InferenceResult {
  int level = 1;
  Observation observed;
  bool correct = true;
  Duration elapsed{};
};

/// Runs the simulated model at config.level on `input`. With probability
/// accuracy(level) the output is expected_at_level(); otherwise a uniformly
/// chosen other observation valid at that level.
InferenceResult infer(const AnytimeProfile& profile, const ModelConfig& config,
                      const Observation& input, Rng& rng);

/// Leaf-truth form for obstacle avoidance.
InferenceResult infer(const AnytimeProfile& profile, const ModelConfig& config, ObjectClass truth,
                      Rng& rng);

/// Shipped defaults per scenario kind and pipeline stage (0 = perception).
AnytimeProfile default_profile(ScenarioKind kind, int stage);

}  // namespace tpqd
