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

#include <doctest.h>

#include "tpqd/domain.hpp"
#include "tpqd/taxonomy.hpp"

using namespace tpqd;

namespace {

// Independent restatement of the tree: parent of every category node.
ObjectClass expected_parent(ObjectClass c) {
  switch (c) {
    case ObjectClass::ObstructiveRational: return ObjectClass::ObstructiveMobile;
    default: return ObjectClass::UnknownObject;
  }
}

}  // namespace

TEST_CASE("ladders match the decision table") {
  const auto oa = load_level_ladder(ScenarioKind::ObstacleAvoidance);
  REQUIRE(oa.size() == 7);
  CHECK(oa[0].sensing_label == "An object detected at safety distance");
  CHECK(oa[0].action == ActionSpec({ActionCommand::Brake, ActionCommand::Beep}));
  CHECK(oa[1].action == ActionSpec({ActionCommand::Continue}));
  CHECK(oa[6].action ==
        ActionSpec({ActionCommand::Brake, ActionCommand::Stop, ActionCommand::ContinueLater}));

  const auto ot = load_level_ladder(ScenarioKind::Overtaking);
  REQUIRE(ot.size() == 4);
  CHECK(ot[0].sensing_label == "No cooperative sensing");
  CHECK(ot[0].action == ActionSpec({ActionCommand::Continue}));

  const auto ca = load_level_ladder(ScenarioKind::CrashAvoidance);
  REQUIRE(ca.size() == 5);
  CHECK(ca[4].action == ActionSpec({ActionCommand::Agreement}));

  CHECK(load_level_ladder(ScenarioKind::IntersectionCrossing).size() == 4);
}

TEST_CASE("every ladder is contiguous from 1 and validates") {
  for (auto kind : kAllScenarioKinds) {
    const auto ladder = load_level_ladder(kind);
    CHECK(static_cast<int>(ladder.size()) == ladder_size(kind));
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      CHECK(ladder[i].index == static_cast<int>(i) + 1);
      CHECK(ladder[i].scenario == kind);
      CHECK_FALSE(ladder[i].action.empty());
    }
    CHECK_NOTHROW(validate_ladder(ladder));
  }
}

TEST_CASE("validate_ladder rejects gaps, duplicates and mixed kinds") {
  auto ladder = load_level_ladder(ScenarioKind::Overtaking);
  auto gap = ladder;
  gap[2].index = 5;
  CHECK_THROWS_AS(validate_ladder(gap), DomainError);
  auto dup = ladder;
  dup[1].index = 1;
  CHECK_THROWS_AS(validate_ladder(dup), DomainError);
  auto mixed = ladder;
  mixed[3].scenario = ScenarioKind::CrashAvoidance;
  CHECK_THROWS_AS(validate_ladder(mixed), DomainError);
  CHECK_THROWS_AS(validate_ladder({}), DomainError);
}

TEST_CASE("classify_at_depth examples") {
  CHECK(classify_at_depth(ObjectClass::Human, 1) == ObjectClass::UnknownObject);
  CHECK(classify_at_depth(ObjectClass::Animal, 6) == ObjectClass::ObstructiveMobile);
  CHECK(classify_at_depth(ObjectClass::Human, 7) == ObjectClass::ObstructiveRational);
  CHECK(classify_at_depth(ObjectClass::Human, 6) == ObjectClass::ObstructiveMobile);
  CHECK(classify_at_depth(ObjectClass::Debris, 4) == ObjectClass::ObstructiveAvoidable);
  CHECK(classify_at_depth(ObjectClass::Debris, 3) == ObjectClass::UnknownObject);
  CHECK(classify_at_depth(ObjectClass::RoadSign, 7) == ObjectClass::NonObstructiveShaped);
  CHECK_THROWS_AS(classify_at_depth(ObjectClass::Human, 0), DomainError);
  CHECK_THROWS_AS(classify_at_depth(ObjectClass::Human, 8), DomainError);
}

TEST_CASE("leaf categories") {
  CHECK(category_of(ObjectClass::Human) == ObjectClass::ObstructiveRational);
  for (auto c : {ObjectClass::Animal, ObjectClass::Vehicle, ObjectClass::Truck}) {
    CHECK(category_of(c) == ObjectClass::ObstructiveMobile);
  }
  CHECK(category_of(ObjectClass::Debris) == ObjectClass::ObstructiveAvoidable);
  CHECK(category_of(ObjectClass::HerbPlant) == ObjectClass::NonObstructiveMaterial);
  CHECK(category_of(ObjectClass::Snow) == ObjectClass::NonObstructiveMaterial);
  CHECK(category_of(ObjectClass::RoadSign) == ObjectClass::NonObstructiveShaped);
  CHECK(category_of(ObjectClass::Attenuator) == ObjectClass::ObstructiveUnavoidable);
  CHECK(is_obstructive(ObjectClass::Human));
  CHECK_FALSE(is_obstructive(ObjectClass::Snow));
  CHECK(is_avoidable(ObjectClass::Debris));
  CHECK_FALSE(is_avoidable(ObjectClass::Truck));
}

TEST_CASE("taxonomy consistency: shallower classification is an ancestor") {
  for (auto leaf : kLeafClasses) {
    CHECK(is_leaf(leaf));
    for (int d1 = 1; d1 <= kMaxTaxonomyDepth; ++d1) {
      for (int d2 = d1; d2 <= kMaxTaxonomyDepth; ++d2) {
        CHECK(is_ancestor_or_self(classify_at_depth(leaf, d1), classify_at_depth(leaf, d2)));
      }
      const auto nodes = nodes_at_depth(d1);
      CHECK(std::find(nodes.begin(), nodes.end(), classify_at_depth(leaf, d1)) != nodes.end());
    }
  }
}

TEST_CASE("category parents") {
  CHECK_FALSE(parent(ObjectClass::UnknownObject).has_value());
  for (int i = 1; i <= 6; ++i) {
    const auto c = static_cast<ObjectClass>(i);
    CHECK(parent(c) == expected_parent(c));
    CHECK(resolving_depth(c) == i + 1);
  }
}

TEST_CASE("names round-trip") {
  for (auto leaf : kLeafClasses) CHECK(parse_object_class(to_string(leaf)) == leaf);
  for (auto kind : kAllScenarioKinds) CHECK(parse_scenario_kind(to_string(kind)) == kind);
  for (auto c : {CooperativeSensing::None, CooperativeSensing::RsuShort,
                 CooperativeSensing::RsuLong, CooperativeSensing::Active}) {
    CHECK(parse_cooperative_sensing(to_string(c)) == c);
  }
  CHECK_FALSE(parse_object_class("elephant").has_value());
  const ActionSpec a({ActionCommand::Brake, ActionCommand::Stop, ActionCommand::ContinueLater});
  CHECK(ActionSpec::parse(a.str()) == a);
  CHECK(ActionSpec::parse(" brake , beep ") == ActionSpec({ActionCommand::Brake, ActionCommand::Beep}));
  CHECK_FALSE(ActionSpec::parse("").has_value());
  CHECK_FALSE(ActionSpec::parse("brake,fly").has_value());
  CHECK_THROWS_AS(ActionSpec(std::vector<ActionCommand>{}), DomainError);
}

TEST_CASE("time bounds invariants are enforced on construction") {
  const auto t0 = at_ms(1000);
  const TimeBounds ok(t0, Duration(3200), Duration(3500), Duration(300));
  CHECK(ok.tte_at() == at_ms(4200));
  CHECK(ok.tth_at() == at_ms(4500));
  CHECK_NOTHROW(TimeBounds(t0, Duration(0), Duration(0), Duration(0)));
  CHECK_THROWS_AS(TimeBounds(t0, Duration(-1), Duration(10), Duration(0)), DomainError);
  CHECK_THROWS_AS(TimeBounds(t0, Duration(11), Duration(10), Duration(0)), DomainError);
  CHECK_THROWS_AS(TimeBounds(t0, Duration(3300), Duration(3500), Duration(300)), DomainError);
}

TEST_CASE("cooperative sensing caps the reachable row") {
  CHECK(reachable_level(ScenarioKind::ObstacleAvoidance, CooperativeSensing::None) == 7);
  CHECK(reachable_level(ScenarioKind::IntersectionCrossing, CooperativeSensing::None) == 1);
  CHECK(reachable_level(ScenarioKind::IntersectionCrossing, CooperativeSensing::RsuShort) == 2);
  CHECK(reachable_level(ScenarioKind::IntersectionCrossing, CooperativeSensing::RsuLong) == 3);
  CHECK(reachable_level(ScenarioKind::CrashAvoidance, CooperativeSensing::RsuLong) == 4);
  CHECK(reachable_level(ScenarioKind::CrashAvoidance, CooperativeSensing::Active) == 5);
}
