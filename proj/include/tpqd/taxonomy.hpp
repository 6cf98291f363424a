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
#include <span>
#include <string_view>
#include <vector>

namespace tpqd {

/// Obstacle taxonomy. The first seven values are category nodes, ordered by
/// the ladder depth that can first name them; the rest are ground-truth
/// leaves.
///
///   UnknownObject
///   +-- NonObstructiveShaped      (depth 2)
///   +-- NonObstructiveMaterial    (depth 3)
///   +-- ObstructiveAvoidable      (depth 4)
///   +-- ObstructiveUnavoidable    (depth 5)
///   +-- ObstructiveMobile         (depth 6)
///       +-- ObstructiveRational   (depth 7)
enum class ObjectClass : std::uint8_t {
  UnknownObject,
  NonObstructiveShaped,
  NonObstructiveMaterial,
  ObstructiveAvoidable,
  ObstructiveUnavoidable,
  ObstructiveMobile,
  ObstructiveRational,
  // leaves
  Human,
  Animal,
  Vehicle,
  Debris,
  HerbPlant,
  Snow,
  RoadSign,
  Attenuator,
  Truck,
};

inline constexpr int kMaxTaxonomyDepth = 7;

inline constexpr ObjectClass kLeafClasses[] = {
    ObjectClass::Human,     ObjectClass::Animal,     ObjectClass::Vehicle,
    ObjectClass::Debris,    ObjectClass::HerbPlant,  ObjectClass::Snow,
    ObjectClass::RoadSign,  ObjectClass::Attenuator, ObjectClass::Truck};

std::string_view to_string(ObjectClass c);
std::optional<ObjectClass> parse_object_class(std::string_view text);

bool is_leaf(ObjectClass c);

/// Parent in the tree; nullopt for the root.
std::optional<ObjectClass> parent(ObjectClass c);

/// Category node a leaf belongs to; identity for category nodes.
ObjectClass category_of(ObjectClass c);

/// Depth at which a category node becomes distinguishable. Leaves report the
/// depth of their category.
int resolving_depth(ObjectClass c);

bool is_ancestor_or_self(ObjectClass ancestor, ObjectClass node);

/// Deepest ancestor-or-self of `node` nameable at `depth`. Accepts leaves and
/// category nodes. Throws DomainError unless 1 <= depth <= kMaxTaxonomyDepth.
ObjectClass classify_at_depth(ObjectClass node, int depth);

/// Every node that classify_at_depth(leaf, depth) can return, in enum order.
std::vector<ObjectClass> nodes_at_depth(int depth);

bool is_obstructive(ObjectClass c);
bool is_avoidable(ObjectClass c);
bool is_mobile(ObjectClass c);

}  // namespace tpqd
