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

#include "tpqd/taxonomy.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "tpqd/domain.hpp"

namespace tpqd {
namespace {

using enum ObjectClass;

constexpr std::array<std::pair<ObjectClass, std::string_view>, 16> kNames{{
    {UnknownObject, "unknown_object"},
    {NonObstructiveShaped, "non_obstructive_shaped"},
    {NonObstructiveMaterial, "non_obstructive_material"},
    {ObstructiveAvoidable, "obstructive_avoidable"},
    {ObstructiveUnavoidable, "obstructive_unavoidable"},
    {ObstructiveMobile, "obstructive_mobile"},
    {ObstructiveRational, "obstructive_rational"},
    {Human, "human"},
    {Animal, "animal"},
    {Vehicle, "vehicle"},
    {Debris, "debris"},
    {HerbPlant, "herb_plant"},
    {Snow, "snow"},
    {RoadSign, "road_sign"},
    {Attenuator, "attenuator"},
    {Truck, "truck"},
}};

}  // namespace

std::string_view to_string(ObjectClass c) {
  for (const auto& [v, name] : kNames) {
    if (v == c) return name;
  }
  return "?";
}

std::optional<ObjectClass> parse_object_class(std::string_view text) {
  for (const auto& [v, name] : kNames) {
    if (name == text) return v;
  }
  return std::nullopt;
}

bool is_leaf(ObjectClass c) { return static_cast<int>(c) >= static_cast<int>(Human); }

ObjectClass category_of(ObjectClass c) {
  switch (c) {
    case Human: return ObstructiveRational;
    case Animal:
    case Vehicle:
    case Truck: return ObstructiveMobile;
    case Debris: return ObstructiveAvoidable;
    case HerbPlant:
    case Snow: return NonObstructiveMaterial;
    case RoadSign: return NonObstructiveShaped;
    case Attenuator: return ObstructiveUnavoidable;
    default: return c;
  }
}

std::optional<ObjectClass> parent(ObjectClass c) {
  if (is_leaf(c)) return category_of(c);
  switch (c) {
    case UnknownObject: return std::nullopt;
    case ObstructiveRational: return ObstructiveMobile;
    default: return UnknownObject;
  }
}

int resolving_depth(ObjectClass c) {
  // Category nodes are declared in depth order starting at the root.
  return static_cast<int>(category_of(c)) + 1;
}

bool is_ancestor_or_self(ObjectClass ancestor, ObjectClass node) {
  for (std::optional<ObjectClass> cur = node; cur; cur = parent(*cur)) {
    if (*cur == ancestor) return true;
  }
  return false;
}

ObjectClass classify_at_depth(ObjectClass node, int depth) {
  if (depth < 1 || depth > kMaxTaxonomyDepth) {
    throw DomainError("classify_at_depth: depth " + std::to_string(depth) +
                      " outside 1.." + std::to_string(kMaxTaxonomyDepth));
  }
  ObjectClass cur = category_of(node);
  while (resolving_depth(cur) > depth) cur = *parent(cur);
  return cur;
}

std::vector<ObjectClass> nodes_at_depth(int depth) {
  std::vector<ObjectClass> out;
  for (ObjectClass leaf : kLeafClasses) out.push_back(classify_at_depth(leaf, depth));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool is_obstructive(ObjectClass c) {
  const auto cat = category_of(c);
  return cat != NonObstructiveShaped && cat != NonObstructiveMaterial;
}

bool is_avoidable(ObjectClass c) { return category_of(c) == ObstructiveAvoidable; }

bool is_mobile(ObjectClass c) {
  const auto cat = category_of(c);
  return cat == ObstructiveMobile || cat == ObstructiveRational;
}

}  // namespace tpqd
