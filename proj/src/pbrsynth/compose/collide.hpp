// Copyright 2026 The pbrsynth Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "pbrsynth/compose/hull.hpp"
#include "pbrsynth/compose/stage.hpp"

namespace pbrsynth::compose {

// Hull vertices and face planes transformed into world space once per step.
struct WorldHull {
  const ConvexHull* hull = nullptr;
  Vec3 center = Vec3::Zero();
  std::vector<Vec3> vertices;
  std::vector<Vec3> normals;
  std::vector<double> offsets;
  Bounds3 bounds;

  WorldHull() = default;
  WorldHull(const ConvexHull& h, const Pose& world_from_body);
  Vec3 Support(const Vec3& dir) const;
};

struct ContactPoint {
  Vec3 position;      // world, on the surface of body B
  double separation;  // along the normal; negative when penetrating
};

struct Manifold {
  Vec3 normal;  // world, pointing from A to B
  std::vector<ContactPoint> points;  // at most 4
};

// Contacts between a hull (body B) and the stage polygon (A): hull vertices
// over the polygon, hull edges crossing its boundary and polygon corners
// under the hull, when closer than `margin`. Only points within a small band
// above the deepest one are kept, deepest first.
std::optional<Manifold> CollideStage(const WorldHull& body, const Stage& stage, double margin);

// Separating-axis test over both hulls' face normals and the edge pairs
// that form Minkowski-difference faces, followed by reference-face clipping
// (face axis) or closest points between edges (edge axis). Returns nullopt
// when the hulls are separated by more than `margin`.
std::optional<Manifold> CollideHulls(const WorldHull& a, const WorldHull& b, double margin);

// Largest separation over all separating-axis candidates; negative values
// are the penetration depth.
double HullSeparation(const WorldHull& a, const WorldHull& b);

// Keeps at most 4 points spanning the largest area, starting from the
// deepest one. Points more than `band` above the deepest are dropped first.
std::vector<ContactPoint> ReduceManifold(const std::vector<ContactPoint>& points, const Vec3& normal,
                                         double band = std::numeric_limits<double>::infinity());

}  // namespace pbrsynth::compose
