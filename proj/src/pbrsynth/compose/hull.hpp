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
#include <span>
#include <vector>

#include "pbrsynth/common/math.hpp"

namespace pbrsynth::compose {

// Convex polyhedron with merged coplanar faces. Face vertex loops are
// counter-clockwise seen from outside.
struct ConvexHull {
  struct Face {
    std::vector<uint32_t> loop;
    Vec3 normal;    // outward, unit
    double offset;  // plane: normal . x == offset
  };
  struct Edge {
    uint32_t a, b;        // vertex indices
    uint32_t face_left;   // face holding the directed edge a -> b
    uint32_t face_right;  // face holding b -> a
  };

  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<Edge> edges;

  // Farthest vertex distance from the origin.
  double BoundingRadius() const;
  Vec3 Support(const Vec3& dir) const;
};

// Incremental hull of a point cloud. Throws Error(kDegenerate) when the
// points are (nearly) coplanar.
ConvexHull BuildConvexHull(std::span<const Vec3> points);

struct MassProperties {
  double volume = 0.0;
  double mass = 0.0;
  Vec3 center_of_mass = Vec3::Zero();
  Mat3 inertia = Mat3::Zero();  // about the center of mass, body axes
};

// Uniform-density solid (Eberly's polyhedral mass properties).
MassProperties ComputeMassProperties(const ConvexHull& hull, double density);

// Returns the hull translated by `offset`.
ConvexHull Translated(const ConvexHull& hull, const Vec3& offset);

}  // namespace pbrsynth::compose
