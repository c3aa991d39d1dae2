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

#include <array>
#include <string>
#include <vector>

#include "pbrsynth/common/math.hpp"
#include "pbrsynth/common/random.hpp"

namespace pbrsynth::compose {

// A planar polygonal region objects are dropped onto.
class Stage {
 public:
  // Throws Error(kDegenerate) for fewer than 3 points, zero area, or
  // non-coplanar points, and Error(kInvalidArgument) for self-intersecting
  // polygons.
  Stage(std::string name, std::vector<Vec3> polygon);

  const std::string& name() const { return name_; }
  const std::vector<Vec3>& polygon() const { return polygon_; }
  // Unit normal, oriented towards world +Z when the stage is not vertical.
  const Vec3& normal() const { return normal_; }
  double offset() const { return offset_; }  // plane: normal . x == offset
  double area() const { return area_; }

  double SignedDistance(const Vec3& p) const { return normal_.dot(p) - offset_; }
  // True if the projection of p onto the plane lies inside the polygon.
  bool ContainsProjection(const Vec3& p) const;

  // Uniform point over the polygon: pick an ear-clipped triangle in
  // proportion to its area, then sample it barycentrically.
  Vec3 SamplePoint(Rng& rng) const;

  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }

 private:
  Vec2 ToPlane(const Vec3& p) const;

  std::string name_;
  std::vector<Vec3> polygon_;
  Vec3 normal_;
  double offset_ = 0.0;
  Vec3 origin_, axis_u_, axis_v_;
  std::vector<Vec2> polygon2d_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<double> cumulative_area_;
  double area_ = 0.0;
};

}  // namespace pbrsynth::compose
