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

#include <variant>
#include <vector>

#include "pbrsynth/common/math.hpp"

namespace pbrsynth::render {

// Isotropic point light; intensity in W/sr per channel.
struct PointLight {
  Vec3 position = Vec3::Zero();
  Vec3 intensity = Vec3::Ones();
};

// One-sided rectangle corner + s*edge_u + t*edge_v, s, t in [0, 1], emitting
// uniform radiance on the side of edge_u x edge_v.
struct AreaLight {
  Vec3 corner = Vec3::Zero();
  Vec3 edge_u = Vec3::UnitX();
  Vec3 edge_v = Vec3::UnitY();
  Vec3 radiance = Vec3::Ones();

  Vec3 Normal() const { return edge_u.cross(edge_v).normalized(); }
  double Area() const { return edge_u.cross(edge_v).norm(); }
};

// Directional sun plus a constant-radiance sky over the whole sphere. The
// sun is a delta light; `sun_irradiance` is the irradiance it delivers to a
// surface facing it.
struct SunSkyLight {
  Vec3 sun_direction = Vec3::UnitZ();  // unit, pointing towards the sun
  Vec3 sun_irradiance = Vec3::Zero();
  Vec3 sky_radiance = Vec3::Zero();
};

using Light = std::variant<PointLight, AreaLight, SunSkyLight>;

// Throws Error(kInvalidArgument) for negative or non-finite emission, a
// degenerate rectangle or a zero sun direction.
void ValidateLight(const Light& light);

}  // namespace pbrsynth::render
