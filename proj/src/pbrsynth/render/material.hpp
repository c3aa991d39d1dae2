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

#include <string>

#include "pbrsynth/common/math.hpp"

namespace pbrsynth::render {

// Per-mesh parametric material. Specular 0 and metallic 0 is Lambertian.
struct Material {
  Vec3 base_color = Vec3::Constant(0.8);
  double specular = 0.5;
  double metallic = 0.0;
  double roughness = 0.5;

  // Throws Error(kInvalidArgument) when a parameter is out of range.
  void Validate() const;

  static Material Lambertian(const Vec3& albedo) { return {albedo, 0.0, 0.0, 1.0}; }
};

}  // namespace pbrsynth::render
