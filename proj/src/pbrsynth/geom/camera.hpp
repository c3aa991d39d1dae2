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

#include <optional>

#include "pbrsynth/common/math.hpp"

namespace pbrsynth::geom {

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();  // unit length
};

struct Intrinsics {
  double fx = 500.0;
  double fy = 500.0;
  double cx = 320.0;
  double cy = 240.0;
  int width = 640;
  int height = 480;

  // Throws Error(kInvalidArgument) unless fx, fy > 0 and the principal point
  // lies inside the image.
  void Validate() const;
};

// Pinhole camera. The camera looks down its -Z axis with +Y up; pixel rows
// grow downward, so v = cy - fy * y / -z.
struct Camera {
  Intrinsics intrinsics;
  Pose world_from_camera;

  int width() const { return intrinsics.width; }
  int height() const { return intrinsics.height; }

  // Pixel coordinates and camera-frame depth (distance along the optical
  // axis) of a world point; nullopt when the point is not in front.
  struct Projection {
    Vec2 pixel;
    double depth;
  };
  std::optional<Projection> Project(const Vec3& world) const;

  // Inverse of Project for a given depth.
  Vec3 Unproject(const Vec2& pixel, double depth) const;

  // World-space ray through continuous pixel position (u, v). The pixel
  // center of integer pixel (x, y) is (x + 0.5, y + 0.5).
  Ray GenerateRay(double u, double v) const;

  Vec3 position() const { return world_from_camera.translation; }
};

// Camera pose at `eye` looking at `target`. The camera up vector is the
// projection of `up` orthogonal to the view direction, so there is no roll.
// Falls back to world +Y when the view is parallel to `up`.
Pose LookAt(const Vec3& eye, const Vec3& target, const Vec3& up = WorldUp());

}  // namespace pbrsynth::geom
