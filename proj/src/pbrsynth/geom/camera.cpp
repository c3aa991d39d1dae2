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

#include "pbrsynth/geom/camera.hpp"

#include "pbrsynth/common/error.hpp"

namespace pbrsynth::geom {

void Intrinsics::Validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) Fail(ErrorCode::kInvalidArgument, "focal lengths must be positive");
  if (width <= 0 || height <= 0) Fail(ErrorCode::kInvalidArgument, "resolution must be positive");
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    Fail(ErrorCode::kInvalidArgument, "principal point outside the image");
  }
}

std::optional<Camera::Projection> Camera::Project(const Vec3& world) const {
  const Vec3 p = world_from_camera.Inverse().Apply(world);
  const double depth = -p.z();
  if (!(depth > 0.0)) return std::nullopt;
  const Intrinsics& k = intrinsics;
  return Projection{Vec2(k.cx + k.fx * p.x() / depth, k.cy - k.fy * p.y() / depth), depth};
}

Vec3 Camera::Unproject(const Vec2& pixel, double depth) const {
  const Intrinsics& k = intrinsics;
  const Vec3 p((pixel.x() - k.cx) / k.fx * depth, -(pixel.y() - k.cy) / k.fy * depth, -depth);
  return world_from_camera.Apply(p);
}

Ray Camera::GenerateRay(double u, double v) const {
  const Intrinsics& k = intrinsics;
  const Vec3 d((u - k.cx) / k.fx, -(v - k.cy) / k.fy, -1.0);
  return Ray{world_from_camera.translation, (world_from_camera.rotation * d).normalized()};
}

Pose LookAt(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 forward = (target - eye).normalized();
  Vec3 cam_up = up - up.dot(forward) * forward;
  if (cam_up.norm() < 1e-9) {
    const Vec3 alt = Vec3::UnitY();
    cam_up = alt - alt.dot(forward) * forward;
  }
  cam_up.normalize();
  const Vec3 right = forward.cross(cam_up);
  Pose pose;
  // Columns are the camera axes in world coordinates: x right, y up, z back.
  pose.rotation.col(0) = right;
  pose.rotation.col(1) = cam_up;
  pose.rotation.col(2) = -forward;
  pose.translation = eye;
  return pose;
}

}  // namespace pbrsynth::geom
