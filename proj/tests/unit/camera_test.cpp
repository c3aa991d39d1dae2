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

#include <gtest/gtest.h>

#include "pbrsynth/common/random.hpp"
#include "pbrsynth/geom/camera.hpp"

using namespace pbrsynth;
using namespace pbrsynth::geom;

namespace {

Camera MakeCamera(const Vec3& eye, const Vec3& target) {
  Camera cam;
  cam.intrinsics = {520.0, 515.0, 319.5, 241.25, 640, 480};
  cam.world_from_camera = LookAt(eye, target);
  return cam;
}

}  // namespace

TEST(Camera, LookAtIsRotationWithoutRoll) {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const Vec3 eye(rng.Uniform(-2, 2), rng.Uniform(-2, 2), rng.Uniform(0.2, 2));
    const Vec3 target(rng.Uniform(-0.2, 0.2), rng.Uniform(-0.2, 0.2), 0.0);
    const Pose p = LookAt(eye, target);
    EXPECT_TRUE(IsRotation(p.rotation));
    // The camera x axis is horizontal when there is no roll.
    EXPECT_NEAR(p.rotation.col(0).z(), 0.0, 1e-12);
    EXPECT_GT(p.rotation.col(1).z(), 0.0);
  }
}

TEST(Camera, TargetProjectsToPrincipalPoint) {
  const Camera cam = MakeCamera({0.7, -0.4, 0.9}, {0.1, 0.05, 0.02});
  auto proj = cam.Project({0.1, 0.05, 0.02});
  ASSERT_TRUE(proj);
  EXPECT_NEAR(proj->pixel.x(), cam.intrinsics.cx, 1e-9);
  EXPECT_NEAR(proj->pixel.y(), cam.intrinsics.cy, 1e-9);
}

TEST(Camera, ProjectUnprojectRoundTrip) {
  Rng rng(11);
  const Camera cam = MakeCamera({1.0, 1.0, 1.0}, {0, 0, 0});
  int tested = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p(rng.Uniform(-1, 1), rng.Uniform(-1, 1), rng.Uniform(-1, 1));
    auto proj = cam.Project(p);
    if (!proj) continue;
    ++tested;
    EXPECT_NEAR((cam.Unproject(proj->pixel, proj->depth) - p).norm(), 0.0, 1e-6);
  }
  EXPECT_GT(tested, 500);
}

TEST(Camera, BehindCameraDoesNotProject) {
  const Camera cam = MakeCamera({0, 0, 1}, {0, 0, 0});
  EXPECT_FALSE(cam.Project({0, 0, 2}));
}

TEST(Camera, RayThroughPixelHitsUnprojectedPoint) {
  const Camera cam = MakeCamera({0.3, -1.0, 0.5}, {0, 0, 0});
  const Vec2 px(100.5, 400.5);
  const Vec3 p = cam.Unproject(px, 2.0);
  const Ray r = cam.GenerateRay(px.x(), px.y());
  const Vec3 to = (p - r.origin).normalized();
  EXPECT_NEAR((to - r.direction).norm(), 0.0, 1e-12);
}

TEST(Camera, IntrinsicsValidation) {
  Intrinsics k{500, 500, 320, 240, 640, 480};
  EXPECT_NO_THROW(k.Validate());
  k.cx = 640;
  EXPECT_ANY_THROW(k.Validate());
  k = {0, 500, 320, 240, 640, 480};
  EXPECT_ANY_THROW(k.Validate());
}
