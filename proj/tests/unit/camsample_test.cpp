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

#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include "pbrsynth/camsample/camsample.hpp"
#include "pbrsynth/common/error.hpp"
#include "pbrsynth/geom/mesh.hpp"

namespace pbrsynth::camsample {
namespace {

using geom::SceneAccel;
using geom::SceneInstance;

Pose At(const Vec3& t) {
  Pose p;
  p.translation = t;
  return p;
}

geom::Intrinsics SmallIntrinsics() {
  geom::Intrinsics k;
  k.fx = k.fy = 100.0;
  k.cx = 40.0;
  k.cy = 30.0;
  k.width = 80;
  k.height = 60;
  return k;
}

std::shared_ptr<const geom::Mesh> Box(double s) {
  return std::make_shared<geom::Mesh>(geom::MakeBox(Vec3::Constant(s)));
}

// Camera at the origin looking down -Z.
geom::Camera ForwardCamera() {
  geom::Camera cam;
  cam.intrinsics = SmallIntrinsics();
  return cam;
}

TEST(SampleCamera, FixedDistanceAndCentered) {
  SceneAccel accel({{Box(0.1), At(Vec3(0.2, -0.1, 0.05)), 0}, {Box(0.1), At(Vec3(-0.3, 0.2, 0.05)), 1}});
  const std::vector<uint32_t> ids = {0, 1};
  auto targets = FocusTargets(accel, ids);
  CameraSampleParams params;
  params.intrinsics = SmallIntrinsics();
  params.distance_min = params.distance_max = 0.5;
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    CameraSample s = SampleCamera(targets, params, rng);
    const Vec3 center = targets[s.focused_instance].center;
    EXPECT_NEAR((s.camera.position() - center).norm(), 0.5, 1e-12);
    auto proj = s.camera.Project(center);
    ASSERT_TRUE(proj.has_value());
    EXPECT_NEAR(proj->pixel.x(), params.intrinsics.cx, 1e-6);
    EXPECT_NEAR(proj->pixel.y(), params.intrinsics.cy, 1e-6);
    // No roll: the camera x axis stays horizontal.
    EXPECT_NEAR(s.camera.world_from_camera.rotation.col(0).z(), 0.0, 1e-12);
    EXPECT_GT(s.camera.world_from_camera.rotation.col(1).z(), 0.0);
  }
}

double ChiSquare(const std::vector<int>& bins) {
  double total = 0.0;
  for (int b : bins) total += b;
  const double expected = total / bins.size();
  double chi2 = 0.0;
  for (int b : bins) chi2 += (b - expected) * (b - expected) / expected;
  return chi2;
}

TEST(SampleCamera, MarginalsAreUniform) {
  std::vector<FocusTarget> targets = {{0, Vec3::Zero()}, {1, Vec3(1, 0, 0)}};
  CameraSampleParams params;
  params.intrinsics = SmallIntrinsics();
  params.elevation_min = kPi / 12;
  params.elevation_max = kPi / 3;
  Rng rng(5);
  std::vector<int> az(10, 0), el(10, 0), dist(10, 0), focus(2, 0);
  for (int i = 0; i < 1000; ++i) {
    CameraSample s = SampleCamera(targets, params, rng);
    // Recover the angles from the geometry rather than the stored fields.
    const Vec3 d = (s.camera.position() - targets[s.focused_instance].center).normalized();
    double a = std::atan2(d.y(), d.x());
    if (a < 0) a += 2 * kPi;
    const double e = std::asin(d.z());
    ASSERT_GE(e, params.elevation_min - 1e-9);
    ASSERT_LE(e, params.elevation_max + 1e-9);
    az[std::min(9, static_cast<int>(a / (2 * kPi) * 10))]++;
    el[std::min(9, static_cast<int>((e - params.elevation_min) / (params.elevation_max - params.elevation_min) * 10))]++;
    dist[std::min(9, static_cast<int>((s.distance - 0.5) / 0.5 * 10))]++;
    focus[s.focused_instance]++;
  }
  // Chi-square, 9 degrees of freedom, p = 0.001.
  EXPECT_LT(ChiSquare(az), 27.88);
  EXPECT_LT(ChiSquare(el), 27.88);
  EXPECT_LT(ChiSquare(dist), 27.88);
  EXPECT_LT(ChiSquare(focus), 10.83);
}

TEST(SampleCamera, EmptyArrangementThrows) {
  CameraSampleParams params;
  Rng rng(1);
  EXPECT_THROW(SampleCamera({}, params, rng), Error);
}

TEST(SampleCamera, Deterministic) {
  std::vector<FocusTarget> targets = {{0, Vec3::Zero()}, {3, Vec3(1, 0, 0)}};
  CameraSampleParams params;
  params.intrinsics = SmallIntrinsics();
  Rng a(9), b(9);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(ToJson(SampleCamera(targets, params, a)).dump(), ToJson(SampleCamera(targets, params, b)).dump());
  }
}

TEST(Visibility, AloneIsFullyVisible) {
  SceneAccel accel({{Box(0.2), At(Vec3(0, 0, -2)), 4}});
  EXPECT_DOUBLE_EQ(VisibilityFraction(accel, ForwardCamera(), 4), 1.0);
}

TEST(Visibility, WallHidesObject) {
  auto wall = std::make_shared<geom::Mesh>(geom::MakeQuad(10.0, 10.0));
  SceneAccel accel({{Box(0.2), At(Vec3(0, 0, -2)), 4}, {wall, At(Vec3(0, 0, -1)), 7}});
  EXPECT_DOUBLE_EQ(VisibilityFraction(accel, ForwardCamera(), 4), 0.0);
}

TEST(Visibility, OutOfFrameIsZero) {
  SceneAccel accel({{Box(0.2), At(Vec3(0, 0, 2)), 4}});
  EXPECT_DOUBLE_EQ(VisibilityFraction(accel, ForwardCamera(), 4), 0.0);
}

TEST(Visibility, HalfCoveredSquare) {
  // Screen-aligned unit square at depth 4 and a half-width occluder at 2.
  auto square = std::make_shared<geom::Mesh>(geom::MakeQuad(1.0, 1.0));
  auto half = std::make_shared<geom::Mesh>(geom::MakeQuad(0.25, 0.5));
  SceneAccel accel({{square, At(Vec3(0, 0, -4)), 1}, {half, At(Vec3(0.125, 0, -2)), 2}});
  geom::Camera cam = ForwardCamera();
  const geom::IdDepthBuffer alone = geom::RasterizeIds(accel, cam, std::vector<uint32_t>{1});
  std::size_t full = 0;
  for (uint32_t id : alone.ids) full += id == 1;
  ASSERT_GT(full, 100u);
  EXPECT_NEAR(VisibilityFraction(accel, cam, 1), 0.5, 2.0 / std::sqrt(static_cast<double>(full)));
}

TEST(Visibility, OccludersNeverIncreaseFraction) {
  Rng rng(23);
  for (int scene = 0; scene < 20; ++scene) {
    std::vector<SceneInstance> instances = {{Box(0.4), At(Vec3(rng.Uniform(-0.3, 0.3), rng.Uniform(-0.3, 0.3), -3)), 0}};
    geom::Camera cam = ForwardCamera();
    double last = VisibilityFraction(SceneAccel(instances), cam, 0);
    for (uint32_t k = 1; k <= 4; ++k) {
      instances.push_back({Box(rng.Uniform(0.05, 0.3)),
                           At(Vec3(rng.Uniform(-0.4, 0.4), rng.Uniform(-0.3, 0.3), rng.Uniform(-2.5, -1.0))), k});
      const double f = VisibilityFraction(SceneAccel(instances), cam, 0);
      EXPECT_LE(f, last + 1e-15);
      last = f;
    }
  }
}

TEST(Accept, InclusiveThreshold) {
  CameraSampleParams params;
  EXPECT_TRUE(AcceptCamera(0.30, params));
  EXPECT_FALSE(AcceptCamera(0.299, params));
  EXPECT_TRUE(AcceptCamera(1.0, params));
  EXPECT_FALSE(AcceptCamera(0.0, params));
}

TEST(Accept, RetryLoopReturnsAcceptedSample) {
  auto floor = std::make_shared<geom::Mesh>(geom::MakeQuad(4.0, 4.0));
  SceneAccel accel({{Box(0.1), At(Vec3(0, 0, 0.05)), 0}, {Box(0.1), At(Vec3(0.12, 0, 0.05)), 1}, {floor, Pose{}, 1000000}});
  const std::vector<uint32_t> ids = {0, 1};
  auto targets = FocusTargets(accel, ids);
  CameraSampleParams params;
  params.intrinsics = SmallIntrinsics();
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    auto s = SampleAcceptedCamera(accel, targets, params, rng);
    ASSERT_TRUE(s.has_value());
    EXPECT_TRUE(s->accepted);
    EXPECT_GE(s->visibility_fraction, 0.3);
    EXPECT_DOUBLE_EQ(s->visibility_fraction, VisibilityFraction(accel, s->camera, s->focused_instance));
  }
  // An unreachable threshold exhausts the retries.
  params.min_visible_fraction = 1.0;
  params.max_retries = 3;
  SceneAccel buried({{Box(0.1), At(Vec3(0, 0, 0.05)), 0}, {Box(0.5), At(Vec3(0, 0, 0.05)), 1}});
  const std::vector<uint32_t> inner = {0};
  EXPECT_FALSE(SampleAcceptedCamera(buried, FocusTargets(buried, inner), params, rng).has_value());
}

TEST(Params, Validate) {
  CameraSampleParams p;
  EXPECT_NO_THROW(p.Validate());
  p.min_visible_fraction = 1.5;
  EXPECT_THROW(p.Validate(), Error);
  p = CameraSampleParams{};
  p.distance_min = 2.0;
  EXPECT_THROW(p.Validate(), Error);
}

TEST(Json, RoundTrip) {
  std::vector<FocusTarget> targets = {{5, Vec3(0.1, 0.2, 0.3)}};
  CameraSampleParams params;
  params.intrinsics = SmallIntrinsics();
  Rng rng(2);
  CameraSample s = SampleCamera(targets, params, rng);
  s.visibility_fraction = 0.75;
  s.accepted = true;
  const std::string text = ToJson(s).dump();
  EXPECT_EQ(ToJson(CameraSampleFromJson(nlohmann::json::parse(text))).dump(), text);
}

}  // namespace
}  // namespace pbrsynth::camsample
