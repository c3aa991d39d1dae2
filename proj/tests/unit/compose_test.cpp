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

#include "pbrsynth/common/error.hpp"
#include "pbrsynth/common/random.hpp"
#include "pbrsynth/compose/arrangement.hpp"
#include "pbrsynth/compose/collide.hpp"
#include "pbrsynth/compose/hull.hpp"
#include "pbrsynth/compose/physics.hpp"
#include "pbrsynth/compose/stage.hpp"
#include "pbrsynth/geom/mesh.hpp"

namespace pbrsynth::compose {
namespace {

Stage UnitSquare() {
  return Stage("square", {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)});
}

Stage BigFloor() {
  return Stage("floor", {Vec3(-2, -2, 0), Vec3(2, -2, 0), Vec3(2, 2, 0), Vec3(-2, 2, 0)});
}

RigidBody MakeBody(const geom::Mesh& mesh, uint32_t id, const Pose& pose, double density = 500.0) {
  RigidBody b;
  b.instance_id = id;
  b.shape = BodyShape::FromPoints(mesh.vertices, density);
  b.SetModelPose(pose);
  return b;
}

Pose At(const Vec3& t, const Mat3& r = Mat3::Identity()) {
  Pose p;
  p.rotation = r;
  p.translation = t;
  return p;
}

TEST(Stage, SquareSampleMeanNearCenter) {
  Stage stage = UnitSquare();
  Rng rng(7);
  Vec3 sum = Vec3::Zero();
  const int n = 10000;
  for (int i = 0; i < n; ++i) sum += stage.SamplePoint(rng);
  const Vec3 mean = sum / n;
  EXPECT_NEAR(mean.x(), 0.5, 0.02);
  EXPECT_NEAR(mean.y(), 0.5, 0.02);
  EXPECT_DOUBLE_EQ(mean.z(), 0.0);
}

TEST(Stage, TriangleSamplesInside) {
  Stage stage("tri", {Vec3(0, 0, 0.2), Vec3(1, 0, 0.2), Vec3(0, 1, 0.2)});
  Rng rng(3);
  for (int i = 0; i < 5000; ++i) {
    const Vec3 p = stage.SamplePoint(rng);
    EXPECT_GE(p.x(), -1e-12);
    EXPECT_GE(p.y(), -1e-12);
    EXPECT_LE(p.x() + p.y(), 1.0 + 1e-12);
    EXPECT_NEAR(p.z(), 0.2, 1e-12);
  }
}

TEST(Stage, ConcavePolygonSamplesInside) {
  // L shape: the notch at [1,2]x[1,2] must stay empty.
  Stage stage("L", {Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(2, 1, 0), Vec3(1, 1, 0), Vec3(1, 2, 0), Vec3(0, 2, 0)});
  EXPECT_NEAR(stage.area(), 3.0, 1e-12);
  Rng rng(11);
  for (int i = 0; i < 5000; ++i) {
    const Vec3 p = stage.SamplePoint(rng);
    EXPECT_FALSE(p.x() > 1.0 + 1e-12 && p.y() > 1.0 + 1e-12);
    EXPECT_TRUE(stage.ContainsProjection(p));
  }
}

TEST(Stage, RejectsDegenerateInputs) {
  EXPECT_THROW(Stage("line", {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)}), Error);
  EXPECT_THROW(Stage("two", {Vec3(0, 0, 0), Vec3(1, 0, 0)}), Error);
  EXPECT_THROW(Stage("warped", {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0.01), Vec3(0, 1, 0)}), Error);
  try {
    Stage("bowtie", {Vec3(0, 0, 0), Vec3(3, 0, 0), Vec3(3, 2, 0), Vec3(1, -1, 0)});
    FAIL() << "self-intersecting polygon accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(Stage, NormalFacesUp) {
  Stage cw("cw", {Vec3(0, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0), Vec3(1, 0, 0)});
  EXPECT_NEAR(cw.normal().z(), 1.0, 1e-12);
}

TEST(Hull, CubeHasSixFaces) {
  const geom::Mesh box = geom::MakeBox(Vec3(0.1, 0.2, 0.3));
  const ConvexHull hull = BuildConvexHull(box.vertices);
  EXPECT_EQ(hull.vertices.size(), 8u);
  EXPECT_EQ(hull.faces.size(), 6u);
  EXPECT_EQ(hull.edges.size(), 12u);
  const MassProperties mp = ComputeMassProperties(hull, 500.0);
  EXPECT_NEAR(mp.volume, 0.006, 1e-12);
  EXPECT_NEAR(mp.mass, 3.0, 1e-9);
  EXPECT_NEAR(mp.center_of_mass.norm(), 0.0, 1e-12);
  // Solid box: I_xx = m (b^2 + c^2) / 12.
  EXPECT_NEAR(mp.inertia(0, 0), 3.0 * (0.04 + 0.09) / 12.0, 1e-9);
  EXPECT_NEAR(mp.inertia(1, 1), 3.0 * (0.01 + 0.09) / 12.0, 1e-9);
  EXPECT_NEAR(mp.inertia(2, 2), 3.0 * (0.01 + 0.04) / 12.0, 1e-9);
  EXPECT_NEAR(mp.inertia(0, 1), 0.0, 1e-12);
}

TEST(Hull, InteriorPointsDiscarded) {
  std::vector<Vec3> pts = geom::MakeBox(Vec3(1, 1, 1)).vertices;
  Rng rng(5);
  for (int i = 0; i < 200; ++i) pts.push_back(Vec3(rng.Uniform(-0.4, 0.4), rng.Uniform(-0.4, 0.4), rng.Uniform(-0.4, 0.4)));
  const ConvexHull hull = BuildConvexHull(pts);
  EXPECT_EQ(hull.vertices.size(), 8u);
  EXPECT_EQ(hull.faces.size(), 6u);
}

TEST(Hull, SphereVolumeApproachesAnalytic) {
  const geom::Mesh sphere = geom::MakeIcosphere(1.0, 3);
  const MassProperties mp = ComputeMassProperties(BuildConvexHull(sphere.vertices), 1.0);
  EXPECT_NEAR(mp.volume, 4.0 / 3.0 * kPi, 0.03 * 4.0 / 3.0 * kPi);
  EXPECT_NEAR(mp.inertia(0, 0), mp.inertia(1, 1), 1e-3);
}

TEST(Hull, FlatInputThrows) {
  std::vector<Vec3> flat = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0)};
  EXPECT_THROW(BuildConvexHull(flat), Error);
}

TEST(Collide, SeparatedAndOverlappingBoxes) {
  const ConvexHull hull = BuildConvexHull(geom::MakeBox(Vec3(1, 1, 1)).vertices);
  WorldHull a(hull, At(Vec3(0, 0, 0)));
  WorldHull b(hull, At(Vec3(1.5, 0, 0)));
  EXPECT_NEAR(HullSeparation(a, b), 0.5, 1e-12);
  EXPECT_FALSE(CollideHulls(a, b, 0.01).has_value());
  WorldHull c(hull, At(Vec3(0.9, 0.2, 0)));
  auto m = CollideHulls(a, c, 0.01);
  ASSERT_TRUE(m.has_value());
  EXPECT_NEAR(m->normal.x(), 1.0, 1e-9);
  EXPECT_EQ(m->points.size(), 4u);
  for (const auto& p : m->points) EXPECT_NEAR(p.separation, -0.1, 1e-9);
}

TEST(Collide, EdgeEdgeContact) {
  const ConvexHull hull = BuildConvexHull(geom::MakeBox(Vec3(1, 1, 1)).vertices);
  const Mat3 ra = Eigen::AngleAxisd(kPi / 4, Vec3::UnitZ()).toRotationMatrix();
  const Mat3 rb = Eigen::AngleAxisd(kPi / 4, Vec3::UnitX()).toRotationMatrix();
  // Edge of a along y at x = sqrt(2)/2, edge of b along x at z = -sqrt(2)/2.
  const double h = std::sqrt(0.5);
  WorldHull a(hull, At(Vec3(0, 0, 0), ra * Eigen::AngleAxisd(kPi / 4, Vec3::UnitY()).toRotationMatrix()));
  WorldHull b(hull, At(Vec3(0, 0, 2 * h - 0.01), rb));
  (void)a;
  (void)b;
  const double sep = HullSeparation(a, b);
  EXPECT_LT(sep, 0.0);
  auto m = CollideHulls(a, b, 0.01);
  ASSERT_TRUE(m.has_value());
  EXPECT_FALSE(m->points.empty());
}

TEST(Collide, ReduceKeepsFourPoints) {
  std::vector<ContactPoint> pts;
  for (int i = 0; i < 16; ++i) {
    const double a = 2 * kPi * i / 16;
    pts.push_back({Vec3(std::cos(a), std::sin(a), 0), -0.01 - 0.001 * (i == 5)});
  }
  auto reduced = ReduceManifold(pts, Vec3::UnitZ());
  ASSERT_EQ(reduced.size(), 4u);
  EXPECT_NEAR(reduced[0].separation, -0.011, 1e-15);
}

TEST(Physics, SphereRestsAtRadius) {
  const double r = 0.05;
  Stage stage = BigFloor();
  SimParams params;
  params.restitution = 0.0;
  std::vector<RigidBody> bodies = {MakeBody(geom::MakeIcosphere(r, 3), 0, At(Vec3(0, 0, 0.3)))};
  SimResult res = SimulateToRest(bodies, stage, params);
  ASSERT_TRUE(res.settled);
  ASSERT_EQ(res.bodies.size(), 1u);
  EXPECT_NEAR(res.bodies[0].ModelPose().translation.z(), r, 1e-3);
}

TEST(Physics, TiltedCubeSettlesFlat) {
  const double half = 0.05;
  Stage stage = BigFloor();
  SimParams params;
  const Mat3 tilt = Eigen::AngleAxisd(5.0 * kPi / 180.0, Vec3(1, 1, 0).normalized()).toRotationMatrix();
  std::vector<RigidBody> bodies = {MakeBody(geom::MakeBox(Vec3::Constant(2 * half)), 0, At(Vec3(0, 0, 0.3), tilt))};
  SimResult res = SimulateToRest(bodies, stage, params);
  ASSERT_TRUE(res.settled);
  ASSERT_EQ(res.bodies.size(), 1u);
  EXPECT_LT(res.time, 2.0);
  const Pose pose = res.bodies[0].ModelPose();
  EXPECT_NEAR(pose.translation.z(), half, 1e-3);
  double best = 0.0;
  for (int axis = 0; axis < 3; ++axis) best = std::max(best, std::abs(pose.rotation.col(axis).z()));
  EXPECT_GT(best, std::cos(1.0 * kPi / 180.0));
  EXPECT_TRUE(IsRotation(pose.rotation, 1e-9));
}

TEST(Physics, RestingCubeReportsSettledQuickly) {
  Stage stage = BigFloor();
  std::vector<RigidBody> bodies = {MakeBody(geom::MakeBox(Vec3::Constant(0.1)), 0, At(Vec3(0, 0, 0.05)))};
  SimResult res = SimulateToRest(bodies, stage, SimParams{});
  ASSERT_TRUE(res.settled);
  EXPECT_LT(res.time, 0.5);
  EXPECT_NEAR(res.bodies[0].ModelPose().translation.z(), 0.05, 1e-3);
}

TEST(Physics, OverhangingBoxRestsOnTheRim) {
  // Center of mass over the stage, a third of the box beyond the edge.
  Stage stage = UnitSquare();
  std::vector<RigidBody> bodies = {MakeBody(geom::MakeBox(Vec3(0.3, 0.1, 0.1)), 0, At(Vec3(0.9, 0.5, 0.1)))};
  SimResult res = SimulateToRest(bodies, stage, SimParams{});
  ASSERT_TRUE(res.settled);
  ASSERT_EQ(res.bodies.size(), 1u);
  const Pose pose = res.bodies[0].ModelPose();
  EXPECT_NEAR(pose.translation.z(), 0.05, 1e-3);
  EXPECT_GT(pose.rotation(2, 2), std::cos(1.0 * kPi / 180.0));
}

TEST(Physics, BoxBeyondTheRimTipsOff) {
  Stage stage = UnitSquare();
  std::vector<RigidBody> bodies = {MakeBody(geom::MakeBox(Vec3(0.3, 0.1, 0.1)), 0, At(Vec3(1.1, 0.5, 0.06)))};
  SimResult res = SimulateToRest(bodies, stage, SimParams{});
  EXPECT_EQ(res.removed.size(), 1u);
}

TEST(Physics, StackedSpheresDoNotInterpenetrate) {
  const double r1 = 0.05, r2 = 0.04;
  Stage stage = BigFloor();
  SimParams params;
  std::vector<RigidBody> bodies = {MakeBody(geom::MakeIcosphere(r1, 2), 0, At(Vec3(0, 0, 0.2))),
                                   MakeBody(geom::MakeIcosphere(r2, 2), 1, At(Vec3(0, 0, 0.4)))};
  SimResult res = SimulateToRest(bodies, stage, params);
  ASSERT_EQ(res.bodies.size(), 2u);
  const double dist = (res.bodies[0].ModelPose().translation - res.bodies[1].ModelPose().translation).norm();
  EXPECT_GE(dist, r1 + r2 - 1e-3);
}

TEST(Physics, BodyOffTheEdgeIsRemoved) {
  Stage stage = UnitSquare();
  std::vector<RigidBody> bodies = {MakeBody(geom::MakeBox(Vec3::Constant(0.1)), 0, At(Vec3(0.5, 0.5, 0.2))),
                                   MakeBody(geom::MakeBox(Vec3::Constant(0.1)), 1, At(Vec3(3.0, 3.0, 0.2)))};
  SimResult res = SimulateToRest(bodies, stage, SimParams{});
  ASSERT_EQ(res.removed.size(), 1u);
  EXPECT_EQ(res.removed[0], 1u);
  ASSERT_EQ(res.bodies.size(), 1u);
  EXPECT_EQ(res.bodies[0].instance_id, 0u);
}

TEST(Physics, ParamsValidate) {
  SimParams p;
  p.timestep = 0.0;
  EXPECT_THROW(p.Validate(), Error);
  p = SimParams{};
  p.restitution = 1.5;
  EXPECT_THROW(p.Validate(), Error);
}

ModelLibrary TestModels() {
  ModelLibrary models;
  models[0] = ObjectModel::Create(0, "box", std::make_shared<geom::Mesh>(geom::MakeBox(Vec3(0.06, 0.04, 0.08))), Mat3::Identity(), 500);
  models[1] = ObjectModel::Create(1, "can", std::make_shared<geom::Mesh>(geom::MakeCylinder(0.03, 0.08, 12)),
                                  Eigen::AngleAxisd(kPi / 2, Vec3::UnitX()).toRotationMatrix(), 500);
  models[2] = ObjectModel::Create(2, "ball", std::make_shared<geom::Mesh>(geom::MakeIcosphere(0.035, 1)), Mat3::Identity(), 500);
  return models;
}

// Largest penetration between any body pair or any body and the stage.
double MaxPenetration(const std::vector<RigidBody>& bodies, const Stage& stage) {
  double worst = 0.0;
  std::vector<WorldHull> hulls;
  for (const auto& b : bodies) hulls.emplace_back(b.shape->hull, b.BodyPose());
  for (size_t i = 0; i < hulls.size(); ++i) {
    for (const Vec3& v : hulls[i].vertices) {
      if (stage.ContainsProjection(v)) worst = std::max(worst, -stage.SignedDistance(v));
    }
    for (size_t j = i + 1; j < hulls.size(); ++j) worst = std::max(worst, -HullSeparation(hulls[i], hulls[j]));
  }
  return worst;
}

TEST(Arrangement, CanonicalSpecHeightsInRange) {
  ModelLibrary models = TestModels();
  Stage stage = BigFloor();
  ArrangementSpec spec;
  spec.stage = "floor";
  for (int m = 0; m < 3; ++m) spec.entries.push_back({m, 1, Orientation::kCanonical});
  for (uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    auto bodies = InitArrangement(spec, stage, models, rng);
    ASSERT_EQ(bodies.size(), 3u);
    for (const auto& b : bodies) {
      EXPECT_EQ(b.linear_velocity, Vec3::Zero());
      EXPECT_EQ(b.angular_velocity, Vec3::Zero());
      const Pose pose = b.ModelPose();
      EXPECT_TRUE(pose.rotation.isApprox(models.at(b.model_id).canonical_rotation, 1e-12));
      double lowest = 1e9;
      for (const Vec3& v : WorldHull(b.shape->hull, b.BodyPose()).vertices) lowest = std::min(lowest, v.z());
      EXPECT_GE(lowest, 0.05 - 1e-9);
      // A lifted body may exceed the range, but only above another body.
      if (lowest > 0.5 + 1e-9) ADD_FAILURE() << "height " << lowest << " outside range for seed " << seed;
    }
  }
}

TEST(Arrangement, RandomOrientationIsUniform) {
  ModelLibrary models = TestModels();
  Stage stage = BigFloor();
  ArrangementSpec spec;
  spec.stage = "floor";
  spec.entries.push_back({0, 5, Orientation::kRandom});
  // For a uniform rotation the third column is uniform on the sphere, so
  // its z component is uniform on [-1, 1].
  std::vector<int> bins(10, 0);
  int total = 0;
  std::vector<int> counts(6, 0);
  for (uint64_t seed = 0; seed < 2000; ++seed) {
    Rng rng(HashKey(seed, {1}));
    auto bodies = InitArrangement(spec, stage, models, rng);
    ASSERT_GE(bodies.size(), 1u);
    ASSERT_LE(bodies.size(), 5u);
    counts[bodies.size()]++;
    for (const auto& b : bodies) {
      const double z = b.ModelPose().rotation(2, 2);
      bins[std::min(9, static_cast<int>((z + 1.0) * 5.0))]++;
      ++total;
    }
  }
  double chi2 = 0.0;
  const double expected = total / 10.0;
  for (int c : bins) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 27.88);  // chi-square, 9 dof, p = 0.001
  for (int k = 1; k <= 5; ++k) EXPECT_NEAR(counts[k], 400, 80) << "count " << k;
}

TEST(Arrangement, EmptySpecThrows) {
  ModelLibrary models = TestModels();
  ArrangementSpec spec;
  Rng rng(1);
  EXPECT_THROW(InitArrangement(spec, BigFloor(), models, rng), Error);
  spec.entries.push_back({0, 1, Orientation::kCanonical});
  spec.min_height = 0.6;
  EXPECT_THROW(InitArrangement(spec, BigFloor(), models, rng), Error);
  spec.min_height = 0.05;
  spec.entries[0].model_id = 42;
  EXPECT_THROW(InitArrangement(spec, BigFloor(), models, rng), Error);
}

TEST(Arrangement, RandomDropsSettleWithoutPenetration) {
  ModelLibrary models = TestModels();
  Stage stage("table", {Vec3(-0.3, -0.3, 0), Vec3(0.3, -0.3, 0), Vec3(0.3, 0.3, 0), Vec3(-0.3, 0.3, 0)});
  ArrangementSpec spec;
  spec.stage = "table";
  spec.entries = {{0, 2, Orientation::kRandom}, {1, 2, Orientation::kRandom}, {2, 1, Orientation::kRandom}};
  SimParams params;
  int settled = 0;
  const int trials = 20;
  for (uint64_t seed = 0; seed < trials; ++seed) {
    Rng rng(HashKey(seed, {2}));
    auto bodies = InitArrangement(spec, stage, models, rng);
    SimResult res = SimulateToRest(bodies, stage, params);
    settled += res.settled;
    EXPECT_LE(MaxPenetration(res.bodies, stage), 1e-3) << "seed " << seed;
    EXPECT_LE(res.final_kinetic_energy, res.initial_energy) << "seed " << seed;
    for (const auto& b : res.bodies) EXPECT_TRUE(IsRotation(b.ModelPose().rotation, 1e-9));
  }
  EXPECT_EQ(settled, trials);
}

TEST(Arrangement, SettledBodiesAreSupported) {
  ModelLibrary models = TestModels();
  Stage stage = BigFloor();
  ArrangementSpec spec;
  spec.stage = "floor";
  spec.entries = {{0, 3, Orientation::kRandom}, {2, 2, Orientation::kRandom}};
  for (uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(HashKey(seed, {3}));
    SimResult res = SimulateToRest(InitArrangement(spec, stage, models, rng), stage, SimParams{});
    ASSERT_TRUE(res.settled);
    std::vector<WorldHull> hulls;
    for (const auto& b : res.bodies) hulls.emplace_back(b.shape->hull, b.BodyPose());
    for (size_t i = 0; i < hulls.size(); ++i) {
      double lowest = 1e9;
      for (const Vec3& v : hulls[i].vertices) lowest = std::min(lowest, stage.SignedDistance(v));
      double gap = lowest;
      for (size_t j = 0; j < hulls.size(); ++j) {
        if (j != i) gap = std::min(gap, std::abs(HullSeparation(hulls[i], hulls[j])));
      }
      EXPECT_LE(gap, 1e-3) << "seed " << seed << " body " << i;
    }
  }
}

TEST(Arrangement, DeterministicAndSerializable) {
  ModelLibrary models = TestModels();
  Stage stage = BigFloor();
  ArrangementSpec spec;
  spec.stage = "floor";
  spec.entries = {{0, 3, Orientation::kRandom}, {1, 2, Orientation::kCanonical}};
  auto run = [&] {
    Rng rng(99);
    Arrangement a = SettleArrangement(InitArrangement(spec, stage, models, rng), stage, SimParams{});
    a.spec = spec;
    a.seed = 99;
    return ToJson(a).dump();
  };
  const std::string first = run();
  EXPECT_EQ(first, run());
  Arrangement back = ArrangementFromJson(nlohmann::json::parse(first));
  EXPECT_EQ(ToJson(back).dump(), first);
  ASSERT_FALSE(back.instances.empty());
  EXPECT_EQ(nlohmann::json::parse(first)["instances"][0]["rotation"].size(), 9u);
}

}  // namespace
}  // namespace pbrsynth::compose
