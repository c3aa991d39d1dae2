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
#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "pbrsynth/annotate/annotate.hpp"
#include "pbrsynth/camsample/camsample.hpp"
#include "pbrsynth/common/error.hpp"
#include "pbrsynth/common/fileio.hpp"
#include "pbrsynth/common/random.hpp"
#include "pbrsynth/geom/mesh.hpp"

namespace pbrsynth::annotate {
namespace {

namespace fs = std::filesystem;
using geom::SceneAccel;
using geom::SceneInstance;

geom::Camera MakeCamera(const Vec3& eye, const Vec3& target) {
  geom::Camera cam;
  cam.intrinsics = {120.0, 120.0, 40.0, 30.0, 80, 60};
  cam.world_from_camera = geom::LookAt(eye, target);
  return cam;
}

struct Scene {
  std::vector<std::shared_ptr<const geom::Mesh>> meshes;
  compose::Arrangement arrangement;
  std::shared_ptr<SceneAccel> accel;
};

// Builds an accel whose instances mirror the arrangement one to one.
Scene BuildScene(const std::vector<std::pair<std::shared_ptr<const geom::Mesh>, Pose>>& items) {
  Scene s;
  std::vector<SceneInstance> inst;
  for (std::size_t i = 0; i < items.size(); ++i) {
    s.meshes.push_back(items[i].first);
    s.arrangement.instances.push_back({static_cast<uint32_t>(i), static_cast<int>(10 + i), items[i].second});
    inst.push_back({items[i].first, items[i].second, static_cast<uint32_t>(i)});
  }
  s.accel = std::make_shared<SceneAccel>(std::move(inst));
  return s;
}

Pose At(const Vec3& t, const Mat3& r = Mat3::Identity()) {
  Pose p;
  p.rotation = r;
  p.translation = t;
  return p;
}

fs::path TempDir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("pbrsynth_annotate_" + name);
  fs::remove_all(p);
  return p;
}

TEST(TightBoxTest, Basic) {
  std::vector<uint8_t> m(6 * 4, 0);
  EXPECT_EQ(TightBox(m, 6, 4), BBox{});
  m[1 * 6 + 2] = 1;
  m[3 * 6 + 4] = 1;
  EXPECT_EQ(TightBox(m, 6, 4), (BBox{2, 1, 3, 3}));
}

TEST(AnnotateViewTest, CenteredSphereIsSymmetric) {
  auto sphere = std::make_shared<geom::Mesh>(geom::MakeIcosphere(0.2, 4));
  Scene s = BuildScene({{sphere, At(Vec3::Zero())}});
  const geom::Camera cam = MakeCamera(Vec3(0, -2, 0.5), Vec3::Zero());
  auto anns = AnnotateView(*s.accel, s.arrangement, cam);
  ASSERT_EQ(anns.size(), 1u);
  const BBox& b = anns[0].bbox;
  EXPECT_NEAR(b.x + b.w / 2.0, cam.intrinsics.cx, 1.0);
  EXPECT_NEAR(b.y + b.h / 2.0, cam.intrinsics.cy, 1.0);
  // Silhouette radius of a sphere at distance D: f * r / sqrt(D^2 - r^2).
  const double d = std::sqrt(4.0 + 0.25);
  const double radius_px = 120.0 * 0.2 / std::sqrt(d * d - 0.04);
  EXPECT_NEAR(b.w, 2 * radius_px, 2.0);
  EXPECT_NEAR(b.h, 2 * radius_px, 2.0);
  EXPECT_DOUBLE_EQ(anns[0].visibility_fraction, 1.0);
  EXPECT_EQ(anns[0].model_id, 10);
}

TEST(AnnotateViewTest, FullyOccludedIsOmitted) {
  auto sphere = std::make_shared<geom::Mesh>(geom::MakeIcosphere(0.1, 3));
  auto wall = std::make_shared<geom::Mesh>(geom::MakeBox(Vec3(2.0, 0.05, 2.0)));
  Scene s = BuildScene({{sphere, At(Vec3::Zero())}, {wall, At(Vec3(0, -0.5, 0))}});
  auto anns = AnnotateView(*s.accel, s.arrangement, MakeCamera(Vec3(0, -2, 0), Vec3::Zero()));
  ASSERT_EQ(anns.size(), 1u);
  EXPECT_EQ(anns[0].instance_id, 1u);
}

TEST(AnnotateViewTest, HalfOutOfFrameIsClipped) {
  auto sphere = std::make_shared<geom::Mesh>(geom::MakeIcosphere(0.3, 4));
  // Camera looks at the origin; the sphere sits on the right image border.
  const geom::Camera cam = MakeCamera(Vec3(0, -2, 0), Vec3::Zero());
  const double x_edge = 40.0 / 120.0 * 2.0;
  Scene s = BuildScene({{sphere, At(Vec3(x_edge, 0, 0))}});
  auto anns = AnnotateView(*s.accel, s.arrangement, cam);
  ASSERT_EQ(anns.size(), 1u);
  const BBox& b = anns[0].bbox;
  EXPECT_EQ(b.x + b.w, cam.width());
  EXPECT_GE(b.x, 0);
  EXPECT_LT(b.w, b.h);
  EXPECT_EQ(TightBox(anns[0].mask, cam.width(), cam.height()), b);
  // Nothing outside the frame contributes, so the in-frame portion is fully visible.
  EXPECT_DOUBLE_EQ(anns[0].visibility_fraction, 1.0);
}

TEST(AnnotateViewTest, InvariantsOnRandomScenes) {
  auto box = std::make_shared<geom::Mesh>(geom::MakeBox(Vec3(0.1, 0.15, 0.08)));
  auto ball = std::make_shared<geom::Mesh>(geom::MakeIcosphere(0.07, 3));
  auto can = std::make_shared<geom::Mesh>(geom::MakeCylinder(0.04, 0.12, 24));
  const std::shared_ptr<const geom::Mesh> shapes[] = {box, ball, can};
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::pair<std::shared_ptr<const geom::Mesh>, Pose>> items;
    for (int i = 0; i < 6; ++i) {
      const Quat q = Quat::UnitRandom();
      const Vec3 t(rng.Uniform(-0.25, 0.25), rng.Uniform(-0.25, 0.25), rng.Uniform(0.0, 0.2));
      items.push_back({shapes[i % 3], At(t, q.toRotationMatrix())});
    }
    Scene s = BuildScene(items);
    const double az = rng.Uniform(0.0, 2 * kPi);
    const geom::Camera cam = MakeCamera(Vec3(std::cos(az), std::sin(az), 0.6) * 1.2, Vec3(0, 0, 0.1));
    const geom::IdDepthBuffer full = geom::RasterizeIds(*s.accel, cam);
    auto anns = AnnotateView(*s.accel, full, s.arrangement, cam);
    const std::size_t n = full.ids.size();
    std::vector<int> cover(n, 0);
    for (const InstanceAnnotation& a : anns) {
      EXPECT_GT(a.visible_pixels, 0);
      EXPECT_EQ(TightBox(a.mask, cam.width(), cam.height()), a.bbox);
      EXPECT_TRUE(IsRotation(a.pose.rotation, 1e-9));
      EXPECT_DOUBLE_EQ(a.visibility_fraction, camsample::VisibilityFraction(*s.accel, cam, a.instance_id));
      for (std::size_t i = 0; i < n; ++i) cover[i] += a.mask[i];

      // Projected model vertices fall inside the full mask dilated by 1 px.
      const geom::IdDepthBuffer alone = geom::RasterizeIds(*s.accel, cam, std::vector<uint32_t>{a.instance_id});
      geom::Camera at_origin = cam;
      at_origin.world_from_camera = Pose{};
      for (const Vec3& v : s.meshes[a.instance_id]->vertices) {
        auto proj = at_origin.Project(a.pose.Apply(v));
        ASSERT_TRUE(proj.has_value());
        const int px = static_cast<int>(std::floor(proj->pixel.x()));
        const int py = static_cast<int>(std::floor(proj->pixel.y()));
        if (px < 0 || py < 0 || px >= cam.width() || py >= cam.height()) continue;
        bool near = false;
        for (int dy = -1; dy <= 1 && !near; ++dy) {
          for (int dx = -1; dx <= 1 && !near; ++dx) {
            const int qx = px + dx, qy = py + dy;
            if (qx < 0 || qy < 0 || qx >= cam.width() || qy >= cam.height()) continue;
            near = alone.id(qx, qy) == a.instance_id;
          }
        }
        EXPECT_TRUE(near) << "instance " << a.instance_id << " pixel " << px << "," << py;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_LE(cover[i], 1);
      EXPECT_EQ(cover[i] == 1, full.ids[i] != geom::kBackgroundId);
    }
  }
}

TEST(AnnotateViewTest, SceneGeometryIsNotAnnotated) {
  auto sphere = std::make_shared<geom::Mesh>(geom::MakeIcosphere(0.1, 3));
  auto floor = std::make_shared<geom::Mesh>(geom::MakeQuad(3, 3));
  compose::Arrangement arr;
  arr.instances.push_back({0, 4, At(Vec3(0, 0, 0.1))});
  arr.instances.push_back({1, 5, At(Vec3(5, 5, 5))});  // not in the accel
  SceneAccel accel({{sphere, At(Vec3(0, 0, 0.1)), 0}, {floor, Pose{}, 1000000}});
  auto anns = AnnotateView(accel, arr, MakeCamera(Vec3(0, -1, 1), Vec3::Zero()));
  ASSERT_EQ(anns.size(), 1u);
  EXPECT_EQ(anns[0].model_id, 4);
  EXPECT_LT(anns[0].visibility_fraction, 1.0 + 1e-12);
}

DatasetRecord TwoInstanceRecord(int64_t id) {
  auto a = std::make_shared<geom::Mesh>(geom::MakeIcosphere(0.1, 3));
  Scene s = BuildScene({{a, At(Vec3(-0.2, 0, 0))}, {a, At(Vec3(0.2, 0, 0.05))}});
  DatasetRecord r;
  r.image_id = id;
  r.camera = MakeCamera(Vec3(0, -1.5, 0.3), Vec3::Zero());
  r.instances = AnnotateView(*s.accel, s.arrangement, r.camera);
  r.provenance = {12345678901234ULL, 3, 1, "low"};
  r.image = render::LdrImage(80, 60, 3);
  r.image.at(5, 5, 1) = 200;
  render::HdrImage hdr(80, 60);
  hdr.Set(1, 2, Vec3(0.5, 2.0, 8.0));
  r.hdr = hdr;
  return r;
}

TEST(WriteDatasetTest, OneRecordTwoInstances) {
  const fs::path root = TempDir("one");
  DatasetRecord rec = TwoInstanceRecord(7);
  ASSERT_EQ(rec.instances.size(), 2u);
  nlohmann::json manifest = WriteDataset({rec}, root);
  EXPECT_EQ(manifest["num_images"], 1);
  EXPECT_EQ(manifest["num_masks"], 2);
  EXPECT_TRUE(fs::exists(root / "images/000007.png"));
  EXPECT_TRUE(fs::exists(root / "images/000007.pfm"));
  EXPECT_TRUE(fs::exists(root / "masks/000007_0.png"));
  EXPECT_TRUE(fs::exists(root / "masks/000007_1.png"));
  EXPECT_TRUE(fs::exists(root / "manifest.json"));
  int files = 0;
  for (const auto& e : fs::recursive_directory_iterator(root)) files += e.is_regular_file();
  EXPECT_EQ(files, 6);

  const nlohmann::json ann = nlohmann::json::parse(ReadFileBytes(root / "annotations.json"));
  ASSERT_EQ(ann["images"].size(), 1u);
  const auto& img = ann["images"][0];
  EXPECT_EQ(img["provenance"]["seed"].get<uint64_t>(), 12345678901234ULL);
  ASSERT_EQ(img["annotations"].size(), 2u);
  const auto& a0 = img["annotations"][0];
  const Vec3 t_m = rec.instances[0].pose.translation;
  EXPECT_NEAR(a0["cam_t_m2c"][2].get<double>(), t_m.z() * 1000.0, 1e-9);
  EXPECT_EQ(a0["bbox"][2].get<int>(), rec.instances[0].bbox.w);

  const render::LdrImage mask = render::ReadImage((root / "masks/000007_1.png").string());
  const BBox& b = rec.instances[1].bbox;
  EXPECT_EQ(mask.at(b.x + b.w / 2, b.y + b.h / 2, 0), 255);
  EXPECT_EQ(mask.at(0, 0, 0), 0);
  EXPECT_EQ(render::DecodePfm(ReadFileBinary(root / "images/000007.pfm")).rgb, rec.hdr->rgb);
  fs::remove_all(root);
}

TEST(WriteDatasetTest, EmptyIsValid) {
  const fs::path root = TempDir("empty");
  nlohmann::json manifest = WriteDataset({}, root);
  EXPECT_EQ(manifest["num_images"], 0);
  const nlohmann::json onfile = nlohmann::json::parse(ReadFileBytes(root / "manifest.json"));
  EXPECT_EQ(onfile, manifest);
  EXPECT_TRUE(nlohmann::json::parse(ReadFileBytes(root / "annotations.json"))["images"].empty());
  fs::remove_all(root);
}

TEST(WriteDatasetTest, ByteIdenticalReruns) {
  const fs::path a = TempDir("rerun_a"), b = TempDir("rerun_b");
  WriteDataset({TwoInstanceRecord(1), TwoInstanceRecord(0)}, a, {{"skipped_slots", 1}});
  WriteDataset({TwoInstanceRecord(0), TwoInstanceRecord(1)}, b, {{"skipped_slots", 1}});
  int compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), a);
    EXPECT_EQ(ReadFileBytes(e.path()), ReadFileBytes(b / rel)) << rel;
    ++compared;
  }
  EXPECT_EQ(compared, 2 * 4 + 2);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(WriteDatasetTest, DuplicateIdsAndIoErrors) {
  const fs::path root = TempDir("err");
  EXPECT_THROW(WriteDataset({TwoInstanceRecord(2), TwoInstanceRecord(2)}, root), Error);
  fs::remove_all(root);
  const fs::path blocker = TempDir("blocker");
  WriteFileAtomic(blocker, std::string("not a directory"));
  try {
    WriteDataset({TwoInstanceRecord(0)}, blocker);
    FAIL() << "expected an I/O error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
    EXPECT_NE(std::string(e.what()).find(blocker.string()), std::string::npos);
  }
  fs::remove(blocker);
}

}  // namespace
}  // namespace pbrsynth::annotate
