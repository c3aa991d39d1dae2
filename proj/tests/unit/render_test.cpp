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


#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "pbrsynth/common/error.hpp"
#include "pbrsynth/common/random.hpp"
#include "pbrsynth/geom/mesh.hpp"
#include "pbrsynth/render/baseline.hpp"
#include "pbrsynth/render/bsdf.hpp"
#include "pbrsynth/render/image.hpp"
#include "pbrsynth/render/pathtracer.hpp"

namespace pbrsynth::render {
namespace {

using geom::SceneAccel;
using geom::SceneInstance;

geom::Camera FurnaceCamera() {
  geom::Camera cam;
  cam.intrinsics = {80.0, 80.0, 32.0, 32.0, 64, 64};
  cam.world_from_camera = geom::LookAt(Vec3(0, 0, 3.2), Vec3::Zero());
  return cam;
}

std::shared_ptr<SceneAccel> SphereScene() {
  auto sphere = std::make_shared<geom::Mesh>(geom::MakeIcosphere(1.0, 5));
  return std::make_shared<SceneAccel>(std::vector<SceneInstance>{{sphere, Pose{}, 0}});
}

SunSkyLight UnitDome() { return SunSkyLight{Vec3::UnitZ(), Vec3::Zero(), Vec3::Ones()}; }

double Mean(const HdrImage& img) {
  double sum = 0.0;
  for (float v : img.rgb) sum += v;
  return sum / static_cast<double>(img.rgb.size());
}

// Box on a floor under an overhead area light and a dim sky.
RenderScene AreaLightScene(const Material& box_material) {
  auto floor = std::make_shared<geom::Mesh>(geom::MakeQuad(4, 4));
  auto box = std::make_shared<geom::Mesh>(geom::MakeBox(Vec3(0.5, 0.5, 0.5)));
  Pose bp;
  bp.translation = Vec3(0.2, 0, 0.25);
  bp.rotation = Eigen::AngleAxisd(0.5, Vec3::UnitZ()).toRotationMatrix();
  auto accel = std::make_shared<SceneAccel>(std::vector<SceneInstance>{{floor, Pose{}, 0}, {box, bp, 1}});
  AreaLight light;
  light.corner = Vec3(-0.5, -0.5, 1.5);
  light.edge_u = Vec3(1, 0, 0);
  light.edge_v = Vec3(0, -1, 0);
  light.radiance = Vec3::Constant(5.0);
  return RenderScene{accel,
                     {Material::Lambertian(Vec3::Constant(0.5)), box_material},
                     {light, SunSkyLight{Vec3::UnitZ(), Vec3::Zero(), Vec3::Constant(0.2)}}};
}

geom::Camera AreaLightCamera() {
  geom::Camera cam;
  cam.intrinsics = {60.0, 60.0, 32.0, 24.0, 64, 48};
  cam.world_from_camera = geom::LookAt(Vec3(2.0, -2.0, 2.0), Vec3(0, 0, 0.2));
  return cam;
}

TEST(QualityTest, TierMapping) {
  EXPECT_EQ(GetQualityParams(QualityTier::kLow).samples_per_pixel, 16);
  EXPECT_EQ(GetQualityParams(QualityTier::kLow).max_depth, 3);
  EXPECT_EQ(GetQualityParams(QualityTier::kMedium).samples_per_pixel, 64);
  EXPECT_EQ(GetQualityParams(QualityTier::kMedium).max_depth, 6);
  EXPECT_EQ(GetQualityParams(QualityTier::kHigh).samples_per_pixel, 256);
  EXPECT_EQ(GetQualityParams(QualityTier::kHigh).max_depth, 10);
  EXPECT_EQ(ParseQualityTier("medium"), QualityTier::kMedium);
  EXPECT_EQ(ToString(QualityTier::kHigh), "high");
  EXPECT_THROW(ParseQualityTier("ultra"), Error);
}

TEST(ToneMapTest, ZeroAndOne) {
  EXPECT_EQ(ToneMapValue(0.0, 1.0), 0);
  EXPECT_EQ(ToneMapValue(1.0, 1.0), 188);
  EXPECT_EQ(ToneMapValue(0.5, 2.0), 188);
}

TEST(ToneMapTest, Monotone) {
  int prev = 0;
  for (int i = 0; i <= 4000; ++i) {
    const int v = ToneMapValue(i * 0.005, 1.0);
    EXPECT_GE(v, prev);
    prev = v;
  }
  EXPECT_LE(prev, 255);
}

TEST(ToneMapTest, ImageChannels) {
  HdrImage hdr(2, 1);
  hdr.Set(0, 0, Vec3(0, 1, 1e6));
  hdr.Set(1, 0, Vec3(1, 0, 0));
  LdrImage ldr = ToneMap(hdr, 1.0);
  ASSERT_EQ(ldr.channels, 3);
  EXPECT_EQ(ldr.at(0, 0, 0), 0);
  EXPECT_EQ(ldr.at(0, 0, 1), 188);
  EXPECT_EQ(ldr.at(0, 0, 2), 255);
  EXPECT_EQ(ldr.at(1, 0, 0), 188);
}

TEST(BsdfTest, SamplingWeightsIntegrateBelowOne) {
  const Material presets[] = {Material::Lambertian(Vec3::Ones()), {Vec3::Ones(), 0.5, 1.0, 0.3},
                              {Vec3::Ones(), 1.0, 0.0, 0.1}, {Vec3::Ones(), 0.5, 0.5, 0.7}};
  Rng rng(7);
  for (const Material& m : presets) {
    Bsdf bsdf(m);
    for (double mu : {0.1, 0.5, 0.95}) {
      const Vec3 wo(std::sqrt(1 - mu * mu), 0, mu);
      double sum = 0.0;
      const int n = 200000;
      for (int i = 0; i < n; ++i) {
        auto s = bsdf.Sample(wo, rng.Uniform(), Vec2(rng.Uniform(), rng.Uniform()));
        if (s) sum += s->weight.mean();
      }
      EXPECT_LE(sum / n, 1.01) << "mu " << mu << " metallic " << m.metallic << " spec " << m.specular;
      EXPECT_GE(sum / n, 0.9) << "mu " << mu;
    }
  }
}

TEST(RenderTest, FurnaceLambertian) {
  RenderScene scene{SphereScene(), {Material{Vec3::Ones(), 0.0, 0.0, 0.5}}, {UnitDome()}};
  RenderResult r = Render(scene, FurnaceCamera(), RenderSettings::ForTier(QualityTier::kHigh, 1));
  EXPECT_EQ(r.guarded_samples, 0u);
  EXPECT_NEAR(Mean(r.color), 1.0, 0.02);
  for (float v : r.color.rgb) EXPECT_NEAR(v, 1.0, 0.02);
}

TEST(RenderTest, FurnaceMetallic) {
  for (double rough : {0.2, 0.5, 1.0}) {
    RenderScene scene{SphereScene(), {Material{Vec3::Ones(), 0.5, 1.0, rough}}, {UnitDome()}};
    RenderResult r = Render(scene, FurnaceCamera(), RenderSettings::ForTier(QualityTier::kHigh, 2));
    EXPECT_EQ(r.guarded_samples, 0u);
    EXPECT_NEAR(Mean(r.color), 1.0, 0.02) << "roughness " << rough;
  }
}

TEST(RenderTest, BlackObjectWithoutSpecularIsZero) {
  RenderScene scene{SphereScene(), {Material{Vec3::Zero(), 0.0, 0.0, 0.5}}, {UnitDome()}};
  RenderSettings s;
  s.samples_per_pixel = 16;
  RenderResult r = Render(scene, FurnaceCamera(), s);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      if (r.alpha[y * 64 + x] == 1.0f) {
        EXPECT_EQ(r.color.At(x, y).maxCoeff(), 0.0);
      }
    }
  }
  // A specular coat on the black base still reflects the dome.
  scene.materials[0].specular = 1.0;
  r = Render(scene, FurnaceCamera(), s);
  EXPECT_GT(r.color.At(32, 32).mean(), 0.01);
  EXPECT_LT(r.color.At(32, 32).mean(), 0.2);
}

TEST(RenderTest, PointLightOverLambertianPlane) {
  for (double rho : {0.2, 0.5, 0.9}) {
    for (double d : {0.5, 2.0}) {
      auto plane = std::make_shared<geom::Mesh>(geom::MakeQuad(10, 10));
      auto accel = std::make_shared<SceneAccel>(std::vector<SceneInstance>{{plane, Pose{}, 0}});
      geom::Camera cam;
      cam.intrinsics = {2000.0, 2000.0, 4.0, 4.0, 8, 8};
      cam.world_from_camera = geom::LookAt(Vec3(0, 0, d), Vec3::Zero());
      const double intensity = 3.0;
      RenderScene scene{accel, {Material::Lambertian(Vec3::Constant(rho))},
                        {PointLight{Vec3(0, 0, d), Vec3::Constant(intensity)}}};
      RenderSettings s;
      s.samples_per_pixel = 64;
      s.max_depth = 1;
      RenderResult r = Render(scene, cam, s);
      const double expected = rho * intensity / (kPi * d * d);
      EXPECT_NEAR(r.color.At(4, 4).x(), expected, 0.01 * expected);
    }
  }
}

TEST(RenderTest, EstimatorsAgree) {
  for (const Material& m : {Material::Lambertian(Vec3::Constant(0.7)), Material{Vec3(0.8, 0.6, 0.4), 0.5, 0.5, 0.3}}) {
    RenderScene scene = AreaLightScene(m);
    double means[3];
    int i = 0;
    for (Estimator e : {Estimator::kMis, Estimator::kLightSampling, Estimator::kBsdfSampling}) {
      RenderSettings s;
      s.samples_per_pixel = 256;
      s.max_depth = 3;
      s.estimator = e;
      s.workers = 4;
      RenderResult r = Render(scene, AreaLightCamera(), s);
      EXPECT_EQ(r.guarded_samples, 0u);
      means[i++] = Mean(r.color);
    }
    EXPECT_NEAR(means[1], means[0], 0.01 * means[0]);
    EXPECT_NEAR(means[2], means[0], 0.01 * means[0]);
  }
}

TEST(RenderTest, VarianceShrinksWithSamples) {
  RenderScene scene = AreaLightScene(Material{Vec3(0.8, 0.6, 0.4), 0.5, 0.0, 0.4});
  // Per-pixel variance across independent seeds, averaged over the image.
  auto variance = [&](int spp) {
    const int runs = 8;
    std::vector<HdrImage> imgs;
    for (int k = 0; k < runs; ++k) {
      RenderSettings s;
      s.samples_per_pixel = spp;
      s.seed = 100 + k;
      s.workers = 4;
      imgs.push_back(Render(scene, AreaLightCamera(), s).color);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < imgs[0].rgb.size(); ++j) {
      double m = 0.0, m2 = 0.0;
      for (const auto& img : imgs) {
        m += img.rgb[j];
        m2 += double(img.rgb[j]) * img.rgb[j];
      }
      m /= runs;
      total += m2 / runs - m * m;
    }
    return total;
  };
  const double v1 = variance(4);
  const double v4 = variance(16);
  EXPECT_LE(v4, 0.5 * v1);
}

TEST(RenderTest, DeterministicAcrossWorkers) {
  RenderScene scene = AreaLightScene(Material{Vec3(0.3, 0.6, 0.9), 0.5, 0.2, 0.5});
  RenderSettings s;
  s.samples_per_pixel = 9;
  s.seed = 42;
  s.workers = 1;
  RenderResult a = Render(scene, AreaLightCamera(), s);
  s.workers = 7;
  RenderResult b = Render(scene, AreaLightCamera(), s);
  EXPECT_EQ(a.color.rgb, b.color.rgb);
  EXPECT_EQ(a.alpha, b.alpha);
  s.seed = 43;
  RenderResult c = Render(scene, AreaLightCamera(), s);
  EXPECT_NE(a.color.rgb, c.color.rgb);
}

TEST(RenderTest, LightsOnlyAlphaCoverage) {
  RenderScene scene{SphereScene(), {Material::Lambertian(Vec3::Constant(0.5))}, {UnitDome()}};
  RenderSettings s;
  s.samples_per_pixel = 16;
  RenderResult r = Render(scene, FurnaceCamera(), s);
  EXPECT_EQ(r.alpha[0], 0.0f);
  EXPECT_EQ(r.alpha[32 * 64 + 32], 1.0f);
  bool fractional = false;
  for (float a : r.alpha) fractional |= (a > 0.0f && a < 1.0f);
  EXPECT_TRUE(fractional);
  // Sky pixels see the dome directly.
  EXPECT_NEAR(r.color.At(0, 0).x(), 1.0, 1e-6);
}

TEST(RenderTest, InvalidInputsThrow) {
  RenderScene scene{SphereScene(), {}, {UnitDome()}};
  EXPECT_THROW(Render(scene, FurnaceCamera(), RenderSettings{}), Error);
  RenderSettings s;
  s.samples_per_pixel = 0;
  EXPECT_THROW(s.Validate(), Error);
  Material m;
  m.roughness = 1.5;
  EXPECT_THROW(m.Validate(), Error);
}

TEST(ImageTest, PngRoundTrip) {
  LdrImage img(5, 3, 3);
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = static_cast<uint8_t>(i * 17);
  LdrImage back = DecodePng(EncodePng(img));
  EXPECT_EQ(back.width, 5);
  EXPECT_EQ(back.height, 3);
  EXPECT_EQ(back.data, img.data);
  LdrImage gray(4, 4, 1);
  gray.at(1, 2, 0) = 255;
  EXPECT_EQ(DecodePng(EncodePng(gray)).data, gray.data);
}

TEST(ImageTest, PfmRoundTrip) {
  HdrImage img(3, 2);
  img.Set(0, 0, Vec3(0.25, 1.5, 100.0));
  img.Set(2, 1, Vec3(1e-4, 0, 7));
  HdrImage back = DecodePfm(EncodePfm(img));
  EXPECT_EQ(back.width, 3);
  EXPECT_EQ(back.height, 2);
  EXPECT_EQ(back.rgb, img.rgb);
  EXPECT_THROW(DecodePfm({'P', '6'}), Error);
}

TEST(ImageTest, ResizeConstant) {
  LdrImage img(4, 4, 3);
  std::fill(img.data.begin(), img.data.end(), 77);
  LdrImage r = ResizeBilinear(img, 9, 5);
  EXPECT_EQ(r.width, 9);
  EXPECT_EQ(r.height, 5);
  for (uint8_t v : r.data) EXPECT_EQ(v, 77);
}

LdrImage Solid(int w, int h, uint8_t v) {
  LdrImage img(w, h, 3);
  std::fill(img.data.begin(), img.data.end(), v);
  return img;
}

TEST(BaselineTest, AlphaOneIsForeground) {
  LdrImage fg = Solid(4, 3, 0);
  for (std::size_t i = 0; i < fg.data.size(); ++i) fg.data[i] = static_cast<uint8_t>(i * 7);
  LdrImage out = CompositeBaseline(fg, std::vector<float>(12, 1.0f), Solid(4, 3, 99));
  EXPECT_EQ(out.data, fg.data);
}

TEST(BaselineTest, AlphaZeroIsBackground) {
  LdrImage bg = Solid(4, 3, 0);
  for (std::size_t i = 0; i < bg.data.size(); ++i) bg.data[i] = static_cast<uint8_t>(255 - i);
  LdrImage out = CompositeBaseline(Solid(4, 3, 10), std::vector<float>(12, 0.0f), bg);
  EXPECT_EQ(out.data, bg.data);
}

TEST(BaselineTest, HalfBlend) {
  LdrImage out = CompositeBaseline(Solid(2, 2, 200), std::vector<float>(4, 0.5f), Solid(2, 2, 100));
  for (uint8_t v : out.data) EXPECT_EQ(v, 150);
}

TEST(BaselineTest, ResolutionMismatch) {
  try {
    CompositeBaseline(Solid(2, 2, 1), std::vector<float>(4, 0.5f), Solid(3, 2, 1));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kResolutionMismatch);
  }
  EXPECT_THROW(CompositeBaseline(Solid(2, 2, 1), std::vector<float>(3, 0.5f), Solid(2, 2, 1)), Error);
}

}  // namespace
}  // namespace pbrsynth::render
