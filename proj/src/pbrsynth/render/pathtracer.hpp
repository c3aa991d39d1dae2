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

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pbrsynth/geom/accel.hpp"
#include "pbrsynth/geom/camera.hpp"
#include "pbrsynth/render/image.hpp"
#include "pbrsynth/render/light.hpp"
#include "pbrsynth/render/material.hpp"

namespace pbrsynth::render {

enum class QualityTier { kLow, kMedium, kHigh };

struct QualityParams {
  int samples_per_pixel;
  int max_depth;
};

// low (16, 3), medium (64, 6), high (256, 10).
QualityParams GetQualityParams(QualityTier tier);
std::string ToString(QualityTier tier);
// Throws Error(kInvalidArgument) for names other than low, medium, high.
QualityTier ParseQualityTier(const std::string& name);

// Which techniques estimate light from area lights and the sky. Point
// lights and the sun are delta lights and are always sampled directly.
enum class Estimator { kMis, kLightSampling, kBsdfSampling };

struct RenderSettings {
  int samples_per_pixel = 16;
  // Number of scattering events; 1 is direct lighting only.
  int max_depth = 3;
  uint64_t seed = 0;
  Estimator estimator = Estimator::kMis;
  // Russian roulette starts after this many bounces.
  int russian_roulette_depth = 3;
  int workers = 1;

  static RenderSettings ForTier(QualityTier tier, uint64_t seed);
  // Throws Error(kInvalidArgument) unless spp >= 1 and depth >= 1.
  void Validate() const;
};

struct RenderScene {
  std::shared_ptr<const geom::SceneAccel> accel;  // may be null: lights only
  std::vector<Material> materials;  // one per accel instance, by index
  std::vector<Light> lights;

  // Throws Error(kInvalidArgument) for a material count mismatch or an
  // invalid material or light.
  void Validate() const;
};

struct RenderResult {
  HdrImage color;       // mean radiance over all samples of a pixel
  HdrImage foreground;  // mean over the samples whose camera ray hit geometry
  std::vector<float> alpha;  // fraction of samples whose camera ray hit geometry
  // Samples whose radiance was not a finite nonnegative value; each was
  // replaced by zero.
  uint64_t guarded_samples = 0;
};

// Unidirectional path tracing with next-event estimation. Each sample owns a
// random stream keyed by (seed, pixel, sample index), so the result does not
// depend on the worker count.
RenderResult Render(const RenderScene& scene, const geom::Camera& camera, const RenderSettings& settings);

}  // namespace pbrsynth::render
