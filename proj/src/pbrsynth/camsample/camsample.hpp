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
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "pbrsynth/common/math.hpp"
#include "pbrsynth/common/random.hpp"
#include "pbrsynth/geom/accel.hpp"
#include "pbrsynth/geom/camera.hpp"

namespace pbrsynth::camsample {

struct CameraSampleParams {
  double azimuth_min = 0.0;  // rad, measured in the world XY plane from +X
  double azimuth_max = 2.0 * kPi;
  double elevation_min = 15.0 * kPi / 180.0;  // rad above the XY plane
  double elevation_max = 75.0 * kPi / 180.0;
  double distance_min = 0.5;  // m
  double distance_max = 1.0;
  double min_visible_fraction = 0.3;
  int max_retries = 50;  // resamples after the first rejected camera
  geom::Intrinsics intrinsics;

  // Throws Error(kInvalidArgument) for empty or inverted ranges, a fraction
  // outside [0, 1], negative retries or invalid intrinsics.
  void Validate() const;
};

struct FocusTarget {
  uint32_t instance_id = 0;
  Vec3 center = Vec3::Zero();  // world bounding-box center
};

struct CameraSample {
  geom::Camera camera;
  uint32_t focused_instance = 0;
  double azimuth = 0.0;
  double elevation = 0.0;
  double distance = 0.0;
  double visibility_fraction = 0.0;
  bool accepted = false;
  int attempts = 1;
};

// Bounding-box centers of the listed instances.
std::vector<FocusTarget> FocusTargets(const geom::SceneAccel& accel, std::span<const uint32_t> instance_ids);

// Picks a focus uniformly, then draws each spherical coordinate uniformly
// from its range, and looks at the focus center without roll. The
// visibility fields are left unset. Throws Error(kInvalidArgument) when
// `targets` is empty.
CameraSample SampleCamera(std::span<const FocusTarget> targets, const CameraSampleParams& params, Rng& rng);

// Fraction of the instance's unoccluded in-frame pixels that the full scene
// also assigns to it. Zero when the instance covers no pixel.
double VisibilityFraction(const geom::SceneAccel& accel, const geom::Camera& camera, uint32_t instance_id,
                          int workers = 1);
// Same, reusing an already rasterized full-scene buffer for `camera`.
double VisibilityFraction(const geom::SceneAccel& accel, const geom::IdDepthBuffer& full_scene,
                          const geom::Camera& camera, uint32_t instance_id, int workers = 1);

// Inclusive threshold: a fraction equal to the minimum is accepted.
bool AcceptCamera(double visibility_fraction, const CameraSampleParams& params);
bool AcceptCamera(const CameraSample& sample, const CameraSampleParams& params);

// Samples until a camera passes the visibility gate, giving up after the
// retry limit. Only the id rasterizer is used.
std::optional<CameraSample> SampleAcceptedCamera(const geom::SceneAccel& accel, std::span<const FocusTarget> targets,
                                                 const CameraSampleParams& params, Rng& rng, int workers = 1);

nlohmann::json ToJson(const geom::Intrinsics& intrinsics);
geom::Intrinsics IntrinsicsFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const CameraSample& sample);
CameraSample CameraSampleFromJson(const nlohmann::json& j);

}  // namespace pbrsynth::camsample
