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

#include "pbrsynth/camsample/camsample.hpp"

#include <cmath>

#include "pbrsynth/common/error.hpp"
#include "pbrsynth/compose/arrangement.hpp"

namespace pbrsynth::camsample {

void CameraSampleParams::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) Fail(ErrorCode::kInvalidArgument, std::string("invalid camera sampling parameter: ") + what);
  };
  require(std::isfinite(azimuth_min) && std::isfinite(azimuth_max) && azimuth_min <= azimuth_max, "azimuth range");
  require(elevation_min <= elevation_max && elevation_min >= -kPi / 2 && elevation_max <= kPi / 2, "elevation range");
  require(distance_min > 0.0 && distance_min <= distance_max && std::isfinite(distance_max), "distance range");
  require(min_visible_fraction >= 0.0 && min_visible_fraction <= 1.0, "min visible fraction");
  require(max_retries >= 0, "max retries");
  intrinsics.Validate();
}

std::vector<FocusTarget> FocusTargets(const geom::SceneAccel& accel, std::span<const uint32_t> instance_ids) {
  std::vector<FocusTarget> out;
  out.reserve(instance_ids.size());
  for (uint32_t id : instance_ids) {
    const auto index = accel.IndexOf(id);
    if (!index) Fail(ErrorCode::kUnknownId, "instance " + std::to_string(id) + " is not in the scene");
    out.push_back({id, accel.InstanceBounds(*index).Center()});
  }
  return out;
}

CameraSample SampleCamera(std::span<const FocusTarget> targets, const CameraSampleParams& params, Rng& rng) {
  if (targets.empty()) Fail(ErrorCode::kInvalidArgument, "cannot sample a camera for an empty arrangement");
  const FocusTarget& focus = targets[rng.UniformInt(targets.size())];
  CameraSample s;
  s.focused_instance = focus.instance_id;
  s.azimuth = rng.Uniform(params.azimuth_min, params.azimuth_max);
  s.elevation = rng.Uniform(params.elevation_min, params.elevation_max);
  s.distance = rng.Uniform(params.distance_min, params.distance_max);
  const Vec3 dir(std::cos(s.elevation) * std::cos(s.azimuth), std::cos(s.elevation) * std::sin(s.azimuth),
                 std::sin(s.elevation));
  s.camera.intrinsics = params.intrinsics;
  s.camera.world_from_camera = geom::LookAt(focus.center + s.distance * dir, focus.center);
  return s;
}

double VisibilityFraction(const geom::SceneAccel& accel, const geom::IdDepthBuffer& full_scene,
                          const geom::Camera& camera, uint32_t instance_id, int workers) {
  const geom::IdDepthBuffer alone = geom::RasterizeIds(accel, camera, std::vector<uint32_t>{instance_id}, workers);
  if (alone.ids.size() != full_scene.ids.size()) {
    Fail(ErrorCode::kResolutionMismatch, "full-scene buffer does not match the camera resolution");
  }
  std::size_t full = 0, visible = 0;
  for (std::size_t i = 0; i < alone.ids.size(); ++i) {
    if (alone.ids[i] != instance_id) continue;
    ++full;
    visible += full_scene.ids[i] == instance_id;
  }
  return full == 0 ? 0.0 : static_cast<double>(visible) / static_cast<double>(full);
}

double VisibilityFraction(const geom::SceneAccel& accel, const geom::Camera& camera, uint32_t instance_id,
                          int workers) {
  if (!accel.IndexOf(instance_id)) Fail(ErrorCode::kUnknownId, "instance " + std::to_string(instance_id) + " is not in the scene");
  return VisibilityFraction(accel, geom::RasterizeIds(accel, camera, std::nullopt, workers), camera, instance_id, workers);
}

bool AcceptCamera(double visibility_fraction, const CameraSampleParams& params) {
  return visibility_fraction >= params.min_visible_fraction;
}

bool AcceptCamera(const CameraSample& sample, const CameraSampleParams& params) {
  return AcceptCamera(sample.visibility_fraction, params);
}

std::optional<CameraSample> SampleAcceptedCamera(const geom::SceneAccel& accel, std::span<const FocusTarget> targets,
                                                 const CameraSampleParams& params, Rng& rng, int workers) {
  params.Validate();
  for (int attempt = 1; attempt <= params.max_retries + 1; ++attempt) {
    CameraSample s = SampleCamera(targets, params, rng);
    s.visibility_fraction = VisibilityFraction(accel, s.camera, s.focused_instance, workers);
    s.accepted = AcceptCamera(s, params);
    s.attempts = attempt;
    if (s.accepted) return s;
  }
  return std::nullopt;
}

nlohmann::json ToJson(const geom::Intrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

geom::Intrinsics IntrinsicsFromJson(const nlohmann::json& j) {
  geom::Intrinsics k;
  k.fx = j.at("fx").get<double>();
  k.fy = j.at("fy").get<double>();
  k.cx = j.at("cx").get<double>();
  k.cy = j.at("cy").get<double>();
  k.width = j.at("width").get<int>();
  k.height = j.at("height").get<int>();
  k.Validate();
  return k;
}

nlohmann::json ToJson(const CameraSample& s) {
  return {{"intrinsics", ToJson(s.camera.intrinsics)},
          {"world_from_camera", compose::ToJson(s.camera.world_from_camera)},
          {"focused_instance_id", s.focused_instance},
          {"azimuth", s.azimuth},
          {"elevation", s.elevation},
          {"distance", s.distance},
          {"visibility_fraction", s.visibility_fraction},
          {"accepted", s.accepted},
          {"attempts", s.attempts}};
}

CameraSample CameraSampleFromJson(const nlohmann::json& j) {
  CameraSample s;
  s.camera.intrinsics = IntrinsicsFromJson(j.at("intrinsics"));
  s.camera.world_from_camera = compose::PoseFromJson(j.at("world_from_camera"));
  s.focused_instance = j.at("focused_instance_id").get<uint32_t>();
  s.azimuth = j.value("azimuth", 0.0);
  s.elevation = j.value("elevation", 0.0);
  s.distance = j.value("distance", 0.0);
  s.visibility_fraction = j.at("visibility_fraction").get<double>();
  s.accepted = j.value("accepted", true);
  s.attempts = j.value("attempts", 1);
  return s;
}

}  // namespace pbrsynth::camsample
