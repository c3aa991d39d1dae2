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
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbrsynth/camsample/camsample.hpp"
#include "pbrsynth/compose/arrangement.hpp"
#include "pbrsynth/compose/physics.hpp"
#include "pbrsynth/compose/stage.hpp"
#include "pbrsynth/geom/mesh.hpp"
#include "pbrsynth/render/light.hpp"
#include "pbrsynth/render/material.hpp"
#include "pbrsynth/render/pathtracer.hpp"

namespace pbrsynth::pipeline {

// Static scene geometry that is rendered but never simulated or annotated.
struct SceneMesh {
  std::string name;
  std::shared_ptr<const geom::Mesh> mesh;
  Pose pose;
  std::string material;
};

struct PipelineConfig {
  std::filesystem::path config_dir;  // relative paths resolve against it
  uint64_t seed = 0;
  std::filesystem::path output = "out";
  int arrangements = 1;
  int cameras_per_arrangement = 1;
  std::vector<render::QualityTier> tiers = {render::QualityTier::kLow};
  int jobs = 1;
  bool hdr = false;
  double exposure = 1.0;
  render::Estimator estimator = render::Estimator::kMis;

  std::map<std::string, render::Material> materials;
  compose::ModelLibrary models;
  std::map<int, std::string> model_materials;
  std::vector<SceneMesh> scene_meshes;
  std::vector<compose::Stage> stages;
  std::vector<render::Light> lights;
  // Arrangement i uses spec i modulo the list size.
  std::vector<compose::ArrangementSpec> arrangement_specs;
  camsample::CameraSampleParams camera;
  compose::SimParams simulation;
  std::optional<std::filesystem::path> background_dir;

  // Throws Error(kConfig) naming the offending entry.
  void Validate() const;
  const compose::Stage& FindStage(const std::string& name) const;
  const render::Material& MaterialOf(const std::string& name) const;
};

// Parses a JSON config; relative paths resolve against `config_dir`.
// Throws Error(kConfig) for schema violations and the loader's errors for
// unreadable meshes.
PipelineConfig ConfigFromJson(const nlohmann::json& j, const std::filesystem::path& config_dir);
PipelineConfig LoadConfig(const std::filesystem::path& path);

// "low", "medium", "high" or "all".
std::vector<render::QualityTier> ParseTiers(const std::string& name);

// Fixed tier slot used in image ids: low 0, medium 1, high 2.
int TierIndex(render::QualityTier tier);
inline constexpr int kTierSlots = 3;

// First accel id used for static scene meshes; arrangement instances use
// small ids from 0.
inline constexpr uint32_t kSceneMeshIdBase = 1000000;

}  // namespace pbrsynth::pipeline
