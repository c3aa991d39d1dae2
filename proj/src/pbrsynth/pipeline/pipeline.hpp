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
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pbrsynth/camsample/camsample.hpp"
#include "pbrsynth/compose/arrangement.hpp"
#include "pbrsynth/geom/accel.hpp"
#include "pbrsynth/pipeline/config.hpp"

namespace pbrsynth::pipeline {

// Independent random streams derived from the master seed by a keyed hash
// of a stage label and unit indices.
class SeedTree {
 public:
  explicit SeedTree(uint64_t master) : master_(master) {}
  uint64_t Stream(std::string_view stage, std::initializer_list<uint64_t> indices) const;
  Rng MakeRng(std::string_view stage, std::initializer_list<uint64_t> indices) const {
    return Rng(Stream(stage, indices));
  }
  uint64_t master() const { return master_; }

 private:
  uint64_t master_;
};

using Log = std::function<void(const std::string&)>;

struct UnitFailure {
  std::string unit;
  std::string message;
};

struct StageStats {
  std::string stage;
  int64_t total = 0;
  int64_t succeeded = 0;
  int64_t failed = 0;
  int64_t skipped = 0;
  std::vector<UnitFailure> failures;

  nlohmann::json ToJson() const;
};

struct ArrangementSet {
  uint64_t seed = 0;
  int requested = 0;
  // Indexed by arrangement; empty where composition failed.
  std::vector<std::optional<compose::Arrangement>> items;
};

enum class SlotStatus { kAccepted, kSkipped, kFailed };

struct CameraSlot {
  int arrangement = 0;
  int camera = 0;
  SlotStatus status = SlotStatus::kFailed;
  std::optional<camsample::CameraSample> sample;  // set when accepted
  int attempts = 0;
  std::string message;
};

struct CameraSet {
  uint64_t seed = 0;
  int cameras_per_arrangement = 0;
  std::vector<CameraSlot> slots;  // ordered by (arrangement, camera)
};

nlohmann::json ToJson(const ArrangementSet& set);
ArrangementSet ArrangementSetFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const CameraSet& set);
CameraSet CameraSetFromJson(const nlohmann::json& j);

// Image id of one rendered unit: ((arrangement * C + camera) * 3 + tier
// slot), so ids do not depend on which tiers a run selects.
int64_t ImageId(int arrangement, int camera, int cameras_per_arrangement, render::QualityTier tier);

// Arrangement objects (ids from 0) plus, optionally, the static scene meshes
// (ids from kSceneMeshIdBase), with one material per accel instance.
struct BuiltScene {
  std::shared_ptr<const geom::SceneAccel> accel;
  std::vector<render::Material> materials;
  std::vector<uint32_t> object_ids;
};
BuiltScene BuildScene(const PipelineConfig& config, const compose::Arrangement& arrangement,
                      bool include_scene_meshes);

struct ComposeOutput {
  ArrangementSet arrangements;
  StageStats stats;
};
// Initializes and settles every arrangement.
ComposeOutput Compose(const PipelineConfig& config, const Log& log = {});

struct CameraOutput {
  CameraSet cameras;
  StageStats stats;
};
// Samples and gates one camera per slot; slots whose retries run out are
// skipped.
CameraOutput SampleCameras(const PipelineConfig& config, const ArrangementSet& arrangements, const Log& log = {});

// Renders every accepted slot at every configured tier into root/images.
StageStats RenderImages(const PipelineConfig& config, const ArrangementSet& arrangements, const CameraSet& cameras,
                        const std::filesystem::path& root, const Log& log = {});

// Annotates every rendered image and writes masks, annotations.json and
// manifest.json. Units whose image is missing fail.
StageStats Annotate(const PipelineConfig& config, const ArrangementSet& arrangements, const CameraSet& cameras,
                    const std::filesystem::path& root, const Log& log = {});

// Renders arrangement objects under the scene lights without scene meshes
// and composites them over background photographs. Writes a complete
// dataset (images, masks, annotations, manifest) under root.
StageStats Baseline(const PipelineConfig& config, const ArrangementSet& arrangements, const CameraSet& cameras,
                    const std::filesystem::path& background_dir, const std::filesystem::path& root,
                    const Log& log = {});

struct RunSummary {
  std::vector<StageStats> stages;
  int64_t failed_units() const;
  nlohmann::json ToJson() const;
};

// compose, sample cameras, render and annotate, writing arrangements.json
// and cameras.json next to the dataset.
RunSummary RunPipeline(const PipelineConfig& config, const Log& log = {});

// Intermediate files, as written by RunPipeline and the stage subcommands.
void WriteJsonFile(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json ReadJsonFile(const std::filesystem::path& path);

}  // namespace pbrsynth::pipeline
