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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbrsynth/compose/arrangement.hpp"
#include "pbrsynth/geom/accel.hpp"
#include "pbrsynth/geom/camera.hpp"
#include "pbrsynth/render/image.hpp"

namespace pbrsynth::annotate {

// Integer pixel box; (x, y) is the top-left pixel.
struct BBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  bool operator==(const BBox&) const = default;
};

struct InstanceAnnotation {
  uint32_t instance_id = 0;
  int model_id = 0;
  BBox bbox;
  // Visible pixels, one byte per pixel (0 or 1), row-major, image sized.
  std::vector<uint8_t> mask;
  // camera_from_model in the renderer's camera frame (x right, y up,
  // looking down -z), translation in meters.
  Pose pose;
  double visibility_fraction = 0.0;
  int64_t visible_pixels = 0;
};

// Tight box of the nonzero pixels; all zeros when the mask is empty.
BBox TightBox(const std::vector<uint8_t>& mask, int width, int height);

// Annotates every arrangement instance present in `accel` and visible from
// `camera`. Visible masks come from the full-scene id buffer, visibility from
// the same per-instance subset rasterization used by the camera gate.
// Instances without visible pixels are omitted. Output is ordered by
// instance id.
std::vector<InstanceAnnotation> AnnotateView(const geom::SceneAccel& accel, const compose::Arrangement& arrangement,
                                             const geom::Camera& camera, int workers = 1);
// Same, reusing an already rasterized full-scene buffer for `camera`.
std::vector<InstanceAnnotation> AnnotateView(const geom::SceneAccel& accel, const geom::IdDepthBuffer& full_scene,
                                             const compose::Arrangement& arrangement, const geom::Camera& camera,
                                             int workers = 1);

struct Provenance {
  uint64_t seed = 0;
  int arrangement = 0;
  int camera = 0;
  std::string tier;
};

struct DatasetRecord {
  int64_t image_id = 0;
  geom::Camera camera;
  std::vector<InstanceAnnotation> instances;
  Provenance provenance;
  // Written by WriteRecordFiles unless empty (zero width), for example when
  // an earlier stage already wrote the image.
  render::LdrImage image;
  std::optional<render::HdrImage> hdr;
  // Lists the HDR file in the index even when `hdr` is not held in memory.
  bool has_hdr_file = false;
};

// Zero-padded six digit file stems: images/000042.png, masks/000042_3.png.
std::string ImageFileName(int64_t image_id);
std::string MaskFileName(int64_t image_id, uint32_t instance_id);
std::string HdrFileName(int64_t image_id);

// Writes the image, optional HDR image and instance masks of one record.
// Empty images are skipped.
// Distinct records may be written concurrently. Throws Error(kIo) naming
// the offending path.
void WriteRecordFiles(const DatasetRecord& record, const std::filesystem::path& root);

// annotations.json content for the records, ordered by image id.
nlohmann::json AnnotationsJson(const std::vector<DatasetRecord>& records);

// Writes annotations.json, then manifest.json last. `extra` members are
// merged into the manifest (for run statistics). Returns the manifest.
nlohmann::json WriteIndex(const std::vector<DatasetRecord>& records, const std::filesystem::path& root,
                          const nlohmann::json& extra = nlohmann::json::object());

// WriteRecordFiles for every record followed by WriteIndex.
nlohmann::json WriteDataset(const std::vector<DatasetRecord>& records, const std::filesystem::path& root,
                            const nlohmann::json& extra = nlohmann::json::object());

// Serializes JSON deterministically with a trailing newline.
std::string DumpJson(const nlohmann::json& j);

}  // namespace pbrsynth::annotate
