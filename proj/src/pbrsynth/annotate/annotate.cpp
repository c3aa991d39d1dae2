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

#include "pbrsynth/annotate/annotate.hpp"

#include <algorithm>
#include <cstdio>

#include "pbrsynth/camsample/camsample.hpp"
#include "pbrsynth/common/error.hpp"
#include "pbrsynth/common/fileio.hpp"

namespace pbrsynth::annotate {

BBox TightBox(const std::vector<uint8_t>& mask, int width, int height) {
  int x0 = width, y0 = height, x1 = -1, y1 = -1;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (!mask[static_cast<std::size_t>(y) * width + x]) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) return {};
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

std::vector<InstanceAnnotation> AnnotateView(const geom::SceneAccel& accel, const geom::IdDepthBuffer& full_scene,
                                             const compose::Arrangement& arrangement, const geom::Camera& camera,
                                             int workers) {
  const int width = camera.width();
  const int height = camera.height();
  if (full_scene.width != width || full_scene.height != height) {
    Fail(ErrorCode::kResolutionMismatch, "full-scene buffer does not match the camera resolution");
  }
  std::vector<const compose::PlacedInstance*> placed;
  for (const compose::PlacedInstance& p : arrangement.instances) placed.push_back(&p);
  std::sort(placed.begin(), placed.end(),
            [](const auto* a, const auto* b) { return a->instance_id < b->instance_id; });

  const Pose camera_from_world = camera.world_from_camera.Inverse();
  std::vector<InstanceAnnotation> out;
  for (const compose::PlacedInstance* p : placed) {
    if (!accel.IndexOf(p->instance_id)) continue;
    InstanceAnnotation a;
    a.instance_id = p->instance_id;
    a.model_id = p->model_id;
    a.mask.assign(static_cast<std::size_t>(width) * height, 0);
    for (std::size_t i = 0; i < a.mask.size(); ++i) {
      if (full_scene.ids[i] == p->instance_id) {
        a.mask[i] = 1;
        ++a.visible_pixels;
      }
    }
    if (a.visible_pixels == 0) continue;
    a.bbox = TightBox(a.mask, width, height);
    a.pose = camera_from_world * p->pose;
    a.visibility_fraction = camsample::VisibilityFraction(accel, full_scene, camera, p->instance_id, workers);
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<InstanceAnnotation> AnnotateView(const geom::SceneAccel& accel, const compose::Arrangement& arrangement,
                                             const geom::Camera& camera, int workers) {
  return AnnotateView(accel, geom::RasterizeIds(accel, camera, std::nullopt, workers), arrangement, camera, workers);
}

namespace {

std::string Pad6(int64_t id) {
  if (id < 0) Fail(ErrorCode::kInvalidArgument, "negative image id " + std::to_string(id));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06lld", static_cast<long long>(id));
  return buf;
}

nlohmann::json InstanceJson(int64_t image_id, const InstanceAnnotation& a) {
  nlohmann::json r = nlohmann::json::array();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) r.push_back(a.pose.rotation(i, j));
  }
  nlohmann::json t = nlohmann::json::array();
  for (int i = 0; i < 3; ++i) t.push_back(a.pose.translation[i] * 1000.0);
  return {{"inst_id", a.instance_id},
          {"obj_id", a.model_id},
          {"cam_R_m2c", r},
          {"cam_t_m2c", t},
          {"bbox", {a.bbox.x, a.bbox.y, a.bbox.w, a.bbox.h}},
          {"visib_fract", a.visibility_fraction},
          {"px_count_visib", a.visible_pixels},
          {"mask_file", MaskFileName(image_id, a.instance_id)}};
}

std::vector<const DatasetRecord*> SortedRecords(const std::vector<DatasetRecord>& records) {
  std::vector<const DatasetRecord*> sorted;
  for (const DatasetRecord& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return a->image_id < b->image_id; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->image_id == sorted[i - 1]->image_id) {
      Fail(ErrorCode::kInvalidArgument, "duplicate image id " + std::to_string(sorted[i]->image_id));
    }
  }
  return sorted;
}

}  // namespace

std::string ImageFileName(int64_t image_id) { return "images/" + Pad6(image_id) + ".png"; }
std::string HdrFileName(int64_t image_id) { return "images/" + Pad6(image_id) + ".pfm"; }
std::string MaskFileName(int64_t image_id, uint32_t instance_id) {
  return "masks/" + Pad6(image_id) + "_" + std::to_string(instance_id) + ".png";
}

void WriteRecordFiles(const DatasetRecord& record, const std::filesystem::path& root) {
  const int width = record.camera.width();
  const int height = record.camera.height();
  if (record.image.width > 0) {
    if (record.image.width != width || record.image.height != height) {
      Fail(ErrorCode::kResolutionMismatch, "image " + std::to_string(record.image_id) + " does not match its camera");
    }
    WriteFileAtomic(root / ImageFileName(record.image_id), render::EncodePng(record.image));
  }
  if (record.hdr) WriteFileAtomic(root / HdrFileName(record.image_id), render::EncodePfm(*record.hdr));
  for (const InstanceAnnotation& a : record.instances) {
    render::LdrImage mask(width, height, 1);
    if (a.mask.size() != mask.data.size()) {
      Fail(ErrorCode::kResolutionMismatch, "mask of instance " + std::to_string(a.instance_id) + " has the wrong size");
    }
    for (std::size_t i = 0; i < a.mask.size(); ++i) mask.data[i] = a.mask[i] ? 255 : 0;
    WriteFileAtomic(root / MaskFileName(record.image_id, a.instance_id), render::EncodePng(mask));
  }
}

nlohmann::json AnnotationsJson(const std::vector<DatasetRecord>& records) {
  nlohmann::json images = nlohmann::json::array();
  for (const DatasetRecord* rec : SortedRecords(records)) {
    nlohmann::json anns = nlohmann::json::array();
    for (const InstanceAnnotation& a : rec->instances) anns.push_back(InstanceJson(rec->image_id, a));
    nlohmann::json img = {{"image_id", rec->image_id},
                          {"file", ImageFileName(rec->image_id)},
                          {"intrinsics", camsample::ToJson(rec->camera.intrinsics)},
                          {"world_from_camera", compose::ToJson(rec->camera.world_from_camera)},
                          {"provenance",
                           {{"seed", rec->provenance.seed},
                            {"arrangement", rec->provenance.arrangement},
                            {"camera", rec->provenance.camera},
                            {"tier", rec->provenance.tier}}},
                          {"annotations", anns}};
    if (rec->hdr || rec->has_hdr_file) img["hdr_file"] = HdrFileName(rec->image_id);
    images.push_back(std::move(img));
  }
  return {{"camera_frame", "x right, y up, looking down -z"},
          {"translation_unit", "mm"},
          {"images", images}};
}

std::string DumpJson(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json WriteIndex(const std::vector<DatasetRecord>& records, const std::filesystem::path& root,
                          const nlohmann::json& extra) {
  WriteFileAtomic(root / "annotations.json", DumpJson(AnnotationsJson(records)));
  nlohmann::json entries = nlohmann::json::array();
  int64_t num_masks = 0;
  for (const DatasetRecord* rec : SortedRecords(records)) {
    nlohmann::json masks = nlohmann::json::array();
    for (const InstanceAnnotation& a : rec->instances) masks.push_back(MaskFileName(rec->image_id, a.instance_id));
    num_masks += static_cast<int64_t>(rec->instances.size());
    nlohmann::json e = {{"image_id", rec->image_id}, {"image", ImageFileName(rec->image_id)}, {"masks", masks}};
    if (rec->hdr || rec->has_hdr_file) e["hdr"] = HdrFileName(rec->image_id);
    entries.push_back(std::move(e));
  }
  nlohmann::json manifest = {{"format", "pbrsynth-dataset"},
                             {"version", 1},
                             {"annotations", "annotations.json"},
                             {"num_images", static_cast<int64_t>(records.size())},
                             {"num_masks", num_masks},
                             {"records", entries}};
  if (!extra.is_object()) Fail(ErrorCode::kInvalidArgument, "manifest extras must be a JSON object");
  for (auto it = extra.begin(); it != extra.end(); ++it) manifest[it.key()] = it.value();
  WriteFileAtomic(root / "manifest.json", DumpJson(manifest));
  return manifest;
}

nlohmann::json WriteDataset(const std::vector<DatasetRecord>& records, const std::filesystem::path& root,
                            const nlohmann::json& extra) {
  for (const DatasetRecord& r : records) WriteRecordFiles(r, root);
  return WriteIndex(records, root, extra);
}

}  // namespace pbrsynth::annotate
