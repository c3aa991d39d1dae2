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
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace pbrsynth::evalmap {

// Continuous box geometry: (x, y) top-left corner, width and height.
struct Box {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
};

struct Detection {
  int64_t image_id = 0;
  int class_id = 0;
  Box bbox;
  double score = 0.0;
};

struct GroundTruth {
  int64_t image_id = 0;
  int class_id = 0;
  Box bbox;
};

struct GroundTruthSet {
  std::vector<GroundTruth> boxes;
  // Every evaluated image, including images without annotated objects.
  std::set<int64_t> images;
};

// Intersection over union; 0 when the union is empty.
double Iou(const Box& a, const Box& b);

// Greedy matching within one (image, class) group. Detections are visited by
// descending score, ties by ascending input index; each takes the unmatched
// ground truth of highest IoU (ties by ascending ground-truth index) when
// that IoU reaches `threshold`. Returns true positive flags in input order.
std::vector<bool> MatchDetections(std::span<const Detection> dets, std::span<const GroundTruth> gts,
                                  double threshold = 0.75);

// 101-point interpolated AP over labels already sorted by confidence.
// Recall point r uses the highest precision at any recall >= r. Returns 0
// when n_gt is 0.
double AveragePrecision(const std::vector<bool>& labels, int64_t n_gt);

struct EvalOptions {
  double iou_threshold = 0.75;
  // Per-image, per-class cap on detections kept by score. Off by default.
  std::optional<int> max_dets;
};

struct ClassResult {
  double ap = 0.0;
  int64_t num_gt = 0;
  int64_t num_dets = 0;  // after filtering
  int64_t num_tp = 0;
};

struct EvalReport {
  double iou_threshold = 0.75;
  std::optional<int> max_dets;
  std::map<int, ClassResult> per_class;  // classes with at least one ground truth
  double map = 0.0;
  int64_t num_detections = 0;
  int64_t discarded_detections = 0;  // class not annotated in its image, or capped
  std::set<int64_t> unknown_image_ids;
  std::set<int> unknown_class_ids;
};

// Detections of classes not annotated in their image are discarded, AP is
// computed per class over all images and mAP is the unweighted mean over
// classes with ground truth. Detections on unknown images or of unknown
// classes are discarded and reported. Throws Error(kInvalidArgument) for
// non-positive box sizes or scores outside [0, 1].
EvalReport MapAt075(std::span<const Detection> dets, const GroundTruthSet& gts, const EvalOptions& options = {});

// JSON lines of {image_id, class_id, bbox: [x, y, w, h], score}. Blank lines
// are skipped. Throws Error(kParse) naming the line.
std::vector<Detection> ParseDetectionsJsonl(const std::string& text);
std::vector<Detection> ReadDetections(const std::filesystem::path& path);

// Either an annotations.json dataset index or JSON lines of
// {image_id, class_id, bbox}. Dataset instances map obj_id to class id.
GroundTruthSet ParseGroundTruth(const std::string& text);
GroundTruthSet ReadGroundTruth(const std::filesystem::path& path);

nlohmann::json ToJson(const EvalReport& report);
std::string FormatTable(const EvalReport& report);

}  // namespace pbrsynth::evalmap
