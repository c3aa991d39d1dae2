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

#include "pbrsynth/evalmap/evalmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <tuple>

#include "pbrsynth/common/error.hpp"
#include "pbrsynth/common/fileio.hpp"

namespace pbrsynth::evalmap {

double Iou(const Box& a, const Box& b) {
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

namespace {

// Indices ordered by descending score, ties by ascending index.
std::vector<std::size_t> ScoreOrder(std::span<const Detection> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
  return order;
}

void ValidateBox(const Box& b, const std::string& what) {
  if (!(b.w > 0.0) || !(b.h > 0.0) || !std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.w) ||
      !std::isfinite(b.h)) {
    Fail(ErrorCode::kInvalidArgument, what + " has a non-positive or non-finite box");
  }
}

}  // namespace

std::vector<bool> MatchDetections(std::span<const Detection> dets, std::span<const GroundTruth> gts,
                                  double threshold) {
  std::vector<bool> tp(dets.size(), false);
  std::vector<bool> taken(gts.size(), false);
  for (std::size_t d : ScoreOrder(dets)) {
    double best = -1.0;
    std::size_t best_g = gts.size();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) continue;
      const double iou = Iou(dets[d].bbox, gts[g].bbox);
      if (iou > best) {
        best = iou;
        best_g = g;
      }
    }
    if (best_g < gts.size() && best >= threshold) {
      taken[best_g] = true;
      tp[d] = true;
    }
  }
  return tp;
}

double AveragePrecision(const std::vector<bool>& labels, int64_t n_gt) {
  if (n_gt <= 0) return 0.0;
  const std::size_t n = labels.size();
  std::vector<int64_t> tp_cum(n);
  std::vector<double> precision(n);
  int64_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    tp += labels[i] ? 1 : 0;
    tp_cum[i] = tp;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }
  // Precision envelope from the right.
  for (std::size_t i = n; i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);
  double sum = 0.0;
  std::size_t k = 0;
  for (int64_t r = 0; r <= 100; ++r) {
    // First rank whose recall tp / n_gt reaches r / 100, in exact integers.
    while (k < n && tp_cum[k] * 100 < r * n_gt) ++k;
    if (k == n) break;
    sum += precision[k];
  }
  return sum / 101.0;
}

EvalReport MapAt075(std::span<const Detection> dets, const GroundTruthSet& gts, const EvalOptions& options) {
  if (!(options.iou_threshold > 0.0 && options.iou_threshold <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "IoU threshold must lie in (0, 1]");
  }
  if (options.max_dets && *options.max_dets < 1) Fail(ErrorCode::kInvalidArgument, "max_dets must be positive");
  EvalReport report;
  report.iou_threshold = options.iou_threshold;
  report.max_dets = options.max_dets;
  report.num_detections = static_cast<int64_t>(dets.size());

  using Key = std::pair<int, int64_t>;  // (class, image)
  std::map<Key, std::vector<GroundTruth>> gt_groups;
  std::set<int> classes;
  for (std::size_t i = 0; i < gts.boxes.size(); ++i) {
    const GroundTruth& g = gts.boxes[i];
    ValidateBox(g.bbox, "ground truth " + std::to_string(i));
    gt_groups[{g.class_id, g.image_id}].push_back(g);
    classes.insert(g.class_id);
  }
  std::set<int64_t> images = gts.images;
  for (const GroundTruth& g : gts.boxes) images.insert(g.image_id);

  // Detections kept per group, in input order with their global index.
  std::map<Key, std::vector<std::size_t>> det_groups;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const Detection& d = dets[i];
    ValidateBox(d.bbox, "detection " + std::to_string(i));
    if (!(d.score >= 0.0 && d.score <= 1.0)) {
      Fail(ErrorCode::kInvalidArgument, "detection " + std::to_string(i) + " has a score outside [0, 1]");
    }
    bool known = true;
    if (!images.count(d.image_id)) {
      report.unknown_image_ids.insert(d.image_id);
      known = false;
    }
    if (!classes.count(d.class_id)) {
      report.unknown_class_ids.insert(d.class_id);
      known = false;
    }
    if (!known || !gt_groups.count({d.class_id, d.image_id})) {
      ++report.discarded_detections;
      continue;
    }
    det_groups[{d.class_id, d.image_id}].push_back(i);
  }

  // Per class: (score, global index, label) of every kept detection.
  std::map<int, std::vector<std::tuple<double, std::size_t, bool>>> ranked;
  for (auto& [key, idx] : det_groups) {
    std::vector<Detection> group;
    for (std::size_t i : idx) group.push_back(dets[i]);
    if (options.max_dets && static_cast<int>(group.size()) > *options.max_dets) {
      const std::vector<std::size_t> order = ScoreOrder(group);
      std::vector<std::size_t> keep(order.begin(), order.begin() + *options.max_dets);
      std::sort(keep.begin(), keep.end());
      std::vector<Detection> capped;
      std::vector<std::size_t> capped_idx;
      for (std::size_t k : keep) {
        capped.push_back(group[k]);
        capped_idx.push_back(idx[k]);
      }
      report.discarded_detections += static_cast<int64_t>(group.size() - capped.size());
      group = std::move(capped);
      idx = std::move(capped_idx);
    }
    const std::vector<bool> tp = MatchDetections(group, gt_groups.at(key), options.iou_threshold);
    for (std::size_t k = 0; k < group.size(); ++k) ranked[key.first].emplace_back(group[k].score, idx[k], tp[k]);
  }

  for (int c : classes) {
    ClassResult r;
    for (const auto& [key, g] : gt_groups) {
      if (key.first == c) r.num_gt += static_cast<int64_t>(g.size());
    }
    auto& list = ranked[c];
    std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
      if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
      return std::get<1>(a) < std::get<1>(b);
    });
    std::vector<bool> labels;
    for (const auto& t : list) labels.push_back(std::get<2>(t));
    r.ap = AveragePrecision(labels, r.num_gt);
    r.num_dets = static_cast<int64_t>(labels.size());
    r.num_tp = std::count(labels.begin(), labels.end(), true);
    report.per_class[c] = r;
  }
  double sum = 0.0;
  for (const auto& [c, r] : report.per_class) sum += r.ap;
  report.map = report.per_class.empty() ? 0.0 : sum / static_cast<double>(report.per_class.size());
  return report;
}

namespace {

Box BoxFromJson(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) Fail(ErrorCode::kParse, "bbox needs 4 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

template <typename F>
void ForEachJsonLine(const std::string& text, F&& f) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      f(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      Fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace

std::vector<Detection> ParseDetectionsJsonl(const std::string& text) {
  std::vector<Detection> out;
  ForEachJsonLine(text, [&](const nlohmann::json& j) {
    out.push_back({j.at("image_id").get<int64_t>(), j.at("class_id").get<int>(), BoxFromJson(j.at("bbox")),
                   j.at("score").get<double>()});
  });
  return out;
}

std::vector<Detection> ReadDetections(const std::filesystem::path& path) {
  try {
    return ParseDetectionsJsonl(ReadFileBytes(path));
  } catch (const Error& e) {
    Fail(e.code(), path.string() + ": " + e.what());
  }
}

GroundTruthSet ParseGroundTruth(const std::string& text) {
  GroundTruthSet out;
  nlohmann::json whole = nlohmann::json::parse(text, nullptr, false);
  if (!whole.is_discarded() && whole.is_object() && whole.contains("images")) {
    try {
      for (const auto& img : whole.at("images")) {
        const int64_t id = img.at("image_id").get<int64_t>();
        out.images.insert(id);
        for (const auto& a : img.at("annotations")) {
          out.boxes.push_back({id, a.at("obj_id").get<int>(), BoxFromJson(a.at("bbox"))});
        }
      }
    } catch (const nlohmann::json::exception& e) {
      Fail(ErrorCode::kParse, std::string("annotations: ") + e.what());
    }
    return out;
  }
  ForEachJsonLine(text, [&](const nlohmann::json& j) {
    out.boxes.push_back({j.at("image_id").get<int64_t>(), j.at("class_id").get<int>(), BoxFromJson(j.at("bbox"))});
    out.images.insert(out.boxes.back().image_id);
  });
  return out;
}

GroundTruthSet ReadGroundTruth(const std::filesystem::path& path) {
  try {
    return ParseGroundTruth(ReadFileBytes(path));
  } catch (const Error& e) {
    Fail(e.code(), path.string() + ": " + e.what());
  }
}

nlohmann::json ToJson(const EvalReport& report) {
  nlohmann::json per_class = nlohmann::json::object();
  nlohmann::json details = nlohmann::json::object();
  for (const auto& [c, r] : report.per_class) {
    per_class[std::to_string(c)] = r.ap;
    details[std::to_string(c)] = {{"ap", r.ap}, {"num_gt", r.num_gt}, {"num_dets", r.num_dets}, {"num_tp", r.num_tp}};
  }
  return {{"iou_threshold", report.iou_threshold},
          {"max_dets", report.max_dets ? nlohmann::json(*report.max_dets) : nlohmann::json(nullptr)},
          {"per_class_ap", per_class},
          {"per_class", details},
          {"map", report.map},
          {"num_detections", report.num_detections},
          {"discarded_detections", report.discarded_detections},
          {"unknown_image_ids", report.unknown_image_ids},
          {"unknown_class_ids", report.unknown_class_ids}};
}

std::string FormatTable(const EvalReport& report) {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%8s %8s %8s %8s %10s\n", "class", "gt", "dets", "tp", "AP");
  out << buf;
  for (const auto& [c, r] : report.per_class) {
    std::snprintf(buf, sizeof(buf), "%8d %8lld %8lld %8lld %10.6f\n", c, static_cast<long long>(r.num_gt),
                  static_cast<long long>(r.num_dets), static_cast<long long>(r.num_tp), r.ap);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "mAP@%.2f = %.10f over %zu classes (%lld detections discarded)\n",
                report.iou_threshold, report.map, report.per_class.size(),
                static_cast<long long>(report.discarded_detections));
  out << buf;
  if (!report.unknown_image_ids.empty() || !report.unknown_class_ids.empty()) {
    out << "warning: " << report.unknown_image_ids.size() << " unknown image ids, "
        << report.unknown_class_ids.size() << " unknown class ids\n";
  }
  return out.str();
}

}  // namespace pbrsynth::evalmap
