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
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "pbrsynth/common/error.hpp"
#include "pbrsynth/common/fileio.hpp"
#include "pbrsynth/common/random.hpp"
#include "pbrsynth/evalmap/evalmap.hpp"

namespace pbrsynth::evalmap {
namespace {

const std::filesystem::path kFixture = std::filesystem::path(PBRSYNTH_TEST_DATA) / "eval_fixture";

Detection Det(int64_t image, int cls, Box b, double score) { return {image, cls, b, score}; }
GroundTruth Gt(int64_t image, int cls, Box b) { return {image, cls, b}; }

// Independent implementations used as oracles: selection by repeated argmax
// and IoU from clipped corner coordinates.
double OracleIou(const Box& a, const Box& b) {
  const double x0 = std::max(a.x, b.x), y0 = std::max(a.y, b.y);
  const double x1 = std::min(a.x + a.w, b.x + b.w), y1 = std::min(a.y + a.h, b.y + b.h);
  const double inter = (x1 > x0 && y1 > y0) ? (x1 - x0) * (y1 - y0) : 0.0;
  return inter / (a.w * a.h + b.w * b.h - inter);
}

std::vector<bool> OracleMatch(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts, double thr) {
  std::vector<bool> used_det(dets.size(), false), used_gt(gts.size(), false), tp(dets.size(), false);
  for (std::size_t step = 0; step < dets.size(); ++step) {
    std::size_t d = dets.size();
    for (std::size_t i = 0; i < dets.size(); ++i) {
      if (!used_det[i] && (d == dets.size() || dets[i].score > dets[d].score)) d = i;
    }
    used_det[d] = true;
    std::size_t g = gts.size();
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (used_gt[j]) continue;
      if (g == gts.size() || OracleIou(dets[d].bbox, gts[j].bbox) > OracleIou(dets[d].bbox, gts[g].bbox)) g = j;
    }
    if (g < gts.size() && OracleIou(dets[d].bbox, gts[g].bbox) >= thr) {
      used_gt[g] = true;
      tp[d] = true;
    }
  }
  return tp;
}

// Direct reading of the 101-point rule with floating recall values.
double OracleAp(const std::vector<bool>& labels, int n_gt) {
  std::vector<double> rec, prec;
  int tp = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    tp += labels[i];
    rec.push_back(static_cast<double>(tp) / n_gt);
    prec.push_back(static_cast<double>(tp) / (i + 1));
  }
  double sum = 0.0;
  for (int k = 0; k <= 100; ++k) {
    double best = 0.0;
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (rec[i] >= k / 100.0 - 1e-12) best = std::max(best, prec[i]);
    }
    sum += best;
  }
  return sum / 101.0;
}

TEST(IouTest, Examples) {
  EXPECT_DOUBLE_EQ(Iou({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
  EXPECT_DOUBLE_EQ(Iou({0, 0, 10, 10}, {20, 0, 10, 10}), 0.0);
  EXPECT_DOUBLE_EQ(Iou({0, 0, 10, 10}, {10, 0, 10, 10}), 0.0);
  EXPECT_NEAR(Iou({0, 0, 10, 10}, {5, 0, 10, 10}), 50.0 / 150.0, 1e-15);
}

TEST(MatchTest, SingleTruePositive) {
  // IoU 0.8: 10x10 ground truth inside a box of area 125.
  std::vector<Detection> d = {Det(0, 1, {0, 0, 12.5, 10}, 0.9)};
  std::vector<GroundTruth> g = {Gt(0, 1, {0, 0, 10, 10})};
  EXPECT_NEAR(Iou(d[0].bbox, g[0].bbox), 0.8, 1e-12);
  EXPECT_EQ(MatchDetections(d, g), std::vector<bool>{true});
}

TEST(MatchTest, SecondDetectionOfSameTruthIsFalsePositive) {
  std::vector<Detection> d = {Det(0, 1, {0, 0, 10, 10}, 0.5), Det(0, 1, {0.5, 0, 10, 10}, 0.9)};
  std::vector<GroundTruth> g = {Gt(0, 1, {0, 0, 10, 10})};
  EXPECT_EQ(MatchDetections(d, g), (std::vector<bool>{false, true}));
}

TEST(MatchTest, ThresholdIsInclusive) {
  std::vector<Detection> d = {Det(0, 1, {0, 0, 10, 10}, 0.9)};
  std::vector<GroundTruth> g = {Gt(0, 1, {0, 0, 10, 7.5})};
  EXPECT_DOUBLE_EQ(Iou(d[0].bbox, g[0].bbox), 0.75);
  EXPECT_EQ(MatchDetections(d, g, 0.75), std::vector<bool>{true});
}

TEST(MatchTest, EqualsOracleOnAllSmallGroupSizes) {
  Rng rng(2024);
  int checked = 0;
  for (int nd = 0; nd <= 6; ++nd) {
    for (int ng = 0; ng <= 4; ++ng) {
      for (int trial = 0; trial < 300; ++trial) {
        // Coarse grids and few score levels make IoU and score ties common.
        std::vector<Detection> d;
        std::vector<GroundTruth> g;
        for (int i = 0; i < ng; ++i) {
          g.push_back(Gt(0, 1, {double(rng.UniformInt(4)), double(rng.UniformInt(4)), 4.0 + rng.UniformInt(3),
                                4.0 + rng.UniformInt(3)}));
        }
        for (int i = 0; i < nd; ++i) {
          d.push_back(Det(0, 1, {double(rng.UniformInt(4)), double(rng.UniformInt(4)), 4.0 + rng.UniformInt(3),
                                 4.0 + rng.UniformInt(3)},
                          0.25 * rng.UniformInt(4)));
        }
        const double thr = trial % 2 ? 0.75 : 0.5;
        ASSERT_EQ(MatchDetections(d, g, thr), OracleMatch(d, g, thr)) << nd << "x" << ng << " trial " << trial;
        ++checked;
      }
    }
  }
  EXPECT_EQ(checked, 7 * 5 * 300);
}

TEST(ApTest, Examples) {
  EXPECT_DOUBLE_EQ(AveragePrecision({true}, 1), 1.0);
  EXPECT_NEAR(AveragePrecision({true, false, true}, 2), (51.0 + 50.0 * 2.0 / 3.0) / 101.0, 1e-12);
  EXPECT_NEAR(AveragePrecision({true, false, true}, 2), 0.8350, 5e-5);
  EXPECT_DOUBLE_EQ(AveragePrecision({false, false, false}, 3), 0.0);
  EXPECT_DOUBLE_EQ(AveragePrecision({}, 2), 0.0);
  EXPECT_DOUBLE_EQ(AveragePrecision({true}, 0), 0.0);
  // Half the ground truth found at full precision: points 0 to 0.50.
  EXPECT_NEAR(AveragePrecision({true}, 2), 51.0 / 101.0, 1e-15);
}

TEST(ApTest, MatchesOracleMonotoneAndRange) {
  Rng rng(5);
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = static_cast<int>(rng.UniformInt(10));
    std::vector<bool> labels(n);
    int tp = 0;
    for (int i = 0; i < n; ++i) tp += (labels[i] = rng.Uniform() < 0.5);
    const int n_gt = std::max(tp, 1) + static_cast<int>(rng.UniformInt(3));
    const double ap = AveragePrecision(labels, n_gt);
    ASSERT_NEAR(ap, OracleAp(labels, n_gt), 1e-12);
    ASSERT_GE(ap, 0.0);
    ASSERT_LE(ap, 1.0);
    // AP is 1 exactly when every ground truth is found before any FP.
    int leading = 0;
    while (leading < n && labels[leading]) ++leading;
    ASSERT_EQ(ap == 1.0, leading >= n_gt);
    for (int i = 0; i < n; ++i) {
      if (labels[i]) continue;
      std::vector<bool> flipped = labels;
      flipped[i] = true;
      if (tp + 1 > n_gt) continue;
      ASSERT_GE(AveragePrecision(flipped, n_gt), ap - 1e-15);
    }
  }
}

TEST(MapTest, PerfectDetector) {
  GroundTruthSet gts;
  std::vector<Detection> dets;
  for (int i = 0; i < 5; ++i) {
    gts.boxes.push_back(Gt(i, 7, {10.0 * i, 5, 20, 30}));
    dets.push_back(Det(i, 7, {10.0 * i, 5, 20, 30}, 0.5));
  }
  EvalReport r = MapAt075(dets, gts);
  EXPECT_DOUBLE_EQ(r.map, 1.0);
  EXPECT_EQ(r.per_class.size(), 1u);
}

TEST(MapTest, AbsentClassDetectionsAreDiscarded) {
  GroundTruthSet gts;
  gts.boxes = {Gt(0, 1, {0, 0, 10, 10}), Gt(1, 2, {0, 0, 10, 10})};
  std::vector<Detection> base = {Det(0, 1, {0, 0, 10, 10}, 0.5), Det(1, 2, {5, 0, 10, 10}, 0.4)};
  const EvalReport before = MapAt075(base, gts);
  std::vector<Detection> extra = base;
  extra.push_back(Det(0, 2, {0, 0, 10, 10}, 0.99));  // class 2 is not in image 0
  extra.push_back(Det(1, 1, {0, 0, 10, 10}, 0.99));  // class 1 is not in image 1
  const EvalReport after = MapAt075(extra, gts);
  EXPECT_DOUBLE_EQ(after.map, before.map);
  EXPECT_DOUBLE_EQ(after.map, 0.5);
  EXPECT_EQ(after.discarded_detections, 2);
  EXPECT_TRUE(after.unknown_image_ids.empty());
}

TEST(MapTest, UnknownIdsAreReported) {
  GroundTruthSet gts;
  gts.boxes = {Gt(0, 1, {0, 0, 10, 10})};
  gts.images = {0, 1};
  std::vector<Detection> d = {Det(9, 1, {0, 0, 1, 1}, 0.3), Det(0, 4, {0, 0, 1, 1}, 0.3), Det(1, 1, {0, 0, 1, 1}, 0.3)};
  EvalReport r = MapAt075(d, gts);
  EXPECT_EQ(r.unknown_image_ids, std::set<int64_t>{9});
  EXPECT_EQ(r.unknown_class_ids, std::set<int>{4});
  EXPECT_EQ(r.discarded_detections, 3);
  EXPECT_DOUBLE_EQ(r.map, 0.0);
}

TEST(MapTest, InvalidInputsThrow) {
  GroundTruthSet gts;
  gts.boxes = {Gt(0, 1, {0, 0, 10, 10})};
  EXPECT_THROW(MapAt075(std::vector<Detection>{Det(0, 1, {0, 0, 0, 10}, 0.5)}, gts), Error);
  EXPECT_THROW(MapAt075(std::vector<Detection>{Det(0, 1, {0, 0, 1, 10}, 1.5)}, gts), Error);
  gts.boxes.push_back(Gt(0, 1, {0, 0, 10, -1}));
  EXPECT_THROW(MapAt075(std::vector<Detection>{}, gts), Error);
}

TEST(MapTest, FixtureMatchesHandDerivedValue) {
  const GroundTruthSet gts = ReadGroundTruth(kFixture / "ground_truth.jsonl");
  const std::vector<Detection> dets = ReadDetections(kFixture / "detections.jsonl");
  ASSERT_EQ(gts.images.size(), 5u);
  ASSERT_EQ(dets.size(), 20u);
  const nlohmann::json expected = nlohmann::json::parse(ReadFileBytes(kFixture / "expected.json"));
  auto frac = [](const nlohmann::json& f) { return f[0].get<double>() / f[1].get<double>(); };
  const EvalReport r = MapAt075(dets, gts);
  EXPECT_NEAR(r.map, frac(expected["map"]), 1e-9);
  EXPECT_NEAR(r.map, 17051.0 / 25452.0, 1e-9);
  ASSERT_EQ(r.per_class.size(), 3u);
  for (const auto& [c, res] : r.per_class) {
    EXPECT_NEAR(res.ap, frac(expected["per_class_ap"][std::to_string(c)]), 1e-9) << "class " << c;
  }
  EXPECT_EQ(r.discarded_detections, expected["discarded_detections"].get<int64_t>());

  // The cap is off by default; a generous cap changes nothing, a cap of one
  // per image and class keeps only each group's top detection.
  EvalOptions capped;
  capped.max_dets = 100;
  EXPECT_DOUBLE_EQ(MapAt075(dets, gts, capped).map, r.map);
  capped.max_dets = 1;
  const EvalReport one = MapAt075(dets, gts, capped);
  EXPECT_GT(one.discarded_detections, r.discarded_detections);
}

TEST(MapTest, PermutationSafety) {
  const GroundTruthSet gts = ReadGroundTruth(kFixture / "ground_truth.jsonl");
  std::vector<Detection> dets = ReadDetections(kFixture / "detections.jsonl");
  // Make confidences distinct so the order of the input is irrelevant.
  for (std::size_t i = 0; i < dets.size(); ++i) dets[i].score = std::min(1.0, dets[i].score + 1e-6 * i);
  const nlohmann::json ref = ToJson(MapAt075(dets, gts));
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    for (std::size_t i = dets.size() - 1; i > 0; --i) std::swap(dets[i], dets[rng.UniformInt(i + 1)]);
    EXPECT_EQ(ToJson(MapAt075(dets, gts)), ref);
  }
}

TEST(ParseTest, DatasetAnnotationsAsGroundTruth) {
  const std::string text = R"({"images": [
    {"image_id": 3, "annotations": [{"obj_id": 2, "bbox": [1, 2, 3, 4]}]},
    {"image_id": 5, "annotations": []}]})";
  const GroundTruthSet gts = ParseGroundTruth(text);
  EXPECT_EQ(gts.images, (std::set<int64_t>{3, 5}));
  ASSERT_EQ(gts.boxes.size(), 1u);
  EXPECT_EQ(gts.boxes[0].class_id, 2);
  EXPECT_DOUBLE_EQ(gts.boxes[0].bbox.h, 4.0);
}

TEST(ParseTest, MalformedLineNamesLine) {
  try {
    ParseDetectionsJsonl("{\"image_id\": 0, \"class_id\": 1, \"bbox\": [0,0,1,1], \"score\": 0.5}\n\n{oops}\n");
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(ReportTest, JsonAndTable) {
  const GroundTruthSet gts = ReadGroundTruth(kFixture / "ground_truth.jsonl");
  const EvalReport r = MapAt075(ReadDetections(kFixture / "detections.jsonl"), gts);
  const nlohmann::json j = ToJson(r);
  EXPECT_DOUBLE_EQ(j["map"].get<double>(), r.map);
  EXPECT_TRUE(j["max_dets"].is_null());
  EXPECT_EQ(j["per_class_ap"].size(), 3u);
  EXPECT_NE(FormatTable(r).find("mAP@0.75"), std::string::npos);
}

}  // namespace
}  // namespace pbrsynth::evalmap
