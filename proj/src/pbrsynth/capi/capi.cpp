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

#include "pbrsynth/pbrsynth.h"

#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "pbrsynth/common/error.hpp"
#include "pbrsynth/evalmap/evalmap.hpp"
#include "pbrsynth/pipeline/config.hpp"
#include "pbrsynth/pipeline/pipeline.hpp"

struct pbrs_config {
  pbrsynth::pipeline::PipelineConfig config;
  std::string output;
  pbrs_log_fn log_fn = nullptr;
  void* log_user = nullptr;

  pbrsynth::pipeline::Log MakeLog() const {
    if (!log_fn) return {};
    pbrs_log_fn fn = log_fn;
    void* user = log_user;
    return [fn, user](const std::string& line) { fn(line.c_str(), user); };
  }
};

struct pbrs_summary {
  pbrsynth::pipeline::RunSummary summary;
  std::string json;
};

struct pbrs_eval_report {
  pbrsynth::evalmap::EvalReport report;
  std::string json;
  std::string table;
};

namespace {

using pbrsynth::Error;
using pbrsynth::ErrorCode;

thread_local std::string g_last_error;

pbrs_status SetError(pbrs_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
pbrs_status Guard(F&& body) {
  try {
    body();
    return PBRS_OK;
  } catch (const Error& e) {
    return SetError(static_cast<pbrs_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return SetError(PBRS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return SetError(PBRS_ERR_INTERNAL, e.what());
  }
}

void Require(bool ok, const char* what) {
  if (!ok) pbrsynth::Fail(ErrorCode::kInvalidArgument, what);
}

pbrs_summary* MakeSummary(pbrsynth::pipeline::RunSummary s) {
  auto* out = new pbrs_summary{std::move(s), {}};
  out->json = out->summary.ToJson().dump(2);
  return out;
}

pbrs_summary* MakeSummary(pbrsynth::pipeline::StageStats stats) {
  pbrsynth::pipeline::RunSummary s;
  s.stages.push_back(std::move(stats));
  return MakeSummary(std::move(s));
}

pbrsynth::pipeline::ArrangementSet LoadArrangements(const char* path) {
  Require(path != nullptr, "arrangements path is NULL");
  return pbrsynth::pipeline::ArrangementSetFromJson(pbrsynth::pipeline::ReadJsonFile(path));
}

pbrsynth::pipeline::CameraSet LoadCameras(const char* path) {
  Require(path != nullptr, "cameras path is NULL");
  return pbrsynth::pipeline::CameraSetFromJson(pbrsynth::pipeline::ReadJsonFile(path));
}

}  // namespace

extern "C" {

const char* pbrs_version(void) { return "0.1.0"; }

const char* pbrs_status_name(pbrs_status status) {
  if (status == PBRS_OK) return "ok";
  return pbrsynth::ToString(static_cast<ErrorCode>(static_cast<int>(status)));
}

const char* pbrs_last_error(void) { return g_last_error.c_str(); }

pbrs_status pbrs_config_load(const char* path, pbrs_config** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "path and out must not be NULL");
    *out = nullptr;
    auto cfg = std::make_unique<pbrs_config>();
    cfg->config = pbrsynth::pipeline::LoadConfig(path);
    cfg->output = cfg->config.output.string();
    *out = cfg.release();
  });
}

pbrs_status pbrs_config_set_seed(pbrs_config* config, uint64_t seed) {
  return Guard([&] {
    Require(config != nullptr, "config is NULL");
    config->config.seed = seed;
  });
}

pbrs_status pbrs_config_set_jobs(pbrs_config* config, int jobs) {
  return Guard([&] {
    Require(config != nullptr, "config is NULL");
    Require(jobs >= 1, "jobs must be at least 1");
    config->config.jobs = jobs;
  });
}

pbrs_status pbrs_config_set_tier(pbrs_config* config, const char* tier) {
  return Guard([&] {
    Require(config != nullptr && tier != nullptr, "config and tier must not be NULL");
    config->config.tiers = pbrsynth::pipeline::ParseTiers(tier);
  });
}

pbrs_status pbrs_config_set_output(pbrs_config* config, const char* directory) {
  return Guard([&] {
    Require(config != nullptr && directory != nullptr && *directory, "config and directory must be set");
    config->config.output = directory;
    config->output = directory;
  });
}

pbrs_status pbrs_config_set_hdr(pbrs_config* config, int enabled) {
  return Guard([&] {
    Require(config != nullptr, "config is NULL");
    config->config.hdr = enabled != 0;
  });
}

pbrs_status pbrs_config_set_log(pbrs_config* config, pbrs_log_fn fn, void* user_data) {
  return Guard([&] {
    Require(config != nullptr, "config is NULL");
    config->log_fn = fn;
    config->log_user = user_data;
  });
}

pbrs_status pbrs_config_get_output(const pbrs_config* config, const char** directory) {
  return Guard([&] {
    Require(config != nullptr && directory != nullptr, "config and directory must not be NULL");
    *directory = config->output.c_str();
  });
}

pbrs_status pbrs_config_get_seed(const pbrs_config* config, uint64_t* seed) {
  return Guard([&] {
    Require(config != nullptr && seed != nullptr, "config and seed must not be NULL");
    *seed = config->config.seed;
  });
}

void pbrs_config_free(pbrs_config* config) { delete config; }

pbrs_status pbrs_run_pipeline(const pbrs_config* config, pbrs_summary** out) {
  return Guard([&] {
    Require(config != nullptr && out != nullptr, "config and out must not be NULL");
    *out = nullptr;
    *out = MakeSummary(pbrsynth::pipeline::RunPipeline(config->config, config->MakeLog()));
  });
}

pbrs_status pbrs_compose(const pbrs_config* config, const char* arrangements_out, pbrs_summary** out) {
  return Guard([&] {
    Require(config != nullptr && arrangements_out != nullptr && out != nullptr, "arguments must not be NULL");
    *out = nullptr;
    auto result = pbrsynth::pipeline::Compose(config->config, config->MakeLog());
    pbrsynth::pipeline::WriteJsonFile(arrangements_out, pbrsynth::pipeline::ToJson(result.arrangements));
    *out = MakeSummary(std::move(result.stats));
  });
}

pbrs_status pbrs_sample_cameras(const pbrs_config* config, const char* arrangements_in, const char* cameras_out,
                                pbrs_summary** out) {
  return Guard([&] {
    Require(config != nullptr && cameras_out != nullptr && out != nullptr, "arguments must not be NULL");
    *out = nullptr;
    auto result = pbrsynth::pipeline::SampleCameras(config->config, LoadArrangements(arrangements_in), config->MakeLog());
    pbrsynth::pipeline::WriteJsonFile(cameras_out, pbrsynth::pipeline::ToJson(result.cameras));
    *out = MakeSummary(std::move(result.stats));
  });
}

pbrs_status pbrs_render(const pbrs_config* config, const char* arrangements_in, const char* cameras_in,
                        const char* dataset_dir, pbrs_summary** out) {
  return Guard([&] {
    Require(config != nullptr && dataset_dir != nullptr && out != nullptr, "arguments must not be NULL");
    *out = nullptr;
    *out = MakeSummary(pbrsynth::pipeline::RenderImages(config->config, LoadArrangements(arrangements_in),
                                                        LoadCameras(cameras_in), dataset_dir, config->MakeLog()));
  });
}

pbrs_status pbrs_annotate(const pbrs_config* config, const char* arrangements_in, const char* cameras_in,
                          const char* dataset_dir, pbrs_summary** out) {
  return Guard([&] {
    Require(config != nullptr && dataset_dir != nullptr && out != nullptr, "arguments must not be NULL");
    *out = nullptr;
    *out = MakeSummary(pbrsynth::pipeline::Annotate(config->config, LoadArrangements(arrangements_in),
                                                    LoadCameras(cameras_in), dataset_dir, config->MakeLog()));
  });
}

pbrs_status pbrs_baseline(const pbrs_config* config, const char* arrangements_in, const char* cameras_in,
                          const char* background_dir, const char* dataset_dir, pbrs_summary** out) {
  return Guard([&] {
    Require(config != nullptr && dataset_dir != nullptr && out != nullptr, "arguments must not be NULL");
    *out = nullptr;
    std::filesystem::path bg;
    if (background_dir != nullptr) {
      bg = background_dir;
    } else if (config->config.background_dir) {
      bg = *config->config.background_dir;
    } else {
      pbrsynth::Fail(ErrorCode::kConfig, "no background directory given or configured");
    }
    *out = MakeSummary(pbrsynth::pipeline::Baseline(config->config, LoadArrangements(arrangements_in),
                                                    LoadCameras(cameras_in), bg, dataset_dir, config->MakeLog()));
  });
}

pbrs_status pbrs_summary_counts(const pbrs_summary* summary, int64_t* total, int64_t* succeeded, int64_t* failed,
                                int64_t* skipped) {
  return Guard([&] {
    Require(summary != nullptr, "summary is NULL");
    int64_t t = 0, s = 0, f = 0, k = 0;
    for (const auto& st : summary->summary.stages) {
      t += st.total;
      s += st.succeeded;
      f += st.failed;
      k += st.skipped;
    }
    if (total) *total = t;
    if (succeeded) *succeeded = s;
    if (failed) *failed = f;
    if (skipped) *skipped = k;
  });
}

const char* pbrs_summary_json(const pbrs_summary* summary) { return summary ? summary->json.c_str() : ""; }

void pbrs_summary_free(pbrs_summary* summary) { delete summary; }

pbrs_status pbrs_evaluate(const char* detections_path, const char* ground_truth_path, double iou_threshold,
                          int max_dets, pbrs_eval_report** out) {
  return Guard([&] {
    Require(detections_path != nullptr && ground_truth_path != nullptr && out != nullptr, "arguments must not be NULL");
    *out = nullptr;
    pbrsynth::evalmap::EvalOptions options;
    options.iou_threshold = iou_threshold;
    if (max_dets > 0) options.max_dets = max_dets;
    const auto dets = pbrsynth::evalmap::ReadDetections(detections_path);
    const auto gts = pbrsynth::evalmap::ReadGroundTruth(ground_truth_path);
    auto r = std::make_unique<pbrs_eval_report>();
    r->report = pbrsynth::evalmap::MapAt075(dets, gts, options);
    r->json = pbrsynth::evalmap::ToJson(r->report).dump(2);
    r->table = pbrsynth::evalmap::FormatTable(r->report);
    *out = r.release();
  });
}

double pbrs_eval_report_map(const pbrs_eval_report* report) { return report ? report->report.map : 0.0; }

int64_t pbrs_eval_report_unknown_ids(const pbrs_eval_report* report) {
  if (!report) return 0;
  return static_cast<int64_t>(report->report.unknown_image_ids.size() + report->report.unknown_class_ids.size());
}

const char* pbrs_eval_report_json(const pbrs_eval_report* report) { return report ? report->json.c_str() : ""; }
const char* pbrs_eval_report_table(const pbrs_eval_report* report) { return report ? report->table.c_str() : ""; }

void pbrs_eval_report_free(pbrs_eval_report* report) { delete report; }

}  // extern "C"
