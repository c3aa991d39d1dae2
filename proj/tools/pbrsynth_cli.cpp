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

// Command line front end. Links only the C interface of libpbrsynth.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pbrsynth/pbrsynth.h"

namespace {

struct Options {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> tier;
  std::string out;
  bool hdr = false;
  bool quiet = false;
  std::string arrangements;
  std::string cameras;
  std::string backgrounds;
  std::string detections;
  std::string ground_truth;
  std::string report;
  double iou = 0.75;
  int max_dets = 0;
};

void PrintLine(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

int Report(pbrs_status status, const char* what) {
  if (status == PBRS_OK) return 0;
  std::fprintf(stderr, "%s failed (%s): %s\n", what, pbrs_status_name(status), pbrs_last_error());
  return 2;
}

// Owns a config handle with the command line overrides applied.
class Config {
 public:
  ~Config() { pbrs_config_free(config_); }
  pbrs_status Load(const Options& o) {
    if (o.config.empty()) {
      std::fprintf(stderr, "--config is required for this command\n");
      return PBRS_ERR_INVALID_ARGUMENT;
    }
    pbrs_status s = pbrs_config_load(o.config.c_str(), &config_);
    if (s == PBRS_OK && o.seed) s = pbrs_config_set_seed(config_, *o.seed);
    if (s == PBRS_OK && o.jobs) s = pbrs_config_set_jobs(config_, *o.jobs);
    if (s == PBRS_OK && o.tier) s = pbrs_config_set_tier(config_, o.tier->c_str());
    if (s == PBRS_OK && !o.out.empty()) s = pbrs_config_set_output(config_, o.out.c_str());
    if (s == PBRS_OK && o.hdr) s = pbrs_config_set_hdr(config_, 1);
    if (s == PBRS_OK && !o.quiet) s = pbrs_config_set_log(config_, PrintLine, nullptr);
    return s;
  }
  pbrs_config* get() const { return config_; }
  std::string Output() const {
    const char* dir = "";
    pbrs_config_get_output(config_, &dir);
    return dir;
  }

 private:
  pbrs_config* config_ = nullptr;
};

// Prints the summary and maps unit failures to the exit code.
int Finish(pbrs_summary* summary) {
  int64_t total = 0, ok = 0, failed = 0, skipped = 0;
  pbrs_summary_counts(summary, &total, &ok, &failed, &skipped);
  std::printf("%s\n", pbrs_summary_json(summary));
  std::fprintf(stderr, "units: %lld total, %lld succeeded, %lld failed, %lld skipped\n",
               static_cast<long long>(total), static_cast<long long>(ok), static_cast<long long>(failed),
               static_cast<long long>(skipped));
  pbrs_summary_free(summary);
  return failed == 0 ? 0 : 1;
}

std::string OrDefault(const std::string& value, const std::string& dir, const char* name) {
  return value.empty() ? (std::filesystem::path(dir) / name).string() : value;
}

int RunStage(const std::string& name, const Options& o) {
  Config cfg;
  if (int rc = Report(cfg.Load(o), "loading the config")) return rc;
  const std::string out = cfg.Output();
  const std::string arr = OrDefault(o.arrangements, out, "arrangements.json");
  const std::string cams = OrDefault(o.cameras, out, "cameras.json");
  pbrs_summary* summary = nullptr;
  pbrs_status s = PBRS_OK;
  if (name == "run") {
    s = pbrs_run_pipeline(cfg.get(), &summary);
  } else if (name == "compose") {
    s = pbrs_compose(cfg.get(), arr.c_str(), &summary);
  } else if (name == "sample-cameras") {
    s = pbrs_sample_cameras(cfg.get(), arr.c_str(), cams.c_str(), &summary);
  } else if (name == "render") {
    s = pbrs_render(cfg.get(), arr.c_str(), cams.c_str(), out.c_str(), &summary);
  } else if (name == "annotate") {
    s = pbrs_annotate(cfg.get(), arr.c_str(), cams.c_str(), out.c_str(), &summary);
  } else if (name == "baseline") {
    s = pbrs_baseline(cfg.get(), arr.c_str(), cams.c_str(), o.backgrounds.empty() ? nullptr : o.backgrounds.c_str(),
                      out.c_str(), &summary);
  }
  if (int rc = Report(s, name.c_str())) return rc;
  return Finish(summary);
}

int RunEvaluate(const Options& o) {
  pbrs_eval_report* report = nullptr;
  if (int rc = Report(pbrs_evaluate(o.detections.c_str(), o.ground_truth.c_str(), o.iou, o.max_dets, &report),
                      "evaluate")) {
    return rc;
  }
  std::printf("%s", pbrs_eval_report_table(report));
  int rc = 0;
  if (!o.report.empty()) {
    std::ofstream f(o.report, std::ios::binary);
    f << pbrs_eval_report_json(report) << "\n";
    if (!f) {
      std::fprintf(stderr, "cannot write %s\n", o.report.c_str());
      rc = 2;
    }
  }
  pbrs_eval_report_free(report);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pbrsynth: physically based synthetic training data for object detection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pbrs_version());
  Options o;

  auto add_common = [&](CLI::App* sub, bool with_inputs) {
    sub->add_option("--config", o.config, "Pipeline config (JSON)");
    sub->add_option("--seed", o.seed, "Master seed, overrides the config");
    sub->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--tier", o.tier, "Quality tier")->check(CLI::IsMember({"low", "medium", "high", "all"}));
    sub->add_option("--out", o.out, "Output directory, overrides the config");
    sub->add_flag("--hdr", o.hdr, "Also write linear HDR images as portable float maps");
    sub->add_flag("-q,--quiet", o.quiet, "Suppress progress output");
    if (with_inputs) {
      sub->add_option("--arrangements", o.arrangements, "Arrangements file (default <out>/arrangements.json)");
      sub->add_option("--cameras", o.cameras, "Cameras file (default <out>/cameras.json)");
    }
  };

  std::string chosen;
  struct Entry {
    const char* name;
    const char* help;
    bool inputs;
  };
  const Entry stages[] = {
      {"run", "Full pipeline: compose, sample cameras, render, annotate", false},
      {"compose", "Initialize and settle arrangements into <out>/arrangements.json", true},
      {"sample-cameras", "Sample gated cameras into <out>/cameras.json", true},
      {"render", "Render images for every accepted camera", true},
      {"annotate", "Write masks, annotations.json and manifest.json", true},
      {"baseline", "Composite object renders over background photographs", true},
  };
  for (const Entry& e : stages) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, e.inputs);
    if (std::string(e.name) == "baseline") {
      sub->add_option("--backgrounds", o.backgrounds, "Directory of PNG/JPEG backgrounds (default from config)");
    }
    sub->callback([&chosen, name = std::string(e.name)] { chosen = name; });
  }
  CLI::App* eval = app.add_subcommand("evaluate", "mAP of detections against ground truth");
  eval->add_option("--detections", o.detections, "Detections, JSON lines")->required();
  eval->add_option("--ground-truth", o.ground_truth, "annotations.json or JSON lines")->required();
  eval->add_option("--iou", o.iou, "IoU threshold")->check(CLI::Range(0.0, 1.0));
  eval->add_option("--max-dets", o.max_dets, "Per-image, per-class detection cap (0 disables)")->check(CLI::NonNegativeNumber);
  eval->add_option("--report", o.report, "Write the JSON report here");
  eval->callback([&chosen] { chosen = "evaluate"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors share the exit code of API errors so scripts see one failure value.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (chosen == "evaluate") return RunEvaluate(o);
  return RunStage(chosen, o);
}
