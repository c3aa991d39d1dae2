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

#include "pbrsynth/pipeline/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>

#include "pbrsynth/annotate/annotate.hpp"
#include "pbrsynth/common/error.hpp"
#include "pbrsynth/common/fileio.hpp"
#include "pbrsynth/common/parallel.hpp"
#include "pbrsynth/render/baseline.hpp"
#include "pbrsynth/render/image.hpp"
#include "pbrsynth/render/pathtracer.hpp"

namespace pbrsynth::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

uint64_t SeedTree::Stream(std::string_view stage, std::initializer_list<uint64_t> indices) const {
  uint64_t h = HashKey(master_, {HashLabel(stage)});
  for (uint64_t v : indices) h = HashCombine(h, v);
  return h;
}

json StageStats::ToJson() const {
  json f = json::array();
  for (const auto& u : failures) f.push_back({{"unit", u.unit}, {"message", u.message}});
  return {{"stage", stage}, {"total", total}, {"succeeded", succeeded}, {"failed", failed}, {"skipped", skipped},
          {"failures", f}};
}

int64_t RunSummary::failed_units() const {
  int64_t n = 0;
  for (const auto& s : stages) n += s.failed;
  return n;
}

json RunSummary::ToJson() const {
  json s = json::array();
  for (const auto& st : stages) s.push_back(st.ToJson());
  return {{"stages", s}, {"failed_units", failed_units()}};
}

namespace {

const char* StatusName(SlotStatus s) {
  switch (s) {
    case SlotStatus::kAccepted: return "accepted";
    case SlotStatus::kSkipped: return "skipped";
    case SlotStatus::kFailed: return "failed";
  }
  return "failed";
}

SlotStatus ParseStatus(const std::string& s) {
  if (s == "accepted") return SlotStatus::kAccepted;
  if (s == "skipped") return SlotStatus::kSkipped;
  if (s == "failed") return SlotStatus::kFailed;
  Fail(ErrorCode::kParse, "unknown camera slot status '" + s + "'");
}

// Serializes calls to the user's log from worker threads.
class SafeLog {
 public:
  explicit SafeLog(const Log& log) : log_(log) {}
  void operator()(const std::string& line) const {
    if (!log_) return;
    std::lock_guard<std::mutex> lock(mu_);
    log_(line);
  }

 private:
  const Log& log_;
  mutable std::mutex mu_;
};

std::string UnitName(int a, int c = -1, int t = -1) {
  std::string s = "arrangement " + std::to_string(a);
  if (c >= 0) s += " camera " + std::to_string(c);
  if (t >= 0) s += " tier " + render::ToString(static_cast<render::QualityTier>(t));
  return s;
}

// Outcome of one parallel unit, gathered in unit order after the loop.
struct UnitOutcome {
  enum Kind { kNone, kOk, kSkipped, kFailed } kind = kNone;
  std::string unit;
  std::string message;
};

void Tally(StageStats& stats, const std::vector<UnitOutcome>& outcomes) {
  for (const auto& o : outcomes) {
    switch (o.kind) {
      case UnitOutcome::kNone: break;
      case UnitOutcome::kOk: ++stats.total; ++stats.succeeded; break;
      case UnitOutcome::kSkipped: ++stats.total; ++stats.skipped; break;
      case UnitOutcome::kFailed:
        ++stats.total;
        ++stats.failed;
        stats.failures.push_back({o.unit, o.message});
        break;
    }
  }
}

template <typename F>
void RunUnit(UnitOutcome& out, const std::string& unit, const SafeLog& log, F&& body) {
  out.unit = unit;
  try {
    body();
    if (out.kind == UnitOutcome::kNone) out.kind = UnitOutcome::kOk;
  } catch (const std::exception& e) {
    out.kind = UnitOutcome::kFailed;
    out.message = e.what();
    log("error: " + unit + ": " + out.message);
  }
}

// Accepted slots with their arrangement, in slot order.
struct Job {
  const CameraSlot* slot;
  const compose::Arrangement* arrangement;
  render::QualityTier tier;
};

std::vector<Job> RenderJobs(const PipelineConfig& config, const ArrangementSet& arrangements, const CameraSet& cameras) {
  std::vector<Job> jobs;
  for (const CameraSlot& slot : cameras.slots) {
    if (slot.status != SlotStatus::kAccepted || !slot.sample) continue;
    if (slot.arrangement < 0 || slot.arrangement >= static_cast<int>(arrangements.items.size()) ||
        !arrangements.items[slot.arrangement]) {
      Fail(ErrorCode::kInvalidArgument, "camera slot refers to missing arrangement " + std::to_string(slot.arrangement));
    }
    for (render::QualityTier tier : config.tiers) jobs.push_back({&slot, &*arrangements.items[slot.arrangement], tier});
  }
  return jobs;
}

// Scenes built once per arrangement and shared read-only by its units.
struct SceneCache {
  std::vector<std::optional<BuiltScene>> scenes;
  std::vector<std::string> errors;

  const BuiltScene& Get(int a) const {
    if (!scenes[a]) Fail(ErrorCode::kInternal, "scene for arrangement " + std::to_string(a) + " unavailable: " + errors[a]);
    return *scenes[a];
  }
};

SceneCache BuildScenes(const PipelineConfig& config, const ArrangementSet& arrangements, bool include_scene_meshes,
                       const std::vector<bool>& needed) {
  SceneCache cache;
  cache.scenes.resize(arrangements.items.size());
  cache.errors.resize(arrangements.items.size());
  ParallelFor(cache.scenes.size(), config.jobs, [&](std::size_t a) {
    if (!needed[a] || !arrangements.items[a]) return;
    try {
      cache.scenes[a] = BuildScene(config, *arrangements.items[a], include_scene_meshes);
    } catch (const std::exception& e) {
      cache.errors[a] = e.what();
    }
  });
  return cache;
}

std::vector<bool> NeededArrangements(const ArrangementSet& arrangements, const std::vector<Job>& jobs) {
  std::vector<bool> needed(arrangements.items.size(), false);
  for (const Job& j : jobs) needed[j.slot->arrangement] = true;
  return needed;
}

int InnerWorkers(const PipelineConfig& config, std::size_t units) {
  if (units == 0) return 1;
  return std::max<int>(1, config.jobs / static_cast<int>(std::min<std::size_t>(units, config.jobs)));
}

render::RenderSettings UnitSettings(const PipelineConfig& config, const Job& job, int workers) {
  const SeedTree seeds(config.seed);
  render::RenderSettings s = render::RenderSettings::ForTier(
      job.tier, seeds.Stream("render", {static_cast<uint64_t>(job.slot->arrangement),
                                        static_cast<uint64_t>(job.slot->camera),
                                        static_cast<uint64_t>(TierIndex(job.tier))}));
  s.estimator = config.estimator;
  s.workers = workers;
  return s;
}

json TierNames(const std::vector<render::QualityTier>& tiers) {
  json t = json::array();
  for (auto tier : tiers) t.push_back(render::ToString(tier));
  return t;
}

// Manifest members derived from the intermediate files only, so chained
// subcommands and full runs produce identical manifests.
json DatasetExtras(const PipelineConfig& config, const ArrangementSet& arrangements, const CameraSet& cameras,
                   const StageStats& stats) {
  json skipped = json::array(), failed_arr = json::array(), failed_units = json::array();
  for (std::size_t a = 0; a < arrangements.items.size(); ++a) {
    if (!arrangements.items[a]) failed_arr.push_back(a);
  }
  for (const CameraSlot& s : cameras.slots) {
    if (s.status != SlotStatus::kAccepted) {
      skipped.push_back({{"arrangement", s.arrangement}, {"camera", s.camera}, {"status", StatusName(s.status)},
                         {"attempts", s.attempts}, {"reason", s.message}});
    }
  }
  for (const auto& f : stats.failures) failed_units.push_back({{"unit", f.unit}, {"message", f.message}});
  return {{"seed", config.seed},
          {"arrangements", arrangements.requested},
          {"cameras_per_arrangement", cameras.cameras_per_arrangement},
          {"tiers", TierNames(config.tiers)},
          {"failed_arrangements", failed_arr},
          {"skipped_slots", skipped},
          {"failed_units", failed_units}};
}

}  // namespace

int64_t ImageId(int arrangement, int camera, int cameras_per_arrangement, render::QualityTier tier) {
  return (static_cast<int64_t>(arrangement) * cameras_per_arrangement + camera) * kTierSlots + TierIndex(tier);
}

json ToJson(const ArrangementSet& set) {
  json items = json::array();
  for (const auto& a : set.items) items.push_back(a ? compose::ToJson(*a) : json(nullptr));
  return {{"seed", set.seed}, {"requested", set.requested}, {"arrangements", items}};
}

ArrangementSet ArrangementSetFromJson(const json& j) {
  ArrangementSet set;
  try {
    set.seed = j.at("seed").get<uint64_t>();
    set.requested = j.at("requested").get<int>();
    for (const auto& a : j.at("arrangements")) {
      if (a.is_null()) set.items.emplace_back();
      else set.items.emplace_back(compose::ArrangementFromJson(a));
    }
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("arrangements: ") + e.what());
  }
  return set;
}

json ToJson(const CameraSet& set) {
  json slots = json::array();
  for (const CameraSlot& s : set.slots) {
    json j = {{"arrangement", s.arrangement}, {"camera", s.camera}, {"status", StatusName(s.status)},
              {"attempts", s.attempts}};
    if (s.sample) j["sample"] = camsample::ToJson(*s.sample);
    if (!s.message.empty()) j["message"] = s.message;
    slots.push_back(std::move(j));
  }
  return {{"seed", set.seed}, {"cameras_per_arrangement", set.cameras_per_arrangement}, {"slots", slots}};
}

CameraSet CameraSetFromJson(const json& j) {
  CameraSet set;
  try {
    set.seed = j.at("seed").get<uint64_t>();
    set.cameras_per_arrangement = j.at("cameras_per_arrangement").get<int>();
    for (const auto& s : j.at("slots")) {
      CameraSlot slot;
      slot.arrangement = s.at("arrangement").get<int>();
      slot.camera = s.at("camera").get<int>();
      slot.status = ParseStatus(s.at("status").get<std::string>());
      slot.attempts = s.value("attempts", 0);
      slot.message = s.value("message", std::string());
      if (s.contains("sample")) slot.sample = camsample::CameraSampleFromJson(s.at("sample"));
      set.slots.push_back(std::move(slot));
    }
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("cameras: ") + e.what());
  }
  return set;
}

BuiltScene BuildScene(const PipelineConfig& config, const compose::Arrangement& arrangement,
                      bool include_scene_meshes) {
  BuiltScene out;
  std::vector<geom::SceneInstance> instances;
  for (const compose::PlacedInstance& p : arrangement.instances) {
    auto it = config.models.find(p.model_id);
    if (it == config.models.end()) Fail(ErrorCode::kUnknownId, "unknown model id " + std::to_string(p.model_id));
    instances.push_back({it->second.mesh, p.pose, p.instance_id});
    out.materials.push_back(config.MaterialOf(config.model_materials.at(p.model_id)));
    out.object_ids.push_back(p.instance_id);
  }
  if (include_scene_meshes) {
    for (std::size_t k = 0; k < config.scene_meshes.size(); ++k) {
      const SceneMesh& m = config.scene_meshes[k];
      instances.push_back({m.mesh, m.pose, kSceneMeshIdBase + static_cast<uint32_t>(k)});
      out.materials.push_back(config.MaterialOf(m.material));
    }
  }
  if (instances.empty()) Fail(ErrorCode::kEmptyGeometry, "arrangement " + std::to_string(arrangement.index) + " has no geometry");
  out.accel = std::make_shared<const geom::SceneAccel>(std::move(instances));
  return out;
}

ComposeOutput Compose(const PipelineConfig& config, const Log& user_log) {
  SafeLog log(user_log);
  const SeedTree seeds(config.seed);
  ComposeOutput out;
  out.stats.stage = "compose";
  out.arrangements.seed = config.seed;
  out.arrangements.requested = config.arrangements;
  out.arrangements.items.resize(config.arrangements);
  std::vector<UnitOutcome> outcomes(config.arrangements);
  ParallelFor(config.arrangements, config.jobs, [&](std::size_t i) {
    const int a = static_cast<int>(i);
    RunUnit(outcomes[i], UnitName(a), log, [&] {
      const compose::ArrangementSpec& spec = config.arrangement_specs[i % config.arrangement_specs.size()];
      const compose::Stage& stage = config.FindStage(spec.stage);
      Rng rng = seeds.MakeRng("compose", {i});
      compose::Arrangement arr =
          compose::SettleArrangement(compose::InitArrangement(spec, stage, config.models, rng), stage, config.simulation);
      arr.index = a;
      arr.seed = seeds.Stream("compose", {i});
      arr.spec = spec;
      if (!arr.settled) log("warning: " + UnitName(a) + " did not come to rest");
      out.arrangements.items[i] = std::move(arr);
    });
  });
  Tally(out.stats, outcomes);
  log("compose: " + std::to_string(out.stats.succeeded) + "/" + std::to_string(out.stats.total) + " arrangements");
  return out;
}

CameraOutput SampleCameras(const PipelineConfig& config, const ArrangementSet& arrangements, const Log& user_log) {
  SafeLog log(user_log);
  const SeedTree seeds(config.seed);
  const int cams = config.cameras_per_arrangement;
  const std::size_t n_arr = arrangements.items.size();
  CameraOutput out;
  out.stats.stage = "sample-cameras";
  out.cameras.seed = config.seed;
  out.cameras.cameras_per_arrangement = cams;
  out.cameras.slots.resize(n_arr * cams);

  std::vector<bool> needed(n_arr, true);
  const SceneCache scenes = BuildScenes(config, arrangements, true, needed);
  std::vector<UnitOutcome> outcomes(out.cameras.slots.size());
  ParallelFor(out.cameras.slots.size(), config.jobs, [&](std::size_t u) {
    const int a = static_cast<int>(u / cams), c = static_cast<int>(u % cams);
    CameraSlot& slot = out.cameras.slots[u];
    slot.arrangement = a;
    slot.camera = c;
    RunUnit(outcomes[u], UnitName(a, c), log, [&] {
      if (!arrangements.items[a]) {
        slot.status = SlotStatus::kSkipped;
        slot.message = "arrangement unavailable";
        outcomes[u].kind = UnitOutcome::kSkipped;
        return;
      }
      const BuiltScene& built = scenes.Get(a);
      const std::vector<camsample::FocusTarget> targets = camsample::FocusTargets(*built.accel, built.object_ids);
      if (targets.empty()) {
        slot.status = SlotStatus::kSkipped;
        slot.message = "no objects on the stage";
        outcomes[u].kind = UnitOutcome::kSkipped;
        return;
      }
      Rng rng = seeds.MakeRng("camera", {static_cast<uint64_t>(a), static_cast<uint64_t>(c)});
      std::optional<camsample::CameraSample> s = camsample::SampleAcceptedCamera(*built.accel, targets, config.camera, rng);
      if (!s) {
        slot.status = SlotStatus::kSkipped;
        slot.attempts = config.camera.max_retries + 1;
        slot.message = "visibility retries exhausted";
        outcomes[u].kind = UnitOutcome::kSkipped;
        return;
      }
      slot.status = SlotStatus::kAccepted;
      slot.attempts = s->attempts;
      slot.sample = std::move(s);
    });
    if (outcomes[u].kind == UnitOutcome::kFailed) {
      slot.status = SlotStatus::kFailed;
      slot.message = outcomes[u].message;
    }
  });
  Tally(out.stats, outcomes);
  int64_t attempts = 0;
  for (const auto& s : out.cameras.slots) attempts += s.attempts;
  log("sample-cameras: " + std::to_string(out.stats.succeeded) + " accepted, " + std::to_string(out.stats.skipped) +
      " skipped, " + std::to_string(attempts) + " camera draws");
  return out;
}

StageStats RenderImages(const PipelineConfig& config, const ArrangementSet& arrangements, const CameraSet& cameras,
                        const fs::path& root, const Log& user_log) {
  SafeLog log(user_log);
  StageStats stats;
  stats.stage = "render";
  const std::vector<Job> jobs = RenderJobs(config, arrangements, cameras);
  const SceneCache scenes =
      BuildScenes(config, arrangements, true, NeededArrangements(arrangements, jobs));
  const int inner = InnerWorkers(config, jobs.size());
  std::vector<UnitOutcome> outcomes(jobs.size());
  ParallelFor(jobs.size(), config.jobs, [&](std::size_t u) {
    const Job& job = jobs[u];
    const int a = job.slot->arrangement, c = job.slot->camera;
    RunUnit(outcomes[u], UnitName(a, c, static_cast<int>(job.tier)), log, [&] {
      const BuiltScene& built = scenes.Get(a);
      const render::RenderScene scene{built.accel, built.materials, config.lights};
      const render::RenderResult r = render::Render(scene, job.slot->sample->camera, UnitSettings(config, job, inner));
      if (r.guarded_samples > 0) {
        log("warning: " + outcomes[u].unit + ": " + std::to_string(r.guarded_samples) + " invalid samples clamped");
      }
      const int64_t id = ImageId(a, c, cameras.cameras_per_arrangement, job.tier);
      render::WritePng((root / annotate::ImageFileName(id)).string(), render::ToneMap(r.color, config.exposure));
      const fs::path hdr_path = root / annotate::HdrFileName(id);
      if (config.hdr) {
        render::WritePfm(hdr_path.string(), r.color);
      } else {
        // A float map left by an earlier run would otherwise be listed in the index.
        std::error_code ec;
        fs::remove(hdr_path, ec);
      }
    });
  });
  Tally(stats, outcomes);
  log("render: " + std::to_string(stats.succeeded) + "/" + std::to_string(stats.total) + " images");
  return stats;
}

StageStats Annotate(const PipelineConfig& config, const ArrangementSet& arrangements, const CameraSet& cameras,
                    const fs::path& root, const Log& user_log) {
  SafeLog log(user_log);
  StageStats stats;
  stats.stage = "annotate";
  const std::vector<Job> jobs = RenderJobs(config, arrangements, cameras);
  const SceneCache scenes =
      BuildScenes(config, arrangements, true, NeededArrangements(arrangements, jobs));
  std::vector<std::optional<annotate::DatasetRecord>> records(jobs.size());
  std::vector<UnitOutcome> outcomes(jobs.size());
  ParallelFor(jobs.size(), config.jobs, [&](std::size_t u) {
    const Job& job = jobs[u];
    const int a = job.slot->arrangement, c = job.slot->camera;
    RunUnit(outcomes[u], UnitName(a, c, static_cast<int>(job.tier)), log, [&] {
      const BuiltScene& built = scenes.Get(a);
      annotate::DatasetRecord rec;
      rec.image_id = ImageId(a, c, cameras.cameras_per_arrangement, job.tier);
      const fs::path image = root / annotate::ImageFileName(rec.image_id);
      if (!fs::exists(image)) Fail(ErrorCode::kFileUnreadable, "rendered image " + image.string() + " does not exist");
      rec.has_hdr_file = fs::exists(root / annotate::HdrFileName(rec.image_id));
      rec.camera = job.slot->sample->camera;
      rec.instances = annotate::AnnotateView(*built.accel, *job.arrangement, rec.camera);
      rec.provenance = {config.seed, a, c, render::ToString(job.tier)};
      annotate::WriteRecordFiles(rec, root);
      for (auto& inst : rec.instances) std::vector<uint8_t>().swap(inst.mask);
      records[u] = std::move(rec);
    });
  });
  Tally(stats, outcomes);
  std::vector<annotate::DatasetRecord> done;
  for (auto& r : records) {
    if (r) done.push_back(std::move(*r));
  }
  annotate::WriteIndex(done, root, DatasetExtras(config, arrangements, cameras, stats));
  log("annotate: " + std::to_string(done.size()) + " images annotated");
  return stats;
}

StageStats Baseline(const PipelineConfig& config, const ArrangementSet& arrangements, const CameraSet& cameras,
                    const fs::path& background_dir, const fs::path& root, const Log& user_log) {
  SafeLog log(user_log);
  StageStats stats;
  stats.stage = "baseline";
  std::vector<fs::path> backgrounds;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(background_dir, ec)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") backgrounds.push_back(e.path());
  }
  if (ec) Fail(ErrorCode::kFileUnreadable, "cannot list background directory " + background_dir.string());
  if (backgrounds.empty()) Fail(ErrorCode::kConfig, "no PNG or JPEG backgrounds in " + background_dir.string());
  std::sort(backgrounds.begin(), backgrounds.end(),
            [](const fs::path& x, const fs::path& y) { return x.filename().string() < y.filename().string(); });

  const SeedTree seeds(config.seed);
  const std::vector<Job> jobs = RenderJobs(config, arrangements, cameras);
  const SceneCache scenes =
      BuildScenes(config, arrangements, false, NeededArrangements(arrangements, jobs));
  const int inner = InnerWorkers(config, jobs.size());
  std::vector<std::optional<annotate::DatasetRecord>> records(jobs.size());
  std::vector<std::string> chosen(jobs.size());
  std::vector<UnitOutcome> outcomes(jobs.size());
  ParallelFor(jobs.size(), config.jobs, [&](std::size_t u) {
    const Job& job = jobs[u];
    const int a = job.slot->arrangement, c = job.slot->camera;
    RunUnit(outcomes[u], UnitName(a, c, static_cast<int>(job.tier)), log, [&] {
      const BuiltScene& built = scenes.Get(a);
      const geom::Camera& camera = job.slot->sample->camera;
      const render::RenderScene scene{built.accel, built.materials, config.lights};
      const render::RenderResult r = render::Render(scene, camera, UnitSettings(config, job, inner));
      Rng rng = seeds.MakeRng("baseline", {static_cast<uint64_t>(a), static_cast<uint64_t>(c),
                                           static_cast<uint64_t>(TierIndex(job.tier))});
      const fs::path& bg_path = backgrounds[rng.UniformInt(backgrounds.size())];
      render::LdrImage bg = render::ReadImage(bg_path.string());
      if (bg.width != camera.width() || bg.height != camera.height()) {
        bg = render::ResizeBilinear(bg, camera.width(), camera.height());
      }
      annotate::DatasetRecord rec;
      rec.image_id = ImageId(a, c, cameras.cameras_per_arrangement, job.tier);
      rec.camera = camera;
      rec.image = render::CompositeBaseline(render::ToneMap(r.foreground, config.exposure), r.alpha, bg);
      rec.instances = annotate::AnnotateView(*built.accel, *job.arrangement, camera);
      rec.provenance = {config.seed, a, c, render::ToString(job.tier)};
      annotate::WriteRecordFiles(rec, root);
      rec.image = render::LdrImage();
      for (auto& inst : rec.instances) std::vector<uint8_t>().swap(inst.mask);
      chosen[u] = bg_path.filename().string();
      records[u] = std::move(rec);
    });
  });
  Tally(stats, outcomes);
  std::vector<annotate::DatasetRecord> done;
  json used = json::array();
  for (std::size_t u = 0; u < records.size(); ++u) {
    if (!records[u]) continue;
    used.push_back({{"image_id", records[u]->image_id}, {"background", chosen[u]}});
    done.push_back(std::move(*records[u]));
  }
  json extra = DatasetExtras(config, arrangements, cameras, stats);
  extra["baseline"] = true;
  extra["backgrounds"] = used;
  annotate::WriteIndex(done, root, extra);
  log("baseline: " + std::to_string(done.size()) + " composites");
  return stats;
}

RunSummary RunPipeline(const PipelineConfig& config, const Log& log) {
  RunSummary summary;
  const fs::path& root = config.output;
  ComposeOutput composed = Compose(config, log);
  WriteJsonFile(root / "arrangements.json", ToJson(composed.arrangements));
  summary.stages.push_back(composed.stats);
  CameraOutput cams = SampleCameras(config, composed.arrangements, log);
  WriteJsonFile(root / "cameras.json", ToJson(cams.cameras));
  summary.stages.push_back(cams.stats);
  summary.stages.push_back(RenderImages(config, composed.arrangements, cams.cameras, root, log));
  summary.stages.push_back(Annotate(config, composed.arrangements, cams.cameras, root, log));
  return summary;
}

void WriteJsonFile(const fs::path& path, const json& j) { WriteFileAtomic(path, j.dump(2) + "\n"); }

json ReadJsonFile(const fs::path& path) {
  try {
    return json::parse(ReadFileBytes(path));
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

}  // namespace pbrsynth::pipeline
