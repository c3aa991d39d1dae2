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

#include "pbrsynth/compose/arrangement.hpp"

#include "pbrsynth/common/error.hpp"
#include "pbrsynth/compose/collide.hpp"

namespace pbrsynth::compose {

void ArrangementSpec::Validate() const {
  if (entries.empty()) Fail(ErrorCode::kInvalidArgument, "arrangement spec has no entries");
  for (const auto& e : entries) {
    if (e.count_limit < 1) Fail(ErrorCode::kInvalidArgument, "instance count limit must be >= 1");
  }
  if (!(min_height > 0.0) || !(min_height <= max_height) || !std::isfinite(max_height)) {
    Fail(ErrorCode::kInvalidArgument, "height range must satisfy 0 < min <= max");
  }
}

ObjectModel ObjectModel::Create(int id, std::string name, std::shared_ptr<const geom::Mesh> mesh,
                                const Mat3& canonical_rotation, double density) {
  if (!IsRotation(canonical_rotation, 1e-6)) Fail(ErrorCode::kInvalidArgument, "canonical rotation of model " + name + " is not a rotation");
  ObjectModel m;
  m.id = id;
  m.name = std::move(name);
  m.shape = BodyShape::FromPoints(mesh->vertices, density);
  m.mesh = std::move(mesh);
  m.canonical_rotation = canonical_rotation;
  return m;
}

const PlacedInstance* Arrangement::Find(uint32_t instance_id) const {
  for (const auto& inst : instances) {
    if (inst.instance_id == instance_id) return &inst;
  }
  return nullptr;
}

std::vector<RigidBody> InitArrangement(const ArrangementSpec& spec, const Stage& stage,
                                       const ModelLibrary& models, Rng& rng) {
  spec.Validate();
  std::vector<RigidBody> bodies;
  std::vector<Bounds3> placed;
  uint32_t next_id = 0;
  for (const ArrangementEntry& entry : spec.entries) {
    auto it = models.find(entry.model_id);
    if (it == models.end()) Fail(ErrorCode::kUnknownId, "unknown model id " + std::to_string(entry.model_id));
    const ObjectModel& model = it->second;
    const auto count = static_cast<int>(1 + rng.UniformInt(static_cast<uint64_t>(entry.count_limit)));
    for (int k = 0; k < count; ++k) {
      RigidBody body;
      body.instance_id = next_id++;
      body.model_id = model.id;
      body.shape = model.shape;

      Bounds3 bounds;
      bool clear = false;
      for (int attempt = 0; attempt < 20 && !clear; ++attempt) {
        const Mat3 rot = entry.orientation == Orientation::kRandom ? Mat3(UniformRotation(rng)) : model.canonical_rotation;
        const Vec3 anchor = stage.SamplePoint(rng);
        const double height = rng.Uniform(spec.min_height, spec.max_height);
        body.orientation = Quat(rot).normalized();
        body.position = anchor;
        WorldHull hull(model.shape->hull, body.BodyPose());
        double lowest = std::numeric_limits<double>::infinity();
        for (const Vec3& v : hull.vertices) lowest = std::min(lowest, stage.SignedDistance(v));
        body.position += (height - lowest) * stage.normal();
        bounds = WorldHull(model.shape->hull, body.BodyPose()).bounds;
        clear = std::none_of(placed.begin(), placed.end(), [&](const Bounds3& b) { return b.Overlaps(bounds); });
      }
      if (!clear) {
        double top = -std::numeric_limits<double>::infinity();
        for (const Bounds3& b : placed) {
          if (!b.Overlaps(bounds)) continue;
          for (int c = 0; c < 8; ++c) {
            const Vec3 corner((c & 1) ? b.hi.x() : b.lo.x(), (c & 2) ? b.hi.y() : b.lo.y(), (c & 4) ? b.hi.z() : b.lo.z());
            top = std::max(top, stage.SignedDistance(corner));
          }
        }
        double lowest = std::numeric_limits<double>::infinity();
        for (const Vec3& v : WorldHull(model.shape->hull, body.BodyPose()).vertices) {
          lowest = std::min(lowest, stage.SignedDistance(v));
        }
        body.position += (top + 0.01 - lowest) * stage.normal();
        bounds = WorldHull(model.shape->hull, body.BodyPose()).bounds;
      }
      placed.push_back(bounds);
      bodies.push_back(std::move(body));
    }
  }
  return bodies;
}

Arrangement SettleArrangement(std::vector<RigidBody> bodies, const Stage& stage, const SimParams& params) {
  SimResult sim = SimulateToRest(std::move(bodies), stage, params);
  Arrangement out;
  out.stage = stage.name();
  out.settled = sim.settled;
  out.simulated_time = sim.time;
  out.removed = sim.removed;
  for (const RigidBody& b : sim.bodies) {
    out.instances.push_back({b.instance_id, b.model_id, b.ModelPose()});
  }
  return out;
}

nlohmann::json ToJson(const Pose& pose) {
  nlohmann::json r = nlohmann::json::array();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) r.push_back(pose.rotation(i, j));
  }
  return {{"rotation", r}, {"translation", {pose.translation.x(), pose.translation.y(), pose.translation.z()}}};
}

Pose PoseFromJson(const nlohmann::json& j) {
  Pose p;
  const auto& r = j.at("rotation");
  const auto& t = j.at("translation");
  if (r.size() != 9 || t.size() != 3) Fail(ErrorCode::kParse, "pose needs 9 rotation and 3 translation values");
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) p.rotation(i, k) = r[i * 3 + k].get<double>();
    p.translation[i] = t[i].get<double>();
  }
  if (!IsRotation(p.rotation, 1e-6)) Fail(ErrorCode::kParse, "pose rotation is not orthonormal");
  return p;
}

nlohmann::json ToJson(const ArrangementSpec& spec) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : spec.entries) {
    entries.push_back({{"model", e.model_id},
                       {"count", e.count_limit},
                       {"orientation", e.orientation == Orientation::kRandom ? "random" : "canonical"}});
  }
  return {{"stage", spec.stage}, {"height_range", {spec.min_height, spec.max_height}}, {"entries", entries}};
}

ArrangementSpec SpecFromJson(const nlohmann::json& j) {
  ArrangementSpec spec;
  spec.stage = j.at("stage").get<std::string>();
  if (j.contains("height_range")) {
    const auto& h = j.at("height_range");
    if (h.size() != 2) Fail(ErrorCode::kParse, "height_range needs [min, max]");
    spec.min_height = h[0].get<double>();
    spec.max_height = h[1].get<double>();
  }
  for (const auto& e : j.at("entries")) {
    ArrangementEntry entry;
    entry.model_id = e.at("model").get<int>();
    entry.count_limit = e.value("count", 1);
    const std::string o = e.value("orientation", std::string("canonical"));
    if (o == "random") entry.orientation = Orientation::kRandom;
    else if (o == "canonical") entry.orientation = Orientation::kCanonical;
    else Fail(ErrorCode::kParse, "orientation must be 'canonical' or 'random', got '" + o + "'");
    spec.entries.push_back(entry);
  }
  spec.Validate();
  return spec;
}

nlohmann::json ToJson(const Arrangement& a) {
  nlohmann::json instances = nlohmann::json::array();
  for (const auto& inst : a.instances) {
    nlohmann::json j = ToJson(inst.pose);
    j["instance_id"] = inst.instance_id;
    j["model_id"] = inst.model_id;
    instances.push_back(j);
  }
  return {{"index", a.index},
          {"stage", a.stage},
          {"instances", instances},
          {"removed", a.removed},
          {"settled", a.settled},
          {"simulated_time", a.simulated_time},
          {"seed", a.seed},
          {"spec", ToJson(a.spec)}};
}

Arrangement ArrangementFromJson(const nlohmann::json& j) {
  Arrangement a;
  a.index = j.value("index", 0);
  a.stage = j.at("stage").get<std::string>();
  for (const auto& ij : j.at("instances")) {
    a.instances.push_back({ij.at("instance_id").get<uint32_t>(), ij.at("model_id").get<int>(), PoseFromJson(ij)});
  }
  if (j.contains("removed")) a.removed = j.at("removed").get<std::vector<uint32_t>>();
  a.settled = j.value("settled", true);
  a.simulated_time = j.value("simulated_time", 0.0);
  a.seed = j.value("seed", uint64_t{0});
  if (j.contains("spec")) a.spec = SpecFromJson(j.at("spec"));
  return a;
}

}  // namespace pbrsynth::compose
