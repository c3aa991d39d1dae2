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
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbrsynth/common/random.hpp"
#include "pbrsynth/compose/physics.hpp"
#include "pbrsynth/compose/stage.hpp"
#include "pbrsynth/geom/mesh.hpp"

namespace pbrsynth::compose {

enum class Orientation { kCanonical, kRandom };

struct ArrangementEntry {
  int model_id = 0;
  int count_limit = 1;  // realized count is uniform in [1, count_limit]
  Orientation orientation = Orientation::kCanonical;
};

struct ArrangementSpec {
  std::vector<ArrangementEntry> entries;
  std::string stage;
  double min_height = 0.05;  // m above the stage, lowest point of the object
  double max_height = 0.50;

  // Throws Error(kInvalidArgument): empty entries, counts < 1, bad range.
  void Validate() const;
};

struct ObjectModel {
  int id = 0;
  std::string name;
  std::shared_ptr<const geom::Mesh> mesh;
  std::shared_ptr<const BodyShape> shape;
  Mat3 canonical_rotation = Mat3::Identity();

  // Builds the collision shape from the mesh's convex hull.
  static ObjectModel Create(int id, std::string name, std::shared_ptr<const geom::Mesh> mesh,
                            const Mat3& canonical_rotation, double density);
};

using ModelLibrary = std::map<int, ObjectModel>;

struct PlacedInstance {
  uint32_t instance_id = 0;
  int model_id = 0;
  Pose pose;  // world_from_model
};

struct Arrangement {
  int index = 0;
  std::string stage;
  std::vector<PlacedInstance> instances;
  std::vector<uint32_t> removed;  // fell off the stage during settling
  bool settled = false;
  double simulated_time = 0.0;
  uint64_t seed = 0;
  ArrangementSpec spec;

  const PlacedInstance* Find(uint32_t instance_id) const;
};

// Initial bodies: each instance at a uniform stage point, its lowest point
// raised by a uniform height from the spec's range, canonical or uniformly
// random orientation, zero velocity. Instance ids are assigned 0, 1, ... in
// entry order. A body whose bounds overlap an earlier one is redrawn; after
// 20 failed draws it is stacked just above the bodies it overlaps.
std::vector<RigidBody> InitArrangement(const ArrangementSpec& spec, const Stage& stage,
                                       const ModelLibrary& models, Rng& rng);

// Runs the simulation and records the settled poses.
Arrangement SettleArrangement(std::vector<RigidBody> bodies, const Stage& stage, const SimParams& params);

nlohmann::json ToJson(const Pose& pose);
Pose PoseFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const ArrangementSpec& spec);
ArrangementSpec SpecFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const Arrangement& arrangement);
Arrangement ArrangementFromJson(const nlohmann::json& j);

}  // namespace pbrsynth::compose
