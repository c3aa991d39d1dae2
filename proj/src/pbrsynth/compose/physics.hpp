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
#include <memory>
#include <vector>

#include "pbrsynth/compose/hull.hpp"
#include "pbrsynth/compose/stage.hpp"

namespace pbrsynth::compose {

struct SimParams {
  double timestep = 1.0 / 240.0;
  double restitution = 0.1;
  double friction = 0.5;
  double rest_linear_speed = 1e-3;   // m/s
  double rest_angular_speed = 1e-2;  // rad/s
  int rest_steps = 60;
  double max_time = 10.0;  // s
  double density = 500.0;  // kg/m^3
  double gravity = 9.81;   // along -stage normal
  int velocity_iterations = 10;
  int position_iterations = 4;
  // Penetration tolerated by position correction; keeps resting contacts
  // alive between steps.
  double linear_slop = 2e-4;
  double baumgarte = 0.2;
  double max_correction = 0.02;
  double contact_margin = 0.005;
  // Approach speed below which contacts are treated as inelastic.
  double restitution_threshold = 0.5;
  // A body whose lowest point sinks this far below the stage plane has
  // fallen off the stage.
  double fall_off_distance = 0.1;

  // Throws Error(kInvalidArgument) for out-of-range values.
  void Validate() const;
};

// Collision proxy plus mass properties of one object model; shared by every
// instance of the model.
struct BodyShape {
  ConvexHull hull;       // vertices relative to the center of mass
  Vec3 center_of_mass;   // in the model's mesh frame
  double mass = 0.0;
  Mat3 inertia;          // about the center of mass
  Mat3 inverse_inertia;

  static std::shared_ptr<const BodyShape> FromPoints(const std::vector<Vec3>& points, double density);
};

struct RigidBody {
  uint32_t instance_id = 0;
  int model_id = 0;
  std::shared_ptr<const BodyShape> shape;
  Vec3 position = Vec3::Zero();  // center of mass, world
  Quat orientation = Quat::Identity();
  Vec3 linear_velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();

  // Pose of the body frame (origin at the center of mass).
  Pose BodyPose() const;
  // Pose of the model's mesh frame, i.e. world_from_model.
  Pose ModelPose() const;
  void SetModelPose(const Pose& world_from_model);
};

struct SimResult {
  std::vector<RigidBody> bodies;       // bodies still on the stage
  std::vector<uint32_t> removed;       // instance ids that fell off
  bool settled = false;
  int steps = 0;
  double time = 0.0;
  double initial_energy = 0.0;  // potential above the stage plus kinetic
  double final_kinetic_energy = 0.0;
};

// Fixed-step impulse-based simulation under gravity until every body is at
// rest for `rest_steps` consecutive steps or `max_time` elapses. Bodies are
// processed in the given order; identical inputs give identical outputs.
SimResult SimulateToRest(std::vector<RigidBody> bodies, const Stage& stage, const SimParams& params);

}  // namespace pbrsynth::compose
