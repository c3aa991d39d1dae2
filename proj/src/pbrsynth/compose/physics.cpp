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

#include "pbrsynth/compose/physics.hpp"

#include <algorithm>

#include "pbrsynth/common/error.hpp"
#include "pbrsynth/compose/collide.hpp"

namespace pbrsynth::compose {

void SimParams::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) Fail(ErrorCode::kInvalidArgument, std::string("invalid sim parameter: ") + what);
  };
  require(timestep > 0.0, "timestep");
  require(restitution >= 0.0 && restitution <= 1.0, "restitution");
  require(friction >= 0.0, "friction");
  require(rest_linear_speed > 0.0 && rest_angular_speed > 0.0, "rest thresholds");
  require(rest_steps >= 1, "rest_steps");
  require(max_time > 0.0, "max_time");
  require(density > 0.0, "density");
  require(velocity_iterations >= 1 && position_iterations >= 0, "iterations");
}

std::shared_ptr<const BodyShape> BodyShape::FromPoints(const std::vector<Vec3>& points, double density) {
  const ConvexHull hull = BuildConvexHull(points);
  const MassProperties mp = ComputeMassProperties(hull, density);
  auto shape = std::make_shared<BodyShape>();
  shape->hull = Translated(hull, -mp.center_of_mass);
  shape->center_of_mass = mp.center_of_mass;
  shape->mass = mp.mass;
  shape->inertia = mp.inertia;
  shape->inverse_inertia = mp.inertia.inverse();
  return shape;
}

Pose RigidBody::BodyPose() const {
  Pose p;
  p.rotation = orientation.toRotationMatrix();
  p.translation = position;
  return p;
}

Pose RigidBody::ModelPose() const {
  Pose p = BodyPose();
  p.translation -= p.rotation * shape->center_of_mass;
  return p;
}

void RigidBody::SetModelPose(const Pose& world_from_model) {
  orientation = Quat(world_from_model.rotation).normalized();
  position = world_from_model.Apply(shape->center_of_mass);
}

namespace {

constexpr int kStage = -1;

struct BodyState {
  double inv_mass;
  Mat3 inv_inertia_world;
};

struct Constraint {
  int a;  // kStage or body index
  int b;
  Vec3 normal;
  Vec3 t1, t2;
  Vec3 ra, rb;
  Vec3 local_a, local_b;  // contact anchors in body frames (stage: world)
  double separation;
  double normal_mass, tangent_mass1, tangent_mass2;
  double target_velocity;
  double lambda_n = 0.0, lambda_t1 = 0.0, lambda_t2 = 0.0;
};

struct CachedImpulse {
  int a, b;
  Vec3 local_b;
  double lambda_n, lambda_t1, lambda_t2;
};

void Rotate(Quat& q, const Vec3& angle) {
  const Quat dq(0.0, angle.x(), angle.y(), angle.z());
  Quat r = dq * q;
  q.coeffs() += 0.5 * r.coeffs();
  q.normalize();
}

double EffectiveMass(const BodyState* sa, const BodyState* sb, const Vec3& ra, const Vec3& rb, const Vec3& dir) {
  double k = 0.0;
  if (sa) {
    const Vec3 rn = ra.cross(dir);
    k += sa->inv_mass + rn.dot(sa->inv_inertia_world * rn);
  }
  if (sb) {
    const Vec3 rn = rb.cross(dir);
    k += sb->inv_mass + rn.dot(sb->inv_inertia_world * rn);
  }
  return k > 0.0 ? 1.0 / k : 0.0;
}

}  // namespace

SimResult SimulateToRest(std::vector<RigidBody> bodies, const Stage& stage, const SimParams& params) {
  params.Validate();
  const double dt = params.timestep;
  const Vec3 gravity = -params.gravity * stage.normal();
  const int max_steps = static_cast<int>(std::ceil(params.max_time / dt - 1e-9));

  SimResult result;
  for (const RigidBody& b : bodies) {
    if (!b.shape || !(b.shape->mass > 0.0)) Fail(ErrorCode::kInvalidArgument, "body without valid shape");
    const double h = stage.SignedDistance(b.position);
    result.initial_energy += b.shape->mass * params.gravity * h + 0.5 * b.shape->mass * b.linear_velocity.squaredNorm() +
                             0.5 * b.angular_velocity.dot(b.orientation.toRotationMatrix() * b.shape->inertia *
                                                          b.orientation.toRotationMatrix().transpose() * b.angular_velocity);
  }

  std::vector<bool> active(bodies.size(), true);
  std::vector<CachedImpulse> cache;
  std::vector<Constraint> constraints;
  std::vector<BodyState> states(bodies.size());
  std::vector<WorldHull> hulls(bodies.size());
  int rest_counter = 0;

  for (int step = 0; step < max_steps; ++step) {
    // 1. Gravity.
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      if (!active[i]) continue;
      bodies[i].linear_velocity += gravity * dt;
      const Mat3 r = bodies[i].orientation.toRotationMatrix();
      states[i].inv_mass = 1.0 / bodies[i].shape->mass;
      states[i].inv_inertia_world = r * bodies[i].shape->inverse_inertia * r.transpose();
      hulls[i] = WorldHull(bodies[i].shape->hull, bodies[i].BodyPose());
    }

    // 2. Contacts, with a speculative margin that grows with speed.
    std::vector<double> reach(bodies.size(), 0.0);
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      if (!active[i]) continue;
      reach[i] = (bodies[i].linear_velocity.norm() +
                  bodies[i].angular_velocity.norm() * bodies[i].shape->hull.BoundingRadius()) * dt;
    }
    constraints.clear();
    auto add_manifold = [&](int a, int b, const Manifold& m) {
      for (const ContactPoint& cp : m.points) {
        Constraint c;
        c.a = a;
        c.b = b;
        c.normal = m.normal;
        OrthonormalBasis(c.normal, c.t1, c.t2);
        c.separation = cp.separation;
        const Vec3 pb = cp.position;
        const Vec3 pa = cp.position - cp.separation * m.normal;
        c.rb = pb - bodies[b].position;
        c.local_b = bodies[b].orientation.conjugate() * c.rb;
        if (a == kStage) {
          c.ra = Vec3::Zero();
          c.local_a = pa;
        } else {
          c.ra = pa - bodies[a].position;
          c.local_a = bodies[a].orientation.conjugate() * c.ra;
        }
        constraints.push_back(c);
      }
    };
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      if (!active[i]) continue;
      if (auto m = CollideStage(hulls[i], stage, params.contact_margin + reach[i])) add_manifold(kStage, static_cast<int>(i), *m);
    }
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < bodies.size(); ++j) {
        if (!active[j]) continue;
        const double margin = params.contact_margin + reach[i] + reach[j];
        Bounds3 bi = hulls[i].bounds;
        bi.lo.array() -= margin;
        bi.hi.array() += margin;
        if (!bi.Overlaps(hulls[j].bounds)) continue;
        if (auto m = CollideHulls(hulls[i], hulls[j], margin)) {
          add_manifold(static_cast<int>(i), static_cast<int>(j), *m);
        }
      }
    }

    // 3. Prepare constraints, warm start from the previous step.
    auto velocity_at = [&](int idx, const Vec3& r) -> Vec3 {
      if (idx == kStage) return Vec3::Zero();
      return bodies[idx].linear_velocity + bodies[idx].angular_velocity.cross(r);
    };
    auto apply = [&](Constraint& c, const Vec3& impulse) {
      if (c.a != kStage) {
        bodies[c.a].linear_velocity -= states[c.a].inv_mass * impulse;
        bodies[c.a].angular_velocity -= states[c.a].inv_inertia_world * c.ra.cross(impulse);
      }
      bodies[c.b].linear_velocity += states[c.b].inv_mass * impulse;
      bodies[c.b].angular_velocity += states[c.b].inv_inertia_world * c.rb.cross(impulse);
    };
    for (Constraint& c : constraints) {
      const BodyState* sa = c.a == kStage ? nullptr : &states[c.a];
      const BodyState* sb = &states[c.b];
      c.normal_mass = EffectiveMass(sa, sb, c.ra, c.rb, c.normal);
      c.tangent_mass1 = EffectiveMass(sa, sb, c.ra, c.rb, c.t1);
      c.tangent_mass2 = EffectiveMass(sa, sb, c.ra, c.rb, c.t2);
      const double vn = (velocity_at(c.b, c.rb) - velocity_at(c.a, c.ra)).dot(c.normal);
      c.target_velocity = -std::max(c.separation, 0.0) / dt;
      if (vn < -params.restitution_threshold && vn * dt < -c.separation) {
        c.target_velocity = -params.restitution * vn;
      }
      // Nearest cached point of the same pair within 1 mm.
      double best = 1e-6;
      const CachedImpulse* match = nullptr;
      for (const CachedImpulse& ci : cache) {
        if (ci.a != c.a || ci.b != c.b) continue;
        const double d = (ci.local_b - c.local_b).squaredNorm();
        if (d < best) {
          best = d;
          match = &ci;
        }
      }
      if (match) {
        c.lambda_n = match->lambda_n;
        c.lambda_t1 = match->lambda_t1;
        c.lambda_t2 = match->lambda_t2;
        apply(c, c.lambda_n * c.normal + c.lambda_t1 * c.t1 + c.lambda_t2 * c.t2);
      }
    }

    // 4. Sequential impulses.
    for (int it = 0; it < params.velocity_iterations; ++it) {
      for (Constraint& c : constraints) {
        const double limit = params.friction * c.lambda_n;
        for (int k = 0; k < 2; ++k) {
          const Vec3& t = k == 0 ? c.t1 : c.t2;
          double& acc = k == 0 ? c.lambda_t1 : c.lambda_t2;
          const double mass = k == 0 ? c.tangent_mass1 : c.tangent_mass2;
          const double vt = (velocity_at(c.b, c.rb) - velocity_at(c.a, c.ra)).dot(t);
          const double next = std::clamp(acc - mass * vt, -limit, limit);
          const double delta = next - acc;
          acc = next;
          apply(c, delta * t);
        }
        const double vn = (velocity_at(c.b, c.rb) - velocity_at(c.a, c.ra)).dot(c.normal);
        const double next = std::max(c.lambda_n - c.normal_mass * (vn - c.target_velocity), 0.0);
        const double delta = next - c.lambda_n;
        c.lambda_n = next;
        apply(c, delta * c.normal);
      }
    }
    cache.clear();
    for (const Constraint& c : constraints) cache.push_back({c.a, c.b, c.local_b, c.lambda_n, c.lambda_t1, c.lambda_t2});

    // 5. Integrate.
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      if (!active[i]) continue;
      bodies[i].position += bodies[i].linear_velocity * dt;
      Rotate(bodies[i].orientation, bodies[i].angular_velocity * dt);
    }

    // 6. Non-linear position correction along the contact normals.
    for (int it = 0; it < params.position_iterations; ++it) {
      for (Constraint& c : constraints) {
        RigidBody& b = bodies[c.b];
        const Vec3 rb = b.orientation * c.local_b;
        const Vec3 pb = b.position + rb;
        Vec3 ra = Vec3::Zero();
        Vec3 pa = c.local_a;
        if (c.a != kStage) {
          ra = bodies[c.a].orientation * c.local_a;
          pa = bodies[c.a].position + ra;
        }
        const double sep = (pb - pa).dot(c.normal);
        const double correction = std::clamp(params.baumgarte * (sep + params.linear_slop), -params.max_correction, 0.0);
        if (correction >= 0.0) continue;
        const BodyState* sa = c.a == kStage ? nullptr : &states[c.a];
        const double k = EffectiveMass(sa, &states[c.b], ra, rb, c.normal);
        const Vec3 impulse = -correction * k * c.normal;
        if (c.a != kStage) {
          bodies[c.a].position -= states[c.a].inv_mass * impulse;
          Rotate(bodies[c.a].orientation, -(states[c.a].inv_inertia_world * ra.cross(impulse)));
        }
        b.position += states[c.b].inv_mass * impulse;
        Rotate(b.orientation, states[c.b].inv_inertia_world * rb.cross(impulse));
      }
    }

    // 7. Bookkeeping: fall-off and rest detection.
    bool all_resting = true;
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      if (!active[i]) continue;
      const WorldHull moved(bodies[i].shape->hull, bodies[i].BodyPose());
      double lowest = std::numeric_limits<double>::infinity();
      for (const Vec3& v : moved.vertices) lowest = std::min(lowest, stage.SignedDistance(v));
      if (lowest < -params.fall_off_distance) {
        active[i] = false;
        result.removed.push_back(bodies[i].instance_id);
        continue;
      }
      if (bodies[i].linear_velocity.norm() >= params.rest_linear_speed ||
          bodies[i].angular_velocity.norm() >= params.rest_angular_speed) {
        all_resting = false;
      }
    }
    result.steps = step + 1;
    rest_counter = all_resting ? rest_counter + 1 : 0;
    if (rest_counter >= params.rest_steps) {
      result.settled = true;
      break;
    }
  }
  result.time = result.steps * dt;

  for (std::size_t i = 0; i < bodies.size(); ++i) {
    if (!active[i]) continue;
    const RigidBody& b = bodies[i];
    const Mat3 r = b.orientation.toRotationMatrix();
    result.final_kinetic_energy += 0.5 * b.shape->mass * b.linear_velocity.squaredNorm() +
                                   0.5 * b.angular_velocity.dot(r * b.shape->inertia * r.transpose() * b.angular_velocity);
    result.bodies.push_back(b);
  }
  return result;
}

}  // namespace pbrsynth::compose
