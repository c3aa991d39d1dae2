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
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "pbrsynth/geom/camera.hpp"
#include "pbrsynth/geom/mesh.hpp"

namespace pbrsynth::geom {

inline constexpr uint32_t kBackgroundId = std::numeric_limits<uint32_t>::max();

struct Hit {
  uint32_t instance_id = kBackgroundId;
  uint32_t triangle_id = 0;   // index into the instance mesh's triangles
  uint32_t instance_index = 0;  // position in the SceneAccel instance list
  double t = std::numeric_limits<double>::infinity();
  // Barycentric weights of the triangle's second and third vertex.
  double b1 = 0.0;
  double b2 = 0.0;
  Vec3 shading_normal = Vec3::UnitZ();   // interpolated, world space, unit
  Vec3 geometric_normal = Vec3::UnitZ();  // world space, unit
};

// Nearest-hit order: smaller t, then lower instance id, then lower triangle
// id. Every query path uses this so results are deterministic.
inline bool CloserHit(double t_a, uint32_t inst_a, uint32_t tri_a,
                      double t_b, uint32_t inst_b, uint32_t tri_b) {
  if (t_a != t_b) return t_a < t_b;
  if (inst_a != inst_b) return inst_a < inst_b;
  return tri_a < tri_b;
}

struct TriangleHit {
  double t;
  double b1;
  double b2;
};

// Watertight ray/triangle test (Woop, Benthin and Wald 2013). Points on a
// shared edge satisfy both triangles' edge tests with identical values, so
// the nearest-hit tie rule then reports exactly one of them. Accepts hits
// with t_min < t < t_max; both faces are hittable.
std::optional<TriangleHit> IntersectTriangle(const Ray& ray, const Vec3& a, const Vec3& b,
                                             const Vec3& c, double t_min, double t_max);

struct SceneInstance {
  std::shared_ptr<const Mesh> mesh;
  Pose world_from_object;
  uint32_t id = 0;
};

// Immutable bounding-volume hierarchy over the world-space triangles of all
// instances. Queries are const and may run concurrently.
class SceneAccel {
 public:
  // Throws Error(kInvalidArgument) when the list is empty or an id is
  // duplicated or reserved. Invalid meshes are rejected the same way.
  explicit SceneAccel(std::vector<SceneInstance> instances);

  // Nearest hit with t in (t_min, t_max). When `instance_mask` is non-empty
  // it is indexed by instance index and only instances with a nonzero entry
  // are intersected.
  std::optional<Hit> Intersect(const Ray& ray, double t_min = 0.0,
                               double t_max = std::numeric_limits<double>::infinity(),
                               std::span<const uint8_t> instance_mask = {}) const;

  // True if anything lies on the segment (t_min, t_max).
  bool Occluded(const Ray& ray, double t_min, double t_max) const;

  const std::vector<SceneInstance>& instances() const { return instances_; }
  std::size_t num_triangles() const { return tris_.size(); }
  // Index of the instance with this id, or nullopt.
  std::optional<uint32_t> IndexOf(uint32_t instance_id) const;
  Bounds3 bounds() const;
  // World-space bounds of one instance.
  Bounds3 InstanceBounds(uint32_t instance_index) const;

  // Ordered world-space vertices of triangle `k` in flattened order, with
  // its instance index and local triangle id. Exposed for oracles.
  struct WorldTriangle {
    Vec3 a, b, c;
    uint32_t instance_index;
    uint32_t triangle_id;
  };
  std::span<const WorldTriangle> world_triangles() const { return tris_; }

  // Fills shading data of a hit from its triangle and barycentrics.
  void FinishHit(Hit& hit) const;

  int depth() const { return depth_; }

 private:
  struct Node {
    Bounds3 bounds;
    uint32_t offset = 0;  // first triangle (leaf) or second child (inner)
    uint32_t count = 0;   // triangles in leaf; 0 for inner nodes
    uint32_t axis = 0;
  };

  uint32_t Build(uint32_t begin, uint32_t end, std::vector<Vec3>& centroids,
                 std::vector<Bounds3>& tri_bounds, int depth);

  std::vector<SceneInstance> instances_;
  std::vector<WorldTriangle> tris_;
  std::vector<Node> nodes_;
  int depth_ = 0;
};

struct IdDepthBuffer {
  int width = 0;
  int height = 0;
  std::vector<uint32_t> ids;   // kBackgroundId where nothing was hit
  std::vector<double> depth;   // camera-frame depth, +inf for background

  uint32_t id(int x, int y) const { return ids[static_cast<std::size_t>(y) * width + x]; }
};

// One primary ray through each pixel center. With `subset`, only the listed
// instance ids are intersected (an object rendered alone). Unknown ids in
// the subset are ignored.
IdDepthBuffer RasterizeIds(const SceneAccel& accel, const Camera& camera,
                           const std::optional<std::vector<uint32_t>>& subset = std::nullopt,
                           int workers = 1);

}  // namespace pbrsynth::geom
