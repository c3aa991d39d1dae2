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

#include "pbrsynth/geom/accel.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <set>

#include "pbrsynth/common/error.hpp"
#include "pbrsynth/common/parallel.hpp"

namespace pbrsynth::geom {

std::optional<TriangleHit> IntersectTriangle(const Ray& ray, const Vec3& a, const Vec3& b,
                                             const Vec3& c, double t_min, double t_max) {
  const Vec3& d = ray.direction;
  int kz = 0;
  d.cwiseAbs().maxCoeff(&kz);
  int kx = (kz + 1) % 3;
  int ky = (kx + 1) % 3;
  if (d[kz] < 0.0) std::swap(kx, ky);

  const double sx = d[kx] / d[kz];
  const double sy = d[ky] / d[kz];
  const double sz = 1.0 / d[kz];

  const Vec3 pa = a - ray.origin;
  const Vec3 pb = b - ray.origin;
  const Vec3 pc = c - ray.origin;

  const double ax = pa[kx] - sx * pa[kz];
  const double ay = pa[ky] - sy * pa[kz];
  const double bx = pb[kx] - sx * pb[kz];
  const double by = pb[ky] - sy * pb[kz];
  const double cx = pc[kx] - sx * pc[kz];
  const double cy = pc[ky] - sy * pc[kz];

  const double u = cx * by - cy * bx;
  const double v = ax * cy - ay * cx;
  const double w = bx * ay - by * ax;
  if ((u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0)) return std::nullopt;

  const double det = u + v + w;
  if (det == 0.0) return std::nullopt;

  const double az = sz * pa[kz];
  const double bz = sz * pb[kz];
  const double cz = sz * pc[kz];
  const double t_scaled = u * az + v * bz + w * cz;
  const double t = t_scaled / det;
  if (!(t > t_min && t < t_max)) return std::nullopt;
  return TriangleHit{t, v / det, w / det};
}

namespace {

constexpr int kLeafSize = 4;
constexpr int kBins = 16;
constexpr int kMaxDepth = 64;

// Slab test; returns the entry distance or nullopt. The far bound is padded
// so rounding can never cull a box that a triangle inside it is hit in.
std::optional<double> IntersectBox(const Bounds3& box, const Vec3& origin, const Vec3& inv_dir,
                                   double t_min, double t_max) {
  double t0 = t_min;
  double t1 = t_max;
  for (int k = 0; k < 3; ++k) {
    if (std::isinf(inv_dir[k])) {
      if (origin[k] < box.lo[k] || origin[k] > box.hi[k]) return std::nullopt;
      continue;
    }
    double near = (box.lo[k] - origin[k]) * inv_dir[k];
    double far = (box.hi[k] - origin[k]) * inv_dir[k];
    if (near > far) std::swap(near, far);
    far *= 1.0 + 1e-12;
    t0 = near > t0 ? near : t0;
    t1 = far < t1 ? far : t1;
    if (t0 > t1) return std::nullopt;
  }
  return t0;
}

}  // namespace

SceneAccel::SceneAccel(std::vector<SceneInstance> instances) : instances_(std::move(instances)) {
  if (instances_.empty()) Fail(ErrorCode::kInvalidArgument, "scene has no instances");
  std::set<uint32_t> ids;
  for (uint32_t i = 0; i < instances_.size(); ++i) {
    const SceneInstance& inst = instances_[i];
    if (!inst.mesh) Fail(ErrorCode::kInvalidArgument, "instance without mesh");
    if (inst.id == kBackgroundId) Fail(ErrorCode::kInvalidArgument, "instance id is reserved for background");
    if (!ids.insert(inst.id).second) Fail(ErrorCode::kInvalidArgument, "duplicate instance id " + std::to_string(inst.id));
    inst.mesh->Validate();
    for (uint32_t k = 0; k < inst.mesh->triangles.size(); ++k) {
      const Triangle& t = inst.mesh->triangles[k];
      const auto& v = inst.mesh->vertices;
      tris_.push_back({inst.world_from_object.Apply(v[t[0]]), inst.world_from_object.Apply(v[t[1]]),
                       inst.world_from_object.Apply(v[t[2]]), i, k});
    }
  }

  std::vector<Vec3> centroids(tris_.size());
  std::vector<Bounds3> tri_bounds(tris_.size());
  for (std::size_t i = 0; i < tris_.size(); ++i) {
    tri_bounds[i].Extend(tris_[i].a);
    tri_bounds[i].Extend(tris_[i].b);
    tri_bounds[i].Extend(tris_[i].c);
    centroids[i] = tri_bounds[i].Center();
  }
  nodes_.reserve(2 * tris_.size() / kLeafSize + 1);
  Build(0, static_cast<uint32_t>(tris_.size()), centroids, tri_bounds, 1);
}

uint32_t SceneAccel::Build(uint32_t begin, uint32_t end, std::vector<Vec3>& centroids,
                           std::vector<Bounds3>& tri_bounds, int depth) {
  depth_ = std::max(depth_, depth);
  const auto node_index = static_cast<uint32_t>(nodes_.size());
  nodes_.emplace_back();
  Bounds3 bounds;
  Bounds3 centroid_bounds;
  for (uint32_t i = begin; i < end; ++i) {
    bounds.Extend(tri_bounds[i]);
    centroid_bounds.Extend(centroids[i]);
  }
  nodes_[node_index].bounds = bounds;

  const uint32_t count = end - begin;
  auto make_leaf = [&] {
    nodes_[node_index].offset = begin;
    nodes_[node_index].count = count;
    return node_index;
  };
  if (count <= kLeafSize || depth >= kMaxDepth) return make_leaf();

  // Binned surface-area heuristic over the widest centroid axis.
  int axis = 0;
  centroid_bounds.Extent().maxCoeff(&axis);
  const double lo = centroid_bounds.lo[axis];
  const double extent = centroid_bounds.hi[axis] - lo;
  uint32_t mid = begin;
  if (extent > 0.0) {
    std::array<Bounds3, kBins> bin_bounds;
    std::array<uint32_t, kBins> bin_count{};
    auto bin_of = [&](uint32_t i) {
      int b = static_cast<int>(kBins * (centroids[i][axis] - lo) / extent);
      return std::clamp(b, 0, kBins - 1);
    };
    for (uint32_t i = begin; i < end; ++i) {
      const int b = bin_of(i);
      ++bin_count[b];
      bin_bounds[b].Extend(tri_bounds[i]);
    }
    std::array<double, kBins - 1> cost{};
    Bounds3 left;
    uint32_t left_count = 0;
    for (int s = 0; s < kBins - 1; ++s) {
      left.Extend(bin_bounds[s]);
      left_count += bin_count[s];
      cost[s] = left_count * left.SurfaceArea();
    }
    Bounds3 right;
    uint32_t right_count = 0;
    for (int s = kBins - 1; s > 0; --s) {
      right.Extend(bin_bounds[s]);
      right_count += bin_count[s];
      cost[s - 1] += right_count * right.SurfaceArea();
    }
    const int best = static_cast<int>(std::min_element(cost.begin(), cost.end()) - cost.begin());
    const double leaf_cost = count * bounds.SurfaceArea();
    const double split_cost = 0.125 * bounds.SurfaceArea() + cost[best];
    if (count <= 16 && split_cost >= leaf_cost) return make_leaf();

    auto* first = tris_.data() + begin;
    std::vector<uint32_t> order(count);
    std::iota(order.begin(), order.end(), begin);
    auto pivot = std::stable_partition(order.begin(), order.end(),
                                       [&](uint32_t i) { return bin_of(i) <= best; });
    mid = begin + static_cast<uint32_t>(pivot - order.begin());
    // Apply the permutation to triangles and their cached bounds.
    std::vector<WorldTriangle> t2(count);
    std::vector<Vec3> c2(count);
    std::vector<Bounds3> b2(count);
    for (uint32_t k = 0; k < count; ++k) {
      t2[k] = tris_[order[k]];
      c2[k] = centroids[order[k]];
      b2[k] = tri_bounds[order[k]];
    }
    std::copy(t2.begin(), t2.end(), first);
    std::copy(c2.begin(), c2.end(), centroids.begin() + begin);
    std::copy(b2.begin(), b2.end(), tri_bounds.begin() + begin);
  }
  if (mid == begin || mid == end) {
    if (count <= 64) return make_leaf();
    mid = begin + count / 2;  // coincident centroids: arbitrary halves
  }

  nodes_[node_index].axis = static_cast<uint32_t>(axis);
  Build(begin, mid, centroids, tri_bounds, depth + 1);
  const uint32_t second = Build(mid, end, centroids, tri_bounds, depth + 1);
  nodes_[node_index].offset = second;
  nodes_[node_index].count = 0;
  return node_index;
}

std::optional<Hit> SceneAccel::Intersect(const Ray& ray, double t_min, double t_max,
                                         std::span<const uint8_t> instance_mask) const {
  const Vec3 inv_dir = ray.direction.cwiseInverse();
  const bool dir_neg[3] = {inv_dir.x() < 0, inv_dir.y() < 0, inv_dir.z() < 0};
  bool found = false;
  Hit best;
  best.t = t_max;
  uint32_t best_inst_id = kBackgroundId;
  uint32_t best_tri = 0;

  std::array<uint32_t, 2 * kMaxDepth + 2> stack;
  int sp = 0;
  stack[sp++] = 0;
  while (sp > 0) {
    const Node& node = nodes_[stack[--sp]];
    // Boxes entered exactly at the current best distance may still hold a
    // tie that wins on ids, so only strictly farther boxes are culled.
    const auto entry = IntersectBox(node.bounds, ray.origin, inv_dir, t_min,
                                    found ? best.t : t_max);
    if (!entry) continue;
    if (node.count > 0) {
      for (uint32_t i = node.offset; i < node.offset + node.count; ++i) {
        const WorldTriangle& tri = tris_[i];
        if (!instance_mask.empty() && !instance_mask[tri.instance_index]) continue;
        const double limit = found ? std::nextafter(best.t, std::numeric_limits<double>::infinity()) : t_max;
        const auto h = IntersectTriangle(ray, tri.a, tri.b, tri.c, t_min, limit);
        if (!h) continue;
        const uint32_t inst_id = instances_[tri.instance_index].id;
        if (!found || CloserHit(h->t, inst_id, tri.triangle_id, best.t, best_inst_id, best_tri)) {
          found = true;
          best.t = h->t;
          best.b1 = h->b1;
          best.b2 = h->b2;
          best.instance_index = tri.instance_index;
          best.triangle_id = tri.triangle_id;
          best_inst_id = inst_id;
          best_tri = tri.triangle_id;
        }
      }
    } else {
      const uint32_t first = static_cast<uint32_t>(&node - nodes_.data()) + 1;
      const uint32_t second = node.offset;
      // Visit the near child first.
      if (dir_neg[node.axis]) {
        stack[sp++] = first;
        stack[sp++] = second;
      } else {
        stack[sp++] = second;
        stack[sp++] = first;
      }
    }
  }
  if (!found) return std::nullopt;
  best.instance_id = best_inst_id;
  FinishHit(best);
  return best;
}

bool SceneAccel::Occluded(const Ray& ray, double t_min, double t_max) const {
  const Vec3 inv_dir = ray.direction.cwiseInverse();
  std::array<uint32_t, 2 * kMaxDepth + 2> stack;
  int sp = 0;
  stack[sp++] = 0;
  while (sp > 0) {
    const Node& node = nodes_[stack[--sp]];
    if (!IntersectBox(node.bounds, ray.origin, inv_dir, t_min, t_max)) continue;
    if (node.count > 0) {
      for (uint32_t i = node.offset; i < node.offset + node.count; ++i) {
        const WorldTriangle& tri = tris_[i];
        if (IntersectTriangle(ray, tri.a, tri.b, tri.c, t_min, t_max)) return true;
      }
    } else {
      stack[sp++] = node.offset;
      stack[sp++] = static_cast<uint32_t>(&node - nodes_.data()) + 1;
    }
  }
  return false;
}

void SceneAccel::FinishHit(Hit& hit) const {
  const SceneInstance& inst = instances_[hit.instance_index];
  const Mesh& mesh = *inst.mesh;
  const Triangle& t = mesh.triangles[hit.triangle_id];
  const Mat3& r = inst.world_from_object.rotation;
  const Vec3 a = r * mesh.vertices[t[0]];
  const Vec3 b = r * mesh.vertices[t[1]];
  const Vec3 c = r * mesh.vertices[t[2]];
  Vec3 ng = (b - a).cross(c - a);
  const double len = ng.norm();
  hit.geometric_normal = len > 0.0 ? Vec3(ng / len) : Vec3::UnitZ();
  const double b0 = 1.0 - hit.b1 - hit.b2;
  Vec3 ns = r * (b0 * mesh.normals[t[0]] + hit.b1 * mesh.normals[t[1]] + hit.b2 * mesh.normals[t[2]]);
  const double ns_len = ns.norm();
  hit.shading_normal = ns_len > 0.0 ? Vec3(ns / ns_len) : hit.geometric_normal;
  hit.instance_id = inst.id;
}

std::optional<uint32_t> SceneAccel::IndexOf(uint32_t instance_id) const {
  for (uint32_t i = 0; i < instances_.size(); ++i) {
    if (instances_[i].id == instance_id) return i;
  }
  return std::nullopt;
}

Bounds3 SceneAccel::bounds() const { return nodes_.front().bounds; }

Bounds3 SceneAccel::InstanceBounds(uint32_t instance_index) const {
  const SceneInstance& inst = instances_.at(instance_index);
  Bounds3 b;
  for (const Vec3& v : inst.mesh->vertices) b.Extend(inst.world_from_object.Apply(v));
  return b;
}

IdDepthBuffer RasterizeIds(const SceneAccel& accel, const Camera& camera,
                           const std::optional<std::vector<uint32_t>>& subset, int workers) {
  camera.intrinsics.Validate();
  IdDepthBuffer buf;
  buf.width = camera.width();
  buf.height = camera.height();
  const std::size_t n = static_cast<std::size_t>(buf.width) * buf.height;
  buf.ids.assign(n, kBackgroundId);
  buf.depth.assign(n, std::numeric_limits<double>::infinity());

  std::vector<uint8_t> mask;
  if (subset) {
    mask.assign(accel.instances().size(), 0);
    bool any = false;
    for (uint32_t id : *subset) {
      if (auto idx = accel.IndexOf(id)) {
        mask[*idx] = 1;
        any = true;
      }
    }
    if (!any) return buf;
  }
  const Vec3 axis = -camera.world_from_camera.rotation.col(2);
  ParallelFor(static_cast<std::size_t>(buf.height), workers, [&](std::size_t y) {
    for (int x = 0; x < buf.width; ++x) {
      const Ray ray = camera.GenerateRay(x + 0.5, static_cast<double>(y) + 0.5);
      if (auto hit = accel.Intersect(ray, 0.0, std::numeric_limits<double>::infinity(), mask)) {
        const std::size_t i = y * buf.width + x;
        buf.ids[i] = hit->instance_id;
        buf.depth[i] = hit->t * ray.direction.dot(axis);
      }
    }
  });
  return buf;
}

}  // namespace pbrsynth::geom
