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

#include "pbrsynth/compose/hull.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

#include "pbrsynth/common/error.hpp"

namespace pbrsynth::compose {

double ConvexHull::BoundingRadius() const {
  double r = 0.0;
  for (const Vec3& v : vertices) r = std::max(r, v.norm());
  return r;
}

Vec3 ConvexHull::Support(const Vec3& dir) const {
  std::size_t best = 0;
  double best_dot = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const double d = vertices[i].dot(dir);
    if (d > best_dot) {
      best_dot = d;
      best = i;
    }
  }
  return vertices[best];
}

namespace {

struct TriFace {
  std::array<uint32_t, 3> v;
  Vec3 normal;
  double offset;
  bool alive = true;
};

uint64_t EdgeKey(uint32_t a, uint32_t b) { return (static_cast<uint64_t>(a) << 32) | b; }

TriFace MakeFace(const std::vector<Vec3>& pts, uint32_t a, uint32_t b, uint32_t c) {
  TriFace f;
  f.v = {a, b, c};
  f.normal = (pts[b] - pts[a]).cross(pts[c] - pts[a]).normalized();
  f.offset = f.normal.dot(pts[a]);
  return f;
}

}  // namespace

ConvexHull BuildConvexHull(std::span<const Vec3> input) {
  std::vector<Vec3> pts(input.begin(), input.end());
  std::sort(pts.begin(), pts.end(), [](const Vec3& a, const Vec3& b) {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 4) Fail(ErrorCode::kDegenerate, "convex hull needs at least 4 distinct points");

  Bounds3 box;
  for (const Vec3& p : pts) box.Extend(p);
  const double scale = box.Extent().maxCoeff();
  const double eps = 1e-10 * scale;

  // Initial tetrahedron from extreme points.
  const uint32_t i0 = 0;  // lexicographic minimum
  uint32_t i1 = 0, i2 = 0, i3 = 0;
  double best = 0.0;
  for (uint32_t i = 0; i < pts.size(); ++i) {
    const double d = (pts[i] - pts[i0]).squaredNorm();
    if (d > best) { best = d; i1 = i; }
  }
  const Vec3 axis = (pts[i1] - pts[i0]).normalized();
  best = 0.0;
  for (uint32_t i = 0; i < pts.size(); ++i) {
    const Vec3 r = pts[i] - pts[i0];
    const double d = (r - r.dot(axis) * axis).squaredNorm();
    if (d > best) { best = d; i2 = i; }
  }
  if (best <= eps * eps) Fail(ErrorCode::kDegenerate, "points are collinear");
  const Vec3 plane_n = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
  best = 0.0;
  for (uint32_t i = 0; i < pts.size(); ++i) {
    const double d = std::abs(plane_n.dot(pts[i] - pts[i0]));
    if (d > best) { best = d; i3 = i; }
  }
  if (best <= 1e-8 * scale) Fail(ErrorCode::kDegenerate, "points are coplanar");

  std::vector<TriFace> faces;
  std::unordered_map<uint64_t, uint32_t> edge_face;
  auto add_face = [&](uint32_t a, uint32_t b, uint32_t c) {
    const auto idx = static_cast<uint32_t>(faces.size());
    faces.push_back(MakeFace(pts, a, b, c));
    edge_face[EdgeKey(a, b)] = idx;
    edge_face[EdgeKey(b, c)] = idx;
    edge_face[EdgeKey(c, a)] = idx;
  };
  if (plane_n.dot(pts[i3] - pts[i0]) > 0.0) std::swap(i1, i2);
  // Now i3 lies below the (i0, i1, i2) plane, so that face points outward.
  add_face(i0, i1, i2);
  add_face(i0, i3, i1);
  add_face(i1, i3, i2);
  add_face(i2, i3, i0);

  std::vector<uint32_t> visible;
  std::vector<std::pair<uint32_t, uint32_t>> horizon;
  for (uint32_t p = 0; p < pts.size(); ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    visible.clear();
    for (uint32_t f = 0; f < faces.size(); ++f) {
      if (faces[f].alive && faces[f].normal.dot(pts[p]) - faces[f].offset > eps) visible.push_back(f);
    }
    if (visible.empty()) continue;
    for (uint32_t f : visible) faces[f].alive = false;
    horizon.clear();
    for (uint32_t f : visible) {
      const auto& v = faces[f].v;
      for (int k = 0; k < 3; ++k) {
        const uint32_t a = v[k];
        const uint32_t b = v[(k + 1) % 3];
        auto twin = edge_face.find(EdgeKey(b, a));
        if (twin != edge_face.end() && faces[twin->second].alive) horizon.emplace_back(a, b);
      }
    }
    for (uint32_t f : visible) {
      const auto& v = faces[f].v;
      for (int k = 0; k < 3; ++k) {
        auto it = edge_face.find(EdgeKey(v[k], v[(k + 1) % 3]));
        if (it != edge_face.end() && it->second == f) edge_face.erase(it);
      }
    }
    for (const auto& [a, b] : horizon) add_face(a, b, p);
  }

  // Merge coplanar neighbours into polygons by flood fill.
  std::vector<int> group(faces.size(), -1);
  std::vector<std::vector<uint32_t>> groups;
  for (uint32_t f = 0; f < faces.size(); ++f) {
    if (!faces[f].alive || group[f] >= 0) continue;
    const int g = static_cast<int>(groups.size());
    groups.emplace_back();
    std::vector<uint32_t> stack = {f};
    group[f] = g;
    while (!stack.empty()) {
      const uint32_t cur = stack.back();
      stack.pop_back();
      groups[g].push_back(cur);
      const auto& v = faces[cur].v;
      for (int k = 0; k < 3; ++k) {
        auto twin = edge_face.find(EdgeKey(v[(k + 1) % 3], v[k]));
        if (twin == edge_face.end()) continue;
        const uint32_t nb = twin->second;
        if (group[nb] >= 0 || !faces[nb].alive) continue;
        if (faces[nb].normal.dot(faces[f].normal) > 1.0 - 1e-9) {
          group[nb] = g;
          stack.push_back(nb);
        }
      }
    }
  }

  ConvexHull hull;
  std::map<uint32_t, uint32_t> remap;
  for (const auto& members : groups) {
    Vec3 n = Vec3::Zero();
    std::vector<uint32_t> verts;
    for (uint32_t f : members) {
      n += faces[f].normal;
      verts.insert(verts.end(), faces[f].v.begin(), faces[f].v.end());
    }
    n.normalize();
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());

    // Order the loop counter-clockwise about the outward normal.
    Vec3 c = Vec3::Zero();
    for (uint32_t v : verts) c += pts[v];
    c /= static_cast<double>(verts.size());
    Vec3 t, b;
    OrthonormalBasis(n, t, b);
    std::vector<std::pair<double, uint32_t>> by_angle;
    for (uint32_t v : verts) {
      const Vec3 r = pts[v] - c;
      by_angle.emplace_back(std::atan2(r.dot(b), r.dot(t)), v);
    }
    std::sort(by_angle.begin(), by_angle.end());
    std::vector<uint32_t> loop;
    for (const auto& [ang, v] : by_angle) loop.push_back(v);

    // Drop vertices that sit on a straight run of the loop.
    for (bool changed = true; changed && loop.size() > 3;) {
      changed = false;
      for (std::size_t k = 0; k < loop.size(); ++k) {
        const Vec3& prev = pts[loop[(k + loop.size() - 1) % loop.size()]];
        const Vec3& cur = pts[loop[k]];
        const Vec3& next = pts[loop[(k + 1) % loop.size()]];
        const Vec3 e0 = cur - prev;
        const Vec3 e1 = next - cur;
        if (e0.cross(e1).norm() <= 1e-9 * e0.norm() * e1.norm()) {
          loop.erase(loop.begin() + static_cast<long>(k));
          changed = true;
          break;
        }
      }
    }

    ConvexHull::Face face;
    face.normal = n;
    face.offset = -std::numeric_limits<double>::infinity();
    for (uint32_t v : loop) {
      auto [it, inserted] = remap.emplace(v, static_cast<uint32_t>(hull.vertices.size()));
      if (inserted) hull.vertices.push_back(pts[v]);
      face.loop.push_back(it->second);
      face.offset = std::max(face.offset, n.dot(pts[v]));
    }
    hull.faces.push_back(std::move(face));
  }

  std::map<std::pair<uint32_t, uint32_t>, uint32_t> directed;
  for (uint32_t f = 0; f < hull.faces.size(); ++f) {
    const auto& loop = hull.faces[f].loop;
    for (std::size_t k = 0; k < loop.size(); ++k) directed[{loop[k], loop[(k + 1) % loop.size()]}] = f;
  }
  for (const auto& [key, f] : directed) {
    if (key.first > key.second) continue;
    auto twin = directed.find({key.second, key.first});
    if (twin == directed.end()) continue;
    hull.edges.push_back({key.first, key.second, f, twin->second});
  }
  return hull;
}

namespace {

void Subexpressions(double w0, double w1, double w2, double& f1, double& f2, double& f3,
                    double& g0, double& g1, double& g2) {
  const double temp0 = w0 + w1;
  f1 = temp0 + w2;
  const double temp1 = w0 * w0;
  const double temp2 = temp1 + w1 * temp0;
  f2 = temp2 + w2 * f1;
  f3 = w0 * temp1 + w1 * temp2 + w2 * f2;
  g0 = f2 + w0 * (f1 + w0);
  g1 = f2 + w1 * (f1 + w1);
  g2 = f2 + w2 * (f1 + w2);
}

}  // namespace

MassProperties ComputeMassProperties(const ConvexHull& hull, double density) {
  constexpr double kMult[10] = {1.0 / 6,  1.0 / 24, 1.0 / 24,  1.0 / 24,  1.0 / 60,
                                1.0 / 60, 1.0 / 60, 1.0 / 120, 1.0 / 120, 1.0 / 120};
  double intg[10] = {};
  for (const auto& face : hull.faces) {
    for (std::size_t k = 1; k + 1 < face.loop.size(); ++k) {
      const Vec3& p0 = hull.vertices[face.loop[0]];
      const Vec3& p1 = hull.vertices[face.loop[k]];
      const Vec3& p2 = hull.vertices[face.loop[k + 1]];
      const Vec3 d = (p1 - p0).cross(p2 - p0);
      double f1x, f2x, f3x, g0x, g1x, g2x;
      double f1y, f2y, f3y, g0y, g1y, g2y;
      double f1z, f2z, f3z, g0z, g1z, g2z;
      Subexpressions(p0.x(), p1.x(), p2.x(), f1x, f2x, f3x, g0x, g1x, g2x);
      Subexpressions(p0.y(), p1.y(), p2.y(), f1y, f2y, f3y, g0y, g1y, g2y);
      Subexpressions(p0.z(), p1.z(), p2.z(), f1z, f2z, f3z, g0z, g1z, g2z);
      intg[0] += d.x() * f1x;
      intg[1] += d.x() * f2x;
      intg[2] += d.y() * f2y;
      intg[3] += d.z() * f2z;
      intg[4] += d.x() * f3x;
      intg[5] += d.y() * f3y;
      intg[6] += d.z() * f3z;
      intg[7] += d.x() * (p0.y() * g0x + p1.y() * g1x + p2.y() * g2x);
      intg[8] += d.y() * (p0.z() * g0y + p1.z() * g1y + p2.z() * g2y);
      intg[9] += d.z() * (p0.x() * g0z + p1.x() * g1z + p2.x() * g2z);
    }
  }
  for (int i = 0; i < 10; ++i) intg[i] *= kMult[i];

  MassProperties mp;
  mp.volume = intg[0];
  if (!(mp.volume > 0.0)) Fail(ErrorCode::kDegenerate, "hull has no volume");
  const Vec3 cm = Vec3(intg[1], intg[2], intg[3]) / intg[0];
  const double v = intg[0];
  Mat3 inertia;
  inertia(0, 0) = intg[5] + intg[6] - v * (cm.y() * cm.y() + cm.z() * cm.z());
  inertia(1, 1) = intg[4] + intg[6] - v * (cm.z() * cm.z() + cm.x() * cm.x());
  inertia(2, 2) = intg[4] + intg[5] - v * (cm.x() * cm.x() + cm.y() * cm.y());
  inertia(0, 1) = inertia(1, 0) = -(intg[7] - v * cm.x() * cm.y());
  inertia(1, 2) = inertia(2, 1) = -(intg[8] - v * cm.y() * cm.z());
  inertia(0, 2) = inertia(2, 0) = -(intg[9] - v * cm.z() * cm.x());
  mp.mass = density * v;
  mp.center_of_mass = cm;
  mp.inertia = density * inertia;
  return mp;
}

ConvexHull Translated(const ConvexHull& hull, const Vec3& offset) {
  ConvexHull out = hull;
  for (Vec3& v : out.vertices) v += offset;
  for (auto& f : out.faces) f.offset += f.normal.dot(offset);
  return out;
}

}  // namespace pbrsynth::compose
