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

#include "pbrsynth/compose/collide.hpp"

#include <algorithm>

namespace pbrsynth::compose {

WorldHull::WorldHull(const ConvexHull& h, const Pose& world_from_body)
    : hull(&h), center(world_from_body.translation) {
  vertices.reserve(h.vertices.size());
  for (const Vec3& v : h.vertices) {
    vertices.push_back(world_from_body.Apply(v));
    bounds.Extend(vertices.back());
  }
  normals.reserve(h.faces.size());
  offsets.reserve(h.faces.size());
  for (const auto& f : h.faces) {
    normals.push_back(world_from_body.rotation * f.normal);
    offsets.push_back(f.offset + normals.back().dot(world_from_body.translation));
  }
}

Vec3 WorldHull::Support(const Vec3& dir) const {
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

std::vector<ContactPoint> ReduceManifold(const std::vector<ContactPoint>& candidates, const Vec3& normal, double band) {
  // Speculative points far above the deepest one would otherwise crowd out
  // nearly touching points that carry the load.
  double deepest = std::numeric_limits<double>::infinity();
  for (const auto& p : candidates) deepest = std::min(deepest, p.separation);
  std::vector<ContactPoint> points;
  for (const auto& p : candidates) {
    if (p.separation <= deepest + band) points.push_back(p);
  }
  if (points.size() <= 4) return points;
  std::size_t i0 = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].separation < points[i0].separation) i0 = i;
  }
  std::size_t i1 = i0;
  double best = -1.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = (points[i].position - points[i0].position).squaredNorm();
    if (d > best) {
      best = d;
      i1 = i;
    }
  }
  const Vec3 a = points[i0].position;
  const Vec3 b = points[i1].position;
  auto signed_area = [&](std::size_t i) { return (a - points[i].position).cross(b - points[i].position).dot(normal); };
  std::size_t i2 = i0, i3 = i0;
  double max_area = 0.0, min_area = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double s = signed_area(i);
    if (s > max_area) { max_area = s; i2 = i; }
    if (s < min_area) { min_area = s; i3 = i; }
  }
  std::vector<ContactPoint> out = {points[i0]};
  if (i1 != i0) out.push_back(points[i1]);
  if (i2 != i0) out.push_back(points[i2]);
  if (i3 != i0) out.push_back(points[i3]);
  return out;
}

constexpr std::size_t kMaxPlaneContacts = 32;

double ManifoldBand(double margin) { return std::max(1e-3, 0.2 * margin); }

std::optional<Manifold> CollideStage(const WorldHull& body, const Stage& stage, double margin) {
  std::vector<ContactPoint> pts;
  for (const Vec3& v : body.vertices) {
    const double d = stage.SignedDistance(v);
    if (d < margin && stage.ContainsProjection(v)) pts.push_back({v, d});
  }
  // The rim of the stage: hull edges crossing the polygon boundary, and
  // polygon corners lying under the hull.
  const Vec3& n = stage.normal();
  Vec3 u, w;
  OrthonormalBasis(n, u, w);
  auto flat = [&](const Vec3& p) { return Vec2(p.dot(u), p.dot(w)); };
  auto cross2 = [](const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); };
  const auto& poly = stage.polygon();
  for (const auto& e : body.hull->edges) {
    const Vec3& a = body.vertices[e.a];
    const Vec3& b = body.vertices[e.b];
    if (std::min(stage.SignedDistance(a), stage.SignedDistance(b)) >= margin) continue;
    const Vec2 pa = flat(a), da = flat(b) - pa;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2 pc = flat(poly[i]), dc = flat(poly[(i + 1) % poly.size()]) - pc;
      const double denom = cross2(da, dc);
      if (std::abs(denom) < 1e-15) continue;
      const double s = cross2(pc - pa, dc) / denom;
      const double t = cross2(pc - pa, da) / denom;
      if (s <= 0.0 || s >= 1.0 || t < 0.0 || t > 1.0) continue;
      const Vec3 x = a + s * (b - a);
      const double d = stage.SignedDistance(x);
      if (d < margin) pts.push_back({x, d});
    }
  }
  for (const Vec3& c : poly) {
    // Vertical line through the corner clipped by the hull's face planes.
    double enter = -std::numeric_limits<double>::infinity();
    double exit = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < body.normals.size() && enter <= exit; ++f) {
      const double dn = body.normals[f].dot(n);
      const double dist = body.offsets[f] - body.normals[f].dot(c);
      if (std::abs(dn) < 1e-12) {
        if (dist < 0.0) exit = -std::numeric_limits<double>::infinity();
      } else if (dn < 0.0) {
        enter = std::max(enter, dist / dn);
      } else {
        exit = std::min(exit, dist / dn);
      }
    }
    if (enter <= exit && enter < margin) pts.push_back({c + enter * n, enter});
  }
  if (pts.empty()) return std::nullopt;
  // Plane contacts are cheap, so every vertex near the deepest one is kept.
  // Dropping some of them lets a finely tessellated body seesaw between
  // vertices that take turns carrying the load.
  std::stable_sort(pts.begin(), pts.end(), [](const ContactPoint& x, const ContactPoint& y) { return x.separation < y.separation; });
  const double limit = pts.front().separation + ManifoldBand(margin);
  std::size_t keep = 0;
  while (keep < pts.size() && keep < kMaxPlaneContacts && pts[keep].separation <= limit) ++keep;
  pts.resize(keep);
  Manifold m;
  m.normal = stage.normal();
  m.points = std::move(pts);
  return m;
}

namespace {

struct FaceQuery {
  double separation = -std::numeric_limits<double>::infinity();
  int face = -1;
};

struct EdgeQuery {
  double separation = -std::numeric_limits<double>::infinity();
  int edge_a = -1;
  int edge_b = -1;
  Vec3 axis = Vec3::Zero();
};

FaceQuery QueryFaces(const WorldHull& a, const WorldHull& b) {
  FaceQuery q;
  for (std::size_t f = 0; f < a.normals.size(); ++f) {
    const Vec3 support = b.Support(-a.normals[f]);
    const double sep = a.normals[f].dot(support) - a.offsets[f];
    if (sep > q.separation) {
      q.separation = sep;
      q.face = static_cast<int>(f);
    }
  }
  return q;
}

// Arcs (a, b) and (c, d) on the Gauss map intersect, i.e. the edge pair
// builds a face of the Minkowski difference.
bool IsMinkowskiFace(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const Vec3 bxa = b.cross(a);
  const Vec3 dxc = d.cross(c);
  const double cba = c.dot(bxa);
  const double dba = d.dot(bxa);
  const double adc = a.dot(dxc);
  const double bdc = b.dot(dxc);
  return cba * dba < 0.0 && adc * bdc < 0.0 && cba * bdc > 0.0;
}

EdgeQuery QueryEdges(const WorldHull& a, const WorldHull& b) {
  EdgeQuery q;
  const auto& ea = a.hull->edges;
  const auto& eb = b.hull->edges;
  for (std::size_t i = 0; i < ea.size(); ++i) {
    const Vec3& pa = a.vertices[ea[i].a];
    const Vec3 da = a.vertices[ea[i].b] - pa;
    const Vec3& na1 = a.normals[ea[i].face_left];
    const Vec3& na2 = a.normals[ea[i].face_right];
    for (std::size_t j = 0; j < eb.size(); ++j) {
      const Vec3& nb1 = b.normals[eb[j].face_left];
      const Vec3& nb2 = b.normals[eb[j].face_right];
      if (!IsMinkowskiFace(na1, na2, -nb1, -nb2)) continue;
      const Vec3& pb = b.vertices[eb[j].a];
      const Vec3 db = b.vertices[eb[j].b] - pb;
      Vec3 axis = da.cross(db);
      const double len = axis.norm();
      if (len < 1e-9 * da.norm() * db.norm()) continue;  // parallel edges
      axis /= len;
      if (axis.dot(pa - a.center) < 0.0) axis = -axis;
      const double sep = axis.dot(pb - pa);
      if (sep > q.separation) {
        q.separation = sep;
        q.edge_a = static_cast<int>(i);
        q.edge_b = static_cast<int>(j);
        q.axis = axis;
      }
    }
  }
  return q;
}

// Clips the incident face of `inc` against the side planes of reference
// face `ref_face` of `ref`. Points are returned on the incident surface.
std::vector<ContactPoint> ClipFaces(const WorldHull& ref, int ref_face, const WorldHull& inc, double margin) {
  const Vec3& n = ref.normals[ref_face];
  int inc_face = 0;
  double min_dot = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < inc.normals.size(); ++f) {
    const double d = inc.normals[f].dot(n);
    if (d < min_dot) {
      min_dot = d;
      inc_face = static_cast<int>(f);
    }
  }
  std::vector<Vec3> poly;
  for (uint32_t v : inc.hull->faces[inc_face].loop) poly.push_back(inc.vertices[v]);

  const auto& loop = ref.hull->faces[ref_face].loop;
  std::vector<Vec3> next;
  for (std::size_t k = 0; k < loop.size() && !poly.empty(); ++k) {
    const Vec3& v0 = ref.vertices[loop[k]];
    const Vec3& v1 = ref.vertices[loop[(k + 1) % loop.size()]];
    const Vec3 side = (v1 - v0).cross(n).normalized();  // outward for CCW loops
    const double off = side.dot(v0);
    next.clear();
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec3& p = poly[i];
      const Vec3& q = poly[(i + 1) % poly.size()];
      const double dp = side.dot(p) - off;
      const double dq = side.dot(q) - off;
      if (dp <= 0.0) next.push_back(p);
      if ((dp <= 0.0) != (dq <= 0.0)) next.push_back(p + (q - p) * (dp / (dp - dq)));
    }
    poly.swap(next);
  }
  std::vector<ContactPoint> out;
  for (const Vec3& p : poly) {
    const double sep = n.dot(p) - ref.offsets[ref_face];
    if (sep < margin) out.push_back({p, sep});
  }
  return out;
}

void ClosestPointsOnSegments(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2, Vec3& c1, Vec3& c2) {
  const Vec3 d1 = q1 - p1;
  const Vec3 d2 = q2 - p2;
  const Vec3 r = p1 - p2;
  const double a = d1.dot(d1);
  const double e = d2.dot(d2);
  const double f = d2.dot(r);
  const double c = d1.dot(r);
  const double b = d1.dot(d2);
  const double denom = a * e - b * b;
  double s = denom > 1e-300 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
  double t = (b * s + f) / e;
  if (t < 0.0) {
    t = 0.0;
    s = std::clamp(-c / a, 0.0, 1.0);
  } else if (t > 1.0) {
    t = 1.0;
    s = std::clamp((b - c) / a, 0.0, 1.0);
  }
  c1 = p1 + d1 * s;
  c2 = p2 + d2 * t;
}

}  // namespace

double HullSeparation(const WorldHull& a, const WorldHull& b) {
  const FaceQuery fa = QueryFaces(a, b);
  const FaceQuery fb = QueryFaces(b, a);
  const EdgeQuery e = QueryEdges(a, b);
  return std::max({fa.separation, fb.separation, e.separation});
}

std::optional<Manifold> CollideHulls(const WorldHull& a, const WorldHull& b, double margin) {
  const FaceQuery fa = QueryFaces(a, b);
  if (fa.separation > margin) return std::nullopt;
  const FaceQuery fb = QueryFaces(b, a);
  if (fb.separation > margin) return std::nullopt;
  const EdgeQuery e = QueryEdges(a, b);
  if (e.separation > margin) return std::nullopt;

  // Face contacts are preferred unless an edge axis is clearly better.
  constexpr double kRelEdgeTolerance = 0.90;
  constexpr double kRelFaceTolerance = 0.98;
  constexpr double kAbsTolerance = 1e-4;
  const double max_face = std::max(fa.separation, fb.separation);
  Manifold m;
  if (e.edge_a >= 0 && e.separation > kRelEdgeTolerance * max_face + kAbsTolerance) {
    const auto& ea = a.hull->edges[e.edge_a];
    const auto& eb = b.hull->edges[e.edge_b];
    Vec3 ca, cb;
    ClosestPointsOnSegments(a.vertices[ea.a], a.vertices[ea.b], b.vertices[eb.a], b.vertices[eb.b], ca, cb);
    m.normal = e.axis;
    m.points.push_back({cb, e.separation});
    return m;
  }
  if (fb.separation > kRelFaceTolerance * fa.separation + kAbsTolerance) {
    // Reference face on B: normal points B -> A, flip to keep A -> B and
    // move the points onto B's surface.
    const Vec3 nb = b.normals[fb.face];
    auto pts = ClipFaces(b, fb.face, a, margin);
    if (pts.empty()) return std::nullopt;
    for (auto& p : pts) p.position -= p.separation * nb;
    m.normal = -nb;
    m.points = ReduceManifold(pts, m.normal, ManifoldBand(margin));
    return m;
  }
  auto pts = ClipFaces(a, fa.face, b, margin);
  if (pts.empty()) return std::nullopt;
  m.normal = a.normals[fa.face];
  m.points = ReduceManifold(pts, m.normal, ManifoldBand(margin));
  return m;
}

}  // namespace pbrsynth::compose
