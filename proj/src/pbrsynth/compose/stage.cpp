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

#include "pbrsynth/compose/stage.hpp"

#include <algorithm>

#include "pbrsynth/common/error.hpp"

namespace pbrsynth::compose {

namespace {

double Cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool SegmentsIntersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const double d1 = Cross2(q2 - q1, p1 - q1);
  const double d2 = Cross2(q2 - q1, p2 - q1);
  const double d3 = Cross2(p2 - p1, q1 - p1);
  const double d4 = Cross2(p2 - p1, q2 - p1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

bool InTriangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  return Cross2(b - a, p - a) >= 0 && Cross2(c - b, p - b) >= 0 && Cross2(a - c, p - c) >= 0;
}

}  // namespace

Stage::Stage(std::string name, std::vector<Vec3> polygon)
    : name_(std::move(name)), polygon_(std::move(polygon)) {
  const std::size_t n = polygon_.size();
  if (n < 3) Fail(ErrorCode::kDegenerate, "stage '" + name_ + "' needs at least 3 points");

  // Newell's method gives a robust normal for any simple polygon.
  Vec3 newell = Vec3::Zero();
  Vec3 centroid = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& a = polygon_[i];
    const Vec3& b = polygon_[(i + 1) % n];
    newell += a.cross(b);
    centroid += a;
  }
  centroid /= static_cast<double>(n);
  const double twice_area = newell.norm();
  if (!(twice_area > 1e-12)) Fail(ErrorCode::kDegenerate, "stage '" + name_ + "' has zero area");
  normal_ = newell / twice_area;
  bool flipped = false;
  if (normal_.z() < 0.0) {
    normal_ = -normal_;
    flipped = true;
  }
  offset_ = normal_.dot(centroid);
  for (const Vec3& p : polygon_) {
    if (std::abs(SignedDistance(p)) > 1e-6) Fail(ErrorCode::kDegenerate, "stage '" + name_ + "' is not planar");
  }

  origin_ = centroid;
  OrthonormalBasis(normal_, axis_u_, axis_v_);
  for (const Vec3& p : polygon_) polygon2d_.push_back(ToPlane(p));
  // Counter-clockwise in the plane basis for ear clipping.
  if (flipped) std::reverse(polygon2d_.begin(), polygon2d_.end());

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (SegmentsIntersect(polygon2d_[i], polygon2d_[(i + 1) % n], polygon2d_[j], polygon2d_[(j + 1) % n])) {
        Fail(ErrorCode::kInvalidArgument, "stage '" + name_ + "' polygon self-intersects");
      }
    }
  }

  // Ear clipping on the CCW polygon.
  std::vector<int> remaining(n);
  for (std::size_t i = 0; i < n; ++i) remaining[i] = static_cast<int>(i);
  while (remaining.size() > 3) {
    bool clipped = false;
    for (std::size_t k = 0; k < remaining.size(); ++k) {
      const int ia = remaining[(k + remaining.size() - 1) % remaining.size()];
      const int ib = remaining[k];
      const int ic = remaining[(k + 1) % remaining.size()];
      const Vec2& a = polygon2d_[ia];
      const Vec2& b = polygon2d_[ib];
      const Vec2& c = polygon2d_[ic];
      if (Cross2(b - a, c - b) <= 0) continue;  // reflex or collinear
      bool contains = false;
      for (int other : remaining) {
        if (other == ia || other == ib || other == ic) continue;
        if (InTriangle(polygon2d_[other], a, b, c)) {
          contains = true;
          break;
        }
      }
      if (contains) continue;
      triangles_.push_back({ia, ib, ic});
      remaining.erase(remaining.begin() + static_cast<long>(k));
      clipped = true;
      break;
    }
    if (!clipped) {
      // Only collinear runs remain; drop the middle vertex.
      remaining.erase(remaining.begin());
    }
  }
  if (Cross2(polygon2d_[remaining[1]] - polygon2d_[remaining[0]], polygon2d_[remaining[2]] - polygon2d_[remaining[1]]) > 0) {
    triangles_.push_back({remaining[0], remaining[1], remaining[2]});
  }

  double acc = 0.0;
  for (const auto& t : triangles_) {
    acc += 0.5 * Cross2(polygon2d_[t[1]] - polygon2d_[t[0]], polygon2d_[t[2]] - polygon2d_[t[0]]);
    cumulative_area_.push_back(acc);
  }
  area_ = acc;
  if (!(area_ > 1e-12)) Fail(ErrorCode::kDegenerate, "stage '" + name_ + "' has zero area");
}

Vec2 Stage::ToPlane(const Vec3& p) const {
  const Vec3 r = p - origin_;
  return {r.dot(axis_u_), r.dot(axis_v_)};
}

bool Stage::ContainsProjection(const Vec3& p) const {
  const Vec2 q = ToPlane(p);
  bool inside = false;
  const std::size_t n = polygon2d_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = polygon2d_[i];
    const Vec2& b = polygon2d_[j];
    if ((a.y() > q.y()) != (b.y() > q.y())) {
      const double x = (b.x() - a.x()) * (q.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (q.x() < x) inside = !inside;
    }
  }
  return inside;
}

Vec3 Stage::SamplePoint(Rng& rng) const {
  const double pick = rng.Uniform() * area_;
  auto it = std::upper_bound(cumulative_area_.begin(), cumulative_area_.end(), pick);
  const std::size_t k = std::min<std::size_t>(it - cumulative_area_.begin(), triangles_.size() - 1);
  const auto& t = triangles_[k];
  double u = rng.Uniform();
  double v = rng.Uniform();
  if (u + v > 1.0) {
    u = 1.0 - u;
    v = 1.0 - v;
  }
  const Vec2 q = polygon2d_[t[0]] + u * (polygon2d_[t[1]] - polygon2d_[t[0]]) + v * (polygon2d_[t[2]] - polygon2d_[t[0]]);
  return origin_ + q.x() * axis_u_ + q.y() * axis_v_;
}

}  // namespace pbrsynth::compose
