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

#include "pbrsynth/render/pathtracer.hpp"

#include <atomic>
#include <cmath>

#include "pbrsynth/common/error.hpp"
#include "pbrsynth/common/parallel.hpp"
#include "pbrsynth/common/random.hpp"
#include "pbrsynth/render/bsdf.hpp"

namespace pbrsynth::render {

QualityParams GetQualityParams(QualityTier tier) {
  switch (tier) {
    case QualityTier::kLow:
      return {16, 3};
    case QualityTier::kMedium:
      return {64, 6};
    case QualityTier::kHigh:
      return {256, 10};
  }
  Fail(ErrorCode::kInvalidArgument, "unknown quality tier");
}

std::string ToString(QualityTier tier) {
  switch (tier) {
    case QualityTier::kLow:
      return "low";
    case QualityTier::kMedium:
      return "medium";
    case QualityTier::kHigh:
      return "high";
  }
  return "unknown";
}

QualityTier ParseQualityTier(const std::string& name) {
  if (name == "low") return QualityTier::kLow;
  if (name == "medium") return QualityTier::kMedium;
  if (name == "high") return QualityTier::kHigh;
  Fail(ErrorCode::kInvalidArgument, "unknown quality tier '" + name + "' (expected low, medium or high)");
}

RenderSettings RenderSettings::ForTier(QualityTier tier, uint64_t seed) {
  const QualityParams q = GetQualityParams(tier);
  RenderSettings s;
  s.samples_per_pixel = q.samples_per_pixel;
  s.max_depth = q.max_depth;
  s.seed = seed;
  return s;
}

void RenderSettings::Validate() const {
  if (samples_per_pixel < 1) Fail(ErrorCode::kInvalidArgument, "samples per pixel must be >= 1");
  if (max_depth < 1) Fail(ErrorCode::kInvalidArgument, "max path depth must be >= 1");
  if (russian_roulette_depth < 0) Fail(ErrorCode::kInvalidArgument, "russian roulette depth must be >= 0");
}

void ValidateLight(const Light& light) {
  auto emission_ok = [](const Vec3& v) { return v.allFinite() && (v.array() >= 0.0).all(); };
  if (const auto* p = std::get_if<PointLight>(&light)) {
    if (!p->position.allFinite() || !emission_ok(p->intensity)) Fail(ErrorCode::kInvalidArgument, "invalid point light");
  } else if (const auto* a = std::get_if<AreaLight>(&light)) {
    if (!emission_ok(a->radiance) || !(a->Area() > 1e-12) || !a->corner.allFinite()) {
      Fail(ErrorCode::kInvalidArgument, "invalid area light");
    }
  } else if (const auto* s = std::get_if<SunSkyLight>(&light)) {
    if (!(s->sun_direction.norm() > 0.0) || !s->sun_direction.allFinite() || !emission_ok(s->sun_irradiance) ||
        !emission_ok(s->sky_radiance)) {
      Fail(ErrorCode::kInvalidArgument, "invalid sun-sky light");
    }
  }
}

void RenderScene::Validate() const {
  const std::size_t n = accel ? accel->instances().size() : 0;
  if (materials.size() != n) Fail(ErrorCode::kInvalidArgument, "render scene needs one material per instance");
  for (const Material& m : materials) m.Validate();
  for (const Light& l : lights) ValidateLight(l);
}

namespace {

double PowerHeuristic(double a, double b) {
  const double a2 = a * a;
  const double b2 = b * b;
  return a2 + b2 > 0.0 ? a2 / (a2 + b2) : 0.0;
}

struct RectHit {
  double t;
  double cos_light;  // cosine between the light normal and -direction
};

std::optional<RectHit> IntersectRect(const AreaLight& l, const geom::Ray& ray, double t_max) {
  const Vec3 n = l.edge_u.cross(l.edge_v);
  const double denom = n.dot(ray.direction);
  if (std::abs(denom) < 1e-15) return std::nullopt;
  const double t = n.dot(l.corner - ray.origin) / denom;
  if (!(t > 0.0 && t < t_max)) return std::nullopt;
  const Vec3 q = ray.origin + t * ray.direction - l.corner;
  const Vec3 a = l.edge_v.cross(n);
  const Vec3 b = n.cross(l.edge_u);
  const double s = q.dot(a) / l.edge_u.dot(a);
  const double v = q.dot(b) / l.edge_v.dot(b);
  if (s < 0.0 || s > 1.0 || v < 0.0 || v > 1.0) return std::nullopt;
  return RectHit{t, -denom / n.norm()};
}

class Tracer {
 public:
  Tracer(const RenderScene& scene, const RenderSettings& settings) : scene_(scene), settings_(settings) {
    for (const Light& l : scene.lights) {
      if (const auto* a = std::get_if<AreaLight>(&l)) areas_.push_back(*a);
      if (const auto* p = std::get_if<PointLight>(&l)) points_.push_back(*p);
      if (const auto* s = std::get_if<SunSkyLight>(&l)) {
        SunSkyLight sun = *s;
        sun.sun_direction.normalize();
        suns_.push_back(sun);
        sky_ += s->sky_radiance;
      }
    }
    has_sky_ = (sky_.array() > 0.0).any();
  }

  // Radiance along a camera ray; `hit_geometry` reports whether the ray hit
  // a mesh before anything else.
  Vec3 Trace(geom::Ray ray, Rng& rng, bool& hit_geometry) const {
    Vec3 radiance = Vec3::Zero();
    Vec3 beta = Vec3::Ones();
    double prev_pdf = 0.0;
    Vec3 prev_normal = Vec3::Zero();
    hit_geometry = false;
    for (int depth = 0;; ++depth) {
      std::optional<geom::Hit> hit;
      if (scene_.accel) hit = scene_.accel->Intersect(ray);
      double t_near = hit ? hit->t : std::numeric_limits<double>::infinity();
      int light_index = -1;
      RectHit light_hit{0.0, 0.0};
      for (std::size_t k = 0; k < areas_.size(); ++k) {
        if (auto r = IntersectRect(areas_[k], ray, t_near)) {
          t_near = r->t;
          light_hit = *r;
          light_index = static_cast<int>(k);
        }
      }
      if (depth == 0) hit_geometry = hit.has_value() && light_index < 0;

      if (light_index >= 0) {
        const AreaLight& l = areas_[light_index];
        if (light_hit.cos_light > 0.0) {
          const double light_pdf = light_hit.t * light_hit.t / (light_hit.cos_light * l.Area());
          radiance += beta.cwiseProduct(l.radiance) * EmissionWeight(depth, prev_pdf, light_pdf);
        }
        break;
      }
      if (!hit) {
        if (has_sky_) {
          const double light_pdf = depth == 0 ? 0.0 : std::max(0.0, prev_normal.dot(ray.direction)) * kInvPi;
          radiance += beta.cwiseProduct(sky_) * EmissionWeight(depth, prev_pdf, light_pdf);
        }
        break;
      }
      if (depth >= settings_.max_depth) break;

      const Material& material = scene_.materials[hit->instance_index];
      const Bsdf bsdf(material);
      const Vec3 p = ray.origin + hit->t * ray.direction;
      const Vec3 wo = -ray.direction;
      Vec3 ng = hit->geometric_normal;
      Vec3 ns = hit->shading_normal;
      if (ng.dot(wo) < 0.0) {
        ng = -ng;
        ns = -ns;
      }
      if (ns.dot(wo) <= 1e-6) ns = ng;
      Vec3 tangent, bitangent;
      OrthonormalBasis(ns, tangent, bitangent);
      auto to_local = [&](const Vec3& v) { return Vec3(v.dot(tangent), v.dot(bitangent), v.dot(ns)); };
      const Vec3 wo_local = to_local(wo);
      const double eps = 1e-7 * (1.0 + p.cwiseAbs().maxCoeff());
      const Vec3 origin = p + eps * ng;

      radiance += beta.cwiseProduct(DirectLight(bsdf, origin, ng, ns, wo_local, to_local, rng));

      const auto sample = bsdf.Sample(wo_local, rng.Uniform(), rng.Uniform2());
      if (!sample) break;
      const Vec3 wi = sample->wi.x() * tangent + sample->wi.y() * bitangent + sample->wi.z() * ns;
      if (wi.dot(ng) <= 0.0) break;
      beta = beta.cwiseProduct(sample->weight);
      prev_pdf = sample->pdf;
      prev_normal = ns;
      ray = geom::Ray{origin, wi.normalized()};

      if (depth + 1 >= settings_.russian_roulette_depth) {
        const double q = std::max(0.05, 1.0 - beta.maxCoeff());
        if (rng.Uniform() < q) break;
        beta /= 1.0 - q;
      }
    }
    return radiance;
  }

 private:
  // Weight of emission found by following a sampled direction.
  double EmissionWeight(int depth, double bsdf_pdf, double light_pdf) const {
    if (depth == 0) return 1.0;
    switch (settings_.estimator) {
      case Estimator::kMis:
        return PowerHeuristic(bsdf_pdf, light_pdf);
      case Estimator::kLightSampling:
        return 0.0;
      case Estimator::kBsdfSampling:
        return 1.0;
    }
    return 0.0;
  }

  double LightWeight(double light_pdf, double bsdf_pdf) const {
    return settings_.estimator == Estimator::kMis ? PowerHeuristic(light_pdf, bsdf_pdf) : 1.0;
  }

  bool Visible(const Vec3& origin, const Vec3& dir, double t_max, int skip_area) const {
    const geom::Ray ray{origin, dir};
    if (scene_.accel && scene_.accel->Occluded(ray, 0.0, t_max)) return false;
    for (std::size_t k = 0; k < areas_.size(); ++k) {
      if (static_cast<int>(k) != skip_area && IntersectRect(areas_[k], ray, t_max)) return false;
    }
    return true;
  }

  template <typename ToLocal>
  Vec3 DirectLight(const Bsdf& bsdf, const Vec3& origin, const Vec3& ng, const Vec3& ns, const Vec3& wo_local,
                   const ToLocal& to_local, Rng& rng) const {
    Vec3 sum = Vec3::Zero();
    const double inf = std::numeric_limits<double>::infinity();
    for (const PointLight& l : points_) {
      Vec3 d = l.position - origin;
      const double dist = d.norm();
      if (!(dist > 0.0)) continue;
      d /= dist;
      if (d.dot(ng) <= 0.0) continue;
      const Vec3 wi = to_local(d);
      const Vec3 f = bsdf.Evaluate(wo_local, wi);
      if (f.isZero() || !Visible(origin, d, dist * (1.0 - 1e-9), -1)) continue;
      sum += f.cwiseProduct(l.intensity) * (wi.z() / (dist * dist));
    }
    for (const SunSkyLight& s : suns_) {
      if ((s.sun_irradiance.array() <= 0.0).all() || s.sun_direction.dot(ng) <= 0.0) continue;
      const Vec3 wi = to_local(s.sun_direction);
      const Vec3 f = bsdf.Evaluate(wo_local, wi);
      if (f.isZero() || !Visible(origin, s.sun_direction, inf, -1)) continue;
      sum += f.cwiseProduct(s.sun_irradiance) * wi.z();
    }
    if (settings_.estimator == Estimator::kBsdfSampling) return sum;
    if (has_sky_) {
      // Cosine-weighted directions about the shading normal.
      const Vec2 u = rng.Uniform2();
      const double r = std::sqrt(u.x());
      const double phi = 2.0 * kPi * u.y();
      const Vec3 wi(r * std::cos(phi), r * std::sin(phi), std::sqrt(std::max(0.0, 1.0 - u.x())));
      Vec3 t, b;
      OrthonormalBasis(ns, t, b);
      const Vec3 d = wi.x() * t + wi.y() * b + wi.z() * ns;
      const double light_pdf = wi.z() * kInvPi;
      if (light_pdf > 0.0 && d.dot(ng) > 0.0) {
        const Vec3 f = bsdf.Evaluate(wo_local, wi);
        if (!f.isZero() && Visible(origin, d, inf, -1)) {
          const double w = LightWeight(light_pdf, bsdf.Pdf(wo_local, wi));
          sum += f.cwiseProduct(sky_) * (wi.z() * w / light_pdf);
        }
      }
    }
    for (std::size_t k = 0; k < areas_.size(); ++k) {
      const AreaLight& l = areas_[k];
      const Vec2 u = rng.Uniform2();
      const Vec3 q = l.corner + u.x() * l.edge_u + u.y() * l.edge_v;
      Vec3 d = q - origin;
      const double dist = d.norm();
      if (!(dist > 0.0)) continue;
      d /= dist;
      const double cos_light = -d.dot(l.Normal());
      if (cos_light <= 0.0 || d.dot(ng) <= 0.0) continue;
      const Vec3 wi = to_local(d);
      const Vec3 f = bsdf.Evaluate(wo_local, wi);
      if (f.isZero() || !Visible(origin, d, dist * (1.0 - 1e-9), static_cast<int>(k))) continue;
      const double light_pdf = dist * dist / (cos_light * l.Area());
      const double w = LightWeight(light_pdf, bsdf.Pdf(wo_local, wi));
      sum += f.cwiseProduct(l.radiance) * (wi.z() * w / light_pdf);
    }
    return sum;
  }

  const RenderScene& scene_;
  const RenderSettings& settings_;
  std::vector<AreaLight> areas_;
  std::vector<PointLight> points_;
  std::vector<SunSkyLight> suns_;
  Vec3 sky_ = Vec3::Zero();
  bool has_sky_ = false;
};

}  // namespace

RenderResult Render(const RenderScene& scene, const geom::Camera& camera, const RenderSettings& settings) {
  settings.Validate();
  scene.Validate();
  camera.intrinsics.Validate();
  const int width = camera.width();
  const int height = camera.height();
  RenderResult result;
  result.color = HdrImage(width, height);
  result.foreground = HdrImage(width, height);
  result.alpha.assign(static_cast<std::size_t>(width) * height, 0.0f);
  std::vector<uint64_t> guarded(height, 0);

  const Tracer tracer(scene, settings);
  const int spp = settings.samples_per_pixel;
  const int strata = static_cast<int>(std::lround(std::sqrt(static_cast<double>(spp))));
  const bool square = strata * strata == spp;

  ParallelFor(static_cast<std::size_t>(height), settings.workers, [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < width; ++x) {
      Vec3 sum = Vec3::Zero();
      Vec3 hit_sum = Vec3::Zero();
      int hits = 0;
      for (int s = 0; s < spp; ++s) {
        Rng rng(HashKey(settings.seed, {static_cast<uint64_t>(x), static_cast<uint64_t>(y), static_cast<uint64_t>(s)}));
        Vec2 jitter = rng.Uniform2();
        if (square) {
          jitter.x() = ((s % strata) + jitter.x()) / strata;
          jitter.y() = ((s / strata) + jitter.y()) / strata;
        }
        const geom::Ray ray = camera.GenerateRay(x + jitter.x(), y + jitter.y());
        bool hit = false;
        Vec3 l = tracer.Trace(ray, rng, hit);
        if (!l.allFinite() || (l.array() < 0.0).any()) {
          l = Vec3::Zero();
          ++guarded[row];
        }
        sum += l;
        if (hit) {
          hit_sum += l;
          ++hits;
        }
      }
      result.color.Set(x, y, sum / spp);
      result.foreground.Set(x, y, hits > 0 ? Vec3(hit_sum / hits) : Vec3::Zero());
      result.alpha[static_cast<std::size_t>(y) * width + x] = static_cast<float>(static_cast<double>(hits) / spp);
    }
  });
  for (uint64_t g : guarded) result.guarded_samples += g;
  return result;
}

}  // namespace pbrsynth::render
