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

#include "pbrsynth/render/bsdf.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "pbrsynth/common/error.hpp"

namespace pbrsynth::render {

void Material::Validate() const {
  auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in01(base_color.x()) || !in01(base_color.y()) || !in01(base_color.z())) {
    Fail(ErrorCode::kInvalidArgument, "material base color must lie in [0, 1]");
  }
  if (!in01(specular)) Fail(ErrorCode::kInvalidArgument, "material specular must lie in [0, 1]");
  if (!in01(metallic)) Fail(ErrorCode::kInvalidArgument, "material metallic must lie in [0, 1]");
  if (!(roughness > 0.0 && roughness <= 1.0)) Fail(ErrorCode::kInvalidArgument, "material roughness must lie in (0, 1]");
}

namespace ggx {

double D(const Vec3& h, double alpha) {
  if (h.z() <= 0.0) return 0.0;
  const double a2 = alpha * alpha;
  const double c2 = h.z() * h.z();
  const double d = c2 * (a2 - 1.0) + 1.0;
  return a2 / (kPi * d * d);
}

double Lambda(const Vec3& w, double alpha) {
  const double c2 = w.z() * w.z();
  if (c2 <= 0.0) return std::numeric_limits<double>::infinity();
  const double tan2 = std::max(0.0, 1.0 - c2) / c2;
  return 0.5 * (-1.0 + std::sqrt(1.0 + alpha * alpha * tan2));
}

double G1(const Vec3& w, double alpha) { return 1.0 / (1.0 + Lambda(w, alpha)); }

double G2(const Vec3& wo, const Vec3& wi, double alpha) {
  return 1.0 / (1.0 + Lambda(wo, alpha) + Lambda(wi, alpha));
}

Vec3 SampleVisibleNormal(const Vec3& wo, double alpha, const Vec2& u) {
  const Vec3 vh = Vec3(alpha * wo.x(), alpha * wo.y(), wo.z()).normalized();
  const double len2 = vh.x() * vh.x() + vh.y() * vh.y();
  const Vec3 t1 = len2 > 0.0 ? Vec3(-vh.y(), vh.x(), 0.0) / std::sqrt(len2) : Vec3(1.0, 0.0, 0.0);
  const Vec3 t2 = vh.cross(t1);
  const double r = std::sqrt(u.x());
  const double phi = 2.0 * kPi * u.y();
  const double p1 = r * std::cos(phi);
  const double s = 0.5 * (1.0 + vh.z());
  const double p2 = (1.0 - s) * std::sqrt(std::max(0.0, 1.0 - p1 * p1)) + s * r * std::sin(phi);
  const Vec3 nh = p1 * t1 + p2 * t2 + std::sqrt(std::max(0.0, 1.0 - p1 * p1 - p2 * p2)) * vh;
  return Vec3(alpha * nh.x(), alpha * nh.y(), std::max(1e-12, nh.z())).normalized();
}

double SchlickWeight(double cos_theta) {
  const double m = std::clamp(1.0 - cos_theta, 0.0, 1.0);
  const double m2 = m * m;
  return m2 * m2 * m;
}

}  // namespace ggx

namespace {

constexpr int kTableSize = 32;
constexpr int kTableSamples = 2048;
constexpr double kMinAlpha = 1e-3;

// Both table axes are uniform in the square root of the parameter, which
// places more nodes near grazing angles and near-mirror lobes where the
// albedo changes fastest.
double TableMu(int i) {
  const double t = static_cast<double>(i) / (kTableSize - 1);
  return std::max(1e-4, t * t);
}
double TableAlpha(int j) {
  const double t = static_cast<double>(j) / (kTableSize - 1);
  return std::max(kMinAlpha, t * t);
}

double RadicalInverse2(uint32_t bits) {
  bits = (bits << 16u) | (bits >> 16u);
  bits = ((bits & 0x55555555u) << 1u) | ((bits & 0xAAAAAAAAu) >> 1u);
  bits = ((bits & 0x33333333u) << 2u) | ((bits & 0xCCCCCCCCu) >> 2u);
  bits = ((bits & 0x0F0F0F0Fu) << 4u) | ((bits & 0xF0F0F0F0u) >> 4u);
  bits = ((bits & 0x00FF00FFu) << 8u) | ((bits & 0xFF00FF00u) >> 8u);
  return static_cast<double>(bits) * 2.3283064365386963e-10;
}

struct AlbedoTables {
  std::array<std::array<GgxAlbedo, kTableSize>, kTableSize> directional;  // [alpha][mu]
  std::array<GgxAlbedo, kTableSize> average;

  AlbedoTables() {
    for (int j = 0; j < kTableSize; ++j) {
      const double alpha = TableAlpha(j);
      for (int i = 0; i < kTableSize; ++i) {
        const double mu = TableMu(i);
        const Vec3 wo(std::sqrt(1.0 - mu * mu), 0.0, mu);
        // Quasi-random visible-normal sampling: the estimator of the lobe
        // albedo is G2 / G1(wo) per sample.
        double e1 = 0.0, ew = 0.0;
        for (int s = 0; s < kTableSamples; ++s) {
          const Vec2 u((s + 0.5) / kTableSamples, RadicalInverse2(static_cast<uint32_t>(s)));
          const Vec3 h = ggx::SampleVisibleNormal(wo, alpha, u);
          const double oh = wo.dot(h);
          const Vec3 wi = 2.0 * oh * h - wo;
          if (wi.z() <= 0.0) continue;
          const double w = ggx::G2(wo, wi, alpha) / ggx::G1(wo, alpha);
          e1 += w;
          ew += w * ggx::SchlickWeight(oh);
        }
        directional[j][i] = {e1 / kTableSamples, ew / kTableSamples};
      }
    }
    for (int j = 0; j < kTableSize; ++j) {
      // 2 * integral of E(mu) mu over [0, 1], midpoint rule on the
      // interpolated table.
      constexpr int kSteps = 512;
      double e1 = 0.0, ew = 0.0;
      for (int k = 0; k < kSteps; ++k) {
        const double mu = (k + 0.5) / kSteps;
        const GgxAlbedo a = LookupMu(j, mu);
        e1 += a.e1 * mu;
        ew += a.ew * mu;
      }
      average[j] = {2.0 * e1 / kSteps, 2.0 * ew / kSteps};
    }
  }

  GgxAlbedo LookupMu(int j, double mu) const {
    const double x = std::sqrt(std::clamp(mu, 0.0, 1.0)) * (kTableSize - 1);
    const int i0 = std::min(static_cast<int>(x), kTableSize - 2);
    const double f = x - i0;
    const GgxAlbedo& a = directional[j][i0];
    const GgxAlbedo& b = directional[j][i0 + 1];
    return {a.e1 + f * (b.e1 - a.e1), a.ew + f * (b.ew - a.ew)};
  }
};

const AlbedoTables& Tables() {
  static const AlbedoTables tables;
  return tables;
}

void AlphaCell(double alpha, int& j0, double& f) {
  const double y = std::sqrt(std::clamp(alpha, 0.0, 1.0)) * (kTableSize - 1);
  j0 = std::min(static_cast<int>(y), kTableSize - 2);
  f = y - j0;
}

double Lum(const Vec3& c) { return Luminance(c); }

// Dielectric Fresnel: Schlick with f0 = 0.08, scaled by the specular
// parameter, so the normal-incidence reflectance is 0.08 * specular and a
// zero specular parameter removes the lobe.
constexpr double kDielectricF0 = 0.08;

}  // namespace

GgxAlbedo DirectionalAlbedo(double cos_theta, double alpha) {
  const AlbedoTables& t = Tables();
  int j0;
  double f;
  AlphaCell(alpha, j0, f);
  const GgxAlbedo a = t.LookupMu(j0, cos_theta);
  const GgxAlbedo b = t.LookupMu(j0 + 1, cos_theta);
  return {a.e1 + f * (b.e1 - a.e1), a.ew + f * (b.ew - a.ew)};
}

GgxAlbedo AverageAlbedo(double alpha) {
  const AlbedoTables& t = Tables();
  int j0;
  double f;
  AlphaCell(alpha, j0, f);
  const GgxAlbedo& a = t.average[j0];
  const GgxAlbedo& b = t.average[j0 + 1];
  return {a.e1 + f * (b.e1 - a.e1), a.ew + f * (b.ew - a.ew)};
}

Bsdf::Bsdf(const Material& m)
    : base_(m.base_color),
      metallic_(m.metallic),
      f0_dielectric_(kDielectricF0),
      alpha_(std::max(kMinAlpha, m.roughness * m.roughness)) {
  specular_scale_ = m.specular;
  avg_ = AverageAlbedo(alpha_);
  const Vec3 f_avg = base_ + (Vec3::Ones() - base_) / 21.0;
  const double e_avg = avg_.e1;
  conductor_ms_scale_ = Vec3::Zero();
  for (int c = 0; c < 3; ++c) {
    const double fms = f_avg[c] * f_avg[c] * e_avg / (1.0 - f_avg[c] * (1.0 - e_avg));
    conductor_ms_scale_[c] = fms / (kPi * std::max(1e-6, 1.0 - e_avg));
  }
  dielectric_avg_ = specular_scale_ * (f0_dielectric_ * (avg_.e1 - avg_.ew) + avg_.ew);
}

double Bsdf::DielectricAlbedo(double mu) const {
  const GgxAlbedo a = DirectionalAlbedo(mu, alpha_);
  return specular_scale_ * (f0_dielectric_ * (a.e1 - a.ew) + a.ew);
}

Vec3 Bsdf::Evaluate(const Vec3& wo, const Vec3& wi) const {
  if (wo.z() <= 0.0 || wi.z() <= 0.0) return Vec3::Zero();
  const Vec3 h = (wo + wi).normalized();
  const double oh = std::max(0.0, wo.dot(h));
  const double w = ggx::SchlickWeight(oh);
  const double lobe = ggx::D(h, alpha_) * ggx::G2(wo, wi, alpha_) / (4.0 * wo.z() * wi.z());
  Vec3 f = Vec3::Zero();
  if (metallic_ < 1.0) {
    const double fresnel = specular_scale_ * (f0_dielectric_ + (1.0 - f0_dielectric_) * w);
    const double diffuse = (1.0 - DielectricAlbedo(wo.z())) * (1.0 - DielectricAlbedo(wi.z())) /
                           (kPi * std::max(1e-6, 1.0 - dielectric_avg_));
    f += (1.0 - metallic_) * (Vec3::Constant(fresnel * lobe) + diffuse * base_);
  }
  if (metallic_ > 0.0) {
    const Vec3 fresnel = base_ + (Vec3::Ones() - base_) * w;
    const double e_o = DirectionalAlbedo(wo.z(), alpha_).e1;
    const double e_i = DirectionalAlbedo(wi.z(), alpha_).e1;
    f += metallic_ * (fresnel * lobe + conductor_ms_scale_ * ((1.0 - e_o) * (1.0 - e_i)));
  }
  return f;
}

double Bsdf::SpecularProbability(const Vec3& wo) const {
  const GgxAlbedo a = DirectionalAlbedo(wo.z(), alpha_);
  const double e_d = DielectricAlbedo(wo.z());
  const Vec3 e_c = base_ * (a.e1 - a.ew) + Vec3::Constant(a.ew);
  const double spec = (1.0 - metallic_) * e_d + metallic_ * Lum(e_c);
  const double diff = ((1.0 - metallic_) * (1.0 - e_d) + metallic_ * (1.0 - a.e1)) * Lum(base_);
  if (spec <= 0.0) return 0.0;
  if (diff <= 0.0) return 1.0;
  return std::clamp(spec / (spec + diff), 0.1, 0.9);
}

double Bsdf::Pdf(const Vec3& wo, const Vec3& wi) const {
  if (wo.z() <= 0.0 || wi.z() <= 0.0) return 0.0;
  const double ps = SpecularProbability(wo);
  double pdf = (1.0 - ps) * wi.z() * kInvPi;
  if (ps > 0.0) {
    const Vec3 h = (wo + wi).normalized();
    pdf += ps * ggx::G1(wo, alpha_) * ggx::D(h, alpha_) / (4.0 * wo.z());
  }
  return pdf;
}

std::optional<BsdfSample> Bsdf::Sample(const Vec3& wo, double u_lobe, const Vec2& u) const {
  if (wo.z() <= 0.0) return std::nullopt;
  const double ps = SpecularProbability(wo);
  Vec3 wi;
  if (u_lobe < ps) {
    const Vec3 h = ggx::SampleVisibleNormal(wo, alpha_, u);
    wi = 2.0 * wo.dot(h) * h - wo;
  } else {
    const double r = std::sqrt(u.x());
    const double phi = 2.0 * kPi * u.y();
    wi = Vec3(r * std::cos(phi), r * std::sin(phi), std::sqrt(std::max(0.0, 1.0 - u.x())));
  }
  if (wi.z() <= 0.0) return std::nullopt;
  const double pdf = Pdf(wo, wi);
  if (!(pdf > 0.0)) return std::nullopt;
  return BsdfSample{wi, Evaluate(wo, wi) * wi.z() / pdf, pdf};
}

}  // namespace pbrsynth::render
