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

#include <optional>

#include "pbrsynth/common/math.hpp"
#include "pbrsynth/render/material.hpp"

namespace pbrsynth::render {

// GGX microfacet helpers in a local frame with the normal along +Z.
namespace ggx {
double D(const Vec3& h, double alpha);
double Lambda(const Vec3& w, double alpha);
double G1(const Vec3& w, double alpha);
// Height-correlated masking-shadowing.
double G2(const Vec3& wo, const Vec3& wi, double alpha);
// Visible-normal sampling for wo in the upper hemisphere.
Vec3 SampleVisibleNormal(const Vec3& wo, double alpha, const Vec2& u);
double SchlickWeight(double cos_theta);
}  // namespace ggx

// Directional albedo of the GGX lobe without Fresnel (e1) and with the
// Schlick weight (1 - cos)^5 applied (ew), tabulated over (cos theta, alpha)
// and their cosine-weighted hemispherical averages. With Schlick Fresnel the
// albedo for reflectance f0 is f0 * (e1 - ew) + ew.
struct GgxAlbedo {
  double e1;
  double ew;
};
GgxAlbedo DirectionalAlbedo(double cos_theta, double alpha);
GgxAlbedo AverageAlbedo(double alpha);

struct BsdfSample {
  Vec3 wi;       // local frame
  Vec3 weight;   // f * cos / pdf
  double pdf;
};

// Layered BSDF: a mix by metallic between a dielectric (GGX specular with
// normal-incidence reflectance 0.08 * specular over an energy-compensated Lambertian base) and a
// GGX conductor with f0 = base color and a multiple-scattering term. With
// base color 1 both layers reflect all incident energy.
class Bsdf {
 public:
  explicit Bsdf(const Material& m);

  // All directions are in the local shading frame and point away from the
  // surface. Evaluate returns f without the cosine factor.
  Vec3 Evaluate(const Vec3& wo, const Vec3& wi) const;
  double Pdf(const Vec3& wo, const Vec3& wi) const;
  std::optional<BsdfSample> Sample(const Vec3& wo, double u_lobe, const Vec2& u) const;

  double alpha() const { return alpha_; }

 private:
  double SpecularProbability(const Vec3& wo) const;
  double DielectricAlbedo(double mu) const;

  Vec3 base_;
  double metallic_;
  double f0_dielectric_;
  double specular_scale_ = 0.0;
  double alpha_;
  double dielectric_avg_ = 0.0;
  GgxAlbedo avg_;
  Vec3 conductor_ms_scale_;  // Fms / (pi (1 - E1avg))
};

}  // namespace pbrsynth::render
