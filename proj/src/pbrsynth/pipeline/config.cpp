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

#include "pbrsynth/pipeline/config.hpp"

#include <set>

#include "pbrsynth/common/error.hpp"
#include "pbrsynth/common/fileio.hpp"

namespace pbrsynth::pipeline {

namespace {

using nlohmann::json;

[[noreturn]] void ConfigError(const std::string& where, const std::string& what) {
  Fail(ErrorCode::kConfig, where + ": " + what);
}

void CheckKeys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) ConfigError(where, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key())) ConfigError(where, "unknown key '" + it.key() + "'");
  }
}

Vec3 ReadVec3(const json& j, const std::string& where) {
  if (j.is_number()) return Vec3::Constant(j.get<double>());
  if (!j.is_array() || j.size() != 3) ConfigError(where, "expected 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::pair<double, double> ReadRange(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) ConfigError(where, "expected [min, max]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Mat3 ReadRotation(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 9) ConfigError(where, "expected 9 numbers, row-major");
  Mat3 r;
  for (int i = 0; i < 9; ++i) r(i / 3, i % 3) = j[i].get<double>();
  if (!IsRotation(r, 1e-6)) ConfigError(where, "not a rotation matrix");
  return r;
}

std::shared_ptr<const geom::Mesh> ReadMesh(const json& j, const std::filesystem::path& dir, const std::string& where) {
  geom::Mesh mesh;
  double scale = 1.0;
  if (j.is_string()) {
    mesh = geom::LoadMesh(dir / j.get<std::string>());
  } else {
    if (!j.is_object()) ConfigError(where, "mesh must be a file path or an object");
    if (j.contains("file")) {
      CheckKeys(j, where, {"file", "scale", "triangulate"});
      geom::LoadOptions opts;
      opts.triangulate = j.value("triangulate", false);
      mesh = geom::LoadMesh(dir / j.at("file").get<std::string>(), opts);
      scale = j.value("scale", 1.0);
    } else {
      const std::string kind = j.at("primitive").get<std::string>();
      if (kind == "box") {
        CheckKeys(j, where, {"primitive", "size"});
        mesh = geom::MakeBox(ReadVec3(j.at("size"), where + ".size"));
      } else if (kind == "sphere") {
        CheckKeys(j, where, {"primitive", "radius", "subdivisions"});
        mesh = geom::MakeIcosphere(j.at("radius").get<double>(), j.value("subdivisions", 3));
      } else if (kind == "cylinder") {
        CheckKeys(j, where, {"primitive", "radius", "height", "segments"});
        mesh = geom::MakeCylinder(j.at("radius").get<double>(), j.at("height").get<double>(), j.value("segments", 32));
      } else if (kind == "quad") {
        CheckKeys(j, where, {"primitive", "size"});
        const auto [sx, sy] = ReadRange(j.at("size"), where + ".size");
        mesh = geom::MakeQuad(sx, sy);
      } else {
        ConfigError(where, "unknown primitive '" + kind + "'");
      }
    }
  }
  if (!(scale > 0.0)) ConfigError(where, "scale must be positive");
  if (scale != 1.0) {
    for (Vec3& v : mesh.vertices) v *= scale;
  }
  return std::make_shared<const geom::Mesh>(std::move(mesh));
}

Pose ReadPose(const json& j, const std::string& where) {
  CheckKeys(j, where, {"rotation", "translation"});
  Pose p;
  if (j.contains("rotation")) p.rotation = ReadRotation(j.at("rotation"), where + ".rotation");
  if (j.contains("translation")) p.translation = ReadVec3(j.at("translation"), where + ".translation");
  return p;
}

render::Material ReadMaterial(const json& j, const std::string& where) {
  CheckKeys(j, where, {"base_color", "specular", "metallic", "roughness"});
  render::Material m;
  if (j.contains("base_color")) m.base_color = ReadVec3(j.at("base_color"), where + ".base_color");
  m.specular = j.value("specular", m.specular);
  m.metallic = j.value("metallic", m.metallic);
  m.roughness = j.value("roughness", m.roughness);
  try {
    m.Validate();
  } catch (const Error& e) {
    ConfigError(where, e.what());
  }
  return m;
}

render::Light ReadLight(const json& j, const std::string& where) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "point") {
    CheckKeys(j, where, {"type", "position", "intensity"});
    return render::PointLight{ReadVec3(j.at("position"), where), ReadVec3(j.at("intensity"), where)};
  }
  if (type == "area") {
    CheckKeys(j, where, {"type", "corner", "edge_u", "edge_v", "radiance"});
    render::AreaLight a;
    a.corner = ReadVec3(j.at("corner"), where + ".corner");
    a.edge_u = ReadVec3(j.at("edge_u"), where + ".edge_u");
    a.edge_v = ReadVec3(j.at("edge_v"), where + ".edge_v");
    a.radiance = ReadVec3(j.at("radiance"), where + ".radiance");
    return a;
  }
  if (type == "sun_sky") {
    CheckKeys(j, where, {"type", "sun_direction", "sun_irradiance", "sky_radiance"});
    render::SunSkyLight s;
    s.sun_direction = ReadVec3(j.at("sun_direction"), where + ".sun_direction").normalized();
    s.sun_irradiance = ReadVec3(j.value("sun_irradiance", json(0.0)), where + ".sun_irradiance");
    s.sky_radiance = ReadVec3(j.value("sky_radiance", json(0.0)), where + ".sky_radiance");
    return s;
  }
  ConfigError(where, "unknown light type '" + type + "'");
}

void ReadCamera(const json& j, camsample::CameraSampleParams& p) {
  const std::string where = "camera";
  CheckKeys(j, where,
            {"intrinsics", "azimuth_deg", "elevation_deg", "distance", "min_visible_fraction", "max_retries"});
  constexpr double kDeg = kPi / 180.0;
  if (j.contains("intrinsics")) p.intrinsics = camsample::IntrinsicsFromJson(j.at("intrinsics"));
  if (j.contains("azimuth_deg")) {
    const auto [a, b] = ReadRange(j.at("azimuth_deg"), where + ".azimuth_deg");
    p.azimuth_min = a * kDeg;
    p.azimuth_max = b * kDeg;
  }
  if (j.contains("elevation_deg")) {
    const auto [a, b] = ReadRange(j.at("elevation_deg"), where + ".elevation_deg");
    p.elevation_min = a * kDeg;
    p.elevation_max = b * kDeg;
  }
  if (j.contains("distance")) std::tie(p.distance_min, p.distance_max) = ReadRange(j.at("distance"), where + ".distance");
  p.min_visible_fraction = j.value("min_visible_fraction", p.min_visible_fraction);
  p.max_retries = j.value("max_retries", p.max_retries);
}

void ReadSimulation(const json& j, compose::SimParams& s) {
  CheckKeys(j, "simulation",
            {"timestep", "restitution", "friction", "max_time", "density", "gravity", "velocity_iterations",
             "position_iterations", "rest_linear_speed", "rest_angular_speed", "rest_steps"});
  s.timestep = j.value("timestep", s.timestep);
  s.restitution = j.value("restitution", s.restitution);
  s.friction = j.value("friction", s.friction);
  s.max_time = j.value("max_time", s.max_time);
  s.density = j.value("density", s.density);
  s.gravity = j.value("gravity", s.gravity);
  s.velocity_iterations = j.value("velocity_iterations", s.velocity_iterations);
  s.position_iterations = j.value("position_iterations", s.position_iterations);
  s.rest_linear_speed = j.value("rest_linear_speed", s.rest_linear_speed);
  s.rest_angular_speed = j.value("rest_angular_speed", s.rest_angular_speed);
  s.rest_steps = j.value("rest_steps", s.rest_steps);
}

}  // namespace

std::vector<render::QualityTier> ParseTiers(const std::string& name) {
  if (name == "all") return {render::QualityTier::kLow, render::QualityTier::kMedium, render::QualityTier::kHigh};
  return {render::ParseQualityTier(name)};
}

int TierIndex(render::QualityTier tier) {
  switch (tier) {
    case render::QualityTier::kLow: return 0;
    case render::QualityTier::kMedium: return 1;
    case render::QualityTier::kHigh: return 2;
  }
  return 0;
}

PipelineConfig ConfigFromJson(const json& j, const std::filesystem::path& config_dir) {
  PipelineConfig c;
  c.config_dir = config_dir;
  try {
    CheckKeys(j, "config",
              {"seed", "output", "arrangements", "cameras_per_arrangement", "tiers", "jobs", "hdr", "render",
               "materials", "models", "scene", "arrangement_specs", "camera", "simulation", "baseline"});
    c.seed = j.value("seed", uint64_t{0});
    if (j.contains("output")) c.output = config_dir / j.at("output").get<std::string>();
    else c.output = config_dir / "out";
    c.arrangements = j.value("arrangements", 1);
    c.cameras_per_arrangement = j.value("cameras_per_arrangement", 1);
    c.jobs = j.value("jobs", 1);
    c.hdr = j.value("hdr", false);
    if (j.contains("tiers")) {
      c.tiers.clear();
      for (const auto& t : j.at("tiers")) {
        for (auto tier : ParseTiers(t.get<std::string>())) {
          if (std::find(c.tiers.begin(), c.tiers.end(), tier) == c.tiers.end()) c.tiers.push_back(tier);
        }
      }
    }
    if (j.contains("render")) {
      const json& r = j.at("render");
      CheckKeys(r, "render", {"exposure", "estimator"});
      c.exposure = r.value("exposure", 1.0);
      const std::string est = r.value("estimator", std::string("mis"));
      if (est == "mis") c.estimator = render::Estimator::kMis;
      else if (est == "light") c.estimator = render::Estimator::kLightSampling;
      else if (est == "bsdf") c.estimator = render::Estimator::kBsdfSampling;
      else ConfigError("render.estimator", "expected mis, light or bsdf");
    }
    if (j.contains("materials")) {
      for (auto it = j.at("materials").begin(); it != j.at("materials").end(); ++it) {
        c.materials[it.key()] = ReadMaterial(it.value(), "materials." + it.key());
      }
    }
    const double default_density = j.contains("simulation") ? j.at("simulation").value("density", c.simulation.density)
                                                            : c.simulation.density;
    for (const auto& m : j.at("models")) {
      const int id = m.at("id").get<int>();
      const std::string where = "models[" + std::to_string(id) + "]";
      CheckKeys(m, where, {"id", "name", "mesh", "material", "density", "canonical_rotation"});
      if (c.models.count(id)) ConfigError(where, "duplicate model id");
      const Mat3 rot = m.contains("canonical_rotation") ? ReadRotation(m.at("canonical_rotation"), where) : Mat3::Identity();
      c.models.emplace(id, compose::ObjectModel::Create(id, m.value("name", "model" + std::to_string(id)),
                                                        ReadMesh(m.at("mesh"), config_dir, where + ".mesh"), rot,
                                                        m.value("density", default_density)));
      c.model_materials[id] = m.value("material", std::string("default"));
    }
    if (j.contains("scene")) {
      const json& s = j.at("scene");
      CheckKeys(s, "scene", {"meshes", "stages", "lights"});
      if (s.contains("meshes")) {
        int k = 0;
        for (const auto& m : s.at("meshes")) {
          const std::string where = "scene.meshes[" + std::to_string(k++) + "]";
          CheckKeys(m, where, {"name", "mesh", "pose", "material"});
          SceneMesh sm;
          sm.name = m.value("name", where);
          sm.mesh = ReadMesh(m.at("mesh"), config_dir, where + ".mesh");
          if (m.contains("pose")) sm.pose = ReadPose(m.at("pose"), where + ".pose");
          sm.material = m.value("material", std::string("default"));
          c.scene_meshes.push_back(std::move(sm));
        }
      }
      if (s.contains("stages")) {
        for (const auto& st : s.at("stages")) {
          CheckKeys(st, "scene.stages", {"name", "polygon"});
          std::vector<Vec3> poly;
          for (const auto& p : st.at("polygon")) poly.push_back(ReadVec3(p, "scene.stages.polygon"));
          c.stages.emplace_back(st.at("name").get<std::string>(), std::move(poly));
        }
      }
      if (s.contains("lights")) {
        int k = 0;
        for (const auto& l : s.at("lights")) c.lights.push_back(ReadLight(l, "scene.lights[" + std::to_string(k++) + "]"));
      }
    }
    for (const auto& spec : j.at("arrangement_specs")) c.arrangement_specs.push_back(compose::SpecFromJson(spec));
    if (j.contains("camera")) ReadCamera(j.at("camera"), c.camera);
    if (j.contains("simulation")) ReadSimulation(j.at("simulation"), c.simulation);
    if (j.contains("baseline")) {
      CheckKeys(j.at("baseline"), "baseline", {"background_dir"});
      if (j.at("baseline").contains("background_dir")) {
        c.background_dir = config_dir / j.at("baseline").at("background_dir").get<std::string>();
      }
    }
  } catch (const json::exception& e) {
    Fail(ErrorCode::kConfig, std::string("config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig || e.code() == ErrorCode::kFileUnreadable) throw;
    Fail(ErrorCode::kConfig, std::string("config: ") + e.what());
  }
  c.Validate();
  return c;
}

PipelineConfig LoadConfig(const std::filesystem::path& path) {
  const std::string text = ReadFileBytes(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  try {
    return ConfigFromJson(j, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
  } catch (const Error& e) {
    Fail(e.code(), path.string() + ": " + e.what());
  }
}

const compose::Stage& PipelineConfig::FindStage(const std::string& name) const {
  for (const auto& s : stages) {
    if (s.name() == name) return s;
  }
  Fail(ErrorCode::kConfig, "unknown stage '" + name + "'");
}

const render::Material& PipelineConfig::MaterialOf(const std::string& name) const {
  static const render::Material kDefault;
  if (name == "default" && !materials.count(name)) return kDefault;
  auto it = materials.find(name);
  if (it == materials.end()) Fail(ErrorCode::kConfig, "unknown material '" + name + "'");
  return it->second;
}

void PipelineConfig::Validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) Fail(ErrorCode::kConfig, what);
  };
  need(arrangements >= 1, "arrangements must be at least 1");
  need(cameras_per_arrangement >= 1, "cameras_per_arrangement must be at least 1");
  need(jobs >= 1, "jobs must be at least 1");
  need(!tiers.empty(), "at least one tier is required");
  need(exposure > 0.0, "render.exposure must be positive");
  need(!models.empty(), "at least one model is required");
  need(!stages.empty(), "at least one stage is required");
  need(!lights.empty(), "at least one light is required");
  need(!arrangement_specs.empty(), "at least one arrangement spec is required");
  try {
    for (const auto& spec : arrangement_specs) {
      spec.Validate();
      FindStage(spec.stage);
      for (const auto& e : spec.entries) {
        need(models.count(e.model_id) > 0, "arrangement spec names unknown model " + std::to_string(e.model_id));
      }
    }
    for (const auto& [id, mat] : model_materials) MaterialOf(mat);
    for (const auto& m : scene_meshes) MaterialOf(m.material);
    for (const auto& l : lights) render::ValidateLight(l);
    camera.Validate();
    simulation.Validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    Fail(ErrorCode::kConfig, e.what());
  }
}

}  // namespace pbrsynth::pipeline
