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

#include "pbrsynth/geom/mesh.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <map>
#include <sstream>
#include <string_view>

#include "pbrsynth/common/error.hpp"
#include "pbrsynth/common/fileio.hpp"

namespace pbrsynth::geom {

Bounds3 Mesh::bounds() const {
  Bounds3 b;
  for (const Vec3& v : vertices) b.Extend(v);
  return b;
}

void Mesh::Validate() const {
  if (triangles.empty() || vertices.empty()) Fail(ErrorCode::kEmptyGeometry, "mesh has no triangles");
  if (normals.size() != vertices.size()) Fail(ErrorCode::kInvalidArgument, "normal count differs from vertex count");
  const auto n = static_cast<uint32_t>(vertices.size());
  for (const Triangle& t : triangles) {
    if (t[0] >= n || t[1] >= n || t[2] >= n) Fail(ErrorCode::kInvalidArgument, "triangle index out of range");
  }
  for (const Vec3& nrm : normals) {
    if (std::abs(nrm.norm() - 1.0) > 1e-6) Fail(ErrorCode::kInvalidArgument, "normal is not unit length");
  }
}

void ComputeVertexNormals(Mesh& mesh) {
  std::vector<Vec3> acc(mesh.vertices.size(), Vec3::Zero());
  for (const Triangle& t : mesh.triangles) {
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    // Cross product length is twice the area, so this is area weighted.
    const Vec3 n = (b - a).cross(c - a);
    for (uint32_t i : t) acc[i] += n;
  }
  mesh.normals.resize(mesh.vertices.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const double len = acc[i].norm();
    mesh.normals[i] = len > 0.0 ? Vec3(acc[i] / len) : Vec3::UnitZ();
  }
}

namespace {

// Triangulates a polygon as a fan around its first corner.
template <typename Corner, typename Emit>
void EmitPolygon(const std::vector<Corner>& poly, bool triangulate, std::size_t line, Emit&& emit) {
  if (poly.size() < 3) Fail(ErrorCode::kParse, "face with fewer than 3 corners at line/face " + std::to_string(line));
  if (poly.size() > 3 && !triangulate) {
    Fail(ErrorCode::kNonTriangleFace,
         "non-triangle face (" + std::to_string(poly.size()) + " corners) at line/face " + std::to_string(line));
  }
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) emit(poly[0], poly[k], poly[k + 1]);
}

bool ParseDouble(std::string_view s, double& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool ParseInt(std::string_view s, long& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> SplitWs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

// ---- OBJ ------------------------------------------------------------------

struct ObjCorner {
  long v = -1;
  long vn = -1;
};

long ResolveObjIndex(long idx, std::size_t count, std::size_t line) {
  // OBJ indices are 1-based; negative values count back from the end.
  long resolved = idx > 0 ? idx - 1 : static_cast<long>(count) + idx;
  if (idx == 0 || resolved < 0 || resolved >= static_cast<long>(count)) {
    Fail(ErrorCode::kParse, "OBJ index out of range at line " + std::to_string(line));
  }
  return resolved;
}

Mesh ParseObj(const std::string& text, const LoadOptions& options) {
  std::vector<Vec3> positions;
  std::vector<Vec3> normals;
  std::vector<std::array<ObjCorner, 3>> tris;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = SplitWs(line);
    if (tok.empty()) continue;

    if (tok[0] == "v" || tok[0] == "vn") {
      if (tok.size() < 4) Fail(ErrorCode::kParse, "short vertex record at line " + std::to_string(line_no));
      Vec3 p;
      for (int k = 0; k < 3; ++k) {
        if (!ParseDouble(tok[k + 1], p[k])) Fail(ErrorCode::kParse, "bad number at line " + std::to_string(line_no));
      }
      (tok[0] == "v" ? positions : normals).push_back(p);
    } else if (tok[0] == "f") {
      std::vector<ObjCorner> poly;
      for (std::size_t k = 1; k < tok.size(); ++k) {
        std::string_view c = tok[k];
        ObjCorner corner;
        std::size_t s1 = c.find('/');
        long v;
        if (!ParseInt(c.substr(0, s1), v)) Fail(ErrorCode::kParse, "bad face index at line " + std::to_string(line_no));
        corner.v = ResolveObjIndex(v, positions.size(), line_no);
        if (s1 != std::string_view::npos) {
          std::size_t s2 = c.find('/', s1 + 1);
          if (s2 != std::string_view::npos && s2 + 1 < c.size()) {
            long vn;
            if (!ParseInt(c.substr(s2 + 1), vn)) Fail(ErrorCode::kParse, "bad normal index at line " + std::to_string(line_no));
            corner.vn = ResolveObjIndex(vn, normals.size(), line_no);
          }
        }
        poly.push_back(corner);
      }
      EmitPolygon(poly, options.triangulate, line_no,
                  [&](const ObjCorner& a, const ObjCorner& b, const ObjCorner& c) { tris.push_back({a, b, c}); });
    }
    // vt, usemtl, mtllib, o, g, s and anything else are ignored.
  }

  if (positions.empty() || tris.empty()) Fail(ErrorCode::kEmptyGeometry, "OBJ has no faces");

  const bool use_normals = !normals.empty() &&
      std::all_of(tris.begin(), tris.end(), [](const auto& t) {
        return t[0].vn >= 0 && t[1].vn >= 0 && t[2].vn >= 0;
      });

  Mesh mesh;
  if (!use_normals) {
    mesh.vertices = positions;
    for (const auto& t : tris) {
      mesh.triangles.push_back({static_cast<uint32_t>(t[0].v), static_cast<uint32_t>(t[1].v),
                                static_cast<uint32_t>(t[2].v)});
    }
    ComputeVertexNormals(mesh);
    return mesh;
  }

  // Per-corner normals: split vertices on distinct (position, normal) pairs.
  std::map<std::pair<long, long>, uint32_t> remap;
  bool bad_normal = false;
  for (const auto& t : tris) {
    Triangle tri;
    for (int k = 0; k < 3; ++k) {
      auto key = std::make_pair(t[k].v, t[k].vn);
      auto [it, inserted] = remap.emplace(key, static_cast<uint32_t>(mesh.vertices.size()));
      if (inserted) {
        mesh.vertices.push_back(positions[t[k].v]);
        const Vec3& n = normals[t[k].vn];
        const double len = n.norm();
        bad_normal |= !(len > 0.0);
        mesh.normals.push_back(len > 0.0 ? Vec3(n / len) : Vec3::UnitZ());
      }
      tri[k] = it->second;
    }
    mesh.triangles.push_back(tri);
  }
  if (bad_normal) ComputeVertexNormals(mesh);
  return mesh;
}

// ---- PLY ------------------------------------------------------------------

enum class PlyType { kI8, kU8, kI16, kU16, kI32, kU32, kF32, kF64 };

PlyType ParsePlyType(std::string_view s) {
  if (s == "char" || s == "int8") return PlyType::kI8;
  if (s == "uchar" || s == "uint8") return PlyType::kU8;
  if (s == "short" || s == "int16") return PlyType::kI16;
  if (s == "ushort" || s == "uint16") return PlyType::kU16;
  if (s == "int" || s == "int32") return PlyType::kI32;
  if (s == "uint" || s == "uint32") return PlyType::kU32;
  if (s == "float" || s == "float32") return PlyType::kF32;
  if (s == "double" || s == "float64") return PlyType::kF64;
  Fail(ErrorCode::kParse, "unknown PLY property type '" + std::string(s) + "'");
}

std::size_t PlyTypeSize(PlyType t) {
  switch (t) {
    case PlyType::kI8: case PlyType::kU8: return 1;
    case PlyType::kI16: case PlyType::kU16: return 2;
    case PlyType::kI32: case PlyType::kU32: case PlyType::kF32: return 4;
    case PlyType::kF64: return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::kF32;
  bool is_list = false;
  PlyType count_type = PlyType::kU8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

enum class PlyFormat { kAscii, kBinaryLE, kBinaryBE };

// Sequential value reader over the body of a PLY file.
class PlyReader {
 public:
  PlyReader(const std::string& bytes, std::size_t offset, PlyFormat format)
      : bytes_(bytes), pos_(offset), format_(format) {}

  double Read(PlyType type) {
    if (format_ == PlyFormat::kAscii) return ReadAscii();
    const std::size_t size = PlyTypeSize(type);
    if (pos_ + size > bytes_.size()) Fail(ErrorCode::kParse, "PLY body truncated");
    unsigned char buf[8];
    std::memcpy(buf, bytes_.data() + pos_, size);
    pos_ += size;
    const bool swap = (format_ == PlyFormat::kBinaryBE) == (std::endian::native == std::endian::little);
    if (swap) std::reverse(buf, buf + size);
    switch (type) {
      case PlyType::kI8: { int8_t v; std::memcpy(&v, buf, 1); return v; }
      case PlyType::kU8: { uint8_t v; std::memcpy(&v, buf, 1); return v; }
      case PlyType::kI16: { int16_t v; std::memcpy(&v, buf, 2); return v; }
      case PlyType::kU16: { uint16_t v; std::memcpy(&v, buf, 2); return v; }
      case PlyType::kI32: { int32_t v; std::memcpy(&v, buf, 4); return v; }
      case PlyType::kU32: { uint32_t v; std::memcpy(&v, buf, 4); return v; }
      case PlyType::kF32: { float v; std::memcpy(&v, buf, 4); return v; }
      case PlyType::kF64: { double v; std::memcpy(&v, buf, 8); return v; }
    }
    return 0.0;
  }

 private:
  double ReadAscii() {
    while (pos_ < bytes_.size() && std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    std::size_t end = pos_;
    while (end < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[end]))) ++end;
    if (end == pos_) Fail(ErrorCode::kParse, "PLY body truncated");
    double v;
    if (!ParseDouble(std::string_view(bytes_.data() + pos_, end - pos_), v)) {
      Fail(ErrorCode::kParse, "bad PLY number '" + bytes_.substr(pos_, end - pos_) + "'");
    }
    pos_ = end;
    return v;
  }

  const std::string& bytes_;
  std::size_t pos_;
  PlyFormat format_;
};

Mesh ParsePly(const std::string& bytes, const LoadOptions& options) {
  const std::size_t header_end = bytes.find("end_header");
  if (bytes.compare(0, 3, "ply") != 0 || header_end == std::string::npos) {
    Fail(ErrorCode::kParse, "missing PLY header");
  }
  std::size_t body = bytes.find('\n', header_end);
  body = body == std::string::npos ? bytes.size() : body + 1;

  PlyFormat format = PlyFormat::kAscii;
  std::vector<PlyElement> elements;
  std::istringstream header(bytes.substr(0, header_end));
  std::string line;
  while (std::getline(header, line)) {
    const auto tok = SplitWs(line);
    if (tok.empty()) continue;
    if (tok[0] == "format") {
      if (tok.size() < 2) Fail(ErrorCode::kParse, "bad PLY format line");
      if (tok[1] == "ascii") format = PlyFormat::kAscii;
      else if (tok[1] == "binary_little_endian") format = PlyFormat::kBinaryLE;
      else if (tok[1] == "binary_big_endian") format = PlyFormat::kBinaryBE;
      else Fail(ErrorCode::kParse, "unknown PLY format " + std::string(tok[1]));
    } else if (tok[0] == "element") {
      long count = 0;
      if (tok.size() < 3 || !ParseInt(tok[2], count) || count < 0) Fail(ErrorCode::kParse, "bad PLY element line");
      elements.push_back({std::string(tok[1]), static_cast<std::size_t>(count), {}});
    } else if (tok[0] == "property") {
      if (elements.empty()) Fail(ErrorCode::kParse, "PLY property before element");
      PlyProperty p;
      if (tok.size() >= 5 && tok[1] == "list") {
        p.is_list = true;
        p.count_type = ParsePlyType(tok[2]);
        p.type = ParsePlyType(tok[3]);
        p.name = tok[4];
      } else if (tok.size() >= 3) {
        p.type = ParsePlyType(tok[1]);
        p.name = tok[2];
      } else {
        Fail(ErrorCode::kParse, "bad PLY property line");
      }
      elements.back().props.push_back(p);
    }
  }

  Mesh mesh;
  bool has_normals = false;
  PlyReader reader(bytes, body, format);
  for (const PlyElement& el : elements) {
    if (el.name == "vertex") {
      int ix = -1, iy = -1, iz = -1, inx = -1, iny = -1, inz = -1;
      for (int k = 0; k < static_cast<int>(el.props.size()); ++k) {
        const std::string& n = el.props[k].name;
        if (n == "x") ix = k; else if (n == "y") iy = k; else if (n == "z") iz = k;
        else if (n == "nx") inx = k; else if (n == "ny") iny = k; else if (n == "nz") inz = k;
      }
      if (ix < 0 || iy < 0 || iz < 0) Fail(ErrorCode::kParse, "PLY vertex lacks x/y/z");
      has_normals = inx >= 0 && iny >= 0 && inz >= 0;
      std::vector<double> vals(el.props.size());
      for (std::size_t i = 0; i < el.count; ++i) {
        for (std::size_t k = 0; k < el.props.size(); ++k) {
          const PlyProperty& p = el.props[k];
          if (p.is_list) {
            const auto n = static_cast<std::size_t>(reader.Read(p.count_type));
            for (std::size_t j = 0; j < n; ++j) reader.Read(p.type);
            vals[k] = 0.0;
          } else {
            vals[k] = reader.Read(p.type);
          }
        }
        mesh.vertices.emplace_back(vals[ix], vals[iy], vals[iz]);
        if (has_normals) mesh.normals.emplace_back(vals[inx], vals[iny], vals[inz]);
      }
    } else if (el.name == "face") {
      for (std::size_t i = 0; i < el.count; ++i) {
        for (const PlyProperty& p : el.props) {
          if (!p.is_list) {
            reader.Read(p.type);
            continue;
          }
          const auto n = static_cast<std::size_t>(reader.Read(p.count_type));
          std::vector<long> poly(n);
          for (std::size_t j = 0; j < n; ++j) poly[j] = static_cast<long>(reader.Read(p.type));
          if (p.name != "vertex_indices" && p.name != "vertex_index") continue;
          for (long v : poly) {
            if (v < 0 || v >= static_cast<long>(mesh.vertices.size())) {
              Fail(ErrorCode::kParse, "PLY face index out of range in face " + std::to_string(i));
            }
          }
          EmitPolygon(poly, options.triangulate, i, [&](long a, long b, long c) {
            mesh.triangles.push_back({static_cast<uint32_t>(a), static_cast<uint32_t>(b), static_cast<uint32_t>(c)});
          });
        }
      }
    } else {
      for (std::size_t i = 0; i < el.count; ++i) {
        for (const PlyProperty& p : el.props) {
          if (p.is_list) {
            const auto n = static_cast<std::size_t>(reader.Read(p.count_type));
            for (std::size_t j = 0; j < n; ++j) reader.Read(p.type);
          } else {
            reader.Read(p.type);
          }
        }
      }
    }
  }

  if (mesh.vertices.empty() || mesh.triangles.empty()) Fail(ErrorCode::kEmptyGeometry, "PLY has no faces");
  bool normals_ok = has_normals;
  for (Vec3& n : mesh.normals) {
    const double len = n.norm();
    if (!(len > 0.0)) normals_ok = false;
    else n /= len;
  }
  if (!normals_ok) ComputeVertexNormals(mesh);
  return mesh;
}

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

Mesh ParseMesh(const std::string& bytes, const std::string& format, const LoadOptions& options) {
  const std::string f = Lower(format);
  Mesh mesh;
  if (f == "obj") mesh = ParseObj(bytes, options);
  else if (f == "ply") mesh = ParsePly(bytes, options);
  else Fail(ErrorCode::kParse, "unsupported mesh format '" + format + "'");
  mesh.Validate();
  return mesh;
}

Mesh LoadMesh(const std::filesystem::path& path, const LoadOptions& options) {
  std::string ext = Lower(path.extension().string());
  if (!ext.empty() && ext[0] == '.') ext.erase(0, 1);
  if (ext != "obj" && ext != "ply") Fail(ErrorCode::kParse, "unsupported mesh extension: " + path.string());
  const std::string bytes = ReadFileBytes(path);
  try {
    return ParseMesh(bytes, ext, options);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

// ---- Procedural shapes ------------------------------------------------------

Mesh MakeBox(const Vec3& size) {
  Mesh mesh;
  const Vec3 h = 0.5 * size;
  // One quad per face so shading normals stay flat.
  for (int axis = 0; axis < 3; ++axis) {
    for (int sign = -1; sign <= 1; sign += 2) {
      Vec3 n = Vec3::Zero();
      n[axis] = sign;
      const int u = (axis + 1) % 3;
      const int v = (axis + 2) % 3;
      const auto base = static_cast<uint32_t>(mesh.vertices.size());
      const double du[4] = {-1, 1, 1, -1};
      const double dv[4] = {-1, -1, 1, 1};
      for (int k = 0; k < 4; ++k) {
        Vec3 p;
        p[axis] = sign * h[axis];
        p[u] = du[k] * h[u];
        p[v] = dv[k] * h[v];
        mesh.vertices.push_back(p);
        mesh.normals.push_back(n);
      }
      if (sign > 0) {
        mesh.triangles.push_back({base, base + 1, base + 2});
        mesh.triangles.push_back({base, base + 2, base + 3});
      } else {
        mesh.triangles.push_back({base, base + 2, base + 1});
        mesh.triangles.push_back({base, base + 3, base + 2});
      }
    }
  }
  return mesh;
}

Mesh MakeIcosphere(double radius, int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& v : verts) v.normalize();
  std::vector<Triangle> tris = {
      {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
      {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<uint32_t, uint32_t>, uint32_t> midpoints;
    auto midpoint = [&](uint32_t a, uint32_t b) {
      auto key = std::minmax(a, b);
      auto [it, inserted] = midpoints.emplace(key, static_cast<uint32_t>(verts.size()));
      if (inserted) verts.push_back((verts[a] + verts[b]).normalized());
      return it->second;
    };
    std::vector<Triangle> next;
    next.reserve(tris.size() * 4);
    for (const Triangle& tri : tris) {
      const uint32_t ab = midpoint(tri[0], tri[1]);
      const uint32_t bc = midpoint(tri[1], tri[2]);
      const uint32_t ca = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }
  Mesh mesh;
  mesh.normals = verts;
  for (Vec3& v : verts) v *= radius;
  mesh.vertices = std::move(verts);
  mesh.triangles = std::move(tris);
  return mesh;
}

Mesh MakeCylinder(double radius, double height, int segments) {
  Mesh mesh;
  const double hz = 0.5 * height;
  auto ring = [&](double z, bool radial_normal, const Vec3& cap_normal) {
    const auto base = static_cast<uint32_t>(mesh.vertices.size());
    for (int i = 0; i < segments; ++i) {
      const double a = 2.0 * kPi * i / segments;
      const Vec3 dir(std::cos(a), std::sin(a), 0.0);
      mesh.vertices.push_back(Vec3(radius * dir.x(), radius * dir.y(), z));
      mesh.normals.push_back(radial_normal ? dir : cap_normal);
    }
    return base;
  };
  const uint32_t bottom = ring(-hz, true, {});
  const uint32_t top = ring(hz, true, {});
  const auto seg = static_cast<uint32_t>(segments);
  for (uint32_t i = 0; i < seg; ++i) {
    const uint32_t j = (i + 1) % seg;
    mesh.triangles.push_back({bottom + i, bottom + j, top + j});
    mesh.triangles.push_back({bottom + i, top + j, top + i});
  }
  const uint32_t cap_bottom = ring(-hz, false, -Vec3::UnitZ());
  const uint32_t cap_top = ring(hz, false, Vec3::UnitZ());
  for (uint32_t i = 1; i + 1 < seg; ++i) {
    mesh.triangles.push_back({cap_bottom, cap_bottom + i + 1, cap_bottom + i});
    mesh.triangles.push_back({cap_top, cap_top + i, cap_top + i + 1});
  }
  return mesh;
}

Mesh MakeQuad(double size_x, double size_y) {
  Mesh mesh;
  const double hx = 0.5 * size_x;
  const double hy = 0.5 * size_y;
  mesh.vertices = {{-hx, -hy, 0}, {hx, -hy, 0}, {hx, hy, 0}, {-hx, hy, 0}};
  mesh.normals.assign(4, Vec3::UnitZ());
  mesh.triangles = {{0, 1, 2}, {0, 2, 3}};
  return mesh;
}

Mesh Transformed(const Mesh& mesh, const Pose& pose) {
  Mesh out = mesh;
  for (Vec3& v : out.vertices) v = pose.Apply(v);
  for (Vec3& n : out.normals) n = (pose.rotation * n).normalized();
  return out;
}

}  // namespace pbrsynth::geom
