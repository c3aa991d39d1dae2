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

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pbrsynth/common/math.hpp"

namespace pbrsynth::geom {

using Triangle = std::array<uint32_t, 3>;

// Indexed triangle geometry in meters. Materials are assigned per mesh.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Vec3> normals;  // per vertex, unit length
  std::vector<Triangle> triangles;
  int material_id = 0;

  std::size_t num_triangles() const { return triangles.size(); }
  Bounds3 bounds() const;

  // Throws Error(kInvalidArgument) on out-of-range indices, normal count or
  // length mismatch, and Error(kEmptyGeometry) when there are no triangles.
  void Validate() const;
};

struct LoadOptions {
  // Fan-triangulate polygons instead of rejecting them.
  bool triangulate = false;
};

// Loads ASCII/binary PLY or OBJ by extension. Missing normals are computed
// by area-weighted face-normal averaging. OBJ material statements are
// ignored. Errors: kFileUnreadable, kParse, kNonTriangleFace,
// kEmptyGeometry.
Mesh LoadMesh(const std::filesystem::path& path, const LoadOptions& options = {});

// Same, from in-memory text/bytes; `format` is "obj" or "ply".
Mesh ParseMesh(const std::string& bytes, const std::string& format,
               const LoadOptions& options = {});

// Recomputes per-vertex normals as area-weighted averages of incident face
// normals. Vertices without any non-degenerate face get +Z.
void ComputeVertexNormals(Mesh& mesh);

// Procedural shapes, centered at the origin.
Mesh MakeBox(const Vec3& size);
Mesh MakeIcosphere(double radius, int subdivisions);
Mesh MakeCylinder(double radius, double height, int segments);
// Rectangle in the z=0 plane facing +Z.
Mesh MakeQuad(double size_x, double size_y);

Mesh Transformed(const Mesh& mesh, const Pose& pose);

}  // namespace pbrsynth::geom
