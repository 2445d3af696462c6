#pragma once

#include "facegen/mesh.hpp"

#include <filesystem>
#include <iosfwd>

namespace facegen::io {

// Wavefront OBJ with per-vertex color: "v x y z r g b" and 1-based "f a b c".
void write_obj(std::ostream& out, const FaceMesh& mesh);
void write_obj(const std::filesystem::path& path, const FaceMesh& mesh);

// Reads a mesh with its own topology. Polygons are fan-triangulated.
FaceMesh read_obj(std::istream& in);
FaceMesh read_obj(const std::filesystem::path& path);

// Reads a mesh expected to share `topology`; a differing vertex count or
// face list is rejected with "topology mismatch".
FaceMesh read_obj(const std::filesystem::path& path, const TopologyPtr& topology);

}  // namespace facegen::io
