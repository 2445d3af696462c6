#include "facegen/io/obj.hpp"

#include "facegen/error.hpp"
#include "facegen/io/text.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace facegen::io {

void write_obj(std::ostream& out, const FaceMesh& mesh) {
  const auto& g = mesh.geometry();
  const auto& t = mesh.texture();
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    out << "v " << format_double(g(3 * v)) << ' ' << format_double(g(3 * v + 1)) << ' ' << format_double(g(3 * v + 2))
        << ' ' << format_double(t(3 * v)) << ' ' << format_double(t(3 * v + 1)) << ' ' << format_double(t(3 * v + 2))
        << '\n';
  }
  for (const auto& tri : mesh.topology()->triangles) {
    out << "f " << tri[0] + 1 << ' ' << tri[1] + 1 << ' ' << tri[2] + 1 << '\n';
  }
}

void write_obj(const std::filesystem::path& path, const FaceMesh& mesh) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  write_obj(out, mesh);
  if (!out) fail(ErrorCode::kIo, "write failed: " + path.string());
}

namespace {

int parse_index(const std::string& token, int vertex_count, int line_no) {
  const std::string head = token.substr(0, token.find('/'));
  int idx = 0;
  try {
    idx = std::stoi(head);
  } catch (const std::exception&) {
    fail(ErrorCode::kFormat, "format error: bad face index on line " + std::to_string(line_no));
  }
  // Negative indices are relative to the vertices read so far; faces may
  // only reference vertices already declared.
  const int resolved = idx < 0 ? vertex_count + idx : idx - 1;
  if (resolved < 0 || resolved >= vertex_count) fail(ErrorCode::kFormat, "format error: face index out of range on line " + std::to_string(line_no));
  return resolved;
}

}  // namespace

FaceMesh read_obj(std::istream& in) {
  std::vector<double> geo, tex;
  auto topology = std::make_shared<Topology>();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      double vals[6];
      int got = 0;
      while (got < 6 && ls >> vals[got]) ++got;
      if (got != 6) fail(ErrorCode::kFormat, "format error: vertex without r g b color on line " + std::to_string(line_no));
      geo.insert(geo.end(), vals, vals + 3);
      tex.insert(tex.end(), vals + 3, vals + 6);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string token;
      const int count = static_cast<int>(geo.size() / 3);
      while (ls >> token) poly.push_back(parse_index(token, count, line_no));
      if (poly.size() < 3) fail(ErrorCode::kFormat, "format error: face with fewer than 3 vertices on line " + std::to_string(line_no));
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) topology->triangles.push_back({poly[0], poly[k], poly[k + 1]});
    }
  }
  topology->vertex_count = static_cast<int>(geo.size() / 3);
  return FaceMesh(topology, Eigen::Map<Eigen::VectorXd>(geo.data(), static_cast<Eigen::Index>(geo.size())),
                  Eigen::Map<Eigen::VectorXd>(tex.data(), static_cast<Eigen::Index>(tex.size())));
}

FaceMesh read_obj(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
  return read_obj(in);
}

FaceMesh read_obj(const std::filesystem::path& path, const TopologyPtr& topology) {
  FaceMesh loose = read_obj(path);
  if (loose.vertex_count() != topology->vertex_count) {
    fail(ErrorCode::kTopologyMismatch, "topology mismatch: " + path.string() + " has " +
                                           std::to_string(loose.vertex_count()) + " vertices, expected " +
                                           std::to_string(topology->vertex_count));
  }
  if (!loose.topology()->triangles.empty() && loose.topology()->triangles != topology->triangles) {
    fail(ErrorCode::kTopologyMismatch, "topology mismatch: " + path.string() + " face list differs");
  }
  return FaceMesh(topology, loose.geometry(), loose.texture());
}

}  // namespace facegen::io
