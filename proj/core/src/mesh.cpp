#include "facegen/mesh.hpp"

#include "facegen/error.hpp"

#include <algorithm>
#include <string>

namespace facegen {

std::string_view region_name(int region_id) {
  static constexpr std::array<std::string_view, kRegionCount> kNames = {
      "eyes", "jaw", "nose", "chin", "cheeks", "mouth", "eyebrows", "contour"};
  if (region_id < 1 || region_id > kRegionCount) return "invalid";
  return kNames[static_cast<std::size_t>(region_id - 1)];
}

bool same_topology(const TopologyPtr& a, const TopologyPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

FaceMesh::FaceMesh(TopologyPtr topology, Eigen::VectorXd geometry, Eigen::VectorXd texture)
    : topology_(std::move(topology)), geometry_(std::move(geometry)), texture_(std::move(texture)) {
  if (!topology_) fail(ErrorCode::kInvalidMesh, "invalid mesh: missing topology");
  const Eigen::Index expected = 3 * static_cast<Eigen::Index>(topology_->vertex_count);
  if (geometry_.size() != expected || texture_.size() != expected) {
    fail(ErrorCode::kDimensionMismatch,
         "dimension mismatch: expected vectors of length " + std::to_string(expected));
  }
  if (texture_.size() > 0 && (texture_.minCoeff() < 0.0 || texture_.maxCoeff() > 1.0)) {
    fail(ErrorCode::kInvalidMesh, "invalid mesh: texture outside [0,1]");
  }
  if (!geometry_.allFinite()) fail(ErrorCode::kInvalidMesh, "invalid mesh: non-finite geometry");
  for (const auto& tri : topology_->triangles) {
    for (int idx : tri) {
      if (idx < 0 || idx >= topology_->vertex_count) {
        fail(ErrorCode::kInvalidMesh, "invalid mesh: triangle index out of range");
      }
    }
  }
}

void require_topology(const FaceMesh& mesh, const TopologyPtr& topology) {
  if (!same_topology(mesh.topology(), topology)) {
    fail(ErrorCode::kTopologyMismatch, "topology mismatch");
  }
}

int RegionDefinition::size() const {
  return static_cast<int>(std::count(membership.begin(), membership.end(), true));
}

RegionLayout::RegionLayout(std::array<RegionDefinition, kRegionCount> regions)
    : regions_(std::move(regions)) {
  const std::size_t n = regions_[0].membership.size();
  std::vector<int> owners(n, 0);
  for (int r = 0; r < kRegionCount; ++r) {
    const auto& def = regions_[static_cast<std::size_t>(r)];
    if (def.region_id != r + 1) fail(ErrorCode::kInvalidSpec, "invalid spec: region ids must be 1..8");
    if (def.membership.size() != n) fail(ErrorCode::kDimensionMismatch, "dimension mismatch: region mask");
    for (std::size_t v = 0; v < n; ++v) {
      if (def.membership[v]) ++owners[v];
    }
  }
  if (std::any_of(owners.begin(), owners.end(), [](int c) { return c != 1; })) {
    fail(ErrorCode::kInvalidSpec, "invalid spec: regions must partition the vertex set");
  }
}

RegionLayout RegionLayout::from_labels(const std::vector<int>& region_of_vertex) {
  std::array<RegionDefinition, kRegionCount> defs;
  for (int r = 0; r < kRegionCount; ++r) {
    defs[static_cast<std::size_t>(r)].region_id = r + 1;
    defs[static_cast<std::size_t>(r)].membership.assign(region_of_vertex.size(), false);
  }
  for (std::size_t v = 0; v < region_of_vertex.size(); ++v) {
    const int id = region_of_vertex[v];
    if (id < 1 || id > kRegionCount) fail(ErrorCode::kInvalidSpec, "invalid spec: region id out of range");
    defs[static_cast<std::size_t>(id - 1)].membership[v] = true;
  }
  return RegionLayout(std::move(defs));
}

int RegionLayout::region_of(int vertex) const {
  for (const auto& def : regions_) {
    if (def.contains(vertex)) return def.region_id;
  }
  return 0;
}

std::vector<int> RegionLayout::labels() const {
  std::vector<int> out(static_cast<std::size_t>(vertex_count()));
  for (int v = 0; v < vertex_count(); ++v) out[static_cast<std::size_t>(v)] = region_of(v);
  return out;
}

Eigen::VectorXd RegionLayout::mask(const Eigen::VectorXd& values, int region_id) const {
  const auto& def = (*this)[region_id];
  Eigen::VectorXd out = Eigen::VectorXd::Zero(values.size());
  for (int v = 0; v < vertex_count(); ++v) {
    if (def.contains(v)) out.segment<3>(3 * v) = values.segment<3>(3 * v);
  }
  return out;
}

}  // namespace facegen
