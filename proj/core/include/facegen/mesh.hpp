#pragma once

#include <Eigen/Core>

#include <array>
#include <memory>
#include <string_view>
#include <vector>

namespace facegen {

inline constexpr int kRegionCount = 8;

// Face regions in a fixed order; region ids are 1-based (id = index + 1).
enum class Region { kEyes, kJaw, kNose, kChin, kCheeks, kMouth, kEyebrows, kContour };

std::string_view region_name(int region_id);

using Triangle = std::array<int, 3>;

// Triangle list shared by every face of a family. Triangles wind
// counter-clockwise when seen from +z (the camera side).
struct Topology {
  int vertex_count = 0;
  std::vector<Triangle> triangles;

  bool operator==(const Topology&) const = default;
};

using TopologyPtr = std::shared_ptr<const Topology>;

bool same_topology(const TopologyPtr& a, const TopologyPtr& b);

// Textured face mesh: geometry (x,y,z per vertex) and per-vertex RGB texture,
// both of length 3n, over a shared topology. Texture entries lie in [0,1].
class FaceMesh {
 public:
  FaceMesh() = default;
  FaceMesh(TopologyPtr topology, Eigen::VectorXd geometry, Eigen::VectorXd texture);

  int vertex_count() const { return topology_ ? topology_->vertex_count : 0; }
  const TopologyPtr& topology() const { return topology_; }
  const Eigen::VectorXd& geometry() const { return geometry_; }
  const Eigen::VectorXd& texture() const { return texture_; }

  Eigen::Vector3d position(int v) const { return geometry_.segment<3>(3 * v); }
  Eigen::Vector3d color(int v) const { return texture_.segment<3>(3 * v); }

 private:
  TopologyPtr topology_;
  Eigen::VectorXd geometry_;
  Eigen::VectorXd texture_;
};

// Throws "topology mismatch" when the mesh is not over `topology`.
void require_topology(const FaceMesh& mesh, const TopologyPtr& topology);

struct RegionDefinition {
  int region_id = 0;
  std::vector<bool> membership;

  bool contains(int vertex) const { return membership[static_cast<std::size_t>(vertex)]; }
  int size() const;
};

// Eight masks partitioning the vertex set.
class RegionLayout {
 public:
  RegionLayout() = default;
  // Validates ids 1..8 in order and that the masks partition the vertices.
  explicit RegionLayout(std::array<RegionDefinition, kRegionCount> regions);

  // Builds the layout from a per-vertex region id table (values 1..8).
  static RegionLayout from_labels(const std::vector<int>& region_of_vertex);

  const RegionDefinition& operator[](int region_id) const {
    return regions_[static_cast<std::size_t>(region_id - 1)];
  }
  int vertex_count() const {
    return static_cast<int>(regions_[0].membership.size());
  }
  int region_of(int vertex) const;
  std::vector<int> labels() const;

  // Zeroes every xyz/rgb triple outside the region.
  Eigen::VectorXd mask(const Eigen::VectorXd& values, int region_id) const;

 private:
  std::array<RegionDefinition, kRegionCount> regions_;
};

}  // namespace facegen
