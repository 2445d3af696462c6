#pragma once

#include "facegen/mesh.hpp"

#include <Eigen/Core>

#include <span>
#include <string>
#include <vector>

namespace facegen {

struct AttributeExample {
  FaceMesh mesh;
  double markedness = 0.0;  // mu in [0,1]
};

// A named geometry/texture delta confined to one region.
struct FacialAttribute {
  std::string name;
  int region_id = 0;
  Eigen::VectorXd delta_geometry;
  Eigen::VectorXd delta_texture;
};

using AttributeCatalog = std::vector<FacialAttribute>;

// Markedness-weighted mean offset of the examples from the dataset mean,
// masked to the attribute's region.
FacialAttribute learn_attribute(std::string name, const RegionDefinition& region,
                                std::span<const AttributeExample> examples,
                                const Eigen::VectorXd& mean_geometry,
                                const Eigen::VectorXd& mean_texture);

// (V + beta dV, T + beta dT) with texture clamped to [0,1].
FaceMesh apply_attribute(const FaceMesh& mesh, const FacialAttribute& attr, double beta);

// Catalog indices of the attributes living in `region_id`.
std::vector<std::size_t> attributes_in_region(const AttributeCatalog& catalog, int region_id);

}  // namespace facegen
