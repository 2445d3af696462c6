#include "facegen/attributes.hpp"

#include "facegen/error.hpp"

namespace facegen {

FacialAttribute learn_attribute(std::string name, const RegionDefinition& region,
                                std::span<const AttributeExample> examples,
                                const Eigen::VectorXd& mean_geometry,
                                const Eigen::VectorXd& mean_texture) {
  if (examples.empty()) fail(ErrorCode::kDegenerateAttribute, "degenerate attribute: no examples");
  const TopologyPtr& topology = examples[0].mesh.topology();
  const Eigen::Index len = mean_geometry.size();
  if (mean_texture.size() != len || static_cast<Eigen::Index>(region.membership.size()) * 3 != len) {
    fail(ErrorCode::kDimensionMismatch, "dimension mismatch: attribute mean vectors");
  }

  double total = 0.0;
  Eigen::VectorXd geo = Eigen::VectorXd::Zero(len);
  Eigen::VectorXd tex = Eigen::VectorXd::Zero(len);
  for (const auto& ex : examples) {
    require_topology(ex.mesh, topology);
    if (ex.mesh.geometry().size() != len) fail(ErrorCode::kTopologyMismatch, "topology mismatch");
    if (!(ex.markedness >= 0.0 && ex.markedness <= 1.0)) {
      fail(ErrorCode::kDegenerateAttribute, "degenerate attribute: markedness outside [0,1]");
    }
    total += ex.markedness;
    geo += ex.markedness * (ex.mesh.geometry() - mean_geometry);
    tex += ex.markedness * (ex.mesh.texture() - mean_texture);
  }
  if (total <= 0.0) fail(ErrorCode::kDegenerateAttribute, "degenerate attribute");

  FacialAttribute attr;
  attr.name = std::move(name);
  attr.region_id = region.region_id;
  attr.delta_geometry = Eigen::VectorXd::Zero(len);
  attr.delta_texture = Eigen::VectorXd::Zero(len);
  for (Eigen::Index v = 0; v < len / 3; ++v) {
    if (region.contains(static_cast<int>(v))) {
      attr.delta_geometry.segment<3>(3 * v) = geo.segment<3>(3 * v) / total;
      attr.delta_texture.segment<3>(3 * v) = tex.segment<3>(3 * v) / total;
    }
  }
  return attr;
}

FaceMesh apply_attribute(const FaceMesh& mesh, const FacialAttribute& attr, double beta) {
  if (attr.delta_geometry.size() != mesh.geometry().size() ||
      attr.delta_texture.size() != mesh.texture().size()) {
    fail(ErrorCode::kTopologyMismatch, "topology mismatch");
  }
  Eigen::VectorXd geometry = mesh.geometry() + beta * attr.delta_geometry;
  Eigen::VectorXd texture = (mesh.texture() + beta * attr.delta_texture).cwiseMax(0.0).cwiseMin(1.0);
  return FaceMesh(mesh.topology(), std::move(geometry), std::move(texture));
}

std::vector<std::size_t> attributes_in_region(const AttributeCatalog& catalog, int region_id) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (catalog[i].region_id == region_id) out.push_back(i);
  }
  return out;
}

}  // namespace facegen
