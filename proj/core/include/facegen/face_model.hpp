#pragma once

#include "facegen/mesh.hpp"

#include <Eigen/Core>

#include <array>
#include <span>
#include <vector>

namespace facegen {

// Region PCA for one region. Means and bases are full length 3n with every
// row outside the region exactly zero, so the eight regions sum to a face.
struct RegionPCA {
  int region_id = 0;
  Eigen::VectorXd mean_geometry;
  Eigen::VectorXd mean_texture;
  Eigen::MatrixXd geo_basis;  // 3n x m, orthonormal columns
  Eigen::MatrixXd tex_basis;  // 3n x m, orthonormal columns
  Eigen::VectorXd geo_variances;  // descending
  Eigen::VectorXd tex_variances;  // descending

  int components() const { return static_cast<int>(geo_basis.cols()); }
};

// theta = (v_1..v_8, t_1..t_8). Blocks 0..7 hold geometry coefficients of
// regions 1..8, blocks 8..15 the texture coefficients.
struct FaceCoefficients {
  static constexpr int kBlocks = 2 * kRegionCount;

  std::array<Eigen::VectorXd, kBlocks> blocks;

  static FaceCoefficients zeros(int m);

  Eigen::VectorXd& geometry(int region_id) { return blocks[static_cast<std::size_t>(region_id - 1)]; }
  const Eigen::VectorXd& geometry(int region_id) const { return blocks[static_cast<std::size_t>(region_id - 1)]; }
  Eigen::VectorXd& texture(int region_id) { return blocks[static_cast<std::size_t>(kRegionCount + region_id - 1)]; }
  const Eigen::VectorXd& texture(int region_id) const { return blocks[static_cast<std::size_t>(kRegionCount + region_id - 1)]; }

  // Common block length; throws "dimension mismatch" when blocks disagree.
  int components() const;

  Eigen::VectorXd flatten() const;
  static FaceCoefficients unflatten(const Eigen::VectorXd& flat, int m);

  FaceCoefficients operator+(const FaceCoefficients& other) const;
  FaceCoefficients operator-(const FaceCoefficients& other) const;
  FaceCoefficients operator*(double s) const;

  double max_abs_diff(const FaceCoefficients& other) const;
};

// Region block owning flat block index k (0..15) -> region id.
inline int block_region(int k) { return k % kRegionCount + 1; }

struct FaceModel {
  TopologyPtr topology;
  RegionLayout regions;
  std::array<RegionPCA, kRegionCount> pca;

  int vertex_count() const { return topology ? topology->vertex_count : 0; }
  int components() const { return pca[0].components(); }
  const RegionPCA& region(int region_id) const { return pca[static_cast<std::size_t>(region_id - 1)]; }

  // Sum of region means (the dataset mean face).
  Eigen::VectorXd mean_geometry() const;
  Eigen::VectorXd mean_texture() const;
};

// Region-wise PCA of geometry and texture with m components per region.
// Requires >= 2 meshes over one topology and 1 <= m <= N - 1.
FaceModel fit_region_pca(std::span<const FaceMesh> dataset, const RegionLayout& regions, int m);

struct ComposedVectors {
  Eigen::VectorXd geometry;
  Eigen::VectorXd texture;
};

// Sum over regions of (mean + basis * coeffs), before texture clamping.
ComposedVectors compose_raw(const FaceCoefficients& coeffs, const FaceModel& model);

// compose_raw followed by clamping texture into [0,1].
FaceMesh compose_face(const FaceCoefficients& coeffs, const FaceModel& model);

// v_r = Lambda_r^T (mask_r(V) - mean_r), and likewise for texture.
FaceCoefficients project_face(const FaceMesh& mesh, const FaceModel& model);

}  // namespace facegen
