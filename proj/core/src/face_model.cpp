#include "facegen/face_model.hpp"

#include "facegen/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace facegen {

FaceCoefficients FaceCoefficients::zeros(int m) {
  FaceCoefficients c;
  for (auto& b : c.blocks) b = Eigen::VectorXd::Zero(m);
  return c;
}

int FaceCoefficients::components() const {
  const auto m = blocks[0].size();
  for (const auto& b : blocks) {
    if (b.size() != m) fail(ErrorCode::kDimensionMismatch, "dimension mismatch: coefficient blocks differ in length");
  }
  return static_cast<int>(m);
}

Eigen::VectorXd FaceCoefficients::flatten() const {
  const int m = components();
  Eigen::VectorXd flat(kBlocks * m);
  for (int k = 0; k < kBlocks; ++k) flat.segment(k * m, m) = blocks[static_cast<std::size_t>(k)];
  return flat;
}

FaceCoefficients FaceCoefficients::unflatten(const Eigen::VectorXd& flat, int m) {
  if (flat.size() != kBlocks * m) fail(ErrorCode::kDimensionMismatch, "dimension mismatch: flat coefficients");
  FaceCoefficients c;
  for (int k = 0; k < kBlocks; ++k) c.blocks[static_cast<std::size_t>(k)] = flat.segment(k * m, m);
  return c;
}

FaceCoefficients FaceCoefficients::operator+(const FaceCoefficients& other) const {
  FaceCoefficients out;
  for (std::size_t k = 0; k < blocks.size(); ++k) out.blocks[k] = blocks[k] + other.blocks[k];
  return out;
}

FaceCoefficients FaceCoefficients::operator-(const FaceCoefficients& other) const {
  FaceCoefficients out;
  for (std::size_t k = 0; k < blocks.size(); ++k) out.blocks[k] = blocks[k] - other.blocks[k];
  return out;
}

FaceCoefficients FaceCoefficients::operator*(double s) const {
  FaceCoefficients out;
  for (std::size_t k = 0; k < blocks.size(); ++k) out.blocks[k] = blocks[k] * s;
  return out;
}

double FaceCoefficients::max_abs_diff(const FaceCoefficients& other) const {
  double worst = 0.0;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (blocks[k].size() != other.blocks[k].size()) return INFINITY;
    if (blocks[k].size() > 0) worst = std::max(worst, (blocks[k] - other.blocks[k]).cwiseAbs().maxCoeff());
  }
  return worst;
}

Eigen::VectorXd FaceModel::mean_geometry() const {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(3 * vertex_count());
  for (const auto& r : pca) sum += r.mean_geometry;
  return sum;
}

Eigen::VectorXd FaceModel::mean_texture() const {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(3 * vertex_count());
  for (const auto& r : pca) sum += r.mean_texture;
  return sum;
}

namespace {

struct ChannelPCA {
  Eigen::VectorXd mean;       // restricted to region rows
  Eigen::MatrixXd basis;      // restricted rows x m
  Eigen::VectorXd variances;  // m
};

// Orthonormalizes columns in place (modified Gram-Schmidt). Columns flagged
// in `fill` are replaced by unit coordinate vectors orthogonal to the rest.
void orthonormalize(Eigen::MatrixXd& basis, const std::vector<bool>& fill) {
  const Eigen::Index rows = basis.rows();
  Eigen::Index next_axis = 0;
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    Eigen::VectorXd col = basis.col(j);
    bool ok = !fill[static_cast<std::size_t>(j)];
    if (ok) {
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index i = 0; i < j; ++i) col -= basis.col(i).dot(col) * basis.col(i);
      }
      const double norm = col.norm();
      ok = norm > 1e-6;
      if (ok) col /= norm;
    }
    while (!ok && next_axis < rows) {
      col = Eigen::VectorXd::Unit(rows, next_axis++);
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index i = 0; i < j; ++i) col -= basis.col(i).dot(col) * basis.col(i);
      }
      const double norm = col.norm();
      ok = norm > 0.5;
      if (ok) col /= norm;
    }
    basis.col(j) = col;
  }
}

// Makes the largest-magnitude entry of each column positive.
void fix_signs(Eigen::MatrixXd& basis) {
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    Eigen::Index arg = 0;
    basis.col(j).cwiseAbs().maxCoeff(&arg);
    if (basis(arg, j) < 0.0) basis.col(j) *= -1.0;
  }
}

// PCA of the rows of `data` (N x D) via the N x N Gram matrix.
ChannelPCA channel_pca(const Eigen::MatrixXd& data, int m) {
  const auto n = data.rows();
  ChannelPCA out;
  out.mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rowwise() - out.mean.transpose();
  const Eigen::MatrixXd gram = centered * centered.transpose() / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const Eigen::VectorXd& evals = eig.eigenvalues();  // ascending
  const double data_scale = data.squaredNorm() / static_cast<double>(std::max<Eigen::Index>(1, data.size()));
  const double floor = 1e-12 * std::max(gram.trace(), data_scale);

  out.basis.resize(data.cols(), m);
  out.variances.resize(m);
  std::vector<bool> fill(static_cast<std::size_t>(m), false);
  for (int j = 0; j < m; ++j) {
    const Eigen::Index src = n - 1 - j;
    const double lambda = evals(src);
    if (lambda > floor) {
      out.variances(j) = lambda;
      out.basis.col(j) = centered.transpose() * eig.eigenvectors().col(src) /
                         std::sqrt(lambda * static_cast<double>(n - 1));
    } else {
      out.variances(j) = 0.0;
      out.basis.col(j).setZero();
      fill[static_cast<std::size_t>(j)] = true;
    }
  }
  orthonormalize(out.basis, fill);
  fix_signs(out.basis);
  return out;
}

}  // namespace

FaceModel fit_region_pca(std::span<const FaceMesh> dataset, const RegionLayout& regions, int m) {
  const auto count = static_cast<int>(dataset.size());
  if (count < 2) fail(ErrorCode::kInsufficientData, "insufficient data: need at least 2 meshes");
  const TopologyPtr& topology = dataset[0].topology();
  for (const auto& mesh : dataset) require_topology(mesh, topology);
  const int n = topology->vertex_count;
  if (regions.vertex_count() != n) fail(ErrorCode::kTopologyMismatch, "topology mismatch: region masks");
  if (m < 1 || m > count - 1 || m > 3 * n) {
    fail(ErrorCode::kInsufficientData,
         "insufficient data: m=" + std::to_string(m) + " with " + std::to_string(count) + " meshes");
  }

  FaceModel model;
  model.topology = topology;
  model.regions = regions;
  for (int r = 1; r <= kRegionCount; ++r) {
    std::vector<int> rows;
    for (int v = 0; v < n; ++v) {
      if (regions[r].contains(v)) {
        for (int c = 0; c < 3; ++c) rows.push_back(3 * v + c);
      }
    }
    const auto dim = static_cast<Eigen::Index>(rows.size());
    if (dim < m) {
      fail(ErrorCode::kInsufficientData, "insufficient data: region " + std::string(region_name(r)) +
                                             " has fewer coordinates than m");
    }
    Eigen::MatrixXd geo(count, dim);
    Eigen::MatrixXd tex(count, dim);
    for (int i = 0; i < count; ++i) {
      const auto& mesh = dataset[static_cast<std::size_t>(i)];
      for (Eigen::Index k = 0; k < dim; ++k) {
        geo(i, k) = mesh.geometry()(rows[static_cast<std::size_t>(k)]);
        tex(i, k) = mesh.texture()(rows[static_cast<std::size_t>(k)]);
      }
    }
    const ChannelPCA gp = channel_pca(geo, m);
    const ChannelPCA tp = channel_pca(tex, m);

    RegionPCA& out = model.pca[static_cast<std::size_t>(r - 1)];
    out.region_id = r;
    out.mean_geometry = Eigen::VectorXd::Zero(3 * n);
    out.mean_texture = Eigen::VectorXd::Zero(3 * n);
    out.geo_basis = Eigen::MatrixXd::Zero(3 * n, m);
    out.tex_basis = Eigen::MatrixXd::Zero(3 * n, m);
    for (Eigen::Index k = 0; k < dim; ++k) {
      const int row = rows[static_cast<std::size_t>(k)];
      out.mean_geometry(row) = gp.mean(k);
      out.mean_texture(row) = tp.mean(k);
      out.geo_basis.row(row) = gp.basis.row(k);
      out.tex_basis.row(row) = tp.basis.row(k);
    }
    out.geo_variances = gp.variances;
    out.tex_variances = tp.variances;
  }
  return model;
}

ComposedVectors compose_raw(const FaceCoefficients& coeffs, const FaceModel& model) {
  const int m = model.components();
  for (const auto& block : coeffs.blocks) {
    if (block.size() != m) fail(ErrorCode::kDimensionMismatch, "dimension mismatch: coefficients vs basis");
  }
  ComposedVectors out{Eigen::VectorXd::Zero(3 * model.vertex_count()),
                      Eigen::VectorXd::Zero(3 * model.vertex_count())};
  for (int r = 1; r <= kRegionCount; ++r) {
    const RegionPCA& pca = model.region(r);
    out.geometry += pca.mean_geometry;
    out.geometry.noalias() += pca.geo_basis * coeffs.geometry(r);
    out.texture += pca.mean_texture;
    out.texture.noalias() += pca.tex_basis * coeffs.texture(r);
  }
  return out;
}

FaceMesh compose_face(const FaceCoefficients& coeffs, const FaceModel& model) {
  ComposedVectors raw = compose_raw(coeffs, model);
  Eigen::VectorXd texture = raw.texture.cwiseMax(0.0).cwiseMin(1.0);
  return FaceMesh(model.topology, std::move(raw.geometry), std::move(texture));
}

FaceCoefficients project_face(const FaceMesh& mesh, const FaceModel& model) {
  require_topology(mesh, model.topology);
  FaceCoefficients out;
  for (int r = 1; r <= kRegionCount; ++r) {
    const RegionPCA& pca = model.region(r);
    const Eigen::VectorXd geo = model.regions.mask(mesh.geometry(), r) - pca.mean_geometry;
    const Eigen::VectorXd tex = model.regions.mask(mesh.texture(), r) - pca.mean_texture;
    out.geometry(r) = pca.geo_basis.transpose() * geo;
    out.texture(r) = pca.tex_basis.transpose() * tex;
  }
  return out;
}

}  // namespace facegen
