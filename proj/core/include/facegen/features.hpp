#pragma once

#include "facegen/render.hpp"

#include <Eigen/Core>

#include <span>

namespace facegen {

// Fixed first stage of the learned models: mean-pools an image into a
// grid x grid x 3 cell vector (row-major cells, RGB inner).
Eigen::VectorXd pool_image(const Image& image, int grid);

// One pooled row per image.
Eigen::MatrixXd pool_images(std::span<const Image> images, int grid);

// Per-feature affine standardization fitted on training inputs.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd inv_std;

  static Standardizer fit(const Eigen::MatrixXd& rows);

  Eigen::MatrixXd apply(const Eigen::MatrixXd& rows) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& row) const;
};

// y = W x + b.
struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out

  Eigen::Index inputs() const { return weight.cols(); }
  Eigen::Index outputs() const { return weight.rows(); }
};

}  // namespace facegen
