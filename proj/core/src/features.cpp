#include "facegen/features.hpp"

#include "facegen/error.hpp"

#include <cmath>

namespace facegen {

Eigen::VectorXd pool_image(const Image& image, int grid) {
  if (grid <= 0 || image.width < grid || image.height < grid) {
    fail(ErrorCode::kDimensionMismatch, "dimension mismatch: image smaller than pooling grid");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid) * grid * 3);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid) * grid);
  for (int y = 0; y < image.height; ++y) {
    const int cy = y * grid / image.height;
    for (int x = 0; x < image.width; ++x) {
      const int cell = cy * grid + x * grid / image.width;
      counts(cell) += 1.0;
      for (int c = 0; c < 3; ++c) out(3 * cell + c) += image.at(x, y, c);
    }
  }
  for (Eigen::Index cell = 0; cell < counts.size(); ++cell) out.segment<3>(3 * cell) /= counts(cell);
  return out;
}

Eigen::MatrixXd pool_images(std::span<const Image> images, int grid) {
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(images.size()), static_cast<Eigen::Index>(grid) * grid * 3);
  for (std::size_t i = 0; i < images.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) = pool_image(images[i], grid).transpose();
  }
  return rows;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& rows) {
  Standardizer s;
  s.mean = rows.colwise().mean().transpose();
  s.inv_std.resize(rows.cols());
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    const double var = (rows.col(j).array() - s.mean(j)).square().mean();
    // Near-constant inputs (background cells) are passed through centered.
    s.inv_std(j) = var > 1e-12 ? 1.0 / std::sqrt(var) : 1.0;
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& rows) const {
  return ((rows.rowwise() - mean.transpose()).array().rowwise() * inv_std.transpose().array()).matrix();
}

Eigen::VectorXd Standardizer::apply(const Eigen::VectorXd& row) const {
  return ((row - mean).array() * inv_std.array()).matrix();
}

}  // namespace facegen
