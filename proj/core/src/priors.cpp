#include "facegen/priors.hpp"

#include "facegen/error.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace facegen {

ImpressionPrior fit_prior(std::span<const FaceCoefficients> samples, ImpressionType impression) {
  if (samples.size() < 2) fail(ErrorCode::kInsufficientSamples, "insufficient samples");
  const int m = samples[0].components();
  const auto n = static_cast<double>(samples.size());
  ImpressionPrior prior;
  prior.impression = impression;
  prior.mean = Eigen::MatrixXd::Zero(FaceCoefficients::kBlocks, m);
  prior.stddev = Eigen::MatrixXd::Zero(FaceCoefficients::kBlocks, m);
  for (const auto& s : samples) {
    if (s.components() != m) fail(ErrorCode::kDimensionMismatch, "dimension mismatch: prior samples");
    for (int k = 0; k < FaceCoefficients::kBlocks; ++k) prior.mean.row(k) += s.blocks[static_cast<std::size_t>(k)].transpose();
  }
  prior.mean /= n;
  for (const auto& s : samples) {
    for (int k = 0; k < FaceCoefficients::kBlocks; ++k) {
      prior.stddev.row(k) +=
          (s.blocks[static_cast<std::size_t>(k)].transpose() - prior.mean.row(k)).array().square().matrix();
    }
  }
  prior.stddev = (prior.stddev / (n - 1.0)).array().sqrt().matrix();
  return prior;
}

FaceCoefficients sample_prior(const ImpressionPrior& prior, Rng& rng) {
  const auto m = static_cast<int>(prior.mean.cols());
  FaceCoefficients out = FaceCoefficients::zeros(m);
  for (int k = 0; k < FaceCoefficients::kBlocks; ++k) {
    for (int j = 0; j < m; ++j) {
      out.blocks[static_cast<std::size_t>(k)](j) = prior.mean(k, j) + prior.stddev(k, j) * rng.normal();
    }
  }
  return out;
}

std::array<double, kRegionCount> region_probabilities(const std::array<double, kRegionCount>& geometry_sums,
                                                      const std::array<double, kRegionCount>& texture_sums) {
  const double gv = std::accumulate(geometry_sums.begin(), geometry_sums.end(), 0.0);
  const double gt = std::accumulate(texture_sums.begin(), texture_sums.end(), 0.0);
  std::array<double, kRegionCount> p{};
  for (std::size_t r = 0; r < p.size(); ++r) {
    const double geo = gv > 0.0 ? geometry_sums[r] / gv : 1.0 / kRegionCount;
    const double tex = gt > 0.0 ? texture_sums[r] / gt : 1.0 / kRegionCount;
    p[r] = 0.5 * geo + 0.5 * tex;
  }
  return p;
}

RegionWeights learn_region_weights(std::span<const EditPair> edits, ImpressionType impression) {
  RegionWeights w;
  w.impression = impression;
  for (const auto& e : edits) {
    for (int r = 1; r <= kRegionCount; ++r) {
      w.geometry_sums[static_cast<std::size_t>(r - 1)] += (e.original.geometry(r) - e.edited.geometry(r)).norm();
      w.texture_sums[static_cast<std::size_t>(r - 1)] += (e.original.texture(r) - e.edited.texture(r)).norm();
    }
  }
  w.probabilities = region_probabilities(w.geometry_sums, w.texture_sums);
  return w;
}

const ImpressionPrior& ImpressionKnowledge::prior(ImpressionType t) const {
  const auto& p = priors[static_cast<std::size_t>(index_of(t))];
  if (!p) fail(ErrorCode::kMissingPrior, "missing prior: " + std::string(impression_name(t)));
  return *p;
}

const RegionWeights& ImpressionKnowledge::region_weights(ImpressionType t) const {
  const auto& w = weights[static_cast<std::size_t>(index_of(t))];
  if (!w) fail(ErrorCode::kMissingPrior, "missing region weights: " + std::string(impression_name(t)));
  return *w;
}

}  // namespace facegen
