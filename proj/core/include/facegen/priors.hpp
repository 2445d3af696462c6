#pragma once

#include "facegen/face_model.hpp"
#include "facegen/impression.hpp"
#include "facegen/rng.hpp"

#include <Eigen/Core>

#include <array>
#include <optional>
#include <span>

namespace facegen {

// Independent normal per coefficient; rows follow FaceCoefficients blocks
// (0..7 geometry, 8..15 texture), columns the m components.
struct ImpressionPrior {
  ImpressionType impression = ImpressionType::kSmart;
  Eigen::MatrixXd mean;    // 16 x m
  Eigen::MatrixXd stddev;  // 16 x m, unbiased (N - 1)
};

ImpressionPrior fit_prior(std::span<const FaceCoefficients> samples, ImpressionType impression);

FaceCoefficients sample_prior(const ImpressionPrior& prior, Rng& rng);

struct EditPair {
  FaceCoefficients original;
  FaceCoefficients edited;
};

// Region selection weights learned from edits: the selection probability of
// region r is 0.5 * dv_r / sum(dv) + 0.5 * dt_r / sum(dt). A half whose sums
// are all zero contributes uniformly (1/8 per region).
struct RegionWeights {
  ImpressionType impression = ImpressionType::kSmart;
  std::array<double, kRegionCount> geometry_sums{};
  std::array<double, kRegionCount> texture_sums{};
  std::array<double, kRegionCount> probabilities{};

  double probability(int region_id) const { return probabilities[static_cast<std::size_t>(region_id - 1)]; }
};

RegionWeights learn_region_weights(std::span<const EditPair> edits, ImpressionType impression);

// Probabilities from raw sums with the zero-sum fallback applied.
std::array<double, kRegionCount> region_probabilities(const std::array<double, kRegionCount>& geometry_sums,
                                                      const std::array<double, kRegionCount>& texture_sums);

// Fitted knowledge for all impression types.
struct ImpressionKnowledge {
  std::array<std::optional<ImpressionPrior>, kImpressionCount> priors;
  std::array<std::optional<RegionWeights>, kImpressionCount> weights;

  const ImpressionPrior& prior(ImpressionType t) const;
  const RegionWeights& region_weights(ImpressionType t) const;
};

}  // namespace facegen
