#pragma once

#include "facegen/features.hpp"
#include "facegen/impression.hpp"
#include "facegen/mesh.hpp"
#include "facegen/render.hpp"
#include "facegen/training.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace facegen {

// Images with per-type present(1)/absent(0) labels. An empty label vector
// means the type is not annotated.
struct LabeledImageSet {
  std::vector<Image> images;
  std::array<std::vector<int>, kImpressionCount> labels;

  bool has_labels(ImpressionType t) const { return !labels[static_cast<std::size_t>(index_of(t))].empty(); }
  const std::vector<int>& labels_for(ImpressionType t) const { return labels[static_cast<std::size_t>(index_of(t))]; }
  std::vector<int>& labels_for(ImpressionType t) { return labels[static_cast<std::size_t>(index_of(t))]; }

  LabeledImageSet subset(std::span<const std::size_t> indices) const;
};

// Pooled image -> standardized -> tanh(W x + b) = g -> [x1, x2] = w_P^T g.
// x1 scores "belongs to P", x2 "does not".
struct ScorerModel {
  int grid = 16;
  Standardizer input_norm;
  DenseLayer hidden;
  std::array<Eigen::MatrixXd, kImpressionCount> heads;  // d x 2 each; empty = untrained

  int feature_dim() const { return static_cast<int>(hidden.outputs()); }
  bool has_head(ImpressionType t) const { return heads[static_cast<std::size_t>(index_of(t))].size() > 0; }
  const Eigen::MatrixXd& head(ImpressionType t) const;

  Eigen::VectorXd features(const Image& image) const;
  Eigen::Vector2d logits(const Eigen::VectorXd& features, ImpressionType t) const;
  Eigen::Vector2d logits(const Image& image, ImpressionType t) const { return logits(features(image), t); }
};

// Softmax probability of the first logit, shifted by the max for stability.
double softmax_first(double x1, double x2);

// 1 - softmax_first(x1, x2).
double cost_from_logits(double x1, double x2);

// Personality impression cost of an image: 1 - P(type | image).
double impression_cost(const Image& image, ImpressionType type, const ScorerModel& model);

struct ScorerTrainOptions {
  int grid = 16;
  int feature_dim = 128;
  double weight_decay = 0.0;
  std::uint64_t seed = 1;
  DescentOptions descent;
};

struct ScorerTrainReport {
  ScorerModel model;
  std::vector<double> loss_history;
  std::array<std::optional<double>, kImpressionCount> train_accuracy;
};

// Trains one shared extractor and a head per listed type on the mean
// cross-entropy over types. Heads start at zero.
ScorerTrainReport train_scorer(const LabeledImageSet& data, std::span<const ImpressionType> types,
                               const ScorerTrainOptions& options);

inline ScorerTrainReport train_scorer(const LabeledImageSet& data, ImpressionType type,
                                      const ScorerTrainOptions& options) {
  const std::array<ImpressionType, 1> one = {type};
  return train_scorer(data, one, options);
}

// 0/1 accuracy of argmax([x1, x2]) against the labels of `type`.
double evaluate_scorer(const ScorerModel& model, const LabeledImageSet& test, ImpressionType type);

// Fraction of equal entries; throws "empty evaluation" on empty input.
double accuracy(std::span<const int> predictions, std::span<const int> labels);

// Training objective over standardized inputs, exposed for gradient checks.
struct ScorerProblem {
  Eigen::MatrixXd inputs;
  std::vector<ImpressionType> types;
  std::vector<Eigen::VectorXd> targets;  // 1.0 present, 0.0 absent, per type
};

ScorerProblem make_scorer_problem(const ScorerModel& model, const LabeledImageSet& data,
                                  std::span<const ImpressionType> types);

// Parameter layout: hidden weight (column-major), hidden bias, heads in
// `types` order (column-major).
Eigen::VectorXd scorer_parameters(const ScorerModel& model, std::span<const ImpressionType> types);
void set_scorer_parameters(ScorerModel& model, std::span<const ImpressionType> types, const Eigen::VectorXd& flat);

double scorer_loss(const ScorerModel& model, const ScorerProblem& problem, double weight_decay,
                   Eigen::VectorXd* grad);

// What the optimizer hands a scorer: the candidate mesh and its render.
struct FaceSample {
  const FaceMesh& mesh;
  const Image& image;
};

class ImpressionScorer {
 public:
  virtual ~ImpressionScorer() = default;
  virtual double cost(const FaceSample& face, ImpressionType type) const = 0;
  virtual bool supports(ImpressionType type) const = 0;
};

class LearnedImpressionScorer final : public ImpressionScorer {
 public:
  explicit LearnedImpressionScorer(const ScorerModel& model) : model_(model) {}

  double cost(const FaceSample& face, ImpressionType type) const override {
    return impression_cost(face.image, type, model_);
  }
  bool supports(ImpressionType type) const override { return model_.has_head(type); }

 private:
  const ScorerModel& model_;
};

}  // namespace facegen
