#pragma once

#include "facegen/features.hpp"
#include "facegen/render.hpp"
#include "facegen/training.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace facegen {

inline constexpr double kDefaultMargin = 2.0;

// Shared-weight embedding G_W: pooled image -> standardized ->
// tanh(W1 x + b1) -> W2 h + b2.
struct EmbeddingModel {
  int grid = 16;
  Standardizer input_norm;
  DenseLayer hidden;
  DenseLayer output;
  double margin = kDefaultMargin;

  int dimension() const { return static_cast<int>(output.outputs()); }

  Eigen::VectorXd embed(const Image& image) const;
  // Rows of standardized pooled inputs -> rows of embeddings.
  Eigen::MatrixXd embed_rows(const Eigen::MatrixXd& inputs) const;
};

struct FacePair {
  Image a;
  Image b;
  int label = 0;  // 1: same face, 0: different faces
};

// l * D + (1 - l) * max(0, rho - D), D = ||a - b||.
double contrastive_loss(const Eigen::VectorXd& a, const Eigen::VectorXd& b, int label, double rho);

struct EmbeddingTrainOptions {
  int grid = 16;
  int hidden = 64;
  int dimension = 64;
  double margin = kDefaultMargin;
  std::uint64_t seed = 1;
  DescentOptions descent;
};

struct EmbeddingTrainReport {
  EmbeddingModel model;
  std::vector<double> loss_history;
  double mean_same_distance = 0.0;
  double mean_diff_distance = 0.0;
};

// Builds the model (random weights, fitted input standardization) without
// taking any descent steps.
EmbeddingModel init_embedding(std::span<const FacePair> pairs, const EmbeddingTrainOptions& options);

EmbeddingTrainReport train_embedding(std::span<const FacePair> pairs, const EmbeddingTrainOptions& options);

// Pair objective over standardized inputs: rows 2i and 2i+1 hold pair i.
struct PairProblem {
  Eigen::MatrixXd inputs;
  Eigen::VectorXi labels;
};

PairProblem make_pair_problem(const EmbeddingModel& model, std::span<const FacePair> pairs);

// Layout: W1, b1, W2, b2 (matrices column-major).
Eigen::VectorXd embedding_parameters(const EmbeddingModel& model);
void set_embedding_parameters(EmbeddingModel& model, const Eigen::VectorXd& flat);

// Mean contrastive loss over the pairs.
double pair_loss(const EmbeddingModel& model, const PairProblem& problem, Eigen::VectorXd* grad);

// Mean same-pair and different-pair embedding distances.
std::pair<double, double> mean_pair_distances(const EmbeddingModel& model, const PairProblem& problem);

double embedding_distance(const EmbeddingModel& model, const Image& a, const Image& b);

struct Normalizer {
  double value = 0.0;
  bool degenerate() const { return !(value > 0.0); }
};

// G = max over the corpus of ||G_W(I) - G_W(reference)||.
Normalizer compute_normalizer(const EmbeddingModel& model, const Image& reference, std::span<const Image> corpus);
Normalizer compute_normalizer(const Eigen::VectorXd& reference_embedding, const Eigen::MatrixXd& corpus_embeddings);

// ||G_W(image) - G_W(input)|| / G.
double similarity_cost(const Image& image, const Image& input_image, const EmbeddingModel& model, double normalizer);

// Similarity cost against a fixed input with its embedding cached.
class SimilarityTerm {
 public:
  SimilarityTerm(const EmbeddingModel& model, const Image& input_image, double normalizer);

  double cost(const Image& image) const;
  double normalizer() const { return normalizer_; }

 private:
  const EmbeddingModel& model_;
  Eigen::VectorXd input_embedding_;
  double normalizer_;
};

}  // namespace facegen
