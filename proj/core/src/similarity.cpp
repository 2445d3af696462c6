#include "facegen/similarity.hpp"

#include "facegen/error.hpp"
#include "facegen/rng.hpp"

#include <algorithm>
#include <cmath>

namespace facegen {

Eigen::VectorXd EmbeddingModel::embed(const Image& image) const {
  const Eigen::VectorXd x = input_norm.apply(pool_image(image, grid));
  const Eigen::VectorXd h = (hidden.weight * x + hidden.bias).array().tanh().matrix();
  return output.weight * h + output.bias;
}

Eigen::MatrixXd EmbeddingModel::embed_rows(const Eigen::MatrixXd& inputs) const {
  const Eigen::MatrixXd h =
      ((inputs * hidden.weight.transpose()).rowwise() + hidden.bias.transpose()).array().tanh().matrix();
  return (h * output.weight.transpose()).rowwise() + output.bias.transpose();
}

double contrastive_loss(const Eigen::VectorXd& a, const Eigen::VectorXd& b, int label, double rho) {
  if (a.size() != b.size()) fail(ErrorCode::kDimensionMismatch, "dimension mismatch");
  const double d = (a - b).norm();
  return label == 1 ? d : std::max(0.0, rho - d);
}

PairProblem make_pair_problem(const EmbeddingModel& model, std::span<const FacePair> pairs) {
  std::vector<Image> images;
  images.reserve(2 * pairs.size());
  PairProblem problem;
  problem.labels.resize(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    images.push_back(pairs[i].a);
    images.push_back(pairs[i].b);
    problem.labels(static_cast<Eigen::Index>(i)) = pairs[i].label;
  }
  problem.inputs = model.input_norm.apply(pool_images(images, model.grid));
  return problem;
}

Eigen::VectorXd embedding_parameters(const EmbeddingModel& model) {
  const DenseLayer* layers[] = {&model.hidden, &model.output};
  Eigen::Index total = 0;
  for (const auto* l : layers) total += l->weight.size() + l->bias.size();
  Eigen::VectorXd flat(total);
  Eigen::Index at = 0;
  for (const auto* l : layers) {
    flat.segment(at, l->weight.size()) = Eigen::Map<const Eigen::VectorXd>(l->weight.data(), l->weight.size());
    at += l->weight.size();
    flat.segment(at, l->bias.size()) = l->bias;
    at += l->bias.size();
  }
  return flat;
}

void set_embedding_parameters(EmbeddingModel& model, const Eigen::VectorXd& flat) {
  DenseLayer* layers[] = {&model.hidden, &model.output};
  Eigen::Index at = 0;
  for (auto* l : layers) {
    Eigen::Map<Eigen::VectorXd>(l->weight.data(), l->weight.size()) = flat.segment(at, l->weight.size());
    at += l->weight.size();
    l->bias = flat.segment(at, l->bias.size());
    at += l->bias.size();
  }
  if (at != flat.size()) fail(ErrorCode::kDimensionMismatch, "dimension mismatch: embedding parameters");
}

double pair_loss(const EmbeddingModel& model, const PairProblem& problem, Eigen::VectorXd* grad) {
  const Eigen::MatrixXd& x = problem.inputs;
  const Eigen::Index pairs = problem.labels.size();
  const Eigen::MatrixXd h =
      ((x * model.hidden.weight.transpose()).rowwise() + model.hidden.bias.transpose()).array().tanh().matrix();
  const Eigen::MatrixXd e = (h * model.output.weight.transpose()).rowwise() + model.output.bias.transpose();

  double loss = 0.0;
  Eigen::MatrixXd d_e;
  if (grad) d_e = Eigen::MatrixXd::Zero(e.rows(), e.cols());
  const double inv = 1.0 / static_cast<double>(pairs);
  for (Eigen::Index i = 0; i < pairs; ++i) {
    const Eigen::VectorXd diff = (e.row(2 * i) - e.row(2 * i + 1)).transpose();
    const double d = diff.norm();
    const bool same = problem.labels(i) == 1;
    loss += inv * (same ? d : std::max(0.0, model.margin - d));
    if (!grad || d == 0.0) continue;
    const double slope = same ? 1.0 : (d < model.margin ? -1.0 : 0.0);
    const Eigen::RowVectorXd g = (inv * slope / d) * diff.transpose();
    d_e.row(2 * i) += g;
    d_e.row(2 * i + 1) -= g;
  }
  if (!grad) return loss;

  const Eigen::MatrixXd d_w2 = d_e.transpose() * h;
  const Eigen::VectorXd d_b2 = d_e.colwise().sum().transpose();
  const Eigen::MatrixXd d_pre = ((d_e * model.output.weight).array() * (1.0 - h.array().square())).matrix();
  const Eigen::MatrixXd d_w1 = d_pre.transpose() * x;
  const Eigen::VectorXd d_b1 = d_pre.colwise().sum().transpose();

  grad->resize(d_w1.size() + d_b1.size() + d_w2.size() + d_b2.size());
  Eigen::Index at = 0;
  grad->segment(at, d_w1.size()) = Eigen::Map<const Eigen::VectorXd>(d_w1.data(), d_w1.size());
  at += d_w1.size();
  grad->segment(at, d_b1.size()) = d_b1;
  at += d_b1.size();
  grad->segment(at, d_w2.size()) = Eigen::Map<const Eigen::VectorXd>(d_w2.data(), d_w2.size());
  at += d_w2.size();
  grad->segment(at, d_b2.size()) = d_b2;
  return loss;
}

std::pair<double, double> mean_pair_distances(const EmbeddingModel& model, const PairProblem& problem) {
  const Eigen::MatrixXd e = model.embed_rows(problem.inputs);
  double same = 0.0, diff = 0.0;
  int n_same = 0, n_diff = 0;
  for (Eigen::Index i = 0; i < problem.labels.size(); ++i) {
    const double d = (e.row(2 * i) - e.row(2 * i + 1)).norm();
    if (problem.labels(i) == 1) {
      same += d;
      ++n_same;
    } else {
      diff += d;
      ++n_diff;
    }
  }
  return {n_same ? same / n_same : 0.0, n_diff ? diff / n_diff : 0.0};
}

EmbeddingModel init_embedding(std::span<const FacePair> pairs, const EmbeddingTrainOptions& options) {
  if (!(options.margin > 0.0)) fail(ErrorCode::kInvalidSpec, "invalid spec: margin must be positive");
  const bool has_same = std::any_of(pairs.begin(), pairs.end(), [](const FacePair& p) { return p.label == 1; });
  const bool has_diff = std::any_of(pairs.begin(), pairs.end(), [](const FacePair& p) { return p.label == 0; });
  if (!has_same || !has_diff) fail(ErrorCode::kDegeneratePairs, "degenerate pairs");

  EmbeddingModel model;
  model.grid = options.grid;
  model.margin = options.margin;
  std::vector<Image> images;
  images.reserve(2 * pairs.size());
  for (const auto& p : pairs) {
    images.push_back(p.a);
    images.push_back(p.b);
  }
  model.input_norm = Standardizer::fit(pool_images(images, options.grid));

  Rng rng(options.seed);
  const auto inputs = static_cast<Eigen::Index>(options.grid) * options.grid * 3;
  auto init = [&rng](DenseLayer& layer, Eigen::Index out, Eigen::Index in) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    layer.weight.resize(out, in);
    for (Eigen::Index j = 0; j < in; ++j) {
      for (Eigen::Index i = 0; i < out; ++i) layer.weight(i, j) = scale * rng.normal();
    }
    layer.bias = Eigen::VectorXd::Zero(out);
  };
  init(model.hidden, options.hidden, inputs);
  init(model.output, options.dimension, options.hidden);
  return model;
}

EmbeddingTrainReport train_embedding(std::span<const FacePair> pairs, const EmbeddingTrainOptions& options) {
  EmbeddingTrainReport report;
  report.model = init_embedding(pairs, options);
  EmbeddingModel& model = report.model;

  const PairProblem problem = make_pair_problem(model, pairs);
  Eigen::VectorXd params = embedding_parameters(model);
  EmbeddingModel scratch = model;
  const Objective objective = [&](const Eigen::VectorXd& p, Eigen::VectorXd* g) {
    set_embedding_parameters(scratch, p);
    return pair_loss(scratch, problem, g);
  };
  DescentReport descent = gradient_descent(objective, params, options.descent);
  set_embedding_parameters(model, params);
  report.loss_history = std::move(descent.loss_history);
  std::tie(report.mean_same_distance, report.mean_diff_distance) = mean_pair_distances(model, problem);
  return report;
}

double embedding_distance(const EmbeddingModel& model, const Image& a, const Image& b) {
  return (model.embed(a) - model.embed(b)).norm();
}

Normalizer compute_normalizer(const Eigen::VectorXd& reference_embedding, const Eigen::MatrixXd& corpus_embeddings) {
  if (corpus_embeddings.rows() == 0) fail(ErrorCode::kDegenerateNormalizer, "degenerate normalizer: empty corpus");
  Normalizer g;
  for (Eigen::Index i = 0; i < corpus_embeddings.rows(); ++i) {
    g.value = std::max(g.value, (corpus_embeddings.row(i).transpose() - reference_embedding).norm());
  }
  return g;
}

Normalizer compute_normalizer(const EmbeddingModel& model, const Image& reference, std::span<const Image> corpus) {
  if (corpus.empty()) fail(ErrorCode::kDegenerateNormalizer, "degenerate normalizer: empty corpus");
  Eigen::MatrixXd embeddings(static_cast<Eigen::Index>(corpus.size()), model.dimension());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    embeddings.row(static_cast<Eigen::Index>(i)) = model.embed(corpus[i]).transpose();
  }
  return compute_normalizer(model.embed(reference), embeddings);
}

double similarity_cost(const Image& image, const Image& input_image, const EmbeddingModel& model, double normalizer) {
  if (!(normalizer > 0.0)) fail(ErrorCode::kDegenerateNormalizer, "degenerate normalizer");
  return embedding_distance(model, image, input_image) / normalizer;
}

SimilarityTerm::SimilarityTerm(const EmbeddingModel& model, const Image& input_image, double normalizer)
    : model_(model), input_embedding_(model.embed(input_image)), normalizer_(normalizer) {
  if (!(normalizer > 0.0)) fail(ErrorCode::kDegenerateNormalizer, "degenerate normalizer");
}

double SimilarityTerm::cost(const Image& image) const {
  return (model_.embed(image) - input_embedding_).norm() / normalizer_;
}

}  // namespace facegen
