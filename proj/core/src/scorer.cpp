#include "facegen/scorer.hpp"

#include "facegen/error.hpp"
#include "facegen/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace facegen {

LabeledImageSet LabeledImageSet::subset(std::span<const std::size_t> indices) const {
  LabeledImageSet out;
  for (std::size_t i : indices) out.images.push_back(images[i]);
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (labels[t].empty()) continue;
    for (std::size_t i : indices) out.labels[t].push_back(labels[t][i]);
  }
  return out;
}

const Eigen::MatrixXd& ScorerModel::head(ImpressionType t) const {
  if (!has_head(t)) fail(ErrorCode::kMissingHead, "missing head: " + std::string(impression_name(t)));
  return heads[static_cast<std::size_t>(index_of(t))];
}

Eigen::VectorXd ScorerModel::features(const Image& image) const {
  const Eigen::VectorXd x = input_norm.apply(pool_image(image, grid));
  return (hidden.weight * x + hidden.bias).array().tanh().matrix();
}

Eigen::Vector2d ScorerModel::logits(const Eigen::VectorXd& g, ImpressionType t) const {
  return head(t).transpose() * g;
}

double softmax_first(double x1, double x2) {
  const double m = std::max(x1, x2);
  const double e1 = std::exp(x1 - m);
  const double e2 = std::exp(x2 - m);
  return e1 / (e1 + e2);
}

double cost_from_logits(double x1, double x2) { return 1.0 - softmax_first(x1, x2); }

double impression_cost(const Image& image, ImpressionType type, const ScorerModel& model) {
  const Eigen::Vector2d z = model.logits(image, type);
  return cost_from_logits(z(0), z(1));
}

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.empty() || labels.empty()) fail(ErrorCode::kEmptyEvaluation, "empty evaluation");
  if (predictions.size() != labels.size()) fail(ErrorCode::kDimensionMismatch, "dimension mismatch: predictions vs labels");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double evaluate_scorer(const ScorerModel& model, const LabeledImageSet& test, ImpressionType type) {
  if (test.images.empty()) fail(ErrorCode::kEmptyEvaluation, "empty evaluation");
  if (!test.has_labels(type)) fail(ErrorCode::kEmptyEvaluation, "empty evaluation: type not annotated");
  std::vector<int> predictions;
  predictions.reserve(test.images.size());
  for (const auto& image : test.images) {
    const Eigen::Vector2d z = model.logits(image, type);
    predictions.push_back(z(0) > z(1) ? 1 : 0);
  }
  return accuracy(predictions, test.labels_for(type));
}

ScorerProblem make_scorer_problem(const ScorerModel& model, const LabeledImageSet& data,
                                  std::span<const ImpressionType> types) {
  ScorerProblem problem;
  problem.inputs = model.input_norm.apply(pool_images(data.images, model.grid));
  for (ImpressionType t : types) {
    const auto& labels = data.labels_for(t);
    if (labels.size() != data.images.size()) {
      fail(ErrorCode::kDegenerateLabels, "degenerate labels: " + std::string(impression_name(t)) + " not annotated");
    }
    const auto positives = std::count(labels.begin(), labels.end(), 1);
    const auto negatives = static_cast<std::ptrdiff_t>(labels.size()) - positives;
    if (positives < 2 || negatives < 2) {
      fail(ErrorCode::kDegenerateLabels, "degenerate labels: " + std::string(impression_name(t)));
    }
    Eigen::VectorXd target(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) target(static_cast<Eigen::Index>(i)) = labels[i] == 1 ? 1.0 : 0.0;
    problem.types.push_back(t);
    problem.targets.push_back(std::move(target));
  }
  return problem;
}

Eigen::VectorXd scorer_parameters(const ScorerModel& model, std::span<const ImpressionType> types) {
  const auto& w = model.hidden.weight;
  Eigen::Index total = w.size() + model.hidden.bias.size();
  for (ImpressionType t : types) total += model.head(t).size();
  Eigen::VectorXd flat(total);
  Eigen::Index at = 0;
  flat.segment(at, w.size()) = Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
  at += w.size();
  flat.segment(at, model.hidden.bias.size()) = model.hidden.bias;
  at += model.hidden.bias.size();
  for (ImpressionType t : types) {
    const auto& h = model.head(t);
    flat.segment(at, h.size()) = Eigen::Map<const Eigen::VectorXd>(h.data(), h.size());
    at += h.size();
  }
  return flat;
}

void set_scorer_parameters(ScorerModel& model, std::span<const ImpressionType> types, const Eigen::VectorXd& flat) {
  auto& w = model.hidden.weight;
  Eigen::Index at = 0;
  Eigen::Map<Eigen::VectorXd>(w.data(), w.size()) = flat.segment(at, w.size());
  at += w.size();
  model.hidden.bias = flat.segment(at, model.hidden.bias.size());
  at += model.hidden.bias.size();
  for (ImpressionType t : types) {
    auto& h = model.heads[static_cast<std::size_t>(index_of(t))];
    Eigen::Map<Eigen::VectorXd>(h.data(), h.size()) = flat.segment(at, h.size());
    at += h.size();
  }
  if (at != flat.size()) fail(ErrorCode::kDimensionMismatch, "dimension mismatch: scorer parameters");
}

double scorer_loss(const ScorerModel& model, const ScorerProblem& problem, double weight_decay,
                   Eigen::VectorXd* grad) {
  const Eigen::MatrixXd& x = problem.inputs;
  const auto n = static_cast<double>(x.rows());
  const auto type_count = static_cast<double>(problem.types.size());
  const Eigen::MatrixXd pre = (x * model.hidden.weight.transpose()).rowwise() + model.hidden.bias.transpose();
  const Eigen::MatrixXd g = pre.array().tanh().matrix();

  double loss = 0.0;
  Eigen::MatrixXd d_g;
  std::vector<Eigen::MatrixXd> d_heads;
  if (grad) d_g = Eigen::MatrixXd::Zero(g.rows(), g.cols());
  for (std::size_t k = 0; k < problem.types.size(); ++k) {
    const Eigen::MatrixXd& w = model.head(problem.types[k]);
    const Eigen::MatrixXd z = g * w;  // N x 2
    const Eigen::VectorXd& y = problem.targets[k];
    Eigen::MatrixXd d_z(z.rows(), 2);
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const double m = std::max(z(i, 0), z(i, 1));
      const double lse = m + std::log(std::exp(z(i, 0) - m) + std::exp(z(i, 1) - m));
      const double p1 = std::exp(z(i, 0) - lse);
      loss -= (y(i) * (z(i, 0) - lse) + (1.0 - y(i)) * (z(i, 1) - lse)) / (n * type_count);
      d_z(i, 0) = (p1 - y(i)) / (n * type_count);
      d_z(i, 1) = -d_z(i, 0);
    }
    loss += 0.5 * weight_decay * w.squaredNorm();
    if (grad) {
      d_heads.push_back(g.transpose() * d_z + weight_decay * w);
      d_g.noalias() += d_z * w.transpose();
    }
  }
  loss += 0.5 * weight_decay * model.hidden.weight.squaredNorm();
  if (!grad) return loss;

  const Eigen::MatrixXd d_pre = (d_g.array() * (1.0 - g.array().square())).matrix();
  const Eigen::MatrixXd d_w = d_pre.transpose() * x + weight_decay * model.hidden.weight;
  const Eigen::VectorXd d_b = d_pre.colwise().sum().transpose();

  Eigen::Index total = d_w.size() + d_b.size();
  for (const auto& d : d_heads) total += d.size();
  grad->resize(total);
  Eigen::Index at = 0;
  grad->segment(at, d_w.size()) = Eigen::Map<const Eigen::VectorXd>(d_w.data(), d_w.size());
  at += d_w.size();
  grad->segment(at, d_b.size()) = d_b;
  at += d_b.size();
  for (const auto& d : d_heads) {
    grad->segment(at, d.size()) = Eigen::Map<const Eigen::VectorXd>(d.data(), d.size());
    at += d.size();
  }
  return loss;
}

ScorerTrainReport train_scorer(const LabeledImageSet& data, std::span<const ImpressionType> types,
                               const ScorerTrainOptions& options) {
  if (types.empty()) fail(ErrorCode::kDegenerateLabels, "degenerate labels: no impression types");
  if (data.images.empty()) fail(ErrorCode::kDegenerateLabels, "degenerate labels: empty data");

  ScorerTrainReport report;
  ScorerModel& model = report.model;
  model.grid = options.grid;
  const Eigen::MatrixXd pooled = pool_images(data.images, options.grid);
  model.input_norm = Standardizer::fit(pooled);

  Rng rng(options.seed);
  const auto inputs = pooled.cols();
  const double scale = 1.0 / std::sqrt(static_cast<double>(inputs));
  model.hidden.weight.resize(options.feature_dim, inputs);
  for (Eigen::Index j = 0; j < inputs; ++j) {
    for (Eigen::Index i = 0; i < options.feature_dim; ++i) model.hidden.weight(i, j) = scale * rng.normal();
  }
  model.hidden.bias = Eigen::VectorXd::Zero(options.feature_dim);
  for (ImpressionType t : types) {
    model.heads[static_cast<std::size_t>(index_of(t))] = Eigen::MatrixXd::Zero(options.feature_dim, 2);
  }

  const ScorerProblem problem = make_scorer_problem(model, data, types);
  Eigen::VectorXd params = scorer_parameters(model, types);
  ScorerModel scratch = model;
  const Objective objective = [&](const Eigen::VectorXd& p, Eigen::VectorXd* g) {
    set_scorer_parameters(scratch, types, p);
    return scorer_loss(scratch, problem, options.weight_decay, g);
  };
  DescentReport descent = gradient_descent(objective, params, options.descent);
  set_scorer_parameters(model, types, params);
  report.loss_history = std::move(descent.loss_history);
  for (ImpressionType t : types) {
    report.train_accuracy[static_cast<std::size_t>(index_of(t))] = evaluate_scorer(model, data, t);
  }
  return report;
}

}  // namespace facegen
