#include "planted.hpp"

#include <cmath>

namespace facegen::testing {

PlantedOracleScorer::PlantedOracleScorer(const FacialAttribute& direction, const FaceModel& model, ImpressionType type,
                                         double kappa, double s_star)
    : type_(type), kappa_(kappa), s_star_(s_star) {
  const Eigen::Index len = direction.delta_geometry.size();
  direction_.resize(2 * len);
  direction_ << direction.delta_geometry, direction.delta_texture;
  mean_.resize(2 * len);
  mean_ << model.mean_geometry(), model.mean_texture();
  inv_norm2_ = 1.0 / direction_.squaredNorm();
}

double PlantedOracleScorer::strength(const FaceMesh& mesh) const {
  const Eigen::Index len = mesh.geometry().size();
  return ((mesh.geometry() - mean_.head(len)).dot(direction_.head(len)) +
          (mesh.texture() - mean_.tail(len)).dot(direction_.tail(len))) *
         inv_norm2_;
}

double PlantedOracleScorer::cost_of(const FaceMesh& mesh) const {
  return 1.0 / (1.0 + std::exp(kappa_ * (strength(mesh) - s_star_)));
}

double PlantedOracleScorer::cost(const FaceSample& face, ImpressionType type) const {
  if (type != type_) fail(ErrorCode::kMissingHead, "missing head: oracle scores one type");
  return cost_of(face.mesh);
}

PlantedWorld build_world(const WorldOptions& options) {
  PlantedWorld w;
  w.family = generate_family(options.family);
  w.model = fit_region_pca(w.family.identities, w.family.regions, options.components);
  w.catalog = learn_family_attributes(w.family, w.model);
  w.knowledge = fit_family_knowledge(w.family, w.model, w.catalog, ArtistEditOptions{});
  RenderSettings render;
  render.framing = w.family.framing;
  w.corpus = render_corpus(w.family.identities, render);
  PairOptions po;
  po.render = render;
  if (options.train_embedding) {
    w.embedding = train_embedding(make_similarity_pairs(w.family, po), EmbeddingTrainOptions{}).model;
  } else {
    po.pairs = 20;
    w.embedding = init_embedding(make_similarity_pairs(w.family, po), EmbeddingTrainOptions{});
  }
  if (options.train_scorer) {
    AnnotationOptions ao;
    ao.render = render;
    w.scorer = std::make_unique<ScorerModel>(
        train_scorer(annotate_impressions(w.family, ao), kAllImpressions, ScorerTrainOptions{}).model);
  }
  return w;
}

PlantedTask planted_task(const SyntheticFamily& family, ImpressionType type) {
  PlantedTask task;
  task.type = type;
  task.attribute = family.spec.rules[static_cast<std::size_t>(index_of(type))].front().attribute;
  Eigen::Index lowest = 0;
  family.strengths.col(static_cast<Eigen::Index>(task.attribute)).minCoeff(&lowest);
  task.identity = static_cast<std::size_t>(lowest);
  return task;
}

PlantedOracleScorer make_oracle(const PlantedWorld& world, const PlantedTask& task) {
  return PlantedOracleScorer(world.family.catalog[task.attribute], world.model, task.type, kOracleKappa,
                             kOracleCenter);
}

}  // namespace facegen::testing
