#include "facegen/facegen.hpp"

#include <benchmark/benchmark.h>

#include <memory>

using namespace facegen;

namespace {

// A smaller family than the default keeps setup short; per-call costs depend
// on the mesh and image sizes, which match the defaults.
struct Setup {
  SyntheticFamily family;
  FaceModel model;
  AttributeCatalog catalog;
  ScorerModel scorer;
  EmbeddingModel embedding;
  std::vector<Image> corpus;
  ImpressionKnowledge knowledge;
  RenderSettings render;

  Setup() {
    FamilySpec spec;
    spec.identities = 40;
    family = generate_family(spec);
    model = fit_region_pca(family.identities, family.regions, 10);
    catalog = learn_family_attributes(family, model);
    render.framing = family.framing;
    AnnotationOptions ao;
    ao.render = render;
    ScorerTrainOptions so;
    so.descent.max_steps = 20;
    scorer = train_scorer(annotate_impressions(family, ao), kAllImpressions, so).model;
    PairOptions po;
    po.pairs = 40;
    po.render = render;
    EmbeddingTrainOptions eo;
    eo.descent.max_steps = 20;
    embedding = train_embedding(make_similarity_pairs(family, po), eo).model;
    corpus = render_corpus(family.identities, render);
  }
};

const Setup& setup() {
  static const Setup s;
  return s;
}

void BM_RenderFrontal(benchmark::State& state) {
  const Setup& s = setup();
  RenderSettings r = s.render;
  r.width = r.height = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(render_frontal(s.family.identities[0], r));
}
BENCHMARK(BM_RenderFrontal)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_ComposeFace(benchmark::State& state) {
  const Setup& s = setup();
  const FaceCoefficients theta = project_face(s.family.identities[1], s.model);
  for (auto _ : state) benchmark::DoNotOptimize(compose_face(theta, s.model));
}
BENCHMARK(BM_ComposeFace)->Unit(benchmark::kMicrosecond);

void BM_ProjectFace(benchmark::State& state) {
  const Setup& s = setup();
  for (auto _ : state) benchmark::DoNotOptimize(project_face(s.family.identities[1], s.model));
}
BENCHMARK(BM_ProjectFace)->Unit(benchmark::kMicrosecond);

void BM_CostEvaluation(benchmark::State& state) {
  const Setup& s = setup();
  const LearnedImpressionScorer scorer(s.scorer);
  const SynthesisResources res{s.model, s.catalog, scorer, s.embedding, s.corpus, s.knowledge, s.render};
  SynthesisTask task;
  task.input = s.family.identities[2];
  task.targets = {ImpressionType::kFriendly};
  const CostEvaluator evaluator(task, res);
  const FaceCoefficients theta = project_face(s.family.identities[3], s.model);
  for (auto _ : state) benchmark::DoNotOptimize(evaluator.evaluate(theta));
}
BENCHMARK(BM_CostEvaluation)->Unit(benchmark::kMicrosecond);

void BM_ScorerLossGradient(benchmark::State& state) {
  const Setup& s = setup();
  AnnotationOptions ao;
  ao.render = s.render;
  const LabeledImageSet data = annotate_impressions(s.family, ao);
  const ScorerProblem problem = make_scorer_problem(s.scorer, data, kAllImpressions);
  Eigen::VectorXd grad;
  for (auto _ : state) benchmark::DoNotOptimize(scorer_loss(s.scorer, problem, 0.0, &grad));
}
BENCHMARK(BM_ScorerLossGradient)->Unit(benchmark::kMillisecond);

void BM_PairLossGradient(benchmark::State& state) {
  const Setup& s = setup();
  PairOptions po;
  po.pairs = 40;
  po.render = s.render;
  const auto pairs = make_similarity_pairs(s.family, po);
  const PairProblem problem = make_pair_problem(s.embedding, pairs);
  Eigen::VectorXd grad;
  for (auto _ : state) benchmark::DoNotOptimize(pair_loss(s.embedding, problem, &grad));
}
BENCHMARK(BM_PairLossGradient)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
