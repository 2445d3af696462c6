#pragma once

#include "facegen/attributes.hpp"
#include "facegen/face_model.hpp"
#include "facegen/impression.hpp"
#include "facegen/priors.hpp"
#include "facegen/render.hpp"
#include "facegen/rng.hpp"
#include "facegen/scorer.hpp"
#include "facegen/similarity.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace facegen {

struct OptimizerConfig {
  double lambda = 0.5;
  double alpha = 0.8;  // Region-Move probability; Prior-Move gets 1 - alpha
  double t0 = 1.0;
  double t_decrement = 0.05;
  int decrement_period = 10;
  int termination_window = 20;
  double termination_threshold = 0.05;
  int max_iterations = 300;
  double beta_min = -1.0;
  double beta_max = 1.0;
  std::uint64_t seed = 0;

  // Throws "invalid task: <field> ..." naming the offending field.
  void validate() const;
};

// t(k) = max(0, t0 - t_decrement * floor(k / decrement_period)).
double temperature_at(const OptimizerConfig& config, int iteration);

// best_costs[0] is the initial cost, best_costs[k] the best after k
// iterations. Fires when the last `window` iterations changed the best cost
// by less than `threshold` relative to its value `window` iterations ago.
bool should_terminate(std::span<const double> best_costs, int window, double threshold);

// min{1, exp((cost_old - cost_new) / t)}; at t = 0, 1 if cost_new <= cost_old else 0.
double acceptance_probability(double cost_old, double cost_new, double temperature);

// Draws exactly one uniform per call.
bool metropolis_accept(double cost_old, double cost_new, double temperature, Rng& rng);

enum class MoveType { kRegion, kPrior, kBaseline };
std::string_view move_name(MoveType move);

struct CostBreakdown {
  double total = 0.0;
  double impression = 0.0;
  double similarity = 0.0;
};

// Non-owning view of everything a chain reads. Shared read-only across chains.
struct SynthesisResources {
  const FaceModel& model;
  const AttributeCatalog& catalog;
  const ImpressionScorer& scorer;
  const EmbeddingModel& embedding;
  std::span<const Image> corpus;  // images the similarity normalizer G is taken over
  const ImpressionKnowledge& knowledge;
  RenderSettings render;
};

struct SynthesisTask {
  FaceMesh input;
  std::vector<ImpressionType> targets;
  OptimizerConfig config;

  // Nonempty targets, no duplicates, no antonym pairs, valid config.
  void validate() const;
};

// Evaluates C(theta) = sum_P C_p(I_theta, P) + lambda * C_s(I_theta, I_input).
// Renders the input once and fixes the normalizer G at construction.
class CostEvaluator {
 public:
  CostEvaluator(const SynthesisTask& task, const SynthesisResources& resources);

  CostBreakdown evaluate(const FaceCoefficients& coeffs) const;
  CostBreakdown evaluate(const FaceMesh& mesh) const;

  const Image& input_image() const { return input_image_; }
  double normalizer() const { return normalizer_; }

 private:
  const SynthesisTask& task_;
  const SynthesisResources& resources_;
  Image input_image_;
  double normalizer_ = 0.0;
  std::unique_ptr<SimilarityTerm> similarity_;
};

CostBreakdown total_cost(const FaceCoefficients& coeffs, const SynthesisTask& task,
                         const SynthesisResources& resources);

struct ProposalInfo {
  std::size_t attribute = 0;
  double beta = 0.0;
  std::optional<ImpressionType> prior_type;
};

// Per-attribute selection probabilities equivalent to drawing a region from
// `region_probs` and then an attribute uniformly within it.
std::vector<double> region_move_distribution(const AttributeCatalog& catalog,
                                             const std::array<double, kRegionCount>& region_probs);

// Averaged region probabilities of the targets' learned weights.
std::array<double, kRegionCount> target_region_probabilities(const ImpressionKnowledge& knowledge,
                                                             std::span<const ImpressionType> targets);

// theta' = project(apply(compose(theta), a, beta)); draws two uniforms.
FaceCoefficients propose_region_move(const FaceCoefficients& coeffs, const std::array<double, kRegionCount>& region_probs,
                                     const AttributeCatalog& catalog, const FaceModel& model,
                                     const OptimizerConfig& config, Rng& rng, ProposalInfo* info = nullptr);

// Same as the region move with a uniform choice over the whole catalog.
FaceCoefficients propose_baseline_move(const FaceCoefficients& coeffs, const AttributeCatalog& catalog,
                                       const FaceModel& model, const OptimizerConfig& config, Rng& rng,
                                       ProposalInfo* info = nullptr);

// Resamples every coefficient from the prior.
FaceCoefficients propose_prior_move(const ImpressionPrior& prior, Rng& rng);

struct TraceRow {
  int iteration = 0;
  MoveType move = MoveType::kRegion;
  CostBreakdown proposed;
  bool accepted = false;
  double temperature = 0.0;
  double best_cost = 0.0;
};

struct SynthesisResult {
  FaceMesh mesh;
  FaceCoefficients coeffs;  // best-so-far
  CostBreakdown best;
  CostBreakdown initial;
  std::vector<TraceRow> trace;
  int accepted_count = 0;
  bool terminated_early = false;
  double normalizer = 0.0;
};

// Data-driven sampler: Region-Move with probability alpha, Prior-Move otherwise.
SynthesisResult synthesize(const SynthesisTask& task, const SynthesisResources& resources);

// Baseline sampler: uniform attribute, beta ~ U(beta range), same schedule.
SynthesisResult baseline_synthesize(const SynthesisTask& task, const SynthesisResources& resources);

// Header: iteration,move,proposed_cost,accepted,temperature,best_cost
void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace);

}  // namespace facegen
