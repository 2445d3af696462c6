#include "facegen/optimizer.hpp"

#include "facegen/error.hpp"
#include "facegen/io/text.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace facegen {

void OptimizerConfig::validate() const {
  auto bad = [](const char* field, const char* why) {
    fail(ErrorCode::kInvalidTask, std::string("invalid task: ") + field + " " + why);
  };
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) bad("lambda", "must be finite and >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) bad("alpha", "must lie in [0,1]");
  if (!(t0 >= 0.0) || !std::isfinite(t0)) bad("t0", "must be finite and >= 0");
  if (!(t_decrement >= 0.0)) bad("t_decrement", "must be >= 0");
  if (decrement_period <= 0) bad("decrement_period", "must be positive");
  if (termination_window <= 0) bad("termination_window", "must be positive");
  if (!(termination_threshold >= 0.0)) bad("termination_threshold", "must be >= 0");
  if (max_iterations <= 0) bad("max_iterations", "must be positive");
  if (!(beta_max > 0.0) || beta_min != -beta_max) bad("beta_range", "must be a symmetric interval [-b, b], b > 0");
}

double temperature_at(const OptimizerConfig& config, int iteration) {
  const double steps = std::floor(static_cast<double>(iteration) / static_cast<double>(config.decrement_period));
  return std::max(0.0, config.t0 - config.t_decrement * steps);
}

bool should_terminate(std::span<const double> best_costs, int window, double threshold) {
  if (window <= 0 || best_costs.size() <= static_cast<std::size_t>(window)) return false;
  const double now = best_costs.back();
  const double then = best_costs[best_costs.size() - 1 - static_cast<std::size_t>(window)];
  return std::abs(now - then) < threshold * std::abs(then);
}

double acceptance_probability(double cost_old, double cost_new, double temperature) {
  if (cost_new <= cost_old) return 1.0;
  if (temperature <= 0.0) return 0.0;
  return std::exp((cost_old - cost_new) / temperature);
}

bool metropolis_accept(double cost_old, double cost_new, double temperature, Rng& rng) {
  const double u = rng.uniform();
  return u < acceptance_probability(cost_old, cost_new, temperature);
}

std::string_view move_name(MoveType move) {
  switch (move) {
    case MoveType::kRegion: return "region";
    case MoveType::kPrior: return "prior";
    case MoveType::kBaseline: return "baseline";
  }
  return "unknown";
}

void SynthesisTask::validate() const {
  if (targets.empty()) fail(ErrorCode::kInvalidTask, "invalid task: no target impressions");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    for (std::size_t j = i + 1; j < targets.size(); ++j) {
      if (targets[i] == targets[j]) fail(ErrorCode::kInvalidTask, "invalid task: duplicate target impression");
      if (targets[j] == antonym(targets[i])) {
        fail(ErrorCode::kInvalidTask, "invalid task: antonym targets " + std::string(impression_name(targets[i])) +
                                          " and " + std::string(impression_name(targets[j])));
      }
    }
  }
  config.validate();
}

CostEvaluator::CostEvaluator(const SynthesisTask& task, const SynthesisResources& resources)
    : task_(task), resources_(resources) {
  for (ImpressionType t : task.targets) {
    if (!resources.scorer.supports(t)) fail(ErrorCode::kMissingHead, "missing head: " + std::string(impression_name(t)));
  }
  input_image_ = render_frontal(task.input, resources.render);
  const Normalizer g = compute_normalizer(resources.embedding, input_image_, resources.corpus);
  if (g.degenerate()) fail(ErrorCode::kDegenerateNormalizer, "degenerate normalizer");
  normalizer_ = g.value;
  similarity_ = std::make_unique<SimilarityTerm>(resources.embedding, input_image_, normalizer_);
}

CostBreakdown CostEvaluator::evaluate(const FaceMesh& mesh) const {
  const Image image = render_frontal(mesh, resources_.render);
  const FaceSample sample{mesh, image};
  CostBreakdown c;
  for (ImpressionType t : task_.targets) c.impression += resources_.scorer.cost(sample, t);
  c.similarity = similarity_->cost(image);
  c.total = c.impression + task_.config.lambda * c.similarity;
  return c;
}

CostBreakdown CostEvaluator::evaluate(const FaceCoefficients& coeffs) const {
  return evaluate(compose_face(coeffs, resources_.model));
}

CostBreakdown total_cost(const FaceCoefficients& coeffs, const SynthesisTask& task,
                         const SynthesisResources& resources) {
  return CostEvaluator(task, resources).evaluate(coeffs);
}

std::vector<double> region_move_distribution(const AttributeCatalog& catalog,
                                             const std::array<double, kRegionCount>& region_probs) {
  std::vector<double> probs(catalog.size(), 0.0);
  for (int r = 1; r <= kRegionCount; ++r) {
    const double p = region_probs[static_cast<std::size_t>(r - 1)];
    if (p <= 0.0) continue;
    const auto members = attributes_in_region(catalog, r);
    if (members.empty()) {
      fail(ErrorCode::kNoAttributesForRegion, "no attributes for region " + std::string(region_name(r)));
    }
    for (std::size_t a : members) probs[a] = p / static_cast<double>(members.size());
  }
  return probs;
}

std::array<double, kRegionCount> target_region_probabilities(const ImpressionKnowledge& knowledge,
                                                             std::span<const ImpressionType> targets) {
  std::array<double, kRegionCount> p{};
  for (ImpressionType t : targets) {
    const auto& w = knowledge.region_weights(t);
    for (std::size_t r = 0; r < p.size(); ++r) p[r] += w.probabilities[r] / static_cast<double>(targets.size());
  }
  return p;
}

namespace {

std::size_t draw_categorical(const std::vector<double>& probs, double u) {
  double total = 0.0;
  for (double p : probs) total += p;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last = i;
    acc += probs[i] / total;
    if (u < acc) return i;
  }
  return last;
}

FaceCoefficients apply_in_coefficients(const FaceCoefficients& coeffs, const FacialAttribute& attr, double beta,
                                       const FaceModel& model) {
  return project_face(apply_attribute(compose_face(coeffs, model), attr, beta), model);
}

}  // namespace

FaceCoefficients propose_region_move(const FaceCoefficients& coeffs, const std::array<double, kRegionCount>& region_probs,
                                     const AttributeCatalog& catalog, const FaceModel& model,
                                     const OptimizerConfig& config, Rng& rng, ProposalInfo* info) {
  const std::vector<double> probs = region_move_distribution(catalog, region_probs);
  const double u = rng.uniform();
  const double beta = rng.uniform(config.beta_min, config.beta_max);
  const std::size_t a = draw_categorical(probs, u);
  if (info) *info = ProposalInfo{a, beta, std::nullopt};
  return apply_in_coefficients(coeffs, catalog[a], beta, model);
}

FaceCoefficients propose_baseline_move(const FaceCoefficients& coeffs, const AttributeCatalog& catalog,
                                       const FaceModel& model, const OptimizerConfig& config, Rng& rng,
                                       ProposalInfo* info) {
  if (catalog.empty()) fail(ErrorCode::kNoAttributesForRegion, "no attributes for region: empty catalog");
  const std::vector<double> probs(catalog.size(), 1.0 / static_cast<double>(catalog.size()));
  const double u = rng.uniform();
  const double beta = rng.uniform(config.beta_min, config.beta_max);
  const std::size_t a = draw_categorical(probs, u);
  if (info) *info = ProposalInfo{a, beta, std::nullopt};
  return apply_in_coefficients(coeffs, catalog[a], beta, model);
}

FaceCoefficients propose_prior_move(const ImpressionPrior& prior, Rng& rng) { return sample_prior(prior, rng); }

namespace {

SynthesisResult run_chain(const SynthesisTask& task, const SynthesisResources& resources, bool baseline) {
  task.validate();
  const OptimizerConfig& config = task.config;
  const CostEvaluator evaluator(task, resources);

  std::array<double, kRegionCount> region_probs{};
  if (!baseline) {
    region_probs = target_region_probabilities(resources.knowledge, task.targets);
    if (config.alpha < 1.0) {
      for (ImpressionType t : task.targets) (void)resources.knowledge.prior(t);
    }
  }

  Rng rng(config.seed);
  SynthesisResult result;
  result.normalizer = evaluator.normalizer();
  FaceCoefficients current = project_face(task.input, resources.model);
  CostBreakdown current_cost = evaluator.evaluate(current);
  result.initial = current_cost;
  result.coeffs = current;
  result.best = current_cost;

  std::vector<double> best_history{current_cost.total};
  result.trace.reserve(static_cast<std::size_t>(config.max_iterations));
  for (int k = 0; k < config.max_iterations; ++k) {
    const double t = temperature_at(config, k);
    const double u_move = rng.uniform();
    MoveType move = MoveType::kBaseline;
    FaceCoefficients proposal;
    if (baseline) {
      proposal = propose_baseline_move(current, resources.catalog, resources.model, config, rng);
    } else if (u_move < config.alpha) {
      move = MoveType::kRegion;
      proposal = propose_region_move(current, region_probs, resources.catalog, resources.model, config, rng);
    } else {
      move = MoveType::kPrior;
      const ImpressionType target =
          task.targets.size() == 1 ? task.targets[0] : task.targets[rng.index(task.targets.size())];
      proposal = propose_prior_move(resources.knowledge.prior(target), rng);
    }

    const CostBreakdown proposed = evaluator.evaluate(proposal);
    const bool accepted = metropolis_accept(current_cost.total, proposed.total, t, rng);
    if (accepted) {
      ++result.accepted_count;
      current = std::move(proposal);
      current_cost = proposed;
      if (current_cost.total < result.best.total) {
        result.best = current_cost;
        result.coeffs = current;
      }
    }
    result.trace.push_back(TraceRow{k, move, proposed, accepted, t, result.best.total});
    best_history.push_back(result.best.total);
    if (should_terminate(best_history, config.termination_window, config.termination_threshold)) {
      result.terminated_early = true;
      break;
    }
  }
  result.mesh = compose_face(result.coeffs, resources.model);
  return result;
}

}  // namespace

SynthesisResult synthesize(const SynthesisTask& task, const SynthesisResources& resources) {
  return run_chain(task, resources, false);
}

SynthesisResult baseline_synthesize(const SynthesisTask& task, const SynthesisResources& resources) {
  return run_chain(task, resources, true);
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace) {
  out << "iteration,move,proposed_cost,accepted,temperature,best_cost\n";
  for (const auto& row : trace) {
    out << row.iteration << ',' << move_name(row.move) << ',' << io::format_double(row.proposed.total) << ','
        << (row.accepted ? 1 : 0) << ',' << io::format_double(row.temperature) << ','
        << io::format_double(row.best_cost) << '\n';
  }
}

}  // namespace facegen
