#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <numbers>

using namespace facegen;
using namespace facegen::testing;

namespace {

constexpr ImpressionType kSmart = ImpressionType::kSmart;
constexpr ImpressionType kSilly = ImpressionType::kSilly;

// Class = mean brightness above 0.5; per-pixel noise hides nothing.
LabeledImageSet brightness_set(int count, std::uint64_t seed) {
  Rng rng(seed);
  LabeledImageSet set;
  auto& labels = set.labels_for(kSmart);
  for (int i = 0; i < count; ++i) {
    const double b = i % 2 == 0 ? rng.uniform(0.55, 0.9) : rng.uniform(0.1, 0.45);
    Image img = solid_image(16, 16, b, b, b);
    for (double& p : img.pixels) p = std::clamp(p + 0.05 * rng.normal(), 0.0, 1.0);
    set.images.push_back(std::move(img));
    labels.push_back(b > 0.5 ? 1 : 0);
  }
  return set;
}

double mean_brightness(const Image& img) {
  double s = 0.0;
  for (double p : img.pixels) s += p;
  return s / static_cast<double>(img.pixels.size());
}

LabeledImageSet random_set(int count, std::uint64_t seed, std::span<const ImpressionType> types) {
  Rng rng(seed);
  LabeledImageSet set;
  for (int i = 0; i < count; ++i) set.images.push_back(random_image(8, 8, rng));
  for (ImpressionType t : types) {
    auto& labels = set.labels_for(t);
    for (int i = 0; i < count; ++i) labels.push_back(i % 2 == 0 ? 1 : 0);
    for (int i = count - 1; i > 0; --i) std::swap(labels[static_cast<std::size_t>(i)], labels[rng.index(static_cast<std::size_t>(i) + 1)]);
  }
  return set;
}

ScorerTrainOptions small_options(int steps) {
  ScorerTrainOptions o;
  o.grid = 4;
  o.feature_dim = 16;
  o.descent.max_steps = steps;
  return o;
}

}  // namespace

TEST_CASE("impression cost closed form") {
  CHECK(cost_from_logits(0.3, 0.3) == 0.5);
  CHECK(cost_from_logits(20.0, 0.0) == doctest::Approx(2.0611536e-9).epsilon(1e-6));
  Rng rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const double x1 = rng.uniform(-30, 30), x2 = rng.uniform(-30, 30);
    const double cost = cost_from_logits(x1, x2);
    CHECK(std::abs(cost - 1.0 / (1.0 + std::exp(x1 - x2))) < 1e-12);
    CHECK(cost + softmax_first(x1, x2) == 1.0);
    // Strictly inside (0, 1) wherever doubles can tell 1 - p from 0.
    if (std::abs(x1 - x2) < 30.0) {
      CHECK(cost > 0.0);
      CHECK(cost < 1.0);
    }
    const double c = rng.uniform(-500, 500);
    CHECK(std::abs(cost_from_logits(x1 + c, x2 + c) - cost) < 1e-12);
  }
  CHECK(std::isfinite(cost_from_logits(800.0, -800.0)));
  CHECK(cost_from_logits(1000.0, 1000.0) == 0.5);
}

TEST_CASE("zero steps give ln 2 on balanced data") {
  const auto data = brightness_set(40, 2);
  const auto report = train_scorer(data, kSmart, small_options(0));
  REQUIRE(report.loss_history.size() == 1);
  CHECK(report.loss_history[0] == doctest::Approx(std::numbers::ln2).epsilon(1e-12));
  // Zero heads score every image at exactly one half.
  CHECK(impression_cost(data.images[0], kSmart, report.model) == 0.5);
}

TEST_CASE("brightness classes are learned") {
  const auto data = brightness_set(80, 3);
  std::vector<double> brightness;
  for (const auto& img : data.images) brightness.push_back(mean_brightness(img));
  REQUIRE(oracle::logistic_1d_accuracy(brightness, data.labels_for(kSmart)) == 1.0);

  const auto report = train_scorer(data, kSmart, small_options(300));
  CHECK(*report.train_accuracy[0] >= 0.99);
  CHECK(evaluate_scorer(report.model, data, kSmart) >= 0.99);
  const auto test = brightness_set(60, 99);
  CHECK(evaluate_scorer(report.model, test, kSmart) >= 0.95);
  for (std::size_t k = 1; k < report.loss_history.size(); ++k) {
    CHECK(report.loss_history[k] < report.loss_history[k - 1]);
  }
}

TEST_CASE("flipping the labels swaps the head columns") {
  const auto data = brightness_set(40, 4);
  LabeledImageSet flipped = data;
  for (int& l : flipped.labels_for(kSmart)) l = 1 - l;
  const auto a = train_scorer(data, kSmart, small_options(60));
  const auto b = train_scorer(flipped, kSmart, small_options(60));
  const Eigen::MatrixXd& ha = a.model.head(kSmart);
  const Eigen::MatrixXd& hb = b.model.head(kSmart);
  CHECK((ha.col(0) - hb.col(1)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((ha.col(1) - hb.col(0)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(evaluate_scorer(a.model, data, kSmart) == evaluate_scorer(b.model, flipped, kSmart));
}

TEST_CASE("random labels stay near chance on fresh data") {
  const std::array<ImpressionType, 1> types = {kSmart};
  const auto train = random_set(100, 5, types);
  const auto report = train_scorer(train, kSmart, small_options(100));
  const auto test = random_set(500, 6, types);
  const double acc = evaluate_scorer(report.model, test, kSmart);
  CHECK(acc > 0.4);
  CHECK(acc < 0.6);
}

TEST_CASE("accuracy harness") {
  const std::vector<int> labels = {1, 0, 1, 1, 0};
  CHECK(accuracy(labels, labels) == 1.0);
  const std::vector<int> half = {1, 1, 0, 1, 0};
  CHECK(accuracy(half, labels) == doctest::Approx(0.6));
  CHECK(starts_with(error_of([] { accuracy({}, {}); }), "empty evaluation"));
  const auto data = brightness_set(10, 7);
  const auto report = train_scorer(data, kSmart, small_options(5));
  CHECK(starts_with(error_of([&] { evaluate_scorer(report.model, LabeledImageSet{}, kSmart); }), "empty evaluation"));
}

TEST_CASE("training preconditions") {
  auto data = brightness_set(10, 8);
  for (int& l : data.labels_for(kSmart)) l = 1;
  CHECK(starts_with(error_of([&] { train_scorer(data, kSmart, small_options(5)); }), "degenerate labels"));
  data.labels_for(kSmart)[0] = 0;  // one negative is still too few
  CHECK(starts_with(error_of([&] { train_scorer(data, kSmart, small_options(5)); }), "degenerate labels"));
  data.labels_for(kSmart)[1] = 0;
  CHECK_NOTHROW(train_scorer(data, kSmart, small_options(5)));
  CHECK(starts_with(error_of([&] { train_scorer(data, kSilly, small_options(5)); }), "degenerate labels"));
}

TEST_CASE("untrained types have no head") {
  const auto data = brightness_set(10, 9);
  const auto report = train_scorer(data, kSmart, small_options(5));
  CHECK(report.model.has_head(kSmart));
  CHECK_FALSE(report.model.has_head(kSilly));
  CHECK(starts_with(error_of([&] { impression_cost(data.images[0], kSilly, report.model); }), "missing head"));
  const LearnedImpressionScorer scorer(report.model);
  CHECK(scorer.supports(kSmart));
  CHECK_FALSE(scorer.supports(kSilly));
}

TEST_CASE("training loss gradient matches finite differences") {
  const std::array<ImpressionType, 2> types = {kSmart, ImpressionType::kFriendly};
  Rng rng(10);
  for (int instance = 0; instance < 20; ++instance) {
    const auto data = random_set(12, 100 + static_cast<std::uint64_t>(instance), types);
    ScorerTrainOptions o;
    o.grid = 2;
    o.feature_dim = 5;
    o.seed = static_cast<std::uint64_t>(instance);
    o.descent.max_steps = 0;
    ScorerModel model = train_scorer(data, types, o).model;
    for (ImpressionType t : types) {
      auto& h = model.heads[static_cast<std::size_t>(index_of(t))];
      for (Eigen::Index k = 0; k < h.size(); ++k) h.data()[k] = rng.normal();
    }
    const ScorerProblem problem = make_scorer_problem(model, data, types);
    const double decay = instance % 2 == 0 ? 0.0 : 0.01;
    const Eigen::VectorXd params = scorer_parameters(model, types);
    Eigen::VectorXd analytic;
    scorer_loss(model, problem, decay, &analytic);
    ScorerModel scratch = model;
    const auto f = [&](const Eigen::VectorXd& p) {
      set_scorer_parameters(scratch, types, p);
      return scorer_loss(scratch, problem, decay, nullptr);
    };
    const Eigen::VectorXd numeric = oracle::central_gradient(f, params, 1e-5);
    CHECK(oracle::relative_error(analytic, numeric) < 1e-4);
    // Head block on its own.
    const Eigen::Index heads = 2 * 5 * 2;
    CHECK(oracle::relative_error(analytic.tail(heads), numeric.tail(heads)) < 1e-4);
  }
}

TEST_CASE("training is deterministic under a seed") {
  const auto data = brightness_set(30, 11);
  const auto a = train_scorer(data, kSmart, small_options(20));
  const auto b = train_scorer(data, kSmart, small_options(20));
  CHECK(a.model.hidden.weight == b.model.hidden.weight);
  CHECK(a.model.head(kSmart) == b.model.head(kSmart));
  CHECK(a.loss_history == b.loss_history);
  ScorerTrainOptions other = small_options(20);
  other.seed = 2;
  CHECK(train_scorer(data, kSmart, other).model.hidden.weight != a.model.hidden.weight);
}

TEST_CASE("shared extractor with several heads") {
  const std::array<ImpressionType, 2> types = {kSmart, kSilly};
  auto data = brightness_set(40, 12);
  data.labels_for(kSilly) = data.labels_for(kSmart);
  for (int& l : data.labels_for(kSilly)) l = 1 - l;
  const auto report = train_scorer(data, types, small_options(200));
  CHECK(*report.train_accuracy[0] >= 0.99);
  CHECK(*report.train_accuracy[1] >= 0.99);
  CHECK_FALSE(report.train_accuracy[2].has_value());
  for (const auto& img : data.images) {
    const double a = impression_cost(img, kSmart, report.model);
    const double b = impression_cost(img, kSilly, report.model);
    CHECK((a < 0.5) == (b > 0.5));
  }
}

TEST_CASE("pooling and standardization") {
  const Image img = solid_image(8, 8, 0.2, 0.4, 0.6);
  const Eigen::VectorXd pooled = pool_image(img, 4);
  REQUIRE(pooled.size() == 48);
  for (int cell = 0; cell < 16; ++cell) {
    CHECK(pooled(3 * cell) == doctest::Approx(0.2));
    CHECK(pooled(3 * cell + 2) == doctest::Approx(0.6));
  }
  Image split(4, 2);
  for (int x = 0; x < 4; ++x) split.at(x, 1, 0) = 1.0;
  const Eigen::VectorXd rows = pool_image(split, 2);
  CHECK(rows(0) == 0.0);       // top-left cell, red
  CHECK(rows(6) == 1.0);       // bottom-left cell, red
  CHECK(starts_with(error_of([&] { pool_image(split, 3); }), "dimension mismatch"));

  Eigen::MatrixXd x(3, 2);
  x << 1, 5, 2, 5, 3, 5;
  const Standardizer s = Standardizer::fit(x);
  const Eigen::MatrixXd z = s.apply(x);
  CHECK(z.col(0).mean() == doctest::Approx(0.0));
  CHECK(z.col(0).squaredNorm() / 3.0 == doctest::Approx(1.0));
  CHECK(z.col(1).cwiseAbs().maxCoeff() == 0.0);
}
