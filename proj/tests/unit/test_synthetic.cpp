#include "doctest.h"
#include "fixtures.hpp"

#include "facegen/io/serialize.hpp"

#include <limits>
#include <set>

using namespace facegen;
using namespace facegen::testing;

namespace {

std::set<int> rule_regions(const SyntheticFamily& family, ImpressionType t) {
  std::set<int> regions;
  for (const auto& term : family.spec.rules[static_cast<std::size_t>(index_of(t))]) {
    regions.insert(family.catalog[term.attribute].region_id);
  }
  return regions;
}

}  // namespace

TEST_CASE("family generation is deterministic") {
  FamilySpec spec;
  spec.identities = 12;
  spec.seed = 5;
  const SyntheticFamily a = generate_family(spec), b = generate_family(spec);
  CHECK(io::encode_family(a) == io::encode_family(b));
  CHECK(io::encode_meshes(a.identities) == io::encode_meshes(b.identities));
  spec.seed = 6;
  CHECK(io::encode_meshes(generate_family(spec).identities) != io::encode_meshes(a.identities));
}

TEST_CASE("default family shape") {
  const SyntheticFamily f = generate_family(FamilySpec{});
  CHECK(f.spec.vertex_count() == 512);
  CHECK(f.identities.size() == 200u);
  CHECK(f.catalog.size() == static_cast<std::size_t>(kFamilyAttributeCount));
  CHECK(f.strengths.rows() == 200);
  CHECK(f.strengths.cols() == kFamilyAttributeCount);
  CHECK(f.strengths.cwiseAbs().minCoeff() >= 0.8);
  CHECK(f.strengths.cwiseAbs().maxCoeff() <= 1.5);
  for (int r = 1; r <= kRegionCount; ++r) {
    CHECK(f.regions[r].size() > 0);
    for (int kind = 0; kind < 2; ++kind) CHECK(f.catalog[planted_attribute(r, kind)].region_id == r);
  }
  int covered = 0;
  for (int v = 0; v < f.spec.vertex_count(); ++v) {
    int owners = 0;
    for (int r = 1; r <= kRegionCount; ++r) owners += f.regions[r].contains(v) ? 1 : 0;
    CHECK(owners == 1);
    covered += owners;
  }
  CHECK(covered == 512);
  for (const auto& mesh : f.identities) {
    CHECK(same_topology(mesh.topology(), f.topology));
    CHECK(mesh.geometry().allFinite());
    CHECK(mesh.texture().minCoeff() >= 0.0);
    CHECK(mesh.texture().maxCoeff() <= 1.0);
  }
  for (ImpressionType t : kAllImpressions) {
    CHECK_FALSE(f.spec.rules[static_cast<std::size_t>(index_of(t))].empty());
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(planted_score(f, i, t) == doctest::Approx(-planted_score(f, i, antonym(t))).epsilon(1e-15));
    }
  }
}

TEST_CASE("identities are pairwise distinct") {
  const SyntheticFamily f = small_family(50, 7);
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.identities.size(); ++i) {
    for (std::size_t j = i + 1; j < f.identities.size(); ++j) {
      closest = std::min(closest, rms(f.identities[i].geometry(), f.identities[j].geometry()));
    }
  }
  CHECK(closest > 0.0);
}

TEST_CASE("a single identity cannot support PCA") {
  FamilySpec spec;
  spec.identities = 1;
  const SyntheticFamily f = generate_family(spec);
  CHECK(starts_with(error_of([&] { fit_region_pca(f.identities, f.regions, 1); }), "insufficient data"));
}

TEST_CASE("spec validation") {
  FamilySpec spec;
  spec.rows = 4;
  CHECK(starts_with(error_of([&] { generate_family(spec); }), "invalid spec: rows"));
  spec = FamilySpec{};
  spec.identities = 0;
  CHECK(starts_with(error_of([&] { generate_family(spec); }), "invalid spec: identities"));
  spec = FamilySpec{};
  spec.rules[3].clear();
  CHECK(starts_with(error_of([&] { generate_family(spec); }), "invalid spec: rules"));
  spec = FamilySpec{};
  spec.rules[0].push_back({99, 1.0});
  CHECK(starts_with(error_of([&] { generate_family(spec); }), "invalid spec: rules"));
}

TEST_CASE("planted labels") {
  const SyntheticFamily f = generate_family(FamilySpec{});
  const auto all = planted_labels(f, -std::numeric_limits<double>::infinity());
  for (const auto& labels : all) {
    for (int l : labels) CHECK(l == 1);
  }
  const auto balanced = planted_labels(f, std::nullopt);
  for (ImpressionType t : kAllImpressions) {
    const auto& labels = balanced[static_cast<std::size_t>(index_of(t))];
    double positive = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      positive += labels[i];
      double score = 0.0;
      for (const auto& term : f.spec.rules[static_cast<std::size_t>(index_of(t))]) {
        score += term.weight * f.strengths(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(term.attribute));
      }
      CHECK(planted_score(f, i, t) == doctest::Approx(score).epsilon(1e-15));
    }
    const double share = positive / static_cast<double>(labels.size());
    CHECK(share >= 0.45);
    CHECK(share <= 0.55);
  }
  CHECK(planted_labels(f, std::nullopt) == balanced);
}

TEST_CASE("annotation renders every identity with the family framing") {
  const SyntheticFamily f = small_family(8, 9);
  AnnotationOptions options;
  options.render.width = options.render.height = 24;
  const LabeledImageSet set = annotate_impressions(f, options);
  REQUIRE(set.images.size() == 8u);
  for (ImpressionType t : kAllImpressions) CHECK(set.labels_for(t).size() == 8u);
  RenderSettings framed = options.render;
  framed.framing = f.framing;
  CHECK(set.images[3].pixels == render_frontal(f.identities[3], framed).pixels);
  CHECK(annotate_impressions(f, options).images[5].pixels == set.images[5].pixels);
}

TEST_CASE("artist edits") {
  const SyntheticFamily f = small_family(30, 11);
  const FaceModel model = fit_region_pca(f.identities, f.regions, 6);
  const AttributeCatalog catalog = learn_family_attributes(f, model);

  ArtistEditOptions clean;
  clean.noise = 0.0;
  for (ImpressionType t : kAllImpressions) {
    const auto edits = simulate_artist_edits(f, model, catalog, t, clean);
    CHECK(edits.size() == 50u);
    const RegionWeights w = learn_region_weights(edits, t);
    const std::set<int> planted = rule_regions(f, t);
    for (int r = 1; r <= kRegionCount; ++r) {
      const auto k = static_cast<std::size_t>(r - 1);
      if (planted.count(r)) {
        CHECK(w.probabilities[k] > 0.0);
      } else {
        CHECK(w.geometry_sums[k] == 0.0);
        CHECK(w.texture_sums[k] == 0.0);
        CHECK(w.probabilities[k] == 0.0);
      }
    }
  }

  ArtistEditOptions idle = clean;
  idle.strength = 0.0;
  const RegionWeights uniform =
      learn_region_weights(simulate_artist_edits(f, model, catalog, ImpressionType::kSmart, idle), ImpressionType::kSmart);
  for (double p : uniform.probabilities) CHECK(p == 1.0 / 8.0);

  const ArtistEditOptions noisy;
  const auto a = simulate_artist_edits(f, model, catalog, ImpressionType::kHostile, noisy);
  const auto b = simulate_artist_edits(f, model, catalog, ImpressionType::kHostile, noisy);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].edited.max_abs_diff(b[i].edited) == 0.0);
  // Noise spreads some mass, but the planted regions keep most of it.
  const RegionWeights w = learn_region_weights(a, ImpressionType::kHostile);
  double planted_mass = 0.0;
  for (int r : rule_regions(f, ImpressionType::kHostile)) planted_mass += w.probability(r);
  CHECK(planted_mass > 0.5);

  CHECK(starts_with(error_of([&] {
                      simulate_artist_edits(f, model, AttributeCatalog{catalog[0]}, ImpressionType::kSmart, noisy);
                    }),
                    "invalid spec"));
}

TEST_CASE("learned family attributes track the planted directions") {
  const SyntheticFamily f = generate_family(FamilySpec{});
  const FaceModel model = fit_region_pca(f.identities, f.regions, 10);
  const AttributeCatalog learned = learn_family_attributes(f, model);
  REQUIRE(learned.size() == f.catalog.size());
  auto cosine = [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) { return x.dot(y) / (x.norm() * y.norm()); };
  // Compared in the channel each planted attribute lives in (geometry for
  // the first of a region, texture for the second).
  for (int r = 1; r <= kRegionCount; ++r) {
    const std::size_t g = planted_attribute(r, 0), t = planted_attribute(r, 1);
    for (std::size_t a : {g, t}) {
      CHECK(learned[a].name == f.catalog[a].name);
      CHECK(learned[a].region_id == r);
    }
    const double own_g = cosine(learned[g].delta_geometry, f.catalog[g].delta_geometry);
    const double own_t = cosine(learned[t].delta_texture, f.catalog[t].delta_texture);
    CHECK(own_g > 0.5);
    CHECK(own_t > 0.5);
  }
  CHECK(starts_with(error_of([&] { learn_family_attributes(f, model, 0); }), "insufficient data"));
  CHECK(starts_with(error_of([&] { learn_family_attributes(f, model, 201); }), "insufficient data"));
}

TEST_CASE("family knowledge covers every type") {
  const SyntheticFamily f = small_family(30, 12);
  const FaceModel model = fit_region_pca(f.identities, f.regions, 5);
  const AttributeCatalog catalog = learn_family_attributes(f, model);
  const ImpressionKnowledge k = fit_family_knowledge(f, model, catalog, ArtistEditOptions{});
  for (ImpressionType t : kAllImpressions) {
    CHECK(k.prior(t).impression == t);
    CHECK(k.prior(t).mean.rows() == 16);
    CHECK(k.prior(t).mean.cols() == 5);
    CHECK(k.region_weights(t).impression == t);
  }
}

TEST_CASE("similarity pairs") {
  const SyntheticFamily f = small_family(10, 13);
  PairOptions options;
  options.pairs = 12;
  options.render.width = options.render.height = 16;
  const auto pairs = make_similarity_pairs(f, options);
  REQUIRE(pairs.size() == 12u);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(pairs[i].label == (i % 2 == 0 ? 1 : 0));
    CHECK(pairs[i].a.width == 16);
  }
  const auto again = make_similarity_pairs(f, options);
  CHECK(again[7].b.pixels == pairs[7].b.pixels);

  FamilySpec spec;
  spec.identities = 1;
  const SyntheticFamily lone = generate_family(spec);
  CHECK(starts_with(error_of([&] { make_similarity_pairs(lone, options); }), "degenerate pairs"));
}
