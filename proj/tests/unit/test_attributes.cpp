#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <algorithm>

using namespace facegen;
using namespace facegen::testing;

namespace {

struct Setup {
  SyntheticFamily fam = small_family(12);
  FaceModel model = fit_region_pca(fam.identities, fam.regions, 5);
  Eigen::VectorXd mean_geo = model.mean_geometry();
  Eigen::VectorXd mean_tex = model.mean_texture();
  int mouth = static_cast<int>(Region::kMouth) + 1;
};

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST_CASE("learn_attribute") {
  Setup s;
  SUBCASE("one example with full markedness is its masked offset") {
    const std::vector<AttributeExample> ex = {{s.fam.identities[2], 1.0}};
    const auto attr = learn_attribute("wide", s.fam.regions[s.mouth], ex, s.mean_geo, s.mean_tex);
    CHECK(attr.region_id == s.mouth);
    CHECK(max_abs(attr.delta_geometry - s.fam.regions.mask(s.fam.identities[2].geometry() - s.mean_geo, s.mouth)) < 1e-15);
    CHECK(max_abs(attr.delta_texture - s.fam.regions.mask(s.fam.identities[2].texture() - s.mean_tex, s.mouth)) < 1e-15);
  }
  SUBCASE("examples at the mean give zero deltas") {
    const FaceMesh mean(s.model.topology, s.mean_geo, s.mean_tex);
    const std::vector<AttributeExample> ex = {{mean, 0.5}, {mean, 1.0}};
    const auto attr = learn_attribute("none", s.fam.regions[s.mouth], ex, s.mean_geo, s.mean_tex);
    CHECK(max_abs(attr.delta_geometry) == 0.0);
    CHECK(max_abs(attr.delta_texture) == 0.0);
  }
  SUBCASE("five graded examples match a weighted-mean recomputation") {
    std::vector<AttributeExample> ex;
    std::vector<Eigen::VectorXd> geos, texs;
    std::vector<double> mu;
    for (int i = 0; i < 5; ++i) {
      mu.push_back(0.2 * (i + 1));
      ex.push_back({s.fam.identities[static_cast<std::size_t>(i)], mu.back()});
      geos.push_back(s.fam.identities[static_cast<std::size_t>(i)].geometry());
      texs.push_back(s.fam.identities[static_cast<std::size_t>(i)].texture());
    }
    const auto attr = learn_attribute("graded", s.fam.regions[s.mouth], ex, s.mean_geo, s.mean_tex);
    const Eigen::VectorXd geo = s.fam.regions.mask(oracle::weighted_mean_offset(geos, mu, s.mean_geo), s.mouth);
    const Eigen::VectorXd tex = s.fam.regions.mask(oracle::weighted_mean_offset(texs, mu, s.mean_tex), s.mouth);
    CHECK(max_abs(attr.delta_geometry - geo) < 1e-10);
    CHECK(max_abs(attr.delta_texture - tex) < 1e-10);
  }
  SUBCASE("all-zero markedness is degenerate") {
    const std::vector<AttributeExample> ex = {{s.fam.identities[0], 0.0}, {s.fam.identities[1], 0.0}};
    CHECK(starts_with(error_of([&] { learn_attribute("x", s.fam.regions[1], ex, s.mean_geo, s.mean_tex); }),
                      "degenerate attribute"));
  }
  SUBCASE("examples over another topology") {
    FamilySpec spec;
    spec.identities = 2;
    spec.rows = 20;
    const auto other = generate_family(spec);
    const std::vector<AttributeExample> ex = {{s.fam.identities[0], 1.0}, {other.identities[0], 1.0}};
    CHECK(starts_with(error_of([&] { learn_attribute("x", s.fam.regions[1], ex, s.mean_geo, s.mean_tex); }),
                      "topology mismatch"));
  }
  SUBCASE("deltas vanish outside the region") {
    const std::vector<AttributeExample> ex = {{s.fam.identities[3], 0.7}, {s.fam.identities[4], 0.4}};
    for (int r = 1; r <= kRegionCount; ++r) {
      const auto attr = learn_attribute("r", s.fam.regions[r], ex, s.mean_geo, s.mean_tex);
      for (int other = 1; other <= kRegionCount; ++other) {
        if (other == r) continue;
        CHECK(max_abs(s.fam.regions.mask(attr.delta_geometry, other)) == 0.0);
        CHECK(max_abs(s.fam.regions.mask(attr.delta_texture, other)) == 0.0);
      }
    }
  }
  SUBCASE("example order does not matter") {
    std::vector<AttributeExample> ex;
    for (int i = 0; i < 6; ++i) ex.push_back({s.fam.identities[static_cast<std::size_t>(i)], 0.15 * (i + 1)});
    const auto a = learn_attribute("o", s.fam.regions[s.mouth], ex, s.mean_geo, s.mean_tex);
    std::reverse(ex.begin(), ex.end());
    std::rotate(ex.begin(), ex.begin() + 2, ex.end());
    const auto b = learn_attribute("o", s.fam.regions[s.mouth], ex, s.mean_geo, s.mean_tex);
    CHECK(max_abs(a.delta_geometry - b.delta_geometry) < 1e-14);
    CHECK(max_abs(a.delta_texture - b.delta_texture) < 1e-14);
  }
}

TEST_CASE("apply_attribute") {
  Setup s;
  const std::vector<AttributeExample> ex = {{s.fam.identities[5], 1.0}, {s.fam.identities[6], 0.5}};
  const auto attr = learn_attribute("a", s.fam.regions[s.mouth], ex, s.mean_geo, s.mean_tex);
  const FaceMesh mean(s.model.topology, s.mean_geo, s.mean_tex);

  SUBCASE("beta zero is the identity") {
    const FaceMesh out = apply_attribute(s.fam.identities[0], attr, 0.0);
    CHECK(out.geometry() == s.fam.identities[0].geometry());
    CHECK(out.texture() == s.fam.identities[0].texture());
  }
  SUBCASE("beta then minus beta restores the mesh") {
    const FaceMesh there = apply_attribute(mean, attr, 0.6);
    REQUIRE(there.texture().minCoeff() > 0.0);
    REQUIRE(there.texture().maxCoeff() < 1.0);
    const FaceMesh back = apply_attribute(there, attr, -0.6);
    CHECK(max_abs(back.geometry() - mean.geometry()) < 1e-12);
    CHECK(max_abs(back.texture() - mean.texture()) < 1e-12);
  }
  SUBCASE("half strength on the mean face moves by half the delta") {
    const FaceMesh out = apply_attribute(mean, attr, 0.5);
    for (Eigen::Index k = 0; k < out.geometry().size(); ++k) {
      CHECK(out.geometry()(k) - mean.geometry()(k) == doctest::Approx(0.5 * attr.delta_geometry(k)).epsilon(1e-12));
    }
  }
  SUBCASE("only coordinates inside the region change") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
      const double beta = rng.uniform(-2.0, 2.0);
      const FaceMesh& face = s.fam.identities[static_cast<std::size_t>(trial)];
      const FaceMesh out = apply_attribute(face, attr, beta);
      for (int v = 0; v < s.fam.spec.vertex_count(); ++v) {
        if (s.fam.regions[s.mouth].contains(v)) continue;
        for (int c = 0; c < 3; ++c) {
          CHECK(out.geometry()(3 * v + c) == face.geometry()(3 * v + c));
          CHECK(out.texture()(3 * v + c) == face.texture()(3 * v + c));
        }
      }
    }
  }
  SUBCASE("two applications add before clamping") {
    const FaceMesh twice = apply_attribute(apply_attribute(mean, attr, 0.3), attr, 0.4);
    const FaceMesh once = apply_attribute(mean, attr, 0.7);
    CHECK(max_abs(twice.geometry() - once.geometry()) < 1e-12);
    CHECK(max_abs(twice.texture() - once.texture()) < 1e-12);
  }
  SUBCASE("texture stays in range at large beta") {
    const FaceMesh out = apply_attribute(mean, attr, 40.0);
    CHECK(out.texture().minCoeff() >= 0.0);
    CHECK(out.texture().maxCoeff() <= 1.0);
  }
  SUBCASE("catalog lookup by region") {
    AttributeCatalog catalog = {attr, attr};
    catalog[1].region_id = 2;
    CHECK(attributes_in_region(catalog, s.mouth) == std::vector<std::size_t>{0});
    CHECK(attributes_in_region(catalog, 2) == std::vector<std::size_t>{1});
    CHECK(attributes_in_region(catalog, 1).empty());
  }
}
