#include "facegen/synthetic.hpp"

#include "facegen/error.hpp"
#include "facegen/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace facegen {

std::array<PlantedRule, kImpressionCount> FamilySpec::default_rules() {
  const auto eyes = 1, jaw = 2, nose = 3, chin = 4, cheeks = 5, mouth = 6, brows = 7;
  std::array<PlantedRule, kImpressionCount> rules;
  auto set = [&rules](ImpressionType t, PlantedRule rule) {
    PlantedRule negated = rule;
    for (auto& term : negated) term.weight = -term.weight;
    rules[static_cast<std::size_t>(index_of(t))] = std::move(rule);
    rules[static_cast<std::size_t>(index_of(antonym(t)))] = std::move(negated);
  };
  set(ImpressionType::kSmart, {{planted_attribute(brows, 1), 1.0}, {planted_attribute(eyes, 0), 0.25}});
  set(ImpressionType::kFriendly, {{planted_attribute(mouth, 0), 1.0}, {planted_attribute(cheeks, 1), 0.25}});
  set(ImpressionType::kHumorous, {{planted_attribute(cheeks, 0), 1.0}, {planted_attribute(chin, 0), 0.25}});
  set(ImpressionType::kConfident, {{planted_attribute(jaw, 1), 1.0}, {planted_attribute(nose, 0), 0.25}});
  return rules;
}

void FamilySpec::validate() const {
  auto bad = [](const std::string& field, const std::string& why) {
    fail(ErrorCode::kInvalidSpec, "invalid spec: " + field + " " + why);
  };
  if (rows < 12) bad("rows", "must be >= 12");
  if (cols < 8) bad("cols", "must be >= 8");
  if (identities < 1) bad("identities", "must be >= 1");
  if (identity_params < 0) bad("identity_params", "must be >= 0");
  if (!(vertex_noise >= 0.0)) bad("vertex_noise", "must be >= 0");
  for (ImpressionType t : kAllImpressions) {
    const auto& rule = rules[static_cast<std::size_t>(index_of(t))];
    if (rule.empty()) bad("rules", "need a planted term for " + std::string(impression_name(t)));
    for (const auto& term : rule) {
      if (term.attribute >= static_cast<std::size_t>(kFamilyAttributeCount)) bad("rules", "attribute index out of range");
    }
  }
}

namespace {

struct BasePoint {
  double x;
  double y;
};

double gauss2(double dx, double dy, double sigma) { return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma)); }

int assign_region(const BasePoint& p) {
  const double ax = std::abs(p.x);
  const double y = p.y;
  if (ax < 0.14 && y > -0.28 && y < 0.40) return 3;                           // nose
  if (y >= 0.38 && y < 0.58 && ax >= 0.06 && ax < 0.62) return 7;             // eyebrows
  if (y >= 0.12 && y < 0.38 && ax >= 0.14 && ax < 0.60) return 1;             // eyes
  if (y < -0.28 && y >= -0.62 && ax < 0.34) return 6;                         // mouth
  if (y < -0.62 && ax < 0.34) return 4;                                       // chin
  if (y < -0.28 && ax >= 0.34) return 2;                                      // jaw
  if (y >= -0.28 && y < 0.12 && ax >= 0.14 && ax < 0.64) return 5;            // cheeks
  return 8;                                                                   // contour
}

Eigen::Vector3d base_position(const BasePoint& p) {
  const double ax = std::abs(p.x);
  double z = 0.55 * std::sqrt(std::max(0.0, 1.0 - (p.x / 0.95) * (p.x / 0.95) - (p.y / 1.25) * (p.y / 1.25)));
  z += 0.20 * std::exp(-(p.x * p.x) / (2 * 0.07 * 0.07) - (p.y - 0.05) * (p.y - 0.05) / (2 * 0.16 * 0.16));
  z += 0.06 * gauss2(p.x, p.y + 0.14, 0.06);
  z -= 0.07 * gauss2(ax - 0.33, p.y - 0.28, 0.09);
  z += 0.04 * std::exp(-(ax - 0.33) * (ax - 0.33) / (2 * 0.18 * 0.18) - (p.y - 0.46) * (p.y - 0.46) / (2 * 0.05 * 0.05));
  z += 0.03 * std::exp(-(p.x * p.x) / (2 * 0.15 * 0.15) - (p.y + 0.45) * (p.y + 0.45) / (2 * 0.05 * 0.05));
  z += 0.05 * gauss2(p.x, p.y + 0.82, 0.12);
  z += 0.04 * gauss2(ax - 0.42, p.y + 0.12, 0.12);
  return {p.x, p.y, z};
}

Eigen::Vector3d base_color(const BasePoint& p) {
  const double ax = std::abs(p.x);
  Eigen::Vector3d c(0.86, 0.70, 0.60);
  auto blend = [&c](const Eigen::Vector3d& target, double w) { c = (1.0 - w) * c + w * target; };
  blend({0.25, 0.20, 0.20}, gauss2(ax - 0.33, p.y - 0.28, 0.06));
  blend({0.35, 0.25, 0.20},
        std::exp(-(ax - 0.34) * (ax - 0.34) / (2 * 0.14 * 0.14) - (p.y - 0.47) * (p.y - 0.47) / (2 * 0.05 * 0.05)));
  const double lip_x = p.x / 0.22;
  blend({0.72, 0.38, 0.38},
        std::exp(-lip_x * lip_x * lip_x * lip_x - (p.y + 0.45) * (p.y + 0.45) / (2 * 0.07 * 0.07)));
  return c;
}

// Ground-truth per-vertex delta of planted attribute `a` at base point p,
// before region masking.
void planted_delta(std::size_t a, const BasePoint& p, Eigen::Vector3d& dgeo, Eigen::Vector3d& dtex) {
  const double ax = std::abs(p.x);
  const double sx = p.x < 0 ? -1.0 : 1.0;
  dgeo.setZero();
  dtex.setZero();
  switch (a) {
    case 0:  // eyes: size
      dgeo = {0.18 * (p.x - sx * 0.33), 0.18 * (p.y - 0.28), -0.02};
      break;
    case 1:  // eyes: shadow
      dtex = {-0.10, -0.11, -0.08};
      break;
    case 2:  // jaw: width
      dgeo = {0.08 * sx, 0.0, 0.02};
      break;
    case 3:  // jaw: stubble
      dtex = {-0.16, -0.15, -0.12};
      break;
    case 4:  // nose: length
      dgeo = {0.0, -0.06 * (0.40 - p.y) / 0.68, 0.06 * std::exp(-(p.x * p.x) / 0.01)};
      break;
    case 5:  // nose: redness
      dtex = {0.08, -0.06, -0.05};
      break;
    case 6:  // chin: protrusion
      dgeo = {0.0, -0.04, 0.08};
      break;
    case 7:  // chin: tone
      dtex = {-0.07, -0.05, -0.02};
      break;
    case 8: {  // cheeks: fullness
      const double w = gauss2(ax - 0.38, p.y + 0.08, 0.14);
      dgeo = {0.03 * sx * w, 0.0, 0.09 * w};
      break;
    }
    case 9:  // cheeks: blush
      dtex = {0.10, -0.04, -0.03};
      break;
    case 10:  // mouth: width (corners rise and lips fill out as it widens)
      dgeo = {0.50 * p.x, 0.40 * p.x * p.x, 0.12 * std::exp(-(p.x * p.x) / (2 * 0.15 * 0.15))};
      break;
    case 11: {  // mouth: lip color
      const double lx = p.x / 0.22;
      dtex = Eigen::Vector3d(0.06, -0.10, -0.06) *
             std::exp(-lx * lx * lx * lx - (p.y + 0.45) * (p.y + 0.45) / (2 * 0.07 * 0.07));
      break;
    }
    case 12:  // eyebrows: height
      dgeo = {0.0, 0.06, 0.03};
      break;
    case 13:  // eyebrows: darkness
      dtex = {-0.20, -0.17, -0.14};
      break;
    case 14:  // contour: face width
      dgeo = {0.07 * p.x, 0.0, 0.0};
      break;
    case 15:  // contour: skin tone
      dtex = {-0.09, -0.08, -0.06};
      break;
    default:
      break;
  }
}

constexpr std::array<const char*, kFamilyAttributeCount> kAttributeNames = {
    "eye_size",        "eye_shadow",  "jaw_width",       "jaw_stubble", "nose_length",    "nose_redness",
    "chin_protrusion", "chin_tone",   "cheek_fullness",  "cheek_blush", "mouth_width",    "lip_color",
    "brow_height",     "brow_darkness", "face_width",    "skin_tone"};

struct IdentityField {
  struct Blob {
    double cx, cy, sigma;
    Eigen::Vector3d dgeo;
    Eigen::Vector3d dtex;
  };
  std::array<Blob, 2> blobs;
  Eigen::Vector3d tint;
};

}  // namespace

SyntheticFamily generate_family(const FamilySpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SyntheticFamily family;
  family.spec = spec;

  const int n = spec.vertex_count();
  std::vector<BasePoint> base(static_cast<std::size_t>(n));
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < spec.rows; ++i) {
    const double w = 1.0 - 2.0 * i / (spec.rows - 1);
    const double half_width = 0.82 * std::sqrt(std::max(0.15, 1.0 - (w < 0 ? 0.75 : 0.35) * w * w));
    for (int j = 0; j < spec.cols; ++j) {
      const double u = -1.0 + 2.0 * j / (spec.cols - 1);
      const auto v = static_cast<std::size_t>(i * spec.cols + j);
      base[v] = {u * half_width, 1.05 * w};
      labels[v] = assign_region(base[v]);
    }
  }
  family.regions = RegionLayout::from_labels(labels);
  for (int r = 1; r <= kRegionCount; ++r) {
    if (family.regions[r].size() == 0) {
      fail(ErrorCode::kInvalidSpec, "invalid spec: rows/cols leave region " + std::string(region_name(r)) + " empty");
    }
  }

  auto topology = std::make_shared<Topology>();
  topology->vertex_count = n;
  for (int i = 0; i + 1 < spec.rows; ++i) {
    for (int j = 0; j + 1 < spec.cols; ++j) {
      const int v00 = i * spec.cols + j, v01 = v00 + 1, v10 = v00 + spec.cols, v11 = v10 + 1;
      topology->triangles.push_back({v00, v10, v11});
      topology->triangles.push_back({v00, v11, v01});
    }
  }
  family.topology = topology;

  Eigen::VectorXd base_geo(3 * n), base_tex(3 * n);
  for (int v = 0; v < n; ++v) {
    base_geo.segment<3>(3 * v) = base_position(base[static_cast<std::size_t>(v)]);
    base_tex.segment<3>(3 * v) = base_color(base[static_cast<std::size_t>(v)]);
  }

  for (std::size_t a = 0; a < kFamilyAttributeCount; ++a) {
    FacialAttribute attr;
    attr.name = kAttributeNames[a];
    attr.region_id = static_cast<int>(a) / kAttributesPerRegion + 1;
    attr.delta_geometry = Eigen::VectorXd::Zero(3 * n);
    attr.delta_texture = Eigen::VectorXd::Zero(3 * n);
    for (int v = 0; v < n; ++v) {
      if (labels[static_cast<std::size_t>(v)] != attr.region_id) continue;
      Eigen::Vector3d dg, dt;
      planted_delta(a, base[static_cast<std::size_t>(v)], dg, dt);
      attr.delta_geometry.segment<3>(3 * v) = dg;
      attr.delta_texture.segment<3>(3 * v) = dt;
    }
    family.catalog.push_back(std::move(attr));
  }

  std::vector<IdentityField> fields(static_cast<std::size_t>(spec.identity_params));
  for (auto& f : fields) {
    for (auto& b : f.blobs) {
      b.cx = rng.uniform(-0.6, 0.6);
      b.cy = rng.uniform(-0.9, 0.9);
      b.sigma = rng.uniform(0.2, 0.45);
      b.dgeo = {0.025 * rng.normal(), 0.025 * rng.normal(), 0.04 * rng.normal()};
      b.dtex = {0.03 * rng.normal(), 0.03 * rng.normal(), 0.03 * rng.normal()};
    }
    f.tint = {0.02 * rng.normal(), 0.02 * rng.normal(), 0.02 * rng.normal()};
  }

  // Balanced signs per attribute keep every planted label split exactly.
  const int count = spec.identities;
  family.strengths.resize(count, kFamilyAttributeCount);
  for (int a = 0; a < kFamilyAttributeCount; ++a) {
    std::vector<double> signs(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) signs[static_cast<std::size_t>(i)] = i < count / 2 ? 1.0 : -1.0;
    std::shuffle(signs.begin(), signs.end(), rng.engine());
    for (int i = 0; i < count; ++i) family.strengths(i, a) = signs[static_cast<std::size_t>(i)] * (0.8 + 0.7 * rng.uniform());
  }

  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd geo = base_geo;
    Eigen::VectorXd tex = base_tex;
    for (std::size_t k = 0; k < fields.size(); ++k) {
      const double c = rng.normal();
      for (int v = 0; v < n; ++v) {
        const BasePoint& p = base[static_cast<std::size_t>(v)];
        Eigen::Vector3d dg = Eigen::Vector3d::Zero(), dt = fields[k].tint;
        for (const auto& b : fields[k].blobs) {
          const double w = gauss2(p.x - b.cx, p.y - b.cy, b.sigma);
          dg += w * b.dgeo;
          dt += w * b.dtex;
        }
        geo.segment<3>(3 * v) += c * dg;
        tex.segment<3>(3 * v) += c * dt;
      }
    }
    for (int a = 0; a < kFamilyAttributeCount; ++a) {
      geo += family.strengths(i, a) * family.catalog[static_cast<std::size_t>(a)].delta_geometry;
      tex += family.strengths(i, a) * family.catalog[static_cast<std::size_t>(a)].delta_texture;
    }
    for (Eigen::Index k = 0; k < geo.size(); ++k) {
      geo(k) += spec.vertex_noise * rng.normal();
      tex(k) += 0.5 * spec.vertex_noise * rng.normal();
    }
    tex = tex.cwiseMax(0.0).cwiseMin(1.0);
    for (int v = 0; v < n; ++v) {
      x0 = std::min(x0, geo(3 * v));
      x1 = std::max(x1, geo(3 * v));
      y0 = std::min(y0, geo(3 * v + 1));
      y1 = std::max(y1, geo(3 * v + 1));
    }
    family.identities.emplace_back(topology, std::move(geo), std::move(tex));
  }
  family.framing = Framing{0.5 * (x0 + x1), 0.5 * (y0 + y1), 0.525 * (x1 - x0), 0.525 * (y1 - y0)};
  return family;
}

double planted_score(const SyntheticFamily& family, std::size_t identity, ImpressionType type) {
  double score = 0.0;
  for (const auto& term : family.spec.rules[static_cast<std::size_t>(index_of(type))]) {
    score += term.weight * family.strengths(static_cast<Eigen::Index>(identity), static_cast<Eigen::Index>(term.attribute));
  }
  return score;
}

std::array<std::vector<int>, kImpressionCount> planted_labels(const SyntheticFamily& family,
                                                              std::optional<double> threshold) {
  std::array<std::vector<int>, kImpressionCount> out;
  const std::size_t count = family.identities.size();
  for (ImpressionType t : kAllImpressions) {
    std::vector<double> scores(count);
    for (std::size_t i = 0; i < count; ++i) scores[i] = planted_score(family, i, t);
    double cut = 0.0;
    if (threshold) {
      cut = *threshold;
    } else {
      std::vector<double> sorted = scores;
      std::sort(sorted.begin(), sorted.end());
      cut = count % 2 == 1 ? sorted[count / 2] : 0.5 * (sorted[count / 2 - 1] + sorted[count / 2]);
    }
    auto& labels = out[static_cast<std::size_t>(index_of(t))];
    labels.resize(count);
    for (std::size_t i = 0; i < count; ++i) labels[i] = scores[i] > cut ? 1 : 0;
  }
  return out;
}

LabeledImageSet annotate_impressions(const SyntheticFamily& family, const AnnotationOptions& options) {
  LabeledImageSet set;
  RenderSettings render = options.render;
  if (!render.framing) render.framing = family.framing;
  set.images = render_corpus(family.identities, render);
  set.labels = planted_labels(family, options.threshold);
  return set;
}

std::vector<EditPair> simulate_artist_edits(const SyntheticFamily& family, const FaceModel& model,
                                            const AttributeCatalog& catalog, ImpressionType impression,
                                            const ArtistEditOptions& options) {
  const auto& rule = family.spec.rules[static_cast<std::size_t>(index_of(impression))];
  for (const auto& term : rule) {
    if (term.attribute >= catalog.size()) fail(ErrorCode::kInvalidSpec, "invalid spec: catalog lacks a planted attribute");
  }
  std::vector<std::size_t> distractors;
  for (std::size_t a = 0; a < catalog.size(); ++a) {
    if (std::none_of(rule.begin(), rule.end(), [a](const PlantedTerm& t) { return t.attribute == a; })) {
      distractors.push_back(a);
    }
  }

  Rng rng(options.seed);
  const auto count = family.identities.size();
  const auto bases = std::min<std::size_t>(static_cast<std::size_t>(std::max(options.base_faces, 0)), count);
  std::vector<EditPair> edits;
  for (std::size_t b = 0; b < bases; ++b) {
    const FaceMesh& original = family.identities[b * count / bases];
    const FaceCoefficients original_coeffs = project_face(original, model);
    for (int artist = 0; artist < options.artists; ++artist) {
      FaceMesh edited = original;
      for (const auto& term : rule) {
        const double beta = term.weight * options.strength + options.noise * rng.normal();
        if (beta != 0.0) edited = apply_attribute(edited, catalog[term.attribute], beta);
      }
      if (options.noise > 0.0 && !distractors.empty()) {
        const std::size_t a = distractors[rng.index(distractors.size())];
        edited = apply_attribute(edited, catalog[a], options.noise * rng.normal());
      }
      edits.push_back({original_coeffs, project_face(edited, model)});
    }
  }
  return edits;
}

AttributeCatalog learn_family_attributes(const SyntheticFamily& family, const FaceModel& model, int examples) {
  const auto count = static_cast<int>(family.identities.size());
  if (examples < 1 || examples > count) {
    fail(ErrorCode::kInsufficientData, "insufficient data: " + std::to_string(examples) + " exemplars requested from " +
                                           std::to_string(count) + " identities");
  }
  const Eigen::VectorXd mean_geo = model.mean_geometry();
  const Eigen::VectorXd mean_tex = model.mean_texture();
  AttributeCatalog catalog;
  for (std::size_t a = 0; a < family.catalog.size(); ++a) {
    std::vector<int> order(static_cast<std::size_t>(count));
    std::iota(order.begin(), order.end(), 0);
    const auto col = static_cast<Eigen::Index>(a);
    std::stable_sort(order.begin(), order.end(),
                     [&](int l, int r) { return family.strengths(l, col) > family.strengths(r, col); });
    const double top = family.strengths(order[0], col);
    std::vector<AttributeExample> chosen;
    for (int k = 0; k < examples; ++k) {
      const double mu = top > 0.0 ? std::clamp(family.strengths(order[static_cast<std::size_t>(k)], col) / top, 0.0, 1.0) : 0.0;
      chosen.push_back({family.identities[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])], mu});
    }
    const auto& truth = family.catalog[a];
    catalog.push_back(learn_attribute(truth.name, family.regions[truth.region_id], chosen, mean_geo, mean_tex));
  }
  return catalog;
}

ImpressionKnowledge fit_family_knowledge(const SyntheticFamily& family, const FaceModel& model,
                                         const AttributeCatalog& catalog, const ArtistEditOptions& edits) {
  std::vector<FaceCoefficients> projected;
  projected.reserve(family.identities.size());
  for (const auto& mesh : family.identities) projected.push_back(project_face(mesh, model));
  const auto labels = planted_labels(family, std::nullopt);

  ImpressionKnowledge knowledge;
  for (ImpressionType t : kAllImpressions) {
    const auto k = static_cast<std::size_t>(index_of(t));
    std::vector<FaceCoefficients> present;
    for (std::size_t i = 0; i < projected.size(); ++i) {
      if (labels[k][i] == 1) present.push_back(projected[i]);
    }
    knowledge.priors[k] = fit_prior(present, t);
    ArtistEditOptions per_type = edits;
    per_type.seed = derive_seed(edits.seed, k);
    knowledge.weights[k] = learn_region_weights(simulate_artist_edits(family, model, catalog, t, per_type), t);
  }
  return knowledge;
}

std::vector<Image> render_corpus(std::span<const FaceMesh> meshes, const RenderSettings& render) {
  std::vector<Image> images;
  images.reserve(meshes.size());
  for (const auto& mesh : meshes) images.push_back(render_frontal(mesh, render));
  return images;
}

std::vector<FacePair> make_similarity_pairs(const SyntheticFamily& family, const PairOptions& options) {
  const std::size_t count = family.identities.size();
  if (count < 2) fail(ErrorCode::kDegeneratePairs, "degenerate pairs: need at least 2 identities");
  Rng rng(options.seed);
  RenderSettings base = options.render;
  if (!base.framing) base.framing = family.framing;

  auto jittered = [&](std::size_t identity) {
    const auto& attr = family.catalog[rng.index(family.catalog.size())];
    const double beta = rng.uniform(-options.perturbation, options.perturbation);
    RenderSettings settings = base;
    for (double& coeff : settings.lighting.sh) coeff *= 1.0 + options.lighting_jitter * rng.normal();
    return render_frontal(apply_attribute(family.identities[identity], attr, beta), settings);
  };

  std::vector<FacePair> pairs;
  pairs.reserve(static_cast<std::size_t>(options.pairs));
  for (int p = 0; p < options.pairs; ++p) {
    FacePair pair;
    pair.label = p % 2 == 0 ? 1 : 0;
    const std::size_t i = rng.index(count);
    std::size_t j = i;
    if (pair.label == 0) {
      j = rng.index(count - 1);
      if (j >= i) ++j;
    }
    pair.a = jittered(i);
    pair.b = jittered(j);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

}  // namespace facegen
