#pragma once

#include "facegen/attributes.hpp"
#include "facegen/face_model.hpp"
#include "facegen/impression.hpp"
#include "facegen/priors.hpp"
#include "facegen/render.hpp"
#include "facegen/scorer.hpp"
#include "facegen/similarity.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace facegen {

// One signed term of a planted impression rule.
struct PlantedTerm {
  std::size_t attribute = 0;  // index into the family's attribute catalog
  double weight = 0.0;
};

using PlantedRule = std::vector<PlantedTerm>;

// Procedural face family with known ground truth. Faces are a rows x cols
// vertex grid warped into a face outline; identities combine smooth random
// identity fields with the planted attributes (two per region).
struct FamilySpec {
  int rows = 32;
  int cols = 16;
  int identities = 200;
  int identity_params = 6;
  double vertex_noise = 0.002;
  std::uint64_t seed = 1;
  // Rule per impression type; antonyms carry the negated rule.
  std::array<PlantedRule, kImpressionCount> rules = default_rules();

  int vertex_count() const { return rows * cols; }
  static std::array<PlantedRule, kImpressionCount> default_rules();
  // Throws "invalid spec: ..." naming the offending field.
  void validate() const;
};

inline constexpr int kAttributesPerRegion = 2;
inline constexpr int kFamilyAttributeCount = kRegionCount * kAttributesPerRegion;

// Catalog index of the planted attribute `kind` (0 geometry, 1 texture) of a region.
inline constexpr std::size_t planted_attribute(int region_id, int kind) {
  return static_cast<std::size_t>(kAttributesPerRegion * (region_id - 1) + kind);
}

struct SyntheticFamily {
  FamilySpec spec;
  TopologyPtr topology;
  RegionLayout regions;
  std::vector<FaceMesh> identities;
  AttributeCatalog catalog;    // ground-truth planted deltas
  Eigen::MatrixXd strengths;   // identities x attributes, |s| in [0.8, 1.5]
  Framing framing;             // shared camera for every render of the family
};

SyntheticFamily generate_family(const FamilySpec& spec);

// Planted rule score of an identity for an impression type.
double planted_score(const SyntheticFamily& family, std::size_t identity, ImpressionType type);

struct AnnotationOptions {
  // Label is 1 iff score > threshold. Unset: per-type median (balanced).
  std::optional<double> threshold;
  RenderSettings render;
};

// Renders every identity under the family framing and labels all 8 types.
LabeledImageSet annotate_impressions(const SyntheticFamily& family, const AnnotationOptions& options);

// Per-type labels only (no rendering).
std::array<std::vector<int>, kImpressionCount> planted_labels(const SyntheticFamily& family,
                                                              std::optional<double> threshold);

struct ArtistEditOptions {
  int artists = 10;
  int base_faces = 5;
  double strength = 1.0;  // beta applied along each rule term (times its weight)
  double noise = 0.1;     // beta perturbation scale and distractor edit scale
  std::uint64_t seed = 1;
};

// Simulated artists push base faces toward an impression with `catalog`
// attributes following the planted rule; returns (original, edited)
// coefficients under `model`.
std::vector<EditPair> simulate_artist_edits(const SyntheticFamily& family, const FaceModel& model,
                                            const AttributeCatalog& catalog, ImpressionType impression,
                                            const ArtistEditOptions& options);

struct PairOptions {
  int pairs = 400;
  double perturbation = 0.3;     // |beta| bound of the attribute jitter
  double lighting_jitter = 0.05;  // relative SH coefficient jitter
  std::uint64_t seed = 1;
  RenderSettings render;
};

// Same-face pairs: one identity under two small attribute/lighting jitters.
// Different-face pairs: two distinct identities. Labels alternate 1, 0.
std::vector<FacePair> make_similarity_pairs(const SyntheticFamily& family, const PairOptions& options);

// Learns one attribute per planted direction from the `examples` identities
// with the largest planted strength, markedness = strength / max strength.
AttributeCatalog learn_family_attributes(const SyntheticFamily& family, const FaceModel& model, int examples = 5);

// Priors from the projected identities labeled present for each type and
// region weights from simulated artist edits, for all eight types.
ImpressionKnowledge fit_family_knowledge(const SyntheticFamily& family, const FaceModel& model,
                                         const AttributeCatalog& catalog, const ArtistEditOptions& edits);

// Renders of every identity (the similarity normalizer corpus).
std::vector<Image> render_corpus(std::span<const FaceMesh> meshes, const RenderSettings& render);

}  // namespace facegen
