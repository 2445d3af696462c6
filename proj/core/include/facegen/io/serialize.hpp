#pragma once

#include "facegen/attributes.hpp"
#include "facegen/face_model.hpp"
#include "facegen/priors.hpp"
#include "facegen/scorer.hpp"
#include "facegen/similarity.hpp"
#include "facegen/synthetic.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace facegen::io {

// Section names used by the pipeline.
inline constexpr std::string_view kFamilySection = "family";
inline constexpr std::string_view kCorpusSection = "corpus";
inline constexpr std::string_view kPcaSection = "pca";
inline constexpr std::string_view kAttributesSection = "attributes";
inline constexpr std::string_view kScorerSection = "scorer";
inline constexpr std::string_view kEmbeddingSection = "embedding";
inline constexpr std::string_view kPriorsSection = "priors";

// Family metadata: spec, topology, regions, framing, strengths and the
// planted catalog. Identity meshes travel separately (corpus section / OBJ).
std::string encode_family(const SyntheticFamily& family);
SyntheticFamily decode_family(std::string_view bytes);

std::string encode_meshes(const std::vector<FaceMesh>& meshes);
std::vector<FaceMesh> decode_meshes(std::string_view bytes, const TopologyPtr& topology);

std::string encode_face_model(const FaceModel& model);
FaceModel decode_face_model(std::string_view bytes);

std::string encode_catalog(const AttributeCatalog& catalog);
AttributeCatalog decode_catalog(std::string_view bytes);

std::string encode_scorer(const ScorerModel& model);
ScorerModel decode_scorer(std::string_view bytes);

std::string encode_embedding(const EmbeddingModel& model);
EmbeddingModel decode_embedding(std::string_view bytes);

std::string encode_knowledge(const ImpressionKnowledge& knowledge);
ImpressionKnowledge decode_knowledge(std::string_view bytes);

}  // namespace facegen::io
