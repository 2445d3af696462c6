#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace facegen {

inline constexpr int kImpressionCount = 8;

// Antonym pairs are adjacent: (smart, silly), (friendly, hostile), ...
enum class ImpressionType {
  kSmart,
  kSilly,
  kFriendly,
  kHostile,
  kHumorous,
  kBoring,
  kConfident,
  kUnconfident,
};

inline constexpr std::array<ImpressionType, kImpressionCount> kAllImpressions = {
    ImpressionType::kSmart,    ImpressionType::kSilly,  ImpressionType::kFriendly,  ImpressionType::kHostile,
    ImpressionType::kHumorous, ImpressionType::kBoring, ImpressionType::kConfident, ImpressionType::kUnconfident};

inline constexpr int index_of(ImpressionType t) { return static_cast<int>(t); }

inline constexpr ImpressionType antonym(ImpressionType t) {
  return static_cast<ImpressionType>(index_of(t) ^ 1);
}

std::string_view impression_name(ImpressionType t);
std::optional<ImpressionType> parse_impression(std::string_view name);

}  // namespace facegen
