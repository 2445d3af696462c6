#include "facegen/impression.hpp"

namespace facegen {

namespace {
constexpr std::array<std::string_view, kImpressionCount> kNames = {
    "smart", "silly", "friendly", "hostile", "humorous", "boring", "confident", "unconfident"};
}

std::string_view impression_name(ImpressionType t) { return kNames[static_cast<std::size_t>(index_of(t))]; }

std::optional<ImpressionType> parse_impression(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<ImpressionType>(i);
  }
  return std::nullopt;
}

}  // namespace facegen
