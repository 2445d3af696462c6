#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace facegen::io {

// Sectioned binary model container.
//
//   magic    8 bytes  "FGMODEL\0"
//   version  u32      kFormatVersion
//   count    u32      number of sections
//   per section, sorted by name:
//     name_len u32, name bytes, payload_len u64, payload bytes
//
// All integers and doubles are little-endian. Section payloads are written
// by facegen/io/serialize.hpp.
class ModelContainer {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  // Throws "missing model container" when the file does not exist.
  static ModelContainer load(const std::filesystem::path& path);
  static ModelContainer decode(std::string_view bytes);

  void save(const std::filesystem::path& path) const;
  std::string encode() const;

  bool has(std::string_view name) const { return sections_.find(name) != sections_.end(); }
  // Throws "missing section '<name>'".
  const std::string& section(std::string_view name) const;
  void put(const std::string& name, std::string payload) { sections_[name] = std::move(payload); }
  std::vector<std::string> names() const;

 private:
  std::map<std::string, std::string, std::less<>> sections_;
};

}  // namespace facegen::io
