#include "facegen/io/container.hpp"

#include "facegen/error.hpp"
#include "facegen/io/binary.hpp"

#include <fstream>
#include <iterator>

namespace facegen::io {

namespace {
constexpr std::string_view kMagic{"FGMODEL\0", 8};
}

ModelContainer ModelContainer::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) fail(ErrorCode::kIo, "missing model container: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode(bytes);
}

ModelContainer ModelContainer::decode(std::string_view bytes) {
  if (bytes.substr(0, kMagic.size()) != kMagic) fail(ErrorCode::kFormat, "format error: not a model container");
  ByteReader r(bytes.substr(kMagic.size()));
  const std::uint32_t version = r.u32();
  if (version != kFormatVersion) {
    fail(ErrorCode::kFormat, "format error: unsupported container version " + std::to_string(version));
  }
  ModelContainer c;
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.str();
    const std::uint64_t len = r.u64();
    std::string payload(len, '\0');
    for (auto& ch : payload) ch = static_cast<char>(r.u8());
    c.sections_.emplace(std::move(name), std::move(payload));
  }
  if (!r.done()) fail(ErrorCode::kFormat, "format error: trailing bytes in container");
  return c;
}

std::string ModelContainer::encode() const {
  ByteWriter w;
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(sections_.size()));
  std::string out(kMagic);
  out += w.take();
  for (const auto& [name, payload] : sections_) {
    ByteWriter s;
    s.str(name);
    s.u64(payload.size());
    out += s.take();
    out += payload;
  }
  return out;
}

void ModelContainer::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  const std::string bytes = encode();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "write failed: " + path.string());
}

const std::string& ModelContainer::section(std::string_view name) const {
  const auto it = sections_.find(name);
  if (it == sections_.end()) fail(ErrorCode::kFormat, "missing section '" + std::string(name) + "'");
  return it->second;
}

std::vector<std::string> ModelContainer::names() const {
  std::vector<std::string> out;
  for (const auto& [name, payload] : sections_) out.push_back(name);
  return out;
}

}  // namespace facegen::io
