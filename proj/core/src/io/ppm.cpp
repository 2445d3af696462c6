#include "facegen/io/ppm.hpp"

#include "facegen/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace facegen::io {

std::string encode_ppm(const Image& image) {
  std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.reserve(out.size() + image.pixels.size());
  for (double v : image.pixels) {
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0))));
  }
  return out;
}

void write_ppm(const std::filesystem::path& path, const Image& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  const std::string bytes = encode_ppm(image);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "write failed: " + path.string());
}

Image decode_ppm(const std::string& bytes) {
  std::istringstream in(bytes);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P6" || w <= 0 || h <= 0 || maxval != 255) fail(ErrorCode::kFormat, "format error: not an 8-bit P6 image");
  in.get();
  const auto header = static_cast<std::size_t>(in.tellg());
  const std::size_t expected = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3;
  if (bytes.size() != header + expected) fail(ErrorCode::kFormat, "format error: P6 payload size");
  Image image(w, h);
  for (std::size_t i = 0; i < expected; ++i) {
    image.pixels[i] = static_cast<unsigned char>(bytes[header + i]) / 255.0;
  }
  return image;
}

Image read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_ppm(bytes);
}

}  // namespace facegen::io
