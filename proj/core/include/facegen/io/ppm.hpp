#pragma once

#include "facegen/render.hpp"

#include <filesystem>
#include <string>

namespace facegen::io {

// Binary P6, maxval 255, no comments: "P6\n<w> <h>\n255\n" + RGB bytes.
// Channels quantize as round(clamp(v, 0, 1) * 255).
std::string encode_ppm(const Image& image);
void write_ppm(const std::filesystem::path& path, const Image& image);

Image decode_ppm(const std::string& bytes);
Image read_ppm(const std::filesystem::path& path);

}  // namespace facegen::io
