#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace porelbm {

// 8-bit raster, channels = 1 (gray) or 3 (RGB), row-major, interleaved.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> pixels;
};

void write_png(const std::filesystem::path& path, const Image& image);

// Reads any PNG without conversion; bit depth other than 8 is a FormatError.
Image read_png(const std::filesystem::path& path);

}  // namespace porelbm
