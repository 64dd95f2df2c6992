#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace porelbm {

// Binary field container shared with the training/prediction side.
//
//   offset  size  content
//        0     8  magic "PORGRID1"
//        8     4  width    (uint32, little-endian)
//       12     4  height   (uint32, little-endian)
//       16     4  channels (uint32, little-endian)
//       20     4  dtype tag, 1 = float32
//       24   4*N  payload, float32 little-endian, row-major, channels interleaved
//
// N = width * height * channels. Row 0 is the top image row.
struct Grid {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t channels = 1;
  std::vector<float> data;

  Grid() = default;
  Grid(std::uint32_t w, std::uint32_t h, std::uint32_t c);

  std::size_t index(std::uint32_t x, std::uint32_t y, std::uint32_t c = 0) const noexcept {
    return (static_cast<std::size_t>(y) * width + x) * channels + c;
  }
  float at(std::uint32_t x, std::uint32_t y, std::uint32_t c = 0) const noexcept { return data[index(x, y, c)]; }
  float& at(std::uint32_t x, std::uint32_t y, std::uint32_t c = 0) noexcept { return data[index(x, y, c)]; }

  // One channel as a width * height vector.
  std::vector<float> channel(std::uint32_t c) const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

inline constexpr std::array<char, 8> kGridMagic = {'P', 'O', 'R', 'G', 'R', 'I', 'D', '1'};
inline constexpr std::uint32_t kGridDtypeFloat32 = 1;
inline constexpr std::size_t kGridHeaderBytes = 24;

void write_grid(const std::filesystem::path& path, const Grid& grid);
Grid read_grid(const std::filesystem::path& path);

}  // namespace porelbm
