#include "porelbm/grid_file.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "porelbm/error.hpp"

namespace porelbm {
namespace {

void put_u32(std::vector<char>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFFu));
}

std::uint32_t get_u32(const char* p) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[b])) << (8 * b);
  return v;
}

}  // namespace

Grid::Grid(std::uint32_t w, std::uint32_t h, std::uint32_t c)
    : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, 0.0f) {}

std::vector<float> Grid::channel(std::uint32_t c) const {
  if (c >= channels) throw ShapeError("channel index out of range");
  std::vector<float> out(static_cast<std::size_t>(width) * height);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = data[k * channels + c];
  return out;
}

void write_grid(const std::filesystem::path& path, const Grid& grid) {
  if (grid.width == 0 || grid.height == 0 || grid.channels == 0) {
    throw ParameterError("grid dimensions must be positive");
  }
  if (grid.data.size() != static_cast<std::size_t>(grid.width) * grid.height * grid.channels) {
    throw ParameterError("grid payload does not match its dimensions");
  }
  std::vector<char> bytes(kGridMagic.begin(), kGridMagic.end());
  bytes.reserve(kGridHeaderBytes + grid.data.size() * 4);
  put_u32(bytes, grid.width);
  put_u32(bytes, grid.height);
  put_u32(bytes, grid.channels);
  put_u32(bytes, kGridDtypeFloat32);
  for (const float v : grid.data) {
    if (!std::isfinite(v)) throw ParameterError("grid contains a non-finite value");
    put_u32(bytes, std::bit_cast<std::uint32_t>(v));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

Grid read_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < kGridHeaderBytes) throw FormatError("truncated grid header: " + path.string());
  if (!std::equal(kGridMagic.begin(), kGridMagic.end(), bytes.begin())) {
    throw FormatError("bad grid magic: " + path.string());
  }
  Grid grid;
  grid.width = get_u32(bytes.data() + 8);
  grid.height = get_u32(bytes.data() + 12);
  grid.channels = get_u32(bytes.data() + 16);
  if (get_u32(bytes.data() + 20) != kGridDtypeFloat32) throw FormatError("unsupported grid dtype: " + path.string());
  if (grid.width == 0 || grid.height == 0 || grid.channels == 0) {
    throw FormatError("grid header has a zero dimension: " + path.string());
  }
  const std::size_t n = static_cast<std::size_t>(grid.width) * grid.height * grid.channels;
  const std::size_t expected = kGridHeaderBytes + 4 * n;
  if (bytes.size() < expected) throw FormatError("truncated grid payload: " + path.string());
  if (bytes.size() > expected) throw FormatError("trailing bytes after grid payload: " + path.string());
  grid.data.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    grid.data[k] = std::bit_cast<float>(get_u32(bytes.data() + kGridHeaderBytes + 4 * k));
  }
  return grid;
}

}  // namespace porelbm
