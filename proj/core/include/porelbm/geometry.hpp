#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace porelbm {

struct GridSize {
  int width = 0;
  int height = 0;
  friend bool operator==(const GridSize&, const GridSize&) = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// A periodic pack of equal circles. Centers are in continuous pixel
// coordinates with the origin at the top-left corner of the image.
struct CirclePack {
  std::vector<Point> centers;
  double radius = 0.0;
  GridSize size;
  std::uint64_t seed = 0;
};

// Solid/pore flags on a W x H grid, row-major, row 0 at the top.
class BinaryGeometry {
 public:
  BinaryGeometry() = default;
  BinaryGeometry(GridSize size, std::vector<std::uint8_t> solid);

  static BinaryGeometry all_pore(GridSize size);
  static BinaryGeometry all_solid(GridSize size);

  int width() const noexcept { return size_.width; }
  int height() const noexcept { return size_.height; }
  GridSize size() const noexcept { return size_; }
  std::size_t cell_count() const noexcept { return solid_.size(); }

  bool is_solid(int x, int y) const noexcept {
    return solid_[static_cast<std::size_t>(y) * size_.width + x] != 0;
  }
  void set_solid(int x, int y, bool value) noexcept {
    solid_[static_cast<std::size_t>(y) * size_.width + x] = value ? 1 : 0;
  }

  // One byte per cell, 1 = solid.
  std::span<const std::uint8_t> mask() const noexcept { return solid_; }

  std::size_t solid_count() const noexcept;
  std::size_t pore_count() const noexcept { return cell_count() - solid_count(); }

  friend bool operator==(const BinaryGeometry&, const BinaryGeometry&) = default;

 private:
  GridSize size_;
  std::vector<std::uint8_t> solid_;
};

// Draws n_grains centers uniformly over the periodic domain. Circles may
// overlap and wrap across the edges.
CirclePack generate_pack(std::uint64_t seed, int n_grains, double diameter, GridSize size);

// Cell (i, j) is solid iff the periodic distance from (i + 0.5, j + 0.5) to
// some center is <= radius.
BinaryGeometry rasterize(const CirclePack& pack);

// Pore-cell fraction.
double porosity(const BinaryGeometry& geom);

// Cyclic shift: cell (x, y) moves to ((x + dx) mod W, (y + dy) mod H).
BinaryGeometry shifted(const BinaryGeometry& geom, int dx, int dy);
// Row reversal (mirror about the horizontal mid-line).
BinaryGeometry mirrored_y(const BinaryGeometry& geom);
// Quarter turn taking lattice direction (a, b) to (-b, a); the result is H x W.
BinaryGeometry rotated90(const BinaryGeometry& geom);

// 8-bit grayscale PNG, 0 = solid, 255 = pore.
void save_geometry(const BinaryGeometry& geom, const std::filesystem::path& path);
BinaryGeometry load_geometry(const std::filesystem::path& path);

nlohmann::json pack_sidecar(const CirclePack& pack, int n_grains, double diameter);

}  // namespace porelbm
