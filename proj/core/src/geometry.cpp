#include "porelbm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "porelbm/error.hpp"
#include "porelbm/image_io.hpp"
#include "porelbm/rng.hpp"

namespace porelbm {

BinaryGeometry::BinaryGeometry(GridSize size, std::vector<std::uint8_t> solid)
    : size_(size), solid_(std::move(solid)) {
  if (size.width <= 0 || size.height <= 0) throw ParameterError("geometry dimensions must be positive");
  if (solid_.size() != static_cast<std::size_t>(size.width) * size.height) {
    throw ParameterError("geometry mask size does not match dimensions");
  }
  for (auto& v : solid_) v = v ? 1 : 0;
}

BinaryGeometry BinaryGeometry::all_pore(GridSize size) {
  return BinaryGeometry(size, std::vector<std::uint8_t>(static_cast<std::size_t>(size.width) * size.height, 0));
}

BinaryGeometry BinaryGeometry::all_solid(GridSize size) {
  return BinaryGeometry(size, std::vector<std::uint8_t>(static_cast<std::size_t>(size.width) * size.height, 1));
}

std::size_t BinaryGeometry::solid_count() const noexcept {
  return static_cast<std::size_t>(std::count(solid_.begin(), solid_.end(), std::uint8_t{1}));
}

CirclePack generate_pack(std::uint64_t seed, int n_grains, double diameter, GridSize size) {
  if (n_grains < 1) throw ParameterError("n_grains must be >= 1");
  if (!(diameter > 0.0)) throw ParameterError("diameter must be > 0");
  if (size.width <= 0 || size.height <= 0) throw ParameterError("domain size must be positive");
  if (size.width < diameter || size.height < diameter) {
    throw ParameterError("domain must be at least one grain diameter wide");
  }
  Rng rng(seed);
  CirclePack pack;
  pack.radius = diameter / 2.0;
  pack.size = size;
  pack.seed = seed;
  pack.centers.reserve(static_cast<std::size_t>(n_grains));
  for (int k = 0; k < n_grains; ++k) {
    const double x = uniform01(rng) * size.width;
    const double y = uniform01(rng) * size.height;
    pack.centers.push_back({x, y});
  }
  return pack;
}

BinaryGeometry rasterize(const CirclePack& pack) {
  const auto [w, h] = pack.size;
  if (w <= 0 || h <= 0) throw ParameterError("pack has empty domain");
  if (!(pack.radius > 0.0)) throw ParameterError("pack radius must be > 0");
  if (pack.centers.empty()) throw ParameterError("pack has no circles");

  auto geom = BinaryGeometry::all_pore(pack.size);
  const double r2 = pack.radius * pack.radius;
  // Minimum-image distance on a ring of length n.
  auto wrap_delta = [](double d, int n) {
    d = std::fmod(d, static_cast<double>(n));
    if (d > 0.5 * n) d -= n;
    if (d < -0.5 * n) d += n;
    return d;
  };
  for (const auto& c : pack.centers) {
    if (!(c.x >= 0.0 && c.x < w && c.y >= 0.0 && c.y < h)) {
      throw ParameterError("circle center outside the domain");
    }
    // Scan the bounding box, clamped to one period per axis.
    const int span_x = std::min(w, 2 * static_cast<int>(std::ceil(pack.radius)) + 2);
    const int span_y = std::min(h, 2 * static_cast<int>(std::ceil(pack.radius)) + 2);
    const int x0 = static_cast<int>(std::floor(c.x)) - span_x / 2;
    const int y0 = static_cast<int>(std::floor(c.y)) - span_y / 2;
    for (int jj = 0; jj < span_y; ++jj) {
      const int j = ((y0 + jj) % h + h) % h;
      const double dy = wrap_delta(j + 0.5 - c.y, h);
      for (int ii = 0; ii < span_x; ++ii) {
        const int i = ((x0 + ii) % w + w) % w;
        const double dx = wrap_delta(i + 0.5 - c.x, w);
        if (dx * dx + dy * dy <= r2) geom.set_solid(i, j, true);
      }
    }
  }
  return geom;
}

double porosity(const BinaryGeometry& geom) {
  if (geom.cell_count() == 0) throw ParameterError("empty geometry");
  return static_cast<double>(geom.pore_count()) / static_cast<double>(geom.cell_count());
}

BinaryGeometry shifted(const BinaryGeometry& geom, int dx, int dy) {
  const int w = geom.width(), h = geom.height();
  auto out = BinaryGeometry::all_pore(geom.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out.set_solid(((x + dx) % w + w) % w, ((y + dy) % h + h) % h, geom.is_solid(x, y));
    }
  }
  return out;
}

BinaryGeometry mirrored_y(const BinaryGeometry& geom) {
  const int w = geom.width(), h = geom.height();
  auto out = BinaryGeometry::all_pore(geom.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out.set_solid(x, h - 1 - y, geom.is_solid(x, y));
  }
  return out;
}

BinaryGeometry rotated90(const BinaryGeometry& geom) {
  const int w = geom.width(), h = geom.height();
  auto out = BinaryGeometry::all_pore({h, w});
  // old (X, Y) -> new (h - 1 - Y, X)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out.set_solid(h - 1 - y, x, geom.is_solid(x, y));
  }
  return out;
}

void save_geometry(const BinaryGeometry& geom, const std::filesystem::path& path) {
  Image img;
  img.width = geom.width();
  img.height = geom.height();
  img.channels = 1;
  img.pixels.resize(geom.cell_count());
  const auto mask = geom.mask();
  std::transform(mask.begin(), mask.end(), img.pixels.begin(),
                 [](std::uint8_t s) { return s ? std::uint8_t{0} : std::uint8_t{255}; });
  write_png(path, img);
}

BinaryGeometry load_geometry(const std::filesystem::path& path) {
  const Image img = read_png(path);
  if (img.channels != 1) throw FormatError("geometry image must be single-channel: " + path.string());
  std::vector<std::uint8_t> solid(img.pixels.size());
  for (std::size_t k = 0; k < img.pixels.size(); ++k) {
    const auto v = img.pixels[k];
    if (v != 0 && v != 255) {
      throw FormatError("non-binary pixel value " + std::to_string(v) + " in " + path.string());
    }
    solid[k] = v == 0 ? 1 : 0;
  }
  return BinaryGeometry({img.width, img.height}, std::move(solid));
}

nlohmann::json pack_sidecar(const CirclePack& pack, int n_grains, double diameter) {
  nlohmann::json centers = nlohmann::json::array();
  for (const auto& c : pack.centers) centers.push_back({c.x, c.y});
  return {
      {"seed", pack.seed},
      {"n_grains", n_grains},
      {"diameter", diameter},
      {"size", {pack.size.width, pack.size.height}},
      {"overlap_allowed", true},
      {"rng", "mt19937_64"},
      {"centers", centers},
  };
}

}  // namespace porelbm
