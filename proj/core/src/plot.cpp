#include "porelbm/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "porelbm/error.hpp"

namespace porelbm::plot {

Rgb colormap(double t) {
  // Control points sampled from viridis.
  static constexpr std::array<Rgb, 9> stops = {{{68, 1, 84},
                                               {71, 44, 122},
                                               {59, 81, 139},
                                               {44, 113, 142},
                                               {33, 144, 141},
                                               {39, 173, 129},
                                               {92, 200, 99},
                                               {170, 220, 50},
                                               {253, 231, 37}}};
  if (!std::isfinite(t)) return kRed;
  t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(t), stops.size() - 2);
  const double f = t - static_cast<double>(i);
  Rgb c{};
  for (int k = 0; k < 3; ++k) {
    c[k] = static_cast<std::uint8_t>(std::lround(stops[i][k] + f * (stops[i + 1][k] - stops[i][k])));
  }
  return c;
}

Canvas::Canvas(int width, int height, Rgb background) {
  if (width <= 0 || height <= 0) throw ParameterError("canvas dimensions must be positive");
  image_.width = width;
  image_.height = height;
  image_.channels = 3;
  image_.pixels.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t k = 0; k < image_.pixels.size(); k += 3) {
    std::copy(background.begin(), background.end(), image_.pixels.begin() + static_cast<std::ptrdiff_t>(k));
  }
}

void Canvas::set(int x, int y, Rgb c) {
  if (x < 0 || y < 0 || x >= image_.width || y >= image_.height) return;
  const std::size_t k = (static_cast<std::size_t>(y) * image_.width + x) * 3;
  std::copy(c.begin(), c.end(), image_.pixels.begin() + static_cast<std::ptrdiff_t>(k));
}

void Canvas::fill_rect(int x0, int y0, int x1, int y1, Rgb c) {
  if (x0 > x1) std::swap(x0, x1);
  if (y0 > y1) std::swap(y0, y1);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) set(x, y, c);
  }
}

void Canvas::frame(int x0, int y0, int x1, int y1, Rgb c) {
  line(x0, y0, x1, y0, c);
  line(x1, y0, x1, y1, c);
  line(x1, y1, x0, y1, c);
  line(x0, y1, x0, y0, c);
}

void Canvas::line(int x0, int y0, int x1, int y1, Rgb c) {
  // Bresenham
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    set(x0, y0, c);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void Canvas::marker(int x, int y, int radius, Rgb c) {
  for (int j = -radius; j <= radius; ++j) {
    for (int i = -radius; i <= radius; ++i) {
      if (i * i + j * j <= radius * radius) set(x + i, y + j, c);
    }
  }
}

void Canvas::heatmap(int x0, int y0, const ScalarField& field, double lo, double hi) {
  const double span = hi > lo ? hi - lo : 1.0;
  for (int y = 0; y < field.size.height; ++y) {
    for (int x = 0; x < field.size.width; ++x) set(x0 + x, y0 + y, colormap((field.at(x, y) - lo) / span));
  }
}

int Axis::operator()(double v) const {
  const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
  return static_cast<int>(std::lround(px_lo + t * (px_hi - px_lo)));
}

}  // namespace porelbm::plot
