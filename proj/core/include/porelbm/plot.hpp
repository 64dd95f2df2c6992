#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "porelbm/evaluation.hpp"
#include "porelbm/image_io.hpp"

namespace porelbm::plot {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kBlack{0, 0, 0};
inline constexpr Rgb kGray{160, 160, 160};
inline constexpr Rgb kBlue{31, 119, 180};
inline constexpr Rgb kOrange{255, 127, 14};
inline constexpr Rgb kRed{214, 39, 40};

// Perceptually ordered map of t in [0, 1] (clamped) to RGB.
Rgb colormap(double t);

// RGB raster with a few drawing primitives. No text.
class Canvas {
 public:
  Canvas(int width, int height, Rgb background = kWhite);

  int width() const noexcept { return image_.width; }
  int height() const noexcept { return image_.height; }

  void set(int x, int y, Rgb c);
  void fill_rect(int x0, int y0, int x1, int y1, Rgb c);
  void frame(int x0, int y0, int x1, int y1, Rgb c);
  void line(int x0, int y0, int x1, int y1, Rgb c);
  void marker(int x, int y, int radius, Rgb c);
  // Field drawn at 1:1 scale with its top-left at (x0, y0), values mapped
  // through colormap((v - lo) / (hi - lo)).
  void heatmap(int x0, int y0, const ScalarField& field, double lo, double hi);

  const Image& image() const noexcept { return image_; }

 private:
  Image image_;
};

// Maps a data interval onto a pixel interval (pixel axis may be reversed).
struct Axis {
  double lo, hi;
  int px_lo, px_hi;
  int operator()(double v) const;
};

}  // namespace porelbm::plot
