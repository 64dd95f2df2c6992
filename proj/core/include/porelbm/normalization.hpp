#pragma once

#include <span>
#include <vector>

namespace porelbm {

// Affine min-max map of u_x onto [0, 1] with dataset-global constants.
struct VelocityRange {
  double v_min = 0.0;
  double v_max = 0.0;

  // Throws DegenerateRangeError unless v_min < v_max (both finite).
  void validate() const;
  // Where physical zero velocity lands after normalization.
  double zero_level() const { return (0.0 - v_min) / (v_max - v_min); }
};

double normalize(double v, const VelocityRange& range);
double denormalize(double n, const VelocityRange& range);

// Values outside [v_min, v_max] map outside [0, 1]; nothing is clipped.
std::vector<float> normalize(std::span<const float> values, const VelocityRange& range);
std::vector<double> denormalize(std::span<const float> values, const VelocityRange& range);

// Exact extrema over several fields; DegenerateRangeError if they coincide.
VelocityRange minmax_over(std::span<const std::vector<float>> fields);

}  // namespace porelbm
