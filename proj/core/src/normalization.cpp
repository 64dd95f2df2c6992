#include "porelbm/normalization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "porelbm/error.hpp"

namespace porelbm {

void VelocityRange::validate() const {
  if (!std::isfinite(v_min) || !std::isfinite(v_max) || !(v_min < v_max)) {
    throw DegenerateRangeError("normalization range needs v_min < v_max");
  }
}

double normalize(double v, const VelocityRange& range) {
  range.validate();
  return (v - range.v_min) / (range.v_max - range.v_min);
}

double denormalize(double n, const VelocityRange& range) {
  range.validate();
  return range.v_min + n * (range.v_max - range.v_min);
}

std::vector<float> normalize(std::span<const float> values, const VelocityRange& range) {
  range.validate();
  const double span = range.v_max - range.v_min;
  std::vector<float> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [&](float v) { return static_cast<float>((v - range.v_min) / span); });
  return out;
}

std::vector<double> denormalize(std::span<const float> values, const VelocityRange& range) {
  range.validate();
  const double span = range.v_max - range.v_min;
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [&](float n) { return range.v_min + n * span; });
  return out;
}

VelocityRange minmax_over(std::span<const std::vector<float>> fields) {
  VelocityRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& f : fields) {
    for (const float v : f) {
      r.v_min = std::min(r.v_min, static_cast<double>(v));
      r.v_max = std::max(r.v_max, static_cast<double>(v));
    }
  }
  if (!(r.v_min < r.v_max)) throw DegenerateRangeError("velocity pool has a constant value (or is empty)");
  return r;
}

}  // namespace porelbm
