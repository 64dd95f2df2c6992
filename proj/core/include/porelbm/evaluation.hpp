#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "porelbm/geometry.hpp"
#include "porelbm/normalization.hpp"

namespace porelbm {

struct ScalarField {
  GridSize size;
  std::vector<double> values;  // row-major

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * size.width + x]; }
};

ScalarField to_scalar_field(GridSize size, std::span<const float> values);

// e = 100 |pred - truth|, both in normalized units, i.e. percent of the
// global velocity range.
ScalarField error_map(const ScalarField& pred, const ScalarField& truth);

// Bins [0,5), [5,10), ..., [95,100) plus a final [100, inf) overflow bin.
struct ErrorHistogram {
  static constexpr double kBinWidth = 5.0;
  static constexpr int kRegularBins = 20;

  std::vector<std::uint64_t> counts = std::vector<std::uint64_t>(kRegularBins + 1, 0);

  double lower_edge(int bin) const { return bin * kBinWidth; }
  std::uint64_t total() const;
};

ErrorHistogram error_histogram(std::span<const ScalarField> maps);

enum class ProfileAxis {
  vertical,   // one column x = index, sampled along y
  horizontal  // one row y = index, sampled along x
};

struct Profile {
  ProfileAxis axis = ProfileAxis::vertical;
  int index = 0;
  std::vector<int> coords;
  std::vector<double> values;
};

Profile profile_extract(const ScalarField& field, ProfileAxis axis, int index);

// Ordinary least squares y = intercept + slope * x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

// Solver constants needed to turn a mean velocity into a permeability.
struct PermeabilityConstants {
  double tau = 1.0;
  double force_x = 0.0;
};

struct CrossPlotData {
  std::vector<double> truth_mean_norm, pred_mean_norm;
  std::vector<double> truth_mean_ux, pred_mean_ux;  // lattice units, superficial
  std::vector<double> truth_k, pred_k;              // lattice units^2
  LinearFit velocity_fit;                           // pred vs truth, denormalized means
  LinearFit permeability_fit;
};

// rho_mean holds the mean pore density per sample (for mu = rho * nu).
CrossPlotData cross_plot_data(std::span<const ScalarField> pred, std::span<const ScalarField> truth,
                              const VelocityRange& range, const PermeabilityConstants& constants,
                              std::span<const double> rho_mean);

struct SampleStats {
  std::string id;
  double max_abs_error = 0.0;   // percent of range
  double mean_abs_error = 0.0;  // percent of range
  double frac_within_20 = 0.0;  // fraction of pixels with error <= 20
};

SampleStats sample_stats(std::string id, const ScalarField& error);

}  // namespace porelbm
