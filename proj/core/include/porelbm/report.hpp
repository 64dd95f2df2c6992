#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "porelbm/evaluation.hpp"

namespace porelbm {

// Inputs for one evaluated sample, all normalized fields of equal size.
struct EvaluatedSample {
  std::string id;
  ScalarField geometry;  // 0 = solid, 1 = pore
  ScalarField pred;
  ScalarField truth;
  double rho_mean = 1.0;
};

struct PanelRow {
  std::string id;
  ScalarField geometry, pred, truth, error;
};

struct ProfilePair {
  std::string id;
  Profile truth, pred;
};

struct ErrorReport {
  std::vector<SampleStats> samples;
  ErrorHistogram histogram;
  CrossPlotData cross;
  VelocityRange range;
  PermeabilityConstants constants;
  std::vector<PanelRow> panels;       // first few samples, side-by-side figure
  std::vector<ProfilePair> profiles;  // vertical and horizontal cut of the first sample
};

inline constexpr std::size_t kPanelRows = 4;

ErrorReport build_error_report(const std::vector<EvaluatedSample>& samples, const VelocityRange& range,
                               const PermeabilityConstants& constants);

// Writes per_sample.csv, pairs.csv, histogram.csv, profiles.csv,
// panels.png, histogram.png, cross_plot.png, profiles.png and summary.md.
void render_report(const ErrorReport& report, const std::filesystem::path& out_dir);

}  // namespace porelbm
