#include "porelbm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "porelbm/error.hpp"
#include "porelbm/steady_flow.hpp"

namespace porelbm {

ScalarField to_scalar_field(GridSize size, std::span<const float> values) {
  if (values.size() != static_cast<std::size_t>(size.width) * size.height) {
    throw ShapeError("field size does not match its dimensions");
  }
  return {size, std::vector<double>(values.begin(), values.end())};
}

ScalarField error_map(const ScalarField& pred, const ScalarField& truth) {
  if (!(pred.size == truth.size) || pred.values.size() != truth.values.size()) {
    throw ShapeError("prediction and truth dimensions differ");
  }
  ScalarField e{truth.size, std::vector<double>(truth.values.size())};
  for (std::size_t k = 0; k < e.values.size(); ++k) e.values[k] = 100.0 * std::abs(pred.values[k] - truth.values[k]);
  return e;
}

std::uint64_t ErrorHistogram::total() const { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }

ErrorHistogram error_histogram(std::span<const ScalarField> maps) {
  ErrorHistogram h;
  for (const auto& m : maps) {
    for (const double e : m.values) {
      const int bin = e >= 100.0 ? ErrorHistogram::kRegularBins
                                 : std::clamp(static_cast<int>(e / ErrorHistogram::kBinWidth), 0,
                                              ErrorHistogram::kRegularBins - 1);
      ++h.counts[static_cast<std::size_t>(bin)];
    }
  }
  return h;
}

Profile profile_extract(const ScalarField& field, ProfileAxis axis, int index) {
  const int limit = axis == ProfileAxis::vertical ? field.size.width : field.size.height;
  if (index < 0 || index >= limit) throw ParameterError("profile index out of range");
  Profile p;
  p.axis = axis;
  p.index = index;
  const int n = axis == ProfileAxis::vertical ? field.size.height : field.size.width;
  for (int t = 0; t < n; ++t) {
    p.coords.push_back(t);
    p.values.push_back(axis == ProfileAxis::vertical ? field.at(index, t) : field.at(t, index));
  }
  return p;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("fit inputs differ in length");
  if (x.size() < 2) throw ParameterError("a line fit needs at least two points");
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = x[k] - mx, dy = y[k] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw DegenerateRangeError("all x values coincide; slope undefined");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - (fit.intercept + fit.slope * x[k]);
    ss_res += r * r;
  }
  fit.r_squared = syy == 0.0 ? (ss_res == 0.0 ? 1.0 : 0.0) : 1.0 - ss_res / syy;
  return fit;
}

CrossPlotData cross_plot_data(std::span<const ScalarField> pred, std::span<const ScalarField> truth,
                              const VelocityRange& range, const PermeabilityConstants& constants,
                              std::span<const double> rho_mean) {
  if (pred.size() != truth.size() || rho_mean.size() != truth.size()) {
    throw ParameterError("prediction, truth and density lists differ in length");
  }
  if (truth.empty()) throw ParameterError("no samples to cross-plot");
  range.validate();
  if (constants.force_x == 0.0) throw UndefinedPermeabilityError("manifest force_x is zero");
  const double nu = lattice_viscosity(constants.tau);

  auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); };
  CrossPlotData d;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (!(pred[k].size == truth[k].size)) throw ShapeError("prediction and truth dimensions differ");
    const double tn = mean(truth[k].values), pn = mean(pred[k].values);
    d.truth_mean_norm.push_back(tn);
    d.pred_mean_norm.push_back(pn);
    // The map is affine, so the mean of denormalized values equals the
    // denormalized mean.
    const double tu = denormalize(tn, range), pu = denormalize(pn, range);
    d.truth_mean_ux.push_back(tu);
    d.pred_mean_ux.push_back(pu);
    d.truth_k.push_back(rho_mean[k] * nu * tu / constants.force_x);
    d.pred_k.push_back(rho_mean[k] * nu * pu / constants.force_x);
  }
  if (truth.size() >= 2) {
    d.velocity_fit = fit_line(d.truth_mean_ux, d.pred_mean_ux);
    d.permeability_fit = fit_line(d.truth_k, d.pred_k);
  } else {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    d.velocity_fit = d.permeability_fit = {nan, nan, nan};
  }
  return d;
}

SampleStats sample_stats(std::string id, const ScalarField& error) {
  if (error.values.empty()) throw ParameterError("empty error map");
  SampleStats s;
  s.id = std::move(id);
  std::size_t within = 0;
  double sum = 0.0;
  for (const double e : error.values) {
    s.max_abs_error = std::max(s.max_abs_error, e);
    sum += e;
    if (e <= 20.0) ++within;
  }
  const auto n = static_cast<double>(error.values.size());
  s.mean_abs_error = sum / n;
  s.frac_within_20 = static_cast<double>(within) / n;
  return s;
}

}  // namespace porelbm
