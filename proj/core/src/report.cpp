#include "porelbm/report.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "porelbm/error.hpp"
#include "porelbm/plot.hpp"

namespace fs = std::filesystem;

namespace porelbm {
namespace {

std::string num(double v) { return fmt::format("{:.10g}", v); }

void write_text(const fs::path& path, const std::string& text) {
  try {
    auto out = fmt::output_file(path.string());
    out.print("{}", text);
  } catch (const std::system_error& e) {
    throw IoError("cannot write " + path.string() + ": " + e.what());
  }
}

void draw_panels(const ErrorReport& r, const fs::path& path) {
  constexpr int kMargin = 8;
  int cell_w = 0, cell_h = 0;
  for (const auto& p : r.panels) {
    cell_w = std::max(cell_w, p.truth.size.width);
    cell_h = std::max(cell_h, p.truth.size.height);
  }
  const int rows = static_cast<int>(r.panels.size());
  plot::Canvas canvas(4 * cell_w + 5 * kMargin, rows * cell_h + (rows + 1) * kMargin);
  for (int row = 0; row < rows; ++row) {
    const auto& p = r.panels[static_cast<std::size_t>(row)];
    const int y0 = kMargin + row * (cell_h + kMargin);
    auto x0 = [&](int col) { return kMargin + col * (cell_w + kMargin); };
    // Geometry in gray scale: solid black, pore white.
    for (int y = 0; y < p.geometry.size.height; ++y) {
      for (int x = 0; x < p.geometry.size.width; ++x) {
        canvas.set(x0(0) + x, y0 + y, p.geometry.at(x, y) > 0.5 ? plot::kWhite : plot::kBlack);
      }
    }
    // Prediction and truth share the normalized [0, 1] scale.
    canvas.heatmap(x0(1), y0, p.pred, 0.0, 1.0);
    canvas.heatmap(x0(2), y0, p.truth, 0.0, 1.0);
    canvas.heatmap(x0(3), y0, p.error, 0.0, 50.0);
  }
  write_png(path, canvas.image());
}

void draw_histogram(const ErrorReport& r, const fs::path& path) {
  constexpr int W = 640, H = 400, L = 40, B = 30, T = 20, R = 20;
  plot::Canvas canvas(W, H);
  const auto total = static_cast<double>(r.histogram.total());
  const int n = static_cast<int>(r.histogram.counts.size());
  const plot::Axis ax{0.0, static_cast<double>(n), L, W - R};
  const plot::Axis ay{0.0, 1.0, H - B, T};
  for (int b = 0; b < n; ++b) {
    const double frac = total > 0 ? static_cast<double>(r.histogram.counts[static_cast<std::size_t>(b)]) / total : 0.0;
    canvas.fill_rect(ax(b) + 1, ay(frac), ax(b + 1) - 1, ay(0.0), b < 4 ? plot::kBlue : plot::kOrange);
  }
  // 20-point bound
  canvas.line(ax(4.0), ay(0.0), ax(4.0), ay(1.0), plot::kRed);
  canvas.line(L, H - B, W - R, H - B, plot::kBlack);
  canvas.line(L, H - B, L, T, plot::kBlack);
  write_png(path, canvas.image());
}

void draw_cross_plot(const ErrorReport& r, const fs::path& path) {
  constexpr int S = 500, M = 40;
  plot::Canvas canvas(S, S);
  const auto& x = r.cross.truth_k;
  const auto& y = r.cross.pred_k;
  double lo = std::min(*std::min_element(x.begin(), x.end()), *std::min_element(y.begin(), y.end()));
  double hi = std::max(*std::max_element(x.begin(), x.end()), *std::max_element(y.begin(), y.end()));
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  const plot::Axis ax{lo - pad, hi + pad, M, S - M};
  const plot::Axis ay{lo - pad, hi + pad, S - M, M};
  canvas.frame(M, M, S - M, S - M, plot::kBlack);
  canvas.line(ax(lo - pad), ay(lo - pad), ax(hi + pad), ay(hi + pad), plot::kGray);
  const auto& fit = r.cross.permeability_fit;
  if (std::isfinite(fit.slope)) {
    canvas.line(ax(lo - pad), ay(fit.intercept + fit.slope * (lo - pad)), ax(hi + pad),
                ay(fit.intercept + fit.slope * (hi + pad)), plot::kOrange);
  }
  for (std::size_t k = 0; k < x.size(); ++k) canvas.marker(ax(x[k]), ay(y[k]), 3, plot::kBlue);
  write_png(path, canvas.image());
}

void draw_profiles(const ErrorReport& r, const fs::path& path) {
  constexpr int PW = 480, PH = 320, M = 30;
  plot::Canvas canvas(2 * PW, PH);
  for (std::size_t k = 0; k < r.profiles.size() && k < 2; ++k) {
    const auto& pp = r.profiles[k];
    const int ox = static_cast<int>(k) * PW;
    double lo = 0.0, hi = 1.0;
    for (const auto* prof : {&pp.truth, &pp.pred}) {
      for (const double v : prof->values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    const plot::Axis ax{0.0, static_cast<double>(std::max<std::size_t>(pp.truth.coords.size(), 2) - 1), ox + M, ox + PW - M};
    const plot::Axis ay{lo, hi, PH - M, M};
    canvas.frame(ox + M, M, ox + PW - M, PH - M, plot::kBlack);
    for (const auto& [prof, color] : {std::pair{&pp.truth, plot::kBlue}, std::pair{&pp.pred, plot::kOrange}}) {
      for (std::size_t i = 1; i < prof->values.size(); ++i) {
        canvas.line(ax(prof->coords[i - 1]), ay(prof->values[i - 1]), ax(prof->coords[i]), ay(prof->values[i]), color);
      }
    }
  }
  write_png(path, canvas.image());
}

}  // namespace

ErrorReport build_error_report(const std::vector<EvaluatedSample>& samples, const VelocityRange& range,
                               const PermeabilityConstants& constants) {
  if (samples.empty()) throw ParameterError("no samples to evaluate");
  range.validate();
  ErrorReport r;
  r.range = range;
  r.constants = constants;
  std::vector<ScalarField> errors, preds, truths;
  std::vector<double> rho;
  for (const auto& s : samples) {
    if (!(s.geometry.size == s.truth.size)) throw ShapeError("geometry and truth dimensions differ for " + s.id);
    errors.push_back(error_map(s.pred, s.truth));
    r.samples.push_back(sample_stats(s.id, errors.back()));
    preds.push_back(s.pred);
    truths.push_back(s.truth);
    rho.push_back(s.rho_mean);
    if (r.panels.size() < kPanelRows) r.panels.push_back({s.id, s.geometry, s.pred, s.truth, errors.back()});
  }
  r.histogram = error_histogram(errors);
  r.cross = cross_plot_data(preds, truths, range, constants, rho);

  const auto& first = samples.front();
  const int cx = first.truth.size.width / 2, cy = first.truth.size.height / 2;
  r.profiles.push_back({first.id, profile_extract(first.truth, ProfileAxis::vertical, cx),
                        profile_extract(first.pred, ProfileAxis::vertical, cx)});
  r.profiles.push_back({first.id, profile_extract(first.truth, ProfileAxis::horizontal, cy),
                        profile_extract(first.pred, ProfileAxis::horizontal, cy)});
  return r;
}

void render_report(const ErrorReport& r, const fs::path& out_dir) {
  if (r.samples.empty()) throw ParameterError("empty report; nothing rendered");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  std::string per_sample = "id,max_abs_error_pct,mean_abs_error_pct,frac_within_20\n";
  for (const auto& s : r.samples) {
    per_sample += fmt::format("{},{},{},{}\n", s.id, num(s.max_abs_error), num(s.mean_abs_error), num(s.frac_within_20));
  }
  write_text(out_dir / "per_sample.csv", per_sample);

  std::string pairs =
      "id,truth_mean_norm,pred_mean_norm,truth_mean_ux,pred_mean_ux,truth_permeability_x,pred_permeability_x\n";
  for (std::size_t k = 0; k < r.samples.size(); ++k) {
    pairs += fmt::format("{},{},{},{},{},{},{}\n", r.samples[k].id, num(r.cross.truth_mean_norm[k]),
                         num(r.cross.pred_mean_norm[k]), num(r.cross.truth_mean_ux[k]), num(r.cross.pred_mean_ux[k]),
                         num(r.cross.truth_k[k]), num(r.cross.pred_k[k]));
  }
  write_text(out_dir / "pairs.csv", pairs);

  const auto total = r.histogram.total();
  std::string hist = "bin_lo_pct,bin_hi_pct,count,fraction\n";
  for (std::size_t b = 0; b < r.histogram.counts.size(); ++b) {
    const double lo = r.histogram.lower_edge(static_cast<int>(b));
    const std::string hi = b + 1 < r.histogram.counts.size() ? num(lo + ErrorHistogram::kBinWidth) : "inf";
    hist += fmt::format("{},{},{},{}\n", num(lo), hi, r.histogram.counts[b],
                        num(static_cast<double>(r.histogram.counts[b]) / static_cast<double>(total)));
  }
  write_text(out_dir / "histogram.csv", hist);

  std::string prof = "id,axis,index,coord,truth,pred\n";
  for (const auto& pp : r.profiles) {
    const char* axis = pp.truth.axis == ProfileAxis::vertical ? "vertical" : "horizontal";
    for (std::size_t i = 0; i < pp.truth.coords.size(); ++i) {
      prof += fmt::format("{},{},{},{},{},{}\n", pp.id, axis, pp.truth.index, pp.truth.coords[i],
                          num(pp.truth.values[i]), num(pp.pred.values[i]));
    }
  }
  write_text(out_dir / "profiles.csv", prof);

  draw_panels(r, out_dir / "panels.png");
  draw_histogram(r, out_dir / "histogram.png");
  draw_cross_plot(r, out_dir / "cross_plot.png");
  draw_profiles(r, out_dir / "profiles.png");

  double within = 0.0, mae = 0.0;
  for (const auto& s : r.samples) {
    within += s.frac_within_20;
    mae += s.mean_abs_error;
  }
  const auto n = static_cast<double>(r.samples.size());
  std::string md;
  md += "# Evaluation summary\n\n";
  md += fmt::format("- samples: {}\n", r.samples.size());
  md += fmt::format("- pixels: {}\n", total);
  md += fmt::format("- normalization range (u_x, lattice units): [{}, {}]\n", num(r.range.v_min), num(r.range.v_max));
  md += fmt::format("- zero velocity maps to: {}\n", num(r.range.zero_level()));
  md += fmt::format("- mean fraction of pixels with error <= 20 points: {}\n", num(within / n));
  md += fmt::format("- mean absolute error (percent of range): {}\n", num(mae / n));
  md += fmt::format("- mean u_x fit (pred vs truth): slope {}, intercept {}, R^2 {}\n", num(r.cross.velocity_fit.slope),
                    num(r.cross.velocity_fit.intercept), num(r.cross.velocity_fit.r_squared));
  md += fmt::format("- permeability fit (pred vs truth): slope {}, intercept {}, R^2 {}\n",
                    num(r.cross.permeability_fit.slope), num(r.cross.permeability_fit.intercept),
                    num(r.cross.permeability_fit.r_squared));
  md += fmt::format("- solver constants: tau {}, force_x {}\n", num(r.constants.tau), num(r.constants.force_x));
  md += "\nErrors are |pred - truth| in percent of the global normalization range. Predictions are not clipped.\n";
  md += "Panels (panels.png, columns geometry / prediction / truth / error) share the normalized [0, 1] color scale;\n";
  md += "the error column spans 0-50 points.\n";
  write_text(out_dir / "summary.md", md);
}

}  // namespace porelbm
