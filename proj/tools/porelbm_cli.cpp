// porelbm: generate -> simulate -> dataset -> (external train/predict) -> evaluate

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <iostream>
#include <optional>

#include "porelbm/error.hpp"
#include "porelbm/pipeline.hpp"

namespace fs = std::filesystem;
using namespace porelbm;

namespace {

int run_generate(const GenerateOptions& opts) {
  const auto files = cmd_generate(opts);
  fmt::print("generated {} geometries in {}\n", files.size(), opts.out_dir.string());
  return 0;
}

int run_simulate(SimulateOptions opts, const std::string& pattern, bool allow_quarantine) {
  opts.geometries = expand_glob(pattern);
  const auto summary = cmd_simulate(opts);
  fmt::print("simulated {} geometries: {} converged, {} quarantined\n", opts.geometries.size(),
             summary.succeeded.size(), summary.quarantined.size());
  for (const auto& q : summary.quarantined) fmt::print(stderr, "quarantined {}: {}\n", q.id, q.reason);
  return summary.quarantined.empty() || allow_quarantine ? 0 : 3;
}

int run_dataset(const DatasetOptions& opts) {
  const auto m = cmd_dataset(opts);
  const auto c = m.counts();
  fmt::print("manifest {}: {} train / {} val / {} test, u_x range [{:.6g}, {:.6g}], zero -> {:.4f}\n",
             opts.out_manifest.string(), c.train, c.val, c.test, m.range.v_min, m.range.v_max, m.range.zero_level());
  return 0;
}

int run_export(const ExportOptions& opts) {
  const auto files = cmd_export_targets(opts);
  fmt::print("wrote {} normalized targets to {}\n", files.size(), opts.out_dir.string());
  return 0;
}

int run_evaluate(const EvaluateOptions& opts) {
  const auto r = cmd_evaluate(opts);
  double within = 0.0;
  for (const auto& s : r.samples) within += s.frac_within_20;
  fmt::print("evaluated {} samples: mean fraction within 20 points {:.4f}, mean-u_x slope {:.6f} R^2 {:.6f}\n",
             r.samples.size(), within / static_cast<double>(r.samples.size()), r.cross.velocity_fit.slope,
             r.cross.velocity_fit.r_squared);
  return 0;
}

std::optional<Split> parse_split(const std::string& s) {
  if (s == "all") return std::nullopt;
  return split_from_string(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pore-scale lattice Boltzmann dataset pipeline"};
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Generate random periodic circle-pack geometries");
  generate->add_option("--count", gen.count, "Number of geometries")->capture_default_str();
  int size = 256;
  generate->add_option("--size", size, "Image width and height in pixels")->capture_default_str();
  generate->add_option("--grains", gen.grains, "Circles per image")->capture_default_str();
  generate->add_option("--diameter", gen.diameter, "Circle diameter in pixels")->capture_default_str();
  generate->add_option("--seed", gen.seed, "Seed of the first image; image i uses seed + i")->capture_default_str();
  generate->add_option("--out", gen.out_dir, "Output directory")->required();

  SimulateOptions sim;
  sim.workers = default_worker_count();
  std::string sim_inputs;
  bool allow_quarantine = false;
  auto* simulate = app.add_subcommand("simulate", "Run each geometry to steady state");
  simulate->add_option("--inputs", sim_inputs, "Geometry PNG, directory or glob (quote it)")->required();
  simulate->add_option("--out", sim.out_dir, "Output directory")->required();
  simulate->add_option("--tau", sim.solver.tau, "Relaxation time")->capture_default_str();
  simulate->add_option("--force-x", sim.solver.force.x, "Body force, x")->capture_default_str();
  simulate->add_option("--force-y", sim.solver.force.y, "Body force, y")->capture_default_str();
  simulate->add_option("--max-steps", sim.solver.max_steps, "Step budget")->capture_default_str();
  simulate->add_option("--check-interval", sim.solver.check_interval, "Steps between energy checks")
      ->capture_default_str();
  simulate->add_option("--rel-tol", sim.solver.rel_tol, "Relative kinetic-energy tolerance")->capture_default_str();
  simulate->add_option("--ke-window", sim.solver.ke_window, "Checkpoints in the convergence window")
      ->capture_default_str();
  simulate->add_option("--workers", sim.workers, "Parallel simulations (env PORELBM_WORKERS)")->capture_default_str();
  simulate->add_flag("--allow-quarantine", allow_quarantine, "Exit 0 even when samples were quarantined");

  DatasetOptions ds;
  auto* dataset = app.add_subcommand("dataset", "Build a split manifest with normalization constants");
  dataset->add_option("--sim-dir", ds.sim_dir, "Output directory of simulate")->required();
  dataset->add_option("--train", ds.train_frac, "Training fraction")->capture_default_str();
  dataset->add_option("--val", ds.val_frac, "Validation fraction")->capture_default_str();
  dataset->add_option("--split-seed", ds.split_seed, "Shuffle seed")->capture_default_str();
  dataset->add_option("--out", ds.out_manifest, "Manifest JSON path")->required();

  ExportOptions ex;
  std::string ex_split = "all";
  auto* export_targets = app.add_subcommand("export-targets", "Write normalized u_x targets as grid files");
  export_targets->add_option("--manifest", ex.manifest, "Manifest JSON")->required();
  export_targets->add_option("--split", ex_split, "train, val, test or all")->capture_default_str();
  export_targets->add_option("--out", ex.out_dir, "Output directory")->required();

  EvaluateOptions ev;
  std::string ev_split = "test";
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against simulated ground truth");
  evaluate->add_option("--manifest", ev.manifest, "Manifest JSON")->required();
  evaluate->add_option("--predictions", ev.predictions, "Directory of <id>.grid predictions")->required();
  evaluate->add_option("--out", ev.out_dir, "Report directory")->required();
  evaluate->add_option("--split", ev_split, "Split to evaluate")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      gen.size = {size, size};
      return run_generate(gen);
    }
    if (*simulate) return run_simulate(sim, sim_inputs, allow_quarantine);
    if (*dataset) return run_dataset(ds);
    if (*export_targets) {
      ex.split = parse_split(ex_split);
      return run_export(ex);
    }
    if (*evaluate) {
      ev.split = split_from_string(ev_split);
      return run_evaluate(ev);
    }
  } catch (const MissingFileError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
