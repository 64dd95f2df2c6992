#include "porelbm/pipeline.hpp"

#include <fnmatch.h>
#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include "porelbm/error.hpp"
#include "porelbm/grid_file.hpp"

namespace fs = std::filesystem;

namespace porelbm {
namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

nlohmann::json read_json_if_present(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return nullptr;
  return nlohmann::json::parse(in, nullptr, false);
}

std::string path_string(const fs::path& p) { return fs::absolute(p).lexically_normal().generic_string(); }

struct SampleOutcome {
  bool ok = false;
  std::string reason;
  double seconds = 0.0;
  std::int64_t steps = 0;
};

SampleOutcome simulate_one(const fs::path& geometry_path, const SimulationConfig& cfg, const fs::path& out_dir) {
  SampleOutcome outcome;
  const std::string id = geometry_path.stem().string();
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const BinaryGeometry geom = load_geometry(geometry_path);
    const SteadyResult res = run_to_steady(geom, cfg);
    outcome.steps = res.steps_run;
    if (!res.converged) {
      outcome.reason = fmt::format("not converged within {} steps", cfg.max_steps);
    } else {
      Grid vel(static_cast<std::uint32_t>(geom.width()), static_cast<std::uint32_t>(geom.height()), 2);
      for (std::size_t k = 0; k < geom.cell_count(); ++k) {
        vel.data[2 * k] = static_cast<float>(res.field.ux[k]);
        vel.data[2 * k + 1] = static_cast<float>(res.field.uy[k]);
      }
      write_grid(out_dir / (id + kVelocitySuffix), vel);

      std::string ke = "step,kinetic_energy\n";
      for (const auto& s : res.ke_history) ke += fmt::format("{},{:.17g}\n", s.step, s.energy);
      std::ofstream(out_dir / (id + ".ke.csv"), std::ios::trunc) << ke;

      const auto sidecar = read_json_if_present(fs::path(geometry_path).replace_extension(".json"));
      SampleRecord rec;
      rec.id = id;
      const fs::path rel = fs::absolute(geometry_path).lexically_normal().lexically_relative(fs::absolute(out_dir).lexically_normal());
      rec.geometry = rel.empty() ? fs::absolute(geometry_path) : rel;
      rec.velocity = id + kVelocitySuffix;
      rec.seed = sidecar.is_object() && sidecar.contains("seed") ? sidecar["seed"].get<std::uint64_t>() : 0;
      rec.porosity = porosity(geom);
      rec.tau = cfg.tau;
      rec.force_x = cfg.force.x;
      rec.force_y = cfg.force.y;
      rec.steps_run = res.steps_run;
      rec.converged = res.converged;
      rec.ke_final = res.ke_history.back().energy;
      rec.permeability_x = res.permeability_x;
      rec.mean_ux = res.mean_u.x;
      rec.mean_uy = res.mean_u.y;
      rec.mean_pore_rho = res.mean_pore_rho;
      write_json(out_dir / (id + kRecordSuffix), rec.to_json());
      outcome.ok = true;
    }
  } catch (const UnboundedAccelerationError& e) {
    outcome.reason = std::string("unbounded acceleration: ") + e.what();
  } catch (const NoFlowDomainError& e) {
    outcome.reason = std::string("no flow domain: ") + e.what();
  } catch (const InstabilityError& e) {
    outcome.reason = std::string("instability: ") + e.what();
  } catch (const std::exception& e) {
    outcome.reason = std::string("error: ") + e.what();
  }
  outcome.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return outcome;
}

}  // namespace

int default_worker_count() {
  if (const char* env = std::getenv("PORELBM_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<fs::path> expand_glob(const std::string& pattern) {
  std::vector<fs::path> out;
  const fs::path p(pattern);
  if (fs::is_directory(p)) {
    for (const auto& de : fs::directory_iterator(p)) {
      if (de.is_regular_file() && de.path().extension() == ".png") out.push_back(de.path());
    }
  } else if (pattern.find_first_of("*?[") == std::string::npos) {
    if (!fs::exists(p)) throw MissingFileError("no such file: " + pattern);
    out.push_back(p);
  } else {
    const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    const std::string name_pattern = p.filename().string();
    if (!fs::is_directory(dir)) throw MissingFileError("no such directory: " + dir.string());
    for (const auto& de : fs::directory_iterator(dir)) {
      if (de.is_regular_file() && fnmatch(name_pattern.c_str(), de.path().filename().c_str(), 0) == 0) {
        out.push_back(de.path());
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<fs::path> cmd_generate(const GenerateOptions& opts) {
  if (opts.count == 0) throw ParameterError("count must be >= 1");
  ensure_dir(opts.out_dir);
  write_json(opts.out_dir / "generate_config.json",
             {{"command", "generate"},
              {"count", opts.count},
              {"size", {opts.size.width, opts.size.height}},
              {"grains", opts.grains},
              {"diameter", opts.diameter},
              {"seed", opts.seed},
              {"seed_rule", "seed + index"},
              {"rng", "mt19937_64"},
              {"overlap_allowed", true},
              {"out_dir", path_string(opts.out_dir)}});
  std::vector<fs::path> files;
  for (std::size_t i = 0; i < opts.count; ++i) {
    const std::uint64_t seed = opts.seed + i;
    const CirclePack pack = generate_pack(seed, opts.grains, opts.diameter, opts.size);
    const std::string id = fmt::format("sample_{:06d}", i);
    const fs::path png = opts.out_dir / (id + ".png");
    save_geometry(rasterize(pack), png);
    write_json(opts.out_dir / (id + ".json"), pack_sidecar(pack, opts.grains, opts.diameter));
    files.push_back(png);
  }
  return files;
}

SimulateSummary cmd_simulate(const SimulateOptions& opts) {
  opts.solver.validate();
  if (opts.geometries.empty()) throw MissingFileError("no geometry files to simulate");
  ensure_dir(opts.out_dir);
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& g : opts.geometries) inputs.push_back(path_string(g));
  write_json(opts.out_dir / "simulate_config.json",
             {{"command", "simulate"},
              {"solver", opts.solver.to_json()},
              {"workers", opts.workers},
              {"geometries", inputs},
              {"out_dir", path_string(opts.out_dir)}});

  const std::size_t n = opts.geometries.size();
  std::vector<SampleOutcome> outcomes(n);
  std::atomic<std::size_t> next{0};
  const int workers = std::clamp<int>(opts.workers, 1, static_cast<int>(n));
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          outcomes[i] = simulate_one(opts.geometries[i], opts.solver, opts.out_dir);
        }
      });
    }
  }

  SimulateSummary summary;
  nlohmann::json quarantine = nlohmann::json::array();
  std::string timing = "id,seconds,steps,ok\n";
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = opts.geometries[i].stem().string();
    timing += fmt::format("{},{:.3f},{},{}\n", id, outcomes[i].seconds, outcomes[i].steps, outcomes[i].ok ? 1 : 0);
    if (outcomes[i].ok) {
      summary.succeeded.push_back(id);
    } else {
      summary.quarantined.push_back({id, opts.geometries[i], outcomes[i].reason});
      quarantine.push_back({{"id", id}, {"geometry", path_string(opts.geometries[i])}, {"reason", outcomes[i].reason}});
    }
  }
  write_json(opts.out_dir / "quarantine.json", quarantine);
  std::ofstream(opts.out_dir / "timing.csv", std::ios::trunc) << timing;
  return summary;
}

DatasetManifest cmd_dataset(const DatasetOptions& opts) {
  const fs::path manifest_dir = fs::absolute(opts.out_manifest).parent_path();
  ensure_dir(manifest_dir);
  DatasetManifest m = build_manifest(opts.sim_dir, opts.train_frac, opts.val_frac, opts.split_seed, manifest_dir);
  m.save(opts.out_manifest);
  write_json(manifest_dir / "dataset_config.json",
             {{"command", "dataset"},
              {"sim_dir", path_string(opts.sim_dir)},
              {"train_frac", opts.train_frac},
              {"val_frac", opts.val_frac},
              {"split_seed", opts.split_seed},
              {"manifest", path_string(opts.out_manifest)}});
  return m;
}

std::vector<fs::path> cmd_export_targets(const ExportOptions& opts) {
  const DatasetManifest m = DatasetManifest::load(opts.manifest);
  ensure_dir(opts.out_dir);
  write_json(opts.out_dir / "export_config.json",
             {{"command", "export-targets"},
              {"manifest", path_string(opts.manifest)},
              {"split", opts.split ? to_string(*opts.split) : "all"},
              {"out_dir", path_string(opts.out_dir)}});
  std::vector<fs::path> files;
  for (const auto& e : m.samples) {
    if (opts.split && e.split != *opts.split) continue;
    const NormalizedSample s = load_normalized_sample(m, e);
    Grid g(static_cast<std::uint32_t>(s.size.width), static_cast<std::uint32_t>(s.size.height), 1);
    g.data = s.target;
    const fs::path out = opts.out_dir / (e.id + ".grid");
    write_grid(out, g);
    files.push_back(out);
  }
  return files;
}

ErrorReport cmd_evaluate(const EvaluateOptions& opts) {
  const DatasetManifest m = DatasetManifest::load(opts.manifest);
  const auto entries = m.select(opts.split);
  if (entries.empty()) throw ParameterError("split '" + to_string(opts.split) + "' has no samples");
  std::string missing;
  for (const auto* e : entries) {
    const fs::path p = opts.predictions / (e->id + ".grid");
    if (!fs::is_regular_file(p)) missing += "\n  " + e->id + ": " + p.string();
  }
  if (!missing.empty()) throw MissingFileError("missing predictions:" + missing);

  std::vector<EvaluatedSample> samples;
  for (const auto* e : entries) {
    const NormalizedSample truth = load_normalized_sample(m, *e);
    const Grid pred = read_grid(opts.predictions / (e->id + ".grid"));
    if (pred.width != static_cast<std::uint32_t>(truth.size.width) ||
        pred.height != static_cast<std::uint32_t>(truth.size.height)) {
      throw ShapeError("prediction for " + e->id + " has the wrong dimensions");
    }
    samples.push_back({e->id, to_scalar_field(truth.size, truth.geometry), to_scalar_field(truth.size, pred.channel(0)),
                       to_scalar_field(truth.size, truth.target), e->mean_pore_rho});
  }
  ErrorReport report = build_error_report(samples, m.range, {m.tau(), m.force_x()});
  render_report(report, opts.out_dir);
  write_json(opts.out_dir / "evaluate_config.json",
             {{"command", "evaluate"},
              {"manifest", path_string(opts.manifest)},
              {"predictions", path_string(opts.predictions)},
              {"split", to_string(opts.split)},
              {"out_dir", path_string(opts.out_dir)}});
  return report;
}

}  // namespace porelbm
