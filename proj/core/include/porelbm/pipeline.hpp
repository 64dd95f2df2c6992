#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "porelbm/dataset.hpp"
#include "porelbm/report.hpp"
#include "porelbm/steady_flow.hpp"

namespace porelbm {

// Stage drivers behind the command-line tool. Each writes a
// <stage>_config.json with its resolved options next to its outputs.

struct GenerateOptions {
  std::size_t count = 1;
  GridSize size{256, 256};
  int grains = 8;
  double diameter = 50.0;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir;
};

// Writes sample_NNNNNN.png and sample_NNNNNN.json (pack sidecar) for
// index 0..count-1, with RNG seed = seed + index.
std::vector<std::filesystem::path> cmd_generate(const GenerateOptions& opts);

struct SimulateOptions {
  std::vector<std::filesystem::path> geometries;
  SimulationConfig solver;
  int workers = 1;
  std::filesystem::path out_dir;
};

struct QuarantineEntry {
  std::string id;
  std::filesystem::path geometry;
  std::string reason;
};

struct SimulateSummary {
  std::vector<std::string> succeeded;
  std::vector<QuarantineEntry> quarantined;
};

// Per geometry <id>: <id>.vel.grid (channels u_x, u_y), <id>.record.json and
// <id>.ke.csv. Failures and non-converged runs go to quarantine.json instead.
// Wall-clock times go to timing.csv, outside the deterministic outputs.
SimulateSummary cmd_simulate(const SimulateOptions& opts);

struct DatasetOptions {
  std::filesystem::path sim_dir;
  double train_frac = 0.765;
  double val_frac = 0.085;
  std::uint64_t split_seed = 0;
  std::filesystem::path out_manifest;
};

DatasetManifest cmd_dataset(const DatasetOptions& opts);

struct ExportOptions {
  std::filesystem::path manifest;
  std::optional<Split> split;  // all samples when empty
  std::filesystem::path out_dir;
};

// Normalized u_x targets as single-channel <id>.grid files, the same layout
// the prediction side writes.
std::vector<std::filesystem::path> cmd_export_targets(const ExportOptions& opts);

struct EvaluateOptions {
  std::filesystem::path manifest;
  std::filesystem::path predictions;
  std::filesystem::path out_dir;
  Split split = Split::test;
};

// Expects <predictions>/<id>.grid for every sample of the split.
ErrorReport cmd_evaluate(const EvaluateOptions& opts);

// Files matching a pattern whose last component may hold * and ? wildcards;
// a directory expands to its *.png files. Sorted.
std::vector<std::filesystem::path> expand_glob(const std::string& pattern);

// PORELBM_WORKERS if set, else the number of logical CPUs.
int default_worker_count();

}  // namespace porelbm
