#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "porelbm/geometry.hpp"
#include "porelbm/normalization.hpp"

namespace porelbm {

enum class Split { train, val, test };

std::string to_string(Split s);
Split split_from_string(const std::string& s);

// Per-sample simulation record as written by the simulate stage
// (<id>.record.json next to <id>.vel.grid).
struct SampleRecord {
  std::string id;
  std::filesystem::path geometry;  // relative to the record's directory when possible
  std::filesystem::path velocity;
  std::uint64_t seed = 0;
  double porosity = 0.0;
  double tau = 0.0;
  double force_x = 0.0;
  double force_y = 0.0;
  std::int64_t steps_run = 0;
  bool converged = false;
  double ke_final = 0.0;
  double permeability_x = 0.0;
  double mean_ux = 0.0;
  double mean_uy = 0.0;
  double mean_pore_rho = 0.0;

  nlohmann::json to_json() const;
  static SampleRecord from_json(const nlohmann::json& j);
};

inline constexpr const char* kRecordSuffix = ".record.json";
inline constexpr const char* kVelocitySuffix = ".vel.grid";

struct SampleEntry {
  std::string id;
  std::filesystem::path geometry;  // relative to the manifest directory
  std::filesystem::path velocity;
  std::uint64_t seed = 0;
  double porosity = 0.0;
  double permeability_x = 0.0;
  double mean_ux = 0.0;
  double mean_pore_rho = 0.0;
  Split split = Split::train;
};

struct SplitCounts {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
  friend bool operator==(const SplitCounts&, const SplitCounts&) = default;
};

// train = floor(n * train_frac), val = floor(n * val_frac), test = the rest.
// A 1e-9 slack absorbs fractions written as ratios (3000.0 / 3550).
SplitCounts split_counts(std::size_t n, double train_frac, double val_frac);

// Deterministic shuffled assignment of n samples (in their given order).
std::vector<Split> assign_splits(std::size_t n, double train_frac, double val_frac, std::uint64_t split_seed);

struct DatasetManifest {
  static constexpr int kVersion = 1;

  int version = kVersion;
  std::vector<SampleEntry> samples;
  VelocityRange range;  // global min-max of u_x over the training split
  std::string normalization_pool = "train";
  std::uint64_t split_seed = 0;
  double train_frac = 0.0;
  double val_frac = 0.0;
  nlohmann::json solver_config;
  // generate_config.json of the geometry directory (grain count, diameter,
  // overlap policy, seed rule); null when the geometries came from elsewhere.
  nlohmann::json geometry_generator;
  // Directory the relative sample paths are resolved against. Not serialized.
  std::filesystem::path root;

  SplitCounts counts() const;
  std::vector<const SampleEntry*> select(Split s) const;
  std::filesystem::path resolve(const std::filesystem::path& p) const;
  double tau() const;
  double force_x() const;

  nlohmann::json to_json() const;
  static DatasetManifest from_json(const nlohmann::json& j, std::filesystem::path root);
  void save(const std::filesystem::path& path) const;
  static DatasetManifest load(const std::filesystem::path& path);
};

// u_x extrema over the training split's velocity files.
VelocityRange compute_global_minmax(const DatasetManifest& manifest);

// Scans sample_dir for simulation records, assigns splits and computes the
// normalization constants. Sample paths are stored relative to
// manifest_dir (defaults to sample_dir).
DatasetManifest build_manifest(const std::filesystem::path& sample_dir, double train_frac, double val_frac,
                               std::uint64_t split_seed,
                               std::optional<std::filesystem::path> manifest_dir = std::nullopt);

// Network-facing pair: geometry as 0 = solid, 1 = pore; target is
// normalized u_x. Both row-major.
struct NormalizedSample {
  GridSize size;
  std::vector<float> geometry;
  std::vector<float> target;
};

NormalizedSample load_normalized_sample(const DatasetManifest& manifest, const SampleEntry& entry);

// Flips geometry and target together about the horizontal mid-line when
// coin < 0.5.
NormalizedSample augment_vflip(const NormalizedSample& sample, double coin);

}  // namespace porelbm
