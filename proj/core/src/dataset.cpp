#include "porelbm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "porelbm/error.hpp"
#include "porelbm/grid_file.hpp"
#include "porelbm/rng.hpp"

namespace fs = std::filesystem;

namespace porelbm {
namespace {

fs::path relative_or_absolute(const fs::path& p, const fs::path& base) {
  const fs::path abs = fs::weakly_canonical(fs::absolute(p));
  const fs::path rel = abs.lexically_relative(fs::weakly_canonical(fs::absolute(base)));
  return rel.empty() ? abs : rel;
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace

std::string to_string(Split s) {
  switch (s) {
    case Split::train:
      return "train";
    case Split::val:
      return "val";
    case Split::test:
      return "test";
  }
  return "train";
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "test") return Split::test;
  throw FormatError("unknown split '" + s + "'");
}

nlohmann::json SampleRecord::to_json() const {
  return {{"id", id},
          {"geometry", geometry.generic_string()},
          {"velocity", velocity.generic_string()},
          {"seed", seed},
          {"porosity", porosity},
          {"tau", tau},
          {"force", {force_x, force_y}},
          {"steps_run", steps_run},
          {"converged", converged},
          {"ke_final", ke_final},
          {"permeability_x", permeability_x},
          {"mean_ux", mean_ux},
          {"mean_uy", mean_uy},
          {"mean_pore_rho", mean_pore_rho}};
}

SampleRecord SampleRecord::from_json(const nlohmann::json& j) {
  SampleRecord r;
  r.id = j.at("id").get<std::string>();
  r.geometry = j.at("geometry").get<std::string>();
  r.velocity = j.at("velocity").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.porosity = j.at("porosity").get<double>();
  r.tau = j.at("tau").get<double>();
  r.force_x = j.at("force").at(0).get<double>();
  r.force_y = j.at("force").at(1).get<double>();
  r.steps_run = j.at("steps_run").get<std::int64_t>();
  r.converged = j.at("converged").get<bool>();
  r.ke_final = j.at("ke_final").get<double>();
  r.permeability_x = j.at("permeability_x").get<double>();
  r.mean_ux = j.at("mean_ux").get<double>();
  r.mean_uy = j.at("mean_uy").get<double>();
  r.mean_pore_rho = j.at("mean_pore_rho").get<double>();
  return r;
}

SplitCounts split_counts(std::size_t n, double train_frac, double val_frac) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw ParameterError("train fraction must be in (0, 1)");
  if (!(val_frac >= 0.0 && val_frac < 1.0)) throw ParameterError("validation fraction must be in [0, 1)");
  if (!(train_frac + val_frac < 1.0 + 1e-12)) throw ParameterError("train + validation fractions exceed 1");
  constexpr double slack = 1e-9;
  SplitCounts c;
  c.train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_frac + slack));
  c.val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * val_frac + slack));
  c.train = std::min(c.train, n);
  c.val = std::min(c.val, n - c.train);
  c.test = n - c.train - c.val;
  return c;
}

std::vector<Split> assign_splits(std::size_t n, double train_frac, double val_frac, std::uint64_t split_seed) {
  const SplitCounts c = split_counts(n, train_frac, val_frac);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(split_seed);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[uniform_below(rng, i)]);
  }
  std::vector<Split> out(n, Split::test);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t sample = order[k];
    out[sample] = k < c.train ? Split::train : (k < c.train + c.val ? Split::val : Split::test);
  }
  return out;
}

SplitCounts DatasetManifest::counts() const {
  SplitCounts c;
  for (const auto& s : samples) {
    switch (s.split) {
      case Split::train:
        ++c.train;
        break;
      case Split::val:
        ++c.val;
        break;
      case Split::test:
        ++c.test;
        break;
    }
  }
  return c;
}

std::vector<const SampleEntry*> DatasetManifest::select(Split s) const {
  std::vector<const SampleEntry*> out;
  for (const auto& e : samples) {
    if (e.split == s) out.push_back(&e);
  }
  return out;
}

fs::path DatasetManifest::resolve(const fs::path& p) const { return p.is_absolute() ? p : root / p; }

double DatasetManifest::tau() const { return solver_config.at("tau").get<double>(); }
double DatasetManifest::force_x() const { return solver_config.at("force").at(0).get<double>(); }

nlohmann::json DatasetManifest::to_json() const {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& s : samples) {
    entries.push_back({{"id", s.id},
                       {"geometry", s.geometry.generic_string()},
                       {"velocity", s.velocity.generic_string()},
                       {"seed", s.seed},
                       {"porosity", s.porosity},
                       {"permeability_x", s.permeability_x},
                       {"mean_ux", s.mean_ux},
                       {"mean_pore_rho", s.mean_pore_rho},
                       {"split", to_string(s.split)}});
  }
  const SplitCounts c = counts();
  return {{"version", version},
          {"samples", entries},
          {"global_v_min", range.v_min},
          {"global_v_max", range.v_max},
          {"zero_level", range.zero_level()},
          {"normalization_pool", normalization_pool},
          {"target_channel", 0},
          {"split_seed", split_seed},
          {"fractions", {{"train", train_frac}, {"val", val_frac}}},
          {"counts", {{"train", c.train}, {"val", c.val}, {"test", c.test}}},
          {"solver_config", solver_config},
          {"geometry_generator", geometry_generator}};
}

DatasetManifest DatasetManifest::from_json(const nlohmann::json& j, fs::path root) {
  DatasetManifest m;
  try {
    m.version = j.at("version").get<int>();
    if (m.version != kVersion) throw FormatError("unsupported manifest version " + std::to_string(m.version));
    for (const auto& e : j.at("samples")) {
      SampleEntry s;
      s.id = e.at("id").get<std::string>();
      s.geometry = e.at("geometry").get<std::string>();
      s.velocity = e.at("velocity").get<std::string>();
      s.seed = e.at("seed").get<std::uint64_t>();
      s.porosity = e.at("porosity").get<double>();
      s.permeability_x = e.at("permeability_x").get<double>();
      s.mean_ux = e.at("mean_ux").get<double>();
      s.mean_pore_rho = e.at("mean_pore_rho").get<double>();
      s.split = split_from_string(e.at("split").get<std::string>());
      m.samples.push_back(std::move(s));
    }
    m.range = {j.at("global_v_min").get<double>(), j.at("global_v_max").get<double>()};
    m.normalization_pool = j.at("normalization_pool").get<std::string>();
    m.split_seed = j.at("split_seed").get<std::uint64_t>();
    m.train_frac = j.at("fractions").at("train").get<double>();
    m.val_frac = j.at("fractions").at("val").get<double>();
    m.solver_config = j.at("solver_config");
    m.geometry_generator = j.value("geometry_generator", nlohmann::json());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
  m.root = std::move(root);
  return m;
}

void DatasetManifest::save(const fs::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << to_json().dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

DatasetManifest DatasetManifest::load(const fs::path& path) {
  return from_json(read_json(path), fs::absolute(path).parent_path());
}

VelocityRange compute_global_minmax(const DatasetManifest& manifest) {
  std::vector<std::vector<float>> pool;
  for (const auto* e : manifest.select(Split::train)) {
    pool.push_back(read_grid(manifest.resolve(e->velocity)).channel(0));
  }
  if (pool.empty()) throw ParameterError("training split is empty; cannot compute normalization range");
  return minmax_over(pool);
}

DatasetManifest build_manifest(const fs::path& sample_dir, double train_frac, double val_frac,
                               std::uint64_t split_seed, std::optional<fs::path> manifest_dir) {
  if (!fs::is_directory(sample_dir)) throw MissingFileError("sample directory not found: " + sample_dir.string());
  std::vector<fs::path> record_files;
  for (const auto& de : fs::directory_iterator(sample_dir)) {
    const std::string name = de.path().filename().string();
    if (de.is_regular_file() && name.size() > std::string(kRecordSuffix).size() &&
        name.ends_with(kRecordSuffix)) {
      record_files.push_back(de.path());
    }
  }
  if (record_files.empty()) throw MissingFileError("no simulation records in " + sample_dir.string());
  std::sort(record_files.begin(), record_files.end());

  const fs::path root = manifest_dir.value_or(sample_dir);
  DatasetManifest m;
  m.root = fs::absolute(root);
  m.split_seed = split_seed;
  m.train_frac = train_frac;
  m.val_frac = val_frac;

  std::string missing;
  for (const auto& rf : record_files) {
    const SampleRecord rec = SampleRecord::from_json(read_json(rf));
    if (!rec.converged) continue;
    const fs::path geom = rec.geometry.is_absolute() ? rec.geometry : sample_dir / rec.geometry;
    const fs::path vel = rec.velocity.is_absolute() ? rec.velocity : sample_dir / rec.velocity;
    for (const auto& p : {geom, vel}) {
      if (!fs::is_regular_file(p)) missing += "\n  " + rec.id + ": " + p.string();
    }
    if (m.solver_config.is_null()) {
      m.solver_config = {{"tau", rec.tau}, {"force", {rec.force_x, rec.force_y}}};
    }
    SampleEntry e;
    e.id = rec.id;
    e.geometry = relative_or_absolute(geom, root);
    e.velocity = relative_or_absolute(vel, root);
    e.seed = rec.seed;
    e.porosity = rec.porosity;
    e.permeability_x = rec.permeability_x;
    e.mean_ux = rec.mean_ux;
    e.mean_pore_rho = rec.mean_pore_rho;
    m.samples.push_back(std::move(e));
  }
  if (!missing.empty()) throw MissingFileError("missing sample files:" + missing);
  if (m.samples.empty()) throw MissingFileError("no converged samples in " + sample_dir.string());

  // Solver settings recorded by the simulate stage, when present.
  const fs::path sim_cfg = sample_dir / "simulate_config.json";
  if (fs::is_regular_file(sim_cfg)) {
    const auto j = read_json(sim_cfg);
    if (j.contains("solver")) m.solver_config = j.at("solver");
  }
  const fs::path gen_cfg = m.resolve(m.samples.front().geometry).parent_path() / "generate_config.json";
  if (fs::is_regular_file(gen_cfg)) m.geometry_generator = read_json(gen_cfg);

  const auto splits = assign_splits(m.samples.size(), train_frac, val_frac, split_seed);
  for (std::size_t k = 0; k < splits.size(); ++k) m.samples[k].split = splits[k];
  m.range = compute_global_minmax(m);
  return m;
}

NormalizedSample load_normalized_sample(const DatasetManifest& manifest, const SampleEntry& entry) {
  const BinaryGeometry geom = load_geometry(manifest.resolve(entry.geometry));
  const Grid vel = read_grid(manifest.resolve(entry.velocity));
  if (vel.width != static_cast<std::uint32_t>(geom.width()) || vel.height != static_cast<std::uint32_t>(geom.height())) {
    throw ShapeError("geometry and velocity dimensions differ for " + entry.id);
  }
  NormalizedSample s;
  s.size = geom.size();
  s.geometry.resize(geom.cell_count());
  const auto mask = geom.mask();
  std::transform(mask.begin(), mask.end(), s.geometry.begin(), [](std::uint8_t v) { return v ? 0.0f : 1.0f; });
  s.target = normalize(vel.channel(0), manifest.range);
  return s;
}

NormalizedSample augment_vflip(const NormalizedSample& sample, double coin) {
  if (!(coin < 0.5)) return sample;
  NormalizedSample out = sample;
  const auto w = static_cast<std::size_t>(sample.size.width);
  const auto h = static_cast<std::size_t>(sample.size.height);
  for (std::size_t y = 0; y < h; ++y) {
    std::copy_n(sample.geometry.begin() + static_cast<std::ptrdiff_t>(y * w), w,
                out.geometry.begin() + static_cast<std::ptrdiff_t>((h - 1 - y) * w));
    std::copy_n(sample.target.begin() + static_cast<std::ptrdiff_t>(y * w), w,
                out.target.begin() + static_cast<std::ptrdiff_t>((h - 1 - y) * w));
  }
  return out;
}

}  // namespace porelbm
