#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include "porelbm/error.hpp"
#include "porelbm/grid_file.hpp"
#include "porelbm/pipeline.hpp"
#include "test_support.hpp"

namespace porelbm {
namespace {

namespace fs = std::filesystem;

SimulationConfig quick_solver() {
  SimulationConfig cfg;
  cfg.force = {1e-5, 0.0};
  cfg.check_interval = 200;
  cfg.max_steps = 20000;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

TEST(Pipeline, GenerateWritesImagesSidecarsAndConfig) {
  testing::TempDir dir("pipe");
  const auto paths = cmd_generate({3, {48, 40}, 4, 12.0, 10, dir / "geom"});
  ASSERT_EQ(paths.size(), 3u);
  EXPECT_EQ(paths[0].filename(), "sample_000000.png");
  const auto g = load_geometry(paths[2]);
  EXPECT_EQ(g.width(), 48);
  EXPECT_EQ(g.height(), 40);
  EXPECT_EQ(g, rasterize(generate_pack(12, 4, 12.0, {48, 40})));
  std::ifstream side(dir / "geom" / "sample_000002.json");
  EXPECT_EQ(nlohmann::json::parse(side)["seed"], 12);
  EXPECT_TRUE(fs::exists(dir / "geom" / "generate_config.json"));
}

TEST(Pipeline, ExpandGlob) {
  testing::TempDir dir("pipe");
  for (const char* n : {"b.png", "a.png", "c.txt"}) std::ofstream(dir / n) << "x";
  const auto all = expand_glob(dir.path().string());
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].filename(), "a.png");
  EXPECT_EQ(expand_glob((dir / "*.txt").string()).size(), 1u);
  EXPECT_EQ(expand_glob((dir / "?.png").string()).size(), 2u);
  EXPECT_EQ(expand_glob((dir / "a.png").string()).size(), 1u);
}

TEST(Pipeline, EndToEndOnGroundTruthIsExact) {
  testing::TempDir dir("pipe");
  const auto geoms = cmd_generate({6, {32, 32}, 3, 10.0, 1, dir / "geom"});
  SimulateOptions sim;
  sim.geometries = geoms;
  sim.solver = quick_solver();
  sim.workers = 2;
  sim.out_dir = dir / "sim";
  const auto summary = cmd_simulate(sim);
  EXPECT_EQ(summary.succeeded.size() + summary.quarantined.size(), 6u);
  ASSERT_GE(summary.succeeded.size(), 4u);
  for (const auto& id : summary.succeeded) {
    const Grid v = read_grid(dir / "sim" / (id + kVelocitySuffix));
    EXPECT_EQ(v.channels, 2u);
    EXPECT_EQ(v.width, 32u);
    EXPECT_TRUE(fs::exists(dir / "sim" / (id + ".ke.csv")));
  }
  for (const char* n : {"quarantine.json", "timing.csv", "simulate_config.json"})
    EXPECT_TRUE(fs::exists(dir / "sim" / n)) << n;

  const auto m = cmd_dataset({dir / "sim", 0.5, 0.0, 3, dir / "data" / "manifest.json"});
  EXPECT_EQ(m.samples.size(), summary.succeeded.size());
  EXPECT_EQ(m.tau(), 1.0);
  EXPECT_EQ(m.force_x(), 1e-5);
  EXPECT_EQ(m.geometry_generator.at("overlap_allowed"), true);
  EXPECT_EQ(m.geometry_generator.at("grains"), 3);

  const auto exported = cmd_export_targets({dir / "data" / "manifest.json", Split::test, dir / "pred"});
  EXPECT_EQ(exported.size(), m.counts().test);

  const auto report = cmd_evaluate({dir / "data" / "manifest.json", dir / "pred", dir / "report", Split::test});
  for (const auto& s : report.samples) EXPECT_EQ(s.max_abs_error, 0.0);
  if (report.samples.size() >= 2) {
    EXPECT_NEAR(report.cross.permeability_fit.slope, 1.0, 1e-12);
    EXPECT_NEAR(report.cross.velocity_fit.slope, 1.0, 1e-12);
  }
  EXPECT_EQ(report.histogram.counts[0], report.histogram.total());
  EXPECT_TRUE(fs::exists(dir / "report" / "summary.md"));
  EXPECT_TRUE(fs::exists(dir / "report" / "evaluate_config.json"));

  // Exported targets and stored record agree with the manifest.
  for (const auto* e : m.select(Split::test)) {
    const Grid t = read_grid(dir / "pred" / (e->id + ".grid"));
    EXPECT_EQ(t.channels, 1u);
  }

  fs::remove(exported.front());
  EXPECT_THROW(cmd_evaluate({dir / "data" / "manifest.json", dir / "pred", dir / "report2", Split::test}),
               MissingFileError);
}

TEST(Pipeline, SimulationIsDeterministicAcrossWorkerCounts) {
  testing::TempDir dir("pipe");
  const auto geoms = cmd_generate({3, {24, 24}, 2, 8.0, 40, dir / "geom"});
  for (int workers : {1, 3}) {
    SimulateOptions sim;
    sim.geometries = geoms;
    sim.solver = quick_solver();
    sim.workers = workers;
    sim.out_dir = dir / ("sim" + std::to_string(workers));
    cmd_simulate(sim);
  }
  for (const auto& g : geoms) {
    const std::string id = g.stem().string();
    const auto a = dir / "sim1" / (id + kVelocitySuffix), b = dir / "sim3" / (id + kVelocitySuffix);
    if (fs::exists(a) || fs::exists(b)) EXPECT_EQ(slurp(a), slurp(b)) << id;
  }
}

TEST(Pipeline, QuarantinesDegenerateGeometry) {
  testing::TempDir dir("pipe");
  fs::create_directories(dir / "geom");
  save_geometry(BinaryGeometry::all_pore({8, 8}), dir / "geom" / "open.png");
  save_geometry(BinaryGeometry::all_solid({8, 8}), dir / "geom" / "closed.png");
  SimulateOptions sim;
  sim.geometries = expand_glob((dir / "geom").string());
  sim.solver = quick_solver();
  sim.out_dir = dir / "sim";
  const auto summary = cmd_simulate(sim);
  EXPECT_TRUE(summary.succeeded.empty());
  ASSERT_EQ(summary.quarantined.size(), 2u);
  std::ifstream q(dir / "sim" / "quarantine.json");
  EXPECT_EQ(nlohmann::json::parse(q).size(), 2u);
}

}  // namespace
}  // namespace porelbm
