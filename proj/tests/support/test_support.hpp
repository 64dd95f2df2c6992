#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

#include "porelbm/geometry.hpp"

namespace porelbm::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("porelbm_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Plates along x: one solid row at y = 0 and pore rows 1..gap. With periodic
// wrap the single row bounds the channel on both sides, so the walls sit at
// y = 0.5 and y = gap + 0.5.
inline BinaryGeometry channel_geometry(int length, int gap) {
  auto g = BinaryGeometry::all_pore({length, gap + 1});
  for (int x = 0; x < length; ++x) g.set_solid(x, 0, true);
  return g;
}

// Analytic plane-Poiseuille velocity at pore row y for the channel above.
inline double poiseuille_ux(int y, int gap, double force, double rho, double nu) {
  const double s = y - 0.5;
  return force / (2.0 * rho * nu) * s * (gap - s);
}

}  // namespace porelbm::testing
