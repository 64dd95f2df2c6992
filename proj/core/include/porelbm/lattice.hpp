#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <new>
#include <vector>

#include "porelbm/d2q9.hpp"
#include "porelbm/geometry.hpp"

namespace porelbm {

// Cache-line aligned storage for distribution planes.
template <class T>
struct CacheAlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};

  CacheAlignedAllocator() = default;
  template <class U>
  CacheAlignedAllocator(const CacheAlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlign)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlign); }

  template <class U>
  bool operator==(const CacheAlignedAllocator<U>&) const noexcept { return true; }
};

struct LatticeConfig {
  double tau = 1.0;
  Vec2 force{1e-6, 0.0};
};

// Density and velocity per node. Solid nodes carry rho = 0 and u = 0.
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<double> rho;
  std::vector<double> ux;
  std::vector<double> uy;

  std::size_t index(int x, int y) const noexcept { return static_cast<std::size_t>(y) * width + x; }
};

// Distribution functions of a D2Q9 BGK lattice with a solid mask, periodic
// on all four edges. Storage is one plane per direction, double-buffered for
// streaming; run() sweeps two steps at a time through a small ring of row
// slots.
//
// One step is collide (pore nodes only, with body force), stream (periodic
// push), then full-way bounce-back (populations sitting on solid nodes are
// reversed and travel back to where they came from on the next stream).
class Lattice {
 public:
  Lattice(const BinaryGeometry& geom, LatticeConfig cfg);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  const LatticeConfig& config() const noexcept { return cfg_; }
  std::int64_t steps_done() const noexcept { return steps_; }
  bool is_solid(int x, int y) const noexcept { return solid_[index(x, y)] != 0; }

  double f(int q, int x, int y) const noexcept { return cur()[plane(q) + index(x, y)]; }
  void set_f(int q, int x, int y, double value) noexcept { cur()[plane(q) + index(x, y)] = value; }

  // BGK relaxation with forcing on every pore node, in place.
  void collide();
  // f_i(x + e_i) <- f_i(x), periodic.
  void stream();
  // Swap opposite populations on every solid node.
  void bounce_back();
  // Fused collide + stream + bounce_back; bit-identical to calling them in turn
  // from the quiescent start. Solid nodes whose eight neighbours are all
  // solid are skipped; they hold f = w unless set_f changed them.
  void step();
  void run(std::int64_t n_steps);

  FlowField macroscopics() const;

  // Compensated sum of every population on every node.
  double total_mass() const;

 private:
  std::size_t index(int x, int y) const noexcept { return static_cast<std::size_t>(y) * width_ + x; }
  std::size_t plane(int q) const noexcept { return static_cast<std::size_t>(q) * plane_stride_; }
  double* cur() noexcept { return store_.data() + cur_off_; }
  const double* cur() const noexcept { return store_.data() + cur_off_; }
  double* next() noexcept { return store_.data() + next_off_; }
  void check_health(bool healthy) const;
  double fused_pull_collide();
  // Fused passes per sweep. Deeper sweeps were measured no faster once the
  // buffer traffic stopped being the limit.
  static constexpr int kSweepDepth = 2;
  static constexpr int kRingSlots = 5;
  std::array<double, kSweepDepth> fused_sweep();

  int width_;
  int height_;
  std::size_t cells_;
  LatticeConfig cfg_;
  std::vector<std::uint8_t> solid_;
  std::vector<std::uint32_t> solid_nodes_;
  std::vector<std::uint8_t> enclosed_;
  // Both buffers live in one block of 2 Q planes. The plane stride is padded
  // so that loads from one buffer and stores to the other in the same pass
  // do not share page offsets (4K aliasing stalls the loads).
  std::size_t plane_stride_;
  std::vector<double, CacheAlignedAllocator<double>> store_;
  std::size_t cur_off_ = 0;
  std::size_t next_off_ = 0;
  // Row slots for multi-step sweeps, and an all-zero enclosed mask row.
  std::vector<double, CacheAlignedAllocator<double>> ring_;
  std::vector<std::uint8_t> open_row_;
  std::int64_t steps_ = 0;
};

}  // namespace porelbm
