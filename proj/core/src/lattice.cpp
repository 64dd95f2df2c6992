#include "porelbm/lattice.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <cstring>
#include <type_traits>
#include <utility>

#if defined(__x86_64__)
#include <immintrin.h>
#endif

#include "porelbm/error.hpp"

namespace porelbm {
namespace {

using d2q9::Q;

// Per-run constants of the collision. Opposite directions share the
// symmetric parts of equilibrium and source, so the kernel works on the four
// pairs (1,3), (2,4), (5,7), (6,8) plus the rest population.
struct Relaxation {
  explicit Relaxation(const LatticeConfig& cfg)
      : omega(1.0 / cfg.tau), keep(1.0 - 1.0 / cfg.tau), fx(cfg.force.x), fy(cfg.force.y),
        hfx(0.5 * cfg.force.x), hfy(0.5 * cfg.force.y) {
    const double pre = 1.0 - 0.5 / cfg.tau;
    const int lead[4] = {1, 2, 5, 6};
    for (int k = 0; k < 4; ++k) {
      const int q = lead[k];
      const double ef = d2q9::ex[q] * fx + d2q9::ey[q] * fy;
      src_lin[k] = ef * (pre * d2q9::w[q] * 9.0);
      src_odd[k] = pre * d2q9::w[q] * 3.0 * ef;
    }
    w_rest = omega * d2q9::w[0];
    w_axis = omega * d2q9::w[1];
    w_diag = omega * d2q9::w[5];
    c_rest = pre * d2q9::w[0];
    c_axis = pre * d2q9::w[1];
    c_diag = pre * d2q9::w[5];
  }
  double omega, keep;
  double fx, fy, hfx, hfy;
  // S_q = 9 c (e_q.F)(e_q.u) - c g + 3 c (e_q.F), c = (1 - 1/(2 tau)) w_q, g = 3 u.F;
  // src_lin holds 9 c (e_q.F) and src_odd 3 c (e_q.F) for the lead direction of each pair.
  double src_lin[4], src_odd[4];
  double w_rest, w_axis, w_diag;
  double c_rest, c_axis, c_diag;
};

inline constexpr int kLanes =
#if defined(__AVX512F__)
    8;
#else
    4;
#endif
using vdouble = double __attribute__((vector_size(kLanes * sizeof(double))));

[[gnu::always_inline]] inline vdouble splat(double v) { return vdouble{} + v; }

// a * b + c, rounded once where the target has fused multiply-add. Written
// out so that every inlined copy of the collision rounds the same way.
[[gnu::always_inline]] inline vdouble fmadd(vdouble a, vdouble b, vdouble c) {
#if defined(__AVX512F__)
  return _mm512_fmadd_pd(a, b, c);
#elif defined(__FMA__) && defined(__AVX__)
  return _mm256_fmadd_pd(a, b, c);
#else
  return a * b + c;
#endif
}

// BGK collision with the second-order forcing term on kLanes nodes. Every
// caller goes through this one routine (single nodes ride in lane 0), so all
// code paths round identically. Returns the node densities.
[[gnu::always_inline]] inline vdouble collide_block(const vdouble* in, vdouble* out, const Relaxation& r) {
  // Sums are evaluated as shallow trees to keep the dependency chain short.
  const vdouble d13 = in[1] - in[3], d24 = in[2] - in[4], d57 = in[5] - in[7], d68 = in[6] - in[8];
  const vdouble rho = ((in[0] + in[1]) + (in[2] + in[3])) + ((in[4] + in[5]) + (in[6] + in[7])) + in[8];
  const vdouble mx = d13 + (d57 - d68);
  const vdouble my = d24 + (d57 + d68);
  const vdouble inv_rho = 1.0 / rho;
  const vdouble ux = (mx + r.hfx) * inv_rho;
  const vdouble uy = (my + r.hfy) * inv_rho;
  const vdouble base = fmadd(splat(-1.5), fmadd(ux, ux, uy * uy), splat(1.0));
  const vdouble g = 3.0 * fmadd(ux, splat(r.fx), uy * r.fy);
  const vdouble keep = splat(r.keep);

  out[0] = fmadd(keep, in[0], fmadd(r.w_rest * rho, base, g * -r.c_rest));

  const vdouble wa = r.w_axis * rho, wd = r.w_diag * rho;
  const vdouble ga = r.c_axis * g, gd = r.c_diag * g;
  const vdouble eu[4] = {ux, uy, ux + uy, uy - ux};
  const int lead[4] = {1, 2, 5, 6};
#pragma GCC unroll 4
  for (int k = 0; k < 4; ++k) {
    const vdouble e = eu[k];
    const vdouble wr = k < 2 ? wa : wd;
    const vdouble gc = k < 2 ? ga : gd;
    const vdouble sym = fmadd(wr, fmadd(splat(4.5), e * e, base), fmadd(splat(r.src_lin[k]), e, -gc));
    const vdouble asym = fmadd(3.0 * wr, e, splat(r.src_odd[k]));
    const int q = lead[k], o = d2q9::opposite[q];
    out[q] = fmadd(keep, in[q], sym + asym);
    out[o] = fmadd(keep, in[o], sym - asym);
  }
  return rho;
}

inline bool healthy_density(double rho) { return rho > 0.0 && rho <= DBL_MAX; }

// One node through the block kernel.
inline double collide_one(const double* in, double* out, const Relaxation& r) {
  vdouble vin[Q], vout[Q];
  for (int q = 0; q < Q; ++q) vin[q] = vdouble{} + in[q];
  const vdouble rho = collide_block(vin, vout, r);
  for (int q = 0; q < Q; ++q) out[q] = vout[q][0];
  return rho[0];
}

template <class T>
[[gnu::always_inline]] inline T load(const double* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

template <class T>
[[gnu::always_inline]] inline void store(double* p, const T& v) {
  std::memcpy(p, &v, sizeof(T));
}

struct RowPointers {
  const double* src[Q];     // pore: f_q(x) <- post_q(x - e_q)
  const double* bounce[Q];  // solid: f_q(x) <- post_opp(q)(x + e_q)
  double* dst[Q];
  const std::uint8_t* solid;
  const std::uint8_t* enclosed;
};

// Neighbour values row[x + s + l] for the kLanes lanes of a block. Seam
// blocks (Seam = -1 at x = 0, +1 at x = w - kLanes) shift the one lane that
// crosses the row end in from the other side of the row.
template <int Seam>
[[gnu::always_inline]] inline vdouble fetch(const double* row, int x, int s, int w) {
  using vlong = long long __attribute__((vector_size(kLanes * sizeof(long long))));
#if defined(__AVX512F__)
  constexpr vlong from_left = {8, 0, 1, 2, 3, 4, 5, 6}, from_right = {1, 2, 3, 4, 5, 6, 7, 8};
#else
  constexpr vlong from_left = {4, 0, 1, 2}, from_right = {1, 2, 3, 4};
#endif
  if (Seam < 0 && s < 0) return __builtin_shuffle(load<vdouble>(row), splat(row[w - 1]), from_left);
  if (Seam > 0 && s > 0) return __builtin_shuffle(load<vdouble>(row + x), splat(row[0]), from_right);
  return load<vdouble>(row + x + s);
}

// kLanes nodes starting at x. Interior blocks (Seam = 0) have neighbours
// x - 1 .. x + kLanes inside the row. Enclosed blocks are left alone,
// all-solid blocks only bounce, all-pore blocks skip the select.
template <int Seam>
[[gnu::always_inline]] inline void pull_block(const RowPointers& p, int x, int w, const Relaxation& r,
                                              vdouble& bad_v) {
  constexpr int so[Q] = {0, -1, 0, 1, 0, -1, 1, 1, -1};
  // Flags are 0 or 1 per byte, so one word compare classifies the block.
  using Word = std::conditional_t<kLanes == 8, std::uint64_t, std::uint32_t>;
  constexpr Word all = static_cast<Word>(0x0101010101010101ULL);
  Word solid_w, shut_w;
  std::memcpy(&solid_w, p.solid + x, kLanes);
  std::memcpy(&shut_w, p.enclosed + x, kLanes);
  if (shut_w == all) return;
  if (solid_w == all) {
#pragma GCC unroll 9
    for (int q = 0; q < Q; ++q) store(p.dst[q] + x, fetch<Seam>(p.bounce[q], x, -so[q], w));
    return;
  }
  vdouble in[Q], out[Q];
#pragma GCC unroll 9
  for (int q = 0; q < Q; ++q) in[q] = fetch<Seam>(p.src[q], x, so[q], w);
  const vdouble rho = collide_block(in, out, r);
  const auto healthy = (rho > 0.0) & (rho <= DBL_MAX);
  if (solid_w == 0) {
#pragma GCC unroll 9
    for (int q = 0; q < Q; ++q) store(p.dst[q] + x, out[q]);
    bad_v += healthy ? vdouble{} : (vdouble{} + 1.0);
    return;
  }
  vdouble solid_v;
  for (int l = 0; l < kLanes; ++l) solid_v[l] = p.solid[x + l];
  const auto solid = solid_v != 0.0;
#pragma GCC unroll 9
  for (int q = 0; q < Q; ++q) {
    const vdouble back = fetch<Seam>(p.bounce[q], x, -so[q], w);
    store(p.dst[q] + x, solid ? back : out[q]);
  }
  bad_v += (solid | healthy) ? vdouble{} : (vdouble{} + 1.0);
}

// Block at x with periodic neighbours gathered one lane at a time; lanes
// past the row end repeat the last node and are not stored.
double pull_block_wrapped(const RowPointers& p, int x, int w, const Relaxation& r) {
  const int lanes = std::min(kLanes, w - x);
  vdouble in[Q], back[Q], out[Q];
  for (int l = 0; l < kLanes; ++l) {
    const int xl = x + std::min(l, lanes - 1);
    const int xm = (xl - 1 + w) % w, xp = (xl + 1) % w;
    for (int q = 0; q < Q; ++q) {
      const int e = d2q9::ex[q];
      in[q][l] = p.src[q][e == 1 ? xm : (e == -1 ? xp : xl)];
      back[q][l] = p.bounce[q][e == 1 ? xp : (e == -1 ? xm : xl)];
    }
  }
  const vdouble rho = collide_block(in, out, r);
  double bad = 0.0;
  for (int l = 0; l < lanes; ++l) {
    const int xl = x + l;
    if (p.enclosed[xl]) continue;
    const bool solid = p.solid[xl] != 0;
    for (int q = 0; q < Q; ++q) p.dst[q][xl] = solid ? back[q][l] : out[q][l];
    if (!solid && !healthy_density(rho[l])) bad += 1.0;
  }
  return bad;
}

double pull_row(const RowPointers& p, int w, const Relaxation& r) {
  vdouble bad_v = {};
  double bad = 0.0;
  if (w % kLanes == 0 && w >= 2 * kLanes) {
    pull_block<-1>(p, 0, w, r, bad_v);
    for (int x = kLanes; x + kLanes < w; x += kLanes) pull_block<0>(p, x, w, r, bad_v);
    pull_block<1>(p, w - kLanes, w, r, bad_v);
    for (int l = 0; l < kLanes; ++l) bad += bad_v[l];
    return bad;
  }
  bad += pull_block_wrapped(p, 0, w, r);
  int x = kLanes;
  for (; x + kLanes <= w - 1; x += kLanes) pull_block<0>(p, x, w, r, bad_v);
  for (; x < w; x += kLanes) bad += pull_block_wrapped(p, x, w, r);
  for (int l = 0; l < kLanes; ++l) bad += bad_v[l];
  return bad;
}

// Plane stride in doubles: the cell count rounded up to whole cache lines plus
// a pad chosen so that every store plane of one buffer sits at least a few
// lines away, modulo the page size, from every load plane of the other (rows
// y - 1, y, y + 1).
std::size_t padded_plane_stride(std::size_t cells, int width) {
  constexpr long kPage = 4096, kLine = 64;
  const std::size_t base = (cells + 7) / 8 * 8;
  const long row = (8L * width) % kPage;
  std::size_t best = base;
  long best_gap = -1;
  for (std::size_t pad = 0; pad < 64; ++pad) {
    const long stride = static_cast<long>(((base + 8 * pad) * 8) % kPage);
    long gap = kPage;
    for (long d = 1; d < 2 * Q; ++d) {
      for (long dy = -1; dy <= 1; ++dy) {
        const long off = ((d * stride + dy * row) % kPage + kPage) % kPage;
        gap = std::min({gap, off, kPage - off});
      }
    }
    if (gap > best_gap) {
      best_gap = gap;
      best = base + 8 * pad;
    }
    if (best_gap >= 4 * kLine) break;
  }
  return best;
}

// Doubles per direction row in a ring slot: whole cache lines plus two, so
// the nine rows of a slot do not share page offsets.
std::size_t ring_pitch(int width) { return (static_cast<std::size_t>(width) + 7) / 8 * 8 + 16; }

}  // namespace

Lattice::Lattice(const BinaryGeometry& geom, LatticeConfig cfg)
    : width_(geom.width()),
      height_(geom.height()),
      cells_(geom.cell_count()),
      cfg_(cfg),
      solid_(geom.mask().begin(), geom.mask().end()) {
  if (cells_ == 0) throw ParameterError("lattice needs a non-empty geometry");
  if (!(cfg.tau > 0.5)) throw ParameterError("tau must be > 0.5 for positive viscosity");
  for (std::size_t k = 0; k < cells_; ++k) {
    if (solid_[k]) solid_nodes_.push_back(static_cast<std::uint32_t>(k));
  }
  // Full-way bounce-back sends every population on a solid node back to the
  // node it came from, so solid nodes with only solid neighbours keep f = w
  // in both buffers forever.
  enclosed_.assign(cells_, 0);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      bool shut = true;
      for (int q = 0; q < Q; ++q) {
        shut &= geom.is_solid((x + d2q9::ex[q] + width_) % width_, (y + d2q9::ey[q] + height_) % height_);
      }
      enclosed_[index(x, y)] = shut ? 1 : 0;
    }
  }
  if (height_ >= 2 * kSweepDepth + 2) {
    ring_.assign((kSweepDepth - 1) * kRingSlots * Q * ring_pitch(width_), 0.0);
    open_row_.assign(static_cast<std::size_t>(width_), 0);
  }
  plane_stride_ = padded_plane_stride(cells_, width_);
  store_.assign(2 * Q * plane_stride_, 0.0);
  cur_off_ = 0;
  next_off_ = Q * plane_stride_;
  // Quiescent start: f = f^eq(1, 0) = w everywhere, solid nodes included.
  for (int q = 0; q < Q; ++q) {
    std::fill_n(cur() + plane(q), cells_, d2q9::w[q]);
    std::fill_n(next() + plane(q), cells_, d2q9::w[q]);
  }
}

void Lattice::check_health(bool healthy) const {
  if (!healthy) throw InstabilityError("non-positive or non-finite density on a pore node", steps_);
}

void Lattice::collide() {
  const Relaxation r(cfg_);
  bool healthy = true;
  double in[Q], out[Q];
  for (std::size_t k = 0; k < cells_; ++k) {
    if (solid_[k]) continue;
    for (int q = 0; q < Q; ++q) in[q] = cur()[plane(q) + k];
    healthy &= healthy_density(collide_one(in, out, r));
    for (int q = 0; q < Q; ++q) cur()[plane(q) + k] = out[q];
  }
  check_health(healthy);
}

void Lattice::stream() {
  const auto w = static_cast<std::size_t>(width_);
  for (int q = 0; q < Q; ++q) {
    const double* src = cur() + plane(q);
    double* dst = next() + plane(q);
    for (int y = 0; y < height_; ++y) {
      const int yd = (y + d2q9::ey[q] + height_) % height_;
      const double* s = src + y * w;
      double* d = dst + yd * w;
      switch (d2q9::ex[q]) {
        case 0:
          std::memcpy(d, s, w * sizeof(double));
          break;
        case 1:
          std::memcpy(d + 1, s, (w - 1) * sizeof(double));
          d[0] = s[w - 1];
          break;
        default:
          std::memcpy(d, s + 1, (w - 1) * sizeof(double));
          d[w - 1] = s[0];
          break;
      }
    }
  }
  std::swap(cur_off_, next_off_);
}

void Lattice::bounce_back() {
  double* f = cur();
  for (const auto k : solid_nodes_) {
    for (int q = 1; q <= 2; ++q) std::swap(f[plane(q) + k], f[plane(q + 2) + k]);
    for (int q = 5; q <= 6; ++q) std::swap(f[plane(q) + k], f[plane(q + 2) + k]);
  }
}

void Lattice::step() { run(1); }

// run(n) keeps the stored state post-bounce-back between calls, but
// internally works on post-collision populations: one collide up front, then
// n - 1 fused pull passes (stream + bounce-back + collide), then a final
// stream + bounce-back. Per-node arithmetic is identical to collide(), so the
// result matches n calls of collide/stream/bounce_back bit for bit.
void Lattice::run(std::int64_t n_steps) {
  if (n_steps <= 0) return;
  collide();
  std::int64_t s = 1;
  if (!ring_.empty()) {
    for (; s + kSweepDepth <= n_steps; s += kSweepDepth) {
      const auto bad = fused_sweep();
      for (const double b : bad) {
        ++steps_;
        check_health(b == 0.0);
      }
    }
  }
  for (; s < n_steps; ++s) {
    const double bad = fused_pull_collide();
    ++steps_;
    check_health(bad == 0.0);
  }
  stream();
  bounce_back();
  ++steps_;
}

// Several fused passes in one sweep over the rows. Pass j (j < levels - 1)
// writes its rows into ring j of row slots; the next pass trails it by one
// row. The last pass writes back into the current buffer over rows the first
// pass has finished reading. The slots stay in cache, so the current buffer
// crosses the memory hierarchy once per sweep. Pass j starts at row j, and
// its first two rows keep their own slots because the wrap-around at the end
// of the next pass needs them; later rows rotate over three slots. Passes
// that write slots also write enclosed nodes, since a recycled slot holds
// another row's values there. Returns the unhealthy node count per pass.
std::array<double, Lattice::kSweepDepth> Lattice::fused_sweep() {
  constexpr int levels = kSweepDepth;
  const Relaxation r(cfg_);
  const int w = width_, h = height_;
  const std::size_t pitch = ring_pitch(w), row_len = Q * pitch;
  double* f = cur();
  // Slot of row y in ring j, from its position in pass j's row order.
  const auto slot = [&](int j, int y) {
    const int i = (y - j + h) % h;
    const int k = i < 2 ? i : 2 + (i - 2) % 3;
    return ring_.data() + (static_cast<std::size_t>(j) * kRingSlots + k) * row_len;
  };
  std::array<double, levels> bad{};
  const auto pass = [&](int j, int y) {
    RowPointers p;
    for (int q = 0; q < Q; ++q) {
      const int ys = (y - d2q9::ey[q] + h) % h;
      const int yb = (y + d2q9::ey[q] + h) % h;
      if (j == 0) {
        p.src[q] = f + plane(q) + static_cast<std::size_t>(ys) * w;
        p.bounce[q] = f + plane(d2q9::opposite[q]) + static_cast<std::size_t>(yb) * w;
      } else {
        p.src[q] = slot(j - 1, ys) + q * pitch;
        p.bounce[q] = slot(j - 1, yb) + d2q9::opposite[q] * pitch;
      }
      p.dst[q] = j == levels - 1 ? f + plane(q) + static_cast<std::size_t>(y) * w
                                 : slot(j, y) + q * pitch;
    }
    p.solid = solid_.data() + static_cast<std::size_t>(y) * w;
    p.enclosed = j == levels - 1 ? enclosed_.data() + static_cast<std::size_t>(y) * w : open_row_.data();
    bad[j] += pull_row(p, w, r);
  };
  // At time t pass j handles the row at position t - 2j of its order.
  for (int t = 0; t < h + 2 * (levels - 1); ++t) {
    for (int j = 0; j < levels; ++j) {
      const int i = t - 2 * j;
      if (i >= 0 && i < h) pass(j, (j + i) % h);
    }
  }
  return bad;
}

double Lattice::fused_pull_collide() {
  const Relaxation r(cfg_);
  const int w = width_, h = height_;
  double bad = 0.0;
  for (int y = 0; y < h; ++y) {
    RowPointers p;
    for (int q = 0; q < Q; ++q) {
      const int ys = (y - d2q9::ey[q] + h) % h;
      const int yb = (y + d2q9::ey[q] + h) % h;
      p.src[q] = cur() + plane(q) + static_cast<std::size_t>(ys) * w;
      p.bounce[q] = cur() + plane(d2q9::opposite[q]) + static_cast<std::size_t>(yb) * w;
      p.dst[q] = next() + plane(q) + static_cast<std::size_t>(y) * w;
    }
    p.solid = solid_.data() + static_cast<std::size_t>(y) * w;
    p.enclosed = enclosed_.data() + static_cast<std::size_t>(y) * w;
    bad += pull_row(p, w, r);
  }
  std::swap(cur_off_, next_off_);
  return bad;
}

FlowField Lattice::macroscopics() const {
  FlowField field;
  field.width = width_;
  field.height = height_;
  field.rho.assign(cells_, 0.0);
  field.ux.assign(cells_, 0.0);
  field.uy.assign(cells_, 0.0);
  bool healthy = true;
  for (std::size_t k = 0; k < cells_; ++k) {
    if (solid_[k]) continue;
    double rho = 0.0, mx = 0.0, my = 0.0;
    for (int q = 0; q < Q; ++q) {
      const double v = cur()[plane(q) + k];
      rho += v;
      mx += d2q9::ex[q] * v;
      my += d2q9::ey[q] * v;
    }
    healthy &= rho > 0.0 && rho <= DBL_MAX;
    field.rho[k] = rho;
    field.ux[k] = (mx + 0.5 * cfg_.force.x) / rho;
    field.uy[k] = (my + 0.5 * cfg_.force.y) / rho;
  }
  check_health(healthy);
  return field;
}

double Lattice::total_mass() const {
  // Neumaier summation.
  double sum = 0.0, comp = 0.0;
  for (int q = 0; q < Q; ++q) {
    for (std::size_t k = 0; k < cells_; ++k) {
      const double v = cur()[plane(q) + k];
      const double t = sum + v;
      if (std::abs(sum) >= std::abs(v)) {
        comp += (sum - t) + v;
      } else {
        comp += (v - t) + sum;
      }
      sum = t;
    }
  }
  return sum + comp;
}

}  // namespace porelbm
