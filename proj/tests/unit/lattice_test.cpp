#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "porelbm/d2q9.hpp"
#include "porelbm/error.hpp"
#include "porelbm/geometry.hpp"
#include "porelbm/lattice.hpp"
#include "test_support.hpp"

namespace porelbm {
namespace {

using d2q9::Q;

// Straightforward array-of-structs lattice built on the reference
// equilibrium and forcing routines.
struct ReferenceLattice {
  int w, h;
  BinaryGeometry geom;
  LatticeConfig cfg;
  std::vector<std::array<double, Q>> f;

  ReferenceLattice(const BinaryGeometry& g, LatticeConfig c)
      : w(g.width()), h(g.height()), geom(g), cfg(c), f(static_cast<std::size_t>(w) * h) {
    for (auto& node : f) node = equilibrium(1.0, {});
  }
  std::array<double, Q>& at(int x, int y) { return f[static_cast<std::size_t>(y) * w + x]; }

  void collide() {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (geom.is_solid(x, y)) continue;
        auto& n = at(x, y);
        double rho = 0, mx = 0, my = 0;
        for (int i = 0; i < Q; ++i) {
          rho += n[i];
          mx += n[i] * d2q9::ex[i];
          my += n[i] * d2q9::ey[i];
        }
        const Vec2 u{(mx + 0.5 * cfg.force.x) / rho, (my + 0.5 * cfg.force.y) / rho};
        const auto feq = equilibrium(rho, u);
        const auto s = forcing_term(u, cfg.force, cfg.tau);
        for (int i = 0; i < Q; ++i) n[i] = n[i] - (n[i] - feq[i]) / cfg.tau + s[i];
      }
    }
  }
  void stream() {
    auto out = f;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int i = 0; i < Q; ++i) {
          const int xn = (x + d2q9::ex[i] + w) % w, yn = (y + d2q9::ey[i] + h) % h;
          out[static_cast<std::size_t>(yn) * w + xn][i] = at(x, y)[i];
        }
      }
    }
    f = out;
  }
  void bounce_back() {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!geom.is_solid(x, y)) continue;
        auto n = at(x, y);
        for (int i = 0; i < Q; ++i) at(x, y)[i] = n[d2q9::opposite[i]];
      }
    }
  }
  void step() {
    collide();
    stream();
    bounce_back();
  }
};

BinaryGeometry random_pack_geometry(std::uint64_t seed, GridSize size) {
  return rasterize(generate_pack(seed, 4, 8.0, size));
}

double max_diff(const Lattice& a, const ReferenceLattice& b) {
  double m = 0.0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x)
      for (int q = 0; q < Q; ++q)
        m = std::max(m, std::abs(a.f(q, x, y) - b.f[static_cast<std::size_t>(y) * b.w + x][q]));
  return m;
}

TEST(D2Q9, WeightsAndMoments) {
  double sw = 0, sx = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < Q; ++i) {
    sw += d2q9::w[i];
    sx += d2q9::w[i] * d2q9::ex[i];
    sxx += d2q9::w[i] * d2q9::ex[i] * d2q9::ex[i];
    sxy += d2q9::w[i] * d2q9::ex[i] * d2q9::ey[i];
    EXPECT_EQ(d2q9::ex[d2q9::opposite[i]], -d2q9::ex[i]);
    EXPECT_EQ(d2q9::ey[d2q9::opposite[i]], -d2q9::ey[i]);
  }
  EXPECT_NEAR(sw, 1.0, 1e-15);
  EXPECT_NEAR(sx, 0.0, 1e-15);
  EXPECT_NEAR(sxx, d2q9::cs2, 1e-15);
  EXPECT_NEAR(sxy, 0.0, 1e-15);
}

TEST(D2Q9, EquilibriumMoments) {
  // tests/oracles/forcing_moments.py: sum feq = rho, sum feq e = rho u.
  for (double rho : {0.9, 1.0, 1.2}) {
    const Vec2 u{0.1, -0.03};
    const auto feq = equilibrium(rho, u);
    double m0 = 0, mx = 0, my = 0;
    for (int i = 0; i < Q; ++i) {
      m0 += feq[i];
      mx += feq[i] * d2q9::ex[i];
      my += feq[i] * d2q9::ey[i];
    }
    EXPECT_NEAR(m0, rho, 1e-15);
    EXPECT_NEAR(mx, rho * u.x, 1e-15);
    EXPECT_NEAR(my, rho * u.y, 1e-15);
  }
  const auto feq = equilibrium(1.0, {0.1, 0.0});
  double mx = 0;
  for (int i = 0; i < Q; ++i) mx += feq[i] * d2q9::ex[i];
  EXPECT_NEAR(mx, 0.1, 1e-16);
}

TEST(D2Q9, ForcingTermMoments) {
  for (double tau : {0.75, 1.0, 2.0}) {
    const Vec2 u{0.02, 0.01}, F{1e-3, -2e-3};
    const auto s = forcing_term(u, F, tau);
    double m0 = 0, mx = 0, my = 0;
    for (int i = 0; i < Q; ++i) {
      m0 += s[i];
      mx += s[i] * d2q9::ex[i];
      my += s[i] * d2q9::ey[i];
    }
    const double pre = 1.0 - 0.5 / tau;
    EXPECT_NEAR(m0, 0.0, 1e-18);
    EXPECT_NEAR(mx, pre * F.x, 1e-18);
    EXPECT_NEAR(my, pre * F.y, 1e-18);
  }
}

TEST(Lattice, RejectsUnstableTau) {
  const auto g = BinaryGeometry::all_pore({4, 4});
  EXPECT_THROW(Lattice(g, {0.5, {}}), ParameterError);
  EXPECT_THROW(Lattice(g, {0.3, {}}), ParameterError);
  EXPECT_NO_THROW(Lattice(g, {0.51, {}}));
}

TEST(Lattice, StartsAtRest) {
  Lattice lat(random_pack_geometry(3, {24, 20}), {});
  const auto field = lat.macroscopics();
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 24; ++x) {
      const auto k = field.index(x, y);
      // Reported velocity carries the half-force shift.
      EXPECT_NEAR(field.ux[k], lat.is_solid(x, y) ? 0.0 : 5e-7, 1e-21);
      EXPECT_EQ(field.uy[k], 0.0);
      EXPECT_NEAR(field.rho[k], lat.is_solid(x, y) ? 0.0 : 1.0, 1e-15);
    }
  }
}

TEST(Lattice, SingleCollisionOnRestNode) {
  // tests/oracles/forcing_moments.py: u_x = 5e-7, momentum after collision
  // = 1e-6, mass 1, for any tau.
  for (double tau : {0.75, 1.0, 2.0}) {
    Lattice lat(BinaryGeometry::all_pore({1, 1}), {tau, {1e-6, 0.0}});
    EXPECT_NEAR(lat.macroscopics().ux[0], 5e-7, 1e-20);
    lat.collide();
    double m0 = 0, mx = 0;
    for (int q = 0; q < Q; ++q) {
      m0 += lat.f(q, 0, 0);
      mx += lat.f(q, 0, 0) * d2q9::ex[q];
    }
    EXPECT_NEAR(m0, 1.0, 1e-15);
    EXPECT_NEAR(mx, 1e-6, 1e-16);
  }
}

TEST(Lattice, CollisionMatchesReferenceOnRandomNodes) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> scale(0.5, 1.5);
  for (double tau : {0.8, 1.0, 1.7}) {
    for (double F : {0.0, 1e-6, 1e-3}) {
      const Vec2 force{F, -0.3 * F};
      for (int trial = 0; trial < 200; ++trial) {
        Lattice lat(BinaryGeometry::all_pore({1, 1}), {tau, force});
        std::array<double, Q> in{};
        for (int q = 0; q < Q; ++q) {
          in[q] = d2q9::w[q] * scale(rng);
          lat.set_f(q, 0, 0, in[q]);
        }
        lat.collide();
        double rho = 0, mx = 0, my = 0;
        for (int q = 0; q < Q; ++q) {
          rho += in[q];
          mx += in[q] * d2q9::ex[q];
          my += in[q] * d2q9::ey[q];
        }
        const Vec2 u{(mx + 0.5 * force.x) / rho, (my + 0.5 * force.y) / rho};
        const auto feq = equilibrium(rho, u);
        const auto s = forcing_term(u, force, tau);
        for (int q = 0; q < Q; ++q) ASSERT_NEAR(lat.f(q, 0, 0), in[q] - (in[q] - feq[q]) / tau + s[q], 1e-15);
      }
    }
  }
}

TEST(Lattice, StreamMovesPopulationsPeriodically) {
  Lattice lat(BinaryGeometry::all_pore({5, 4}), {});
  for (int q = 0; q < Q; ++q)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 5; ++x) lat.set_f(q, x, y, 100.0 * q + 10.0 * y + x);
  lat.stream();
  for (int q = 0; q < Q; ++q) {
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 5; ++x) {
        const int xs = (x - d2q9::ex[q] + 5) % 5, ys = (y - d2q9::ey[q] + 4) % 4;
        EXPECT_EQ(lat.f(q, x, y), 100.0 * q + 10.0 * ys + xs);
      }
    }
  }
}

TEST(Lattice, BounceBackSwapsOppositesOnSolidOnly) {
  BinaryGeometry g({2, 1}, {1, 0});
  Lattice lat(g, {});
  for (int q = 0; q < Q; ++q) {
    lat.set_f(q, 0, 0, q);
    lat.set_f(q, 1, 0, q);
  }
  lat.bounce_back();
  for (int q = 0; q < Q; ++q) {
    EXPECT_EQ(lat.f(q, 0, 0), d2q9::opposite[q]);
    EXPECT_EQ(lat.f(q, 1, 0), q);
  }
}

TEST(Lattice, MatchesReferenceImplementation) {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    // Odd widths exercise the scalar edge path, width 64 the staged seam blocks.
    const GridSize size{seed == 4 ? 64 : 37 + static_cast<int>(seed) * 6, 23};
    const auto g = random_pack_geometry(seed, size);
    const LatticeConfig cfg{0.8, {2e-4, -5e-5}};
    Lattice lat(g, cfg);
    ReferenceLattice ref(g, cfg);
    for (int s = 0; s < 200; ++s) ref.step();
    lat.run(200);
    EXPECT_LT(max_diff(lat, ref), 5e-14) << "seed " << seed;
    EXPECT_EQ(lat.steps_done(), 200);
  }
}

TEST(Lattice, FusedRunBitIdenticalToSeparateOperations) {
  for (const int w : {45, 64}) {
    const auto g = random_pack_geometry(9, {w, 31});
    const LatticeConfig cfg{1.3, {1e-5, 3e-6}};
    Lattice fused(g, cfg), split(g, cfg);
    fused.run(57);
    for (int s = 0; s < 57; ++s) {
      split.collide();
      split.stream();
      split.bounce_back();
    }
    for (int q = 0; q < Q; ++q)
      for (int y = 0; y < 31; ++y)
        for (int x = 0; x < w; ++x) ASSERT_EQ(fused.f(q, x, y), split.f(q, x, y)) << "width " << w;
    // step() and run() in pieces agree with one long run.
    Lattice pieces(g, cfg);
    pieces.run(20);
    pieces.step();
    pieces.run(36);
    for (int q = 0; q < Q; ++q)
      for (int y = 0; y < 31; ++y)
        for (int x = 0; x < w; ++x) ASSERT_EQ(fused.f(q, x, y), pieces.f(q, x, y)) << "width " << w;
  }
}

TEST(Lattice, ConservesMass) {
  Lattice lat(random_pack_geometry(4, {64, 48}), {});
  const double m0 = lat.total_mass();
  lat.run(2000);
  EXPECT_LE(std::abs(lat.total_mass() - m0) / m0, 1e-12);
}

TEST(Lattice, MomentumGrowsByForceInOpenDomain) {
  // No walls: each step adds exactly F per pore cell.
  const int n = 8;
  const LatticeConfig cfg{1.0, {1e-5, 0.0}};
  Lattice lat(BinaryGeometry::all_pore({n, n}), cfg);
  lat.run(10);
  double mx = 0;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      for (int q = 0; q < Q; ++q) mx += lat.f(q, x, y) * d2q9::ex[q];
  EXPECT_NEAR(mx, 10.0 * n * n * 1e-5, 5e-14);
}

TEST(Lattice, DetectsInstability) {
  Lattice lat(random_pack_geometry(3, {32, 32}), {0.51, {1e-2, 0.0}});
  try {
    lat.run(100000);
    FAIL() << "expected InstabilityError";
  } catch (const InstabilityError& e) {
    EXPECT_GT(e.step(), 0);
    EXPECT_LE(e.step(), 100000);
  }
  Lattice poisoned(BinaryGeometry::all_pore({4, 4}), {});
  poisoned.set_f(0, 1, 1, -5.0);
  EXPECT_THROW(poisoned.collide(), InstabilityError);
  EXPECT_THROW(poisoned.run(3), InstabilityError);
}

TEST(Lattice, ChannelReachesPoiseuilleProfile) {
  const int gap = 10;
  const double F = 1e-6, tau = 1.0, nu = (tau - 0.5) / 3.0;
  Lattice lat(testing::channel_geometry(4, gap), {tau, {F, 0.0}});
  lat.run(20000);
  const auto field = lat.macroscopics();
  const double umax = testing::poiseuille_ux(gap / 2, gap, F, 1.0, nu);
  for (int y = 1; y <= gap; ++y) {
    const double u = field.ux[field.index(2, y)];
    EXPECT_NEAR(u, testing::poiseuille_ux(y, gap, F, 1.0, nu), 0.01 * umax) << "row " << y;
    EXPECT_NEAR(field.uy[field.index(2, y)], 0.0, 1e-15);
  }
}

}  // namespace
}  // namespace porelbm
