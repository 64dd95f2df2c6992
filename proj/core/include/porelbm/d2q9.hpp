#pragma once

#include <array>

namespace porelbm {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

// D2Q9 velocity set: rest, four axis links, four diagonal links.
namespace d2q9 {

inline constexpr int Q = 9;

inline constexpr std::array<int, Q> ex = {0, 1, 0, -1, 0, 1, -1, -1, 1};
inline constexpr std::array<int, Q> ey = {0, 0, 1, 0, -1, 1, 1, -1, -1};

inline constexpr std::array<double, Q> w = {
    4.0 / 9.0,  1.0 / 9.0,  1.0 / 9.0,  1.0 / 9.0, 1.0 / 9.0,
    1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0};

inline constexpr std::array<int, Q> opposite = {0, 3, 4, 1, 2, 7, 8, 5, 6};

inline constexpr double cs2 = 1.0 / 3.0;

}  // namespace d2q9

// f_i^eq = w_i rho [1 + e.u/cs2 + (e.u)^2/(2 cs2^2) - u.u/(2 cs2)]
inline std::array<double, d2q9::Q> equilibrium(double rho, Vec2 u) {
  std::array<double, d2q9::Q> feq{};
  const double usq = u.x * u.x + u.y * u.y;
  for (int i = 0; i < d2q9::Q; ++i) {
    const double eu = d2q9::ex[i] * u.x + d2q9::ey[i] * u.y;
    feq[i] = d2q9::w[i] * rho * (1.0 + 3.0 * eu + 4.5 * eu * eu - 1.5 * usq);
  }
  return feq;
}

// Second-order body-force source
//   S_i = (1 - 1/(2 tau)) w_i [(e_i - u)/cs2 + (e_i.u) e_i / cs2^2] . F
// where u already includes the half-force shift.
inline std::array<double, d2q9::Q> forcing_term(Vec2 u, Vec2 force, double tau) {
  std::array<double, d2q9::Q> s{};
  const double pre = 1.0 - 0.5 / tau;
  for (int i = 0; i < d2q9::Q; ++i) {
    const double eu = d2q9::ex[i] * u.x + d2q9::ey[i] * u.y;
    const double gx = 3.0 * (d2q9::ex[i] - u.x) + 9.0 * eu * d2q9::ex[i];
    const double gy = 3.0 * (d2q9::ey[i] - u.y) + 9.0 * eu * d2q9::ey[i];
    s[i] = pre * d2q9::w[i] * (gx * force.x + gy * force.y);
  }
  return s;
}

}  // namespace porelbm
