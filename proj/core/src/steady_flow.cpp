#include "porelbm/steady_flow.hpp"

#include <algorithm>
#include <cmath>

#include "porelbm/error.hpp"

namespace porelbm {

void SimulationConfig::validate() const {
  if (!(tau > 0.5)) throw ParameterError("tau must be > 0.5");
  if (check_interval < 1) throw ParameterError("check_interval must be >= 1");
  if (max_steps < check_interval) throw ParameterError("max_steps must be >= check_interval");
  if (!(rel_tol > 0.0)) throw ParameterError("rel_tol must be > 0");
  if (ke_window < 1) throw ParameterError("ke_window must be >= 1");
  if (!std::isfinite(force.x) || !std::isfinite(force.y)) throw ParameterError("force must be finite");
}

nlohmann::json SimulationConfig::to_json() const {
  return {{"tau", tau},
          {"force", {force.x, force.y}},
          {"max_steps", max_steps},
          {"check_interval", check_interval},
          {"rel_tol", rel_tol},
          {"ke_window", ke_window},
          {"forcing", "second-order body force, half-force velocity shift"},
          {"bounce_back", "full-way"}};
}

SimulationConfig SimulationConfig::from_json(const nlohmann::json& j) {
  SimulationConfig cfg;
  cfg.tau = j.at("tau").get<double>();
  cfg.force = {j.at("force").at(0).get<double>(), j.at("force").at(1).get<double>()};
  cfg.max_steps = j.at("max_steps").get<std::int64_t>();
  cfg.check_interval = j.at("check_interval").get<std::int64_t>();
  cfg.rel_tol = j.at("rel_tol").get<double>();
  cfg.ke_window = j.at("ke_window").get<int>();
  return cfg;
}

double kinetic_energy(const FlowField& field) {
  double ke = 0.0;
  for (std::size_t k = 0; k < field.rho.size(); ++k) {
    ke += field.rho[k] * (field.ux[k] * field.ux[k] + field.uy[k] * field.uy[k]);
  }
  return 0.5 * ke;
}

Vec2 mean_velocity(const FlowField& field) {
  if (field.ux.empty()) throw ParameterError("empty flow field");
  double sx = 0.0, sy = 0.0;
  for (std::size_t k = 0; k < field.ux.size(); ++k) {
    sx += field.ux[k];
    sy += field.uy[k];
  }
  const auto n = static_cast<double>(field.ux.size());
  return {sx / n, sy / n};
}

double mean_pore_density(const FlowField& field) {
  double s = 0.0;
  std::size_t n = 0;
  for (const double r : field.rho) {
    if (r > 0.0) {
      s += r;
      ++n;
    }
  }
  return n ? s / static_cast<double>(n) : 0.0;
}

double lattice_viscosity(double tau) { return d2q9::cs2 * (tau - 0.5); }

double directional_permeability(const FlowField& field, double tau, Vec2 force, int axis) {
  const double f = axis == 0 ? force.x : force.y;
  if (f == 0.0) throw UndefinedPermeabilityError("driving force component is zero");
  const Vec2 u = mean_velocity(field);
  const double mu = mean_pore_density(field) * lattice_viscosity(tau);
  return mu * (axis == 0 ? u.x : u.y) / f;
}

double permeability(const FlowField& field, const SimulationConfig& cfg) {
  return directional_permeability(field, cfg.tau, cfg.force, 0);
}

bool ke_converged(const std::vector<KineticEnergySample>& history, int ke_window, double rel_tol) {
  if (ke_window < 1 || history.size() < static_cast<std::size_t>(ke_window) + 1) return false;
  const double last = history.back().energy;
  const auto first = history.end() - 1 - ke_window;
  if (last == 0.0) {
    return std::all_of(first, history.end(), [](const auto& s) { return s.energy == 0.0; });
  }
  return std::all_of(first, history.end(), [&](const auto& s) {
    return std::abs(s.energy - last) < rel_tol * last;
  });
}

SteadyResult run_to_steady(const BinaryGeometry& geom, const SimulationConfig& cfg) {
  cfg.validate();
  if (geom.pore_count() == 0) throw NoFlowDomainError("geometry has no pore cells");
  if (geom.solid_count() == 0 && (cfg.force.x != 0.0 || cfg.force.y != 0.0)) {
    throw UnboundedAccelerationError(
        "geometry has no solid cells; a body force accelerates the fluid without bound");
  }

  Lattice lattice(geom, {cfg.tau, cfg.force});
  SteadyResult result;
  result.ke_history.push_back({0, 0.0});
  while (lattice.steps_done() < cfg.max_steps) {
    const auto chunk = std::min(cfg.check_interval, cfg.max_steps - lattice.steps_done());
    lattice.run(chunk);
    const FlowField field = lattice.macroscopics();
    const double ke = kinetic_energy(field);
    if (!std::isfinite(ke)) throw InstabilityError("kinetic energy is not finite", lattice.steps_done());
    result.ke_history.push_back({lattice.steps_done(), ke});
    if (ke_converged(result.ke_history, cfg.ke_window, cfg.rel_tol)) {
      result.converged = true;
      result.field = field;
      break;
    }
    if (lattice.steps_done() >= cfg.max_steps) result.field = field;
  }
  result.steps_run = lattice.steps_done();
  result.mean_u = mean_velocity(result.field);
  result.mean_pore_rho = mean_pore_density(result.field);
  if (cfg.force.x != 0.0) result.permeability_x = permeability(result.field, cfg);
  return result;
}

}  // namespace porelbm
