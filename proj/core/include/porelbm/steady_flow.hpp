#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "porelbm/geometry.hpp"
#include "porelbm/lattice.hpp"

namespace porelbm {

struct SimulationConfig {
  double tau = 1.0;
  Vec2 force{1e-6, 0.0};
  std::int64_t max_steps = 200'000;
  std::int64_t check_interval = 1'000;
  double rel_tol = 1e-6;
  int ke_window = 5;

  void validate() const;
  nlohmann::json to_json() const;
  static SimulationConfig from_json(const nlohmann::json& j);
};

struct KineticEnergySample {
  std::int64_t step = 0;
  double energy = 0.0;
};

struct SteadyResult {
  FlowField field;
  std::int64_t steps_run = 0;
  bool converged = false;
  std::vector<KineticEnergySample> ke_history;
  double permeability_x = 0.0;
  Vec2 mean_u;           // superficial: averaged over all cells
  double mean_pore_rho = 0.0;
};

// 0.5 * sum over pore nodes of rho |u|^2.
double kinetic_energy(const FlowField& field);

// Superficial mean velocity: solid cells contribute zero.
Vec2 mean_velocity(const FlowField& field);
double mean_pore_density(const FlowField& field);

// Kinematic viscosity cs2 (tau - 1/2).
double lattice_viscosity(double tau);

// k = mu <u_a> / F_a along lattice axis a (0 = x, 1 = y), with
// mu = mean pore density * viscosity and grad p replaced by -F.
double directional_permeability(const FlowField& field, double tau, Vec2 force, int axis);

// x component of the above; F_x == 0 is an UndefinedPermeabilityError.
double permeability(const FlowField& field, const SimulationConfig& cfg);

// True once every checkpoint in the last ke_window intervals is within
// rel_tol (relative) of the latest kinetic energy.
bool ke_converged(const std::vector<KineticEnergySample>& history, int ke_window, double rel_tol);

// Steps the lattice from rest until the kinetic energy plateaus or
// max_steps is reached. Throws NoFlowDomainError for an all-solid mask and
// UnboundedAccelerationError for an all-pore mask under nonzero force.
SteadyResult run_to_steady(const BinaryGeometry& geom, const SimulationConfig& cfg);

}  // namespace porelbm
