#pragma once

#include <cstdint>
#include <vector>

#include "fanotrap/trap.hpp"

namespace fanotrap {

// Stochastic integration settings for the axial Langevin dynamics
//   dz/dt  = p_z / m
//   dp_z/dt = -d/dz (u_opt + u_scatt + u_el) - f_fb - 2 gamma_coll p_z + noise,
// with the noise fixed by fluctuation-dissipation (one-sided force PSD
// 4 gamma_coll m kB T) so that gas_pressure = 0 means no damping and no noise.
struct SimulationConfig {
  double timestep = 2e-7;          // s
  double duration = 1.0;           // s
  std::uint64_t seed = 1;
  double gas_pressure = 0.0;       // Pa
  double gas_temperature = 295.0;  // K
  double gas_molecular_mass = constants::kNitrogenMass;  // kg
  double feedback_strength = 0.0;  // beta, 1/(J s)
  int record_stride = 1;           // store every record_stride-th step
  // Initial condition relative to the static working point z0.
  double initial_displacement = 0.0;  // m
  double initial_momentum = 0.0;      // kg m/s

  void validate() const;
};

// Recorded phase-space samples plus everything needed to reproduce them.
struct Trajectory {
  std::vector<double> z;   // m
  std::vector<double> p;   // kg m/s
  double sample_interval = 0.0;  // s between stored samples
  double equilibrium_z = 0.0;    // working point the run started from

  TrapConfig trap;
  NeedleConfig needle;
  double charge = 0.0;
  SimulationConfig sim;

  std::size_t size() const { return z.size(); }
  double time_at(std::size_t i) const { return sample_interval * static_cast<double>(i); }
};

// Collisional momentum relaxation rate gamma_coll for a sphere in the
// free-molecular regime (Epstein 1924, specular reflection):
//   2 gamma_coll = (8/3) sqrt(2 pi m_gas/(kB T)) p r^2 / m
//                = drag force coefficient / m,
// so gamma_coll = (p/(rho r)) sqrt(2 m_gas/(pi kB T)). Proportional to
// pressure, inverse radius, inverse density. Returns 0 at zero pressure.
double gas_damping(double pressure, double temperature, const TrapConfig& trap,
                   double gas_molecular_mass = constants::kNitrogenMass);

// Parametric velocity feedback: f_fb = beta * d/dz(u_opt + u_scatt) * z * p_z.
// The Coulomb term is deliberately excluded from the gradient. beta > 0 cools.
double feedback_force(const ParticleState& state, const TrapConfig& trap, double beta);

// Integrate the dynamics with a splitting scheme: deterministic half-kick /
// half-drift, exact Ornstein-Uhlenbeck damping+noise substep, half-drift /
// half-kick. Symplectic (velocity Verlet) when gamma_coll = beta = 0.
// Bit-reproducible for identical (seed, configs).
//
// Throws ResolutionGuardError when timestep * omega_m >= 0.1 and
// UnstableError when |z| exceeds 10 waist radii during the run.
Trajectory simulate(const TrapConfig& trap, const NeedleConfig& needle, double charge,
                    const SimulationConfig& sim);

}  // namespace fanotrap
