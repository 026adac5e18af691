#include "fanotrap/langevin.hpp"

#include <cmath>
#include <random>
#include <string>

namespace fanotrap {

using namespace fanotrap::constants;

void SimulationConfig::validate() const {
  if (!(timestep > 0.0) || !std::isfinite(timestep))
    throw ValidationError("simulation.timestep", "must be positive and finite");
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw ValidationError("simulation.duration", "must be positive and finite");
  if (duration < 1000.0 * timestep)
    throw ValidationError("simulation.duration", "must cover at least 1000 timesteps");
  if (gas_pressure < 0.0 || !std::isfinite(gas_pressure))
    throw ValidationError("simulation.gas_pressure", "must be >= 0 and finite");
  if (gas_temperature < 0.0 || !std::isfinite(gas_temperature))
    throw ValidationError("simulation.gas_temperature", "must be >= 0 and finite");
  if (!(gas_molecular_mass > 0.0) || !std::isfinite(gas_molecular_mass))
    throw ValidationError("simulation.gas_molecular_mass", "must be positive");
  if (!std::isfinite(feedback_strength))
    throw ValidationError("simulation.feedback_strength", "must be finite");
  if (record_stride < 1)
    throw ValidationError("simulation.record_stride", "must be >= 1");
  if (!std::isfinite(initial_displacement))
    throw ValidationError("simulation.initial_displacement", "must be finite");
  if (!std::isfinite(initial_momentum))
    throw ValidationError("simulation.initial_momentum", "must be finite");
}

double gas_damping(double pressure, double temperature, const TrapConfig& trap,
                   double gas_molecular_mass) {
  if (pressure < 0.0) throw ValidationError("gas_pressure", "must be >= 0");
  if (pressure == 0.0) return 0.0;
  if (!(temperature > 0.0))
    throw ValidationError("gas_temperature", "must be > 0 at nonzero pressure");
  return pressure / (trap.particle_density * trap.particle_radius) *
         std::sqrt(2.0 * gas_molecular_mass / (kPi * kBoltzmann * temperature));
}

namespace {

// Flattened force coefficients for the tight integration loop. All values
// derive from the same expressions as the potential functions in trap.cpp.
struct ForceCoeffs {
  double mass;
  double m_omega0_sq;   // m * omega0^2
  double quartic;       // 4 * eta
  double scatt_slope;   // 32 pi^2 hbar Gamma_s / (3 lambda), force at z = 0
  double inv_zscale;    // lambda / (pi w0^2)
  double coulomb;       // q Q / (4 pi eps0 sqrt2 R^2), constant force term
  double beta;

  static ForceCoeffs make(const TrapConfig& trap, const NeedleConfig& needle,
                          double charge, double beta) {
    ForceCoeffs c{};
    c.mass = trap.particle_mass();
    const double omega0 = trap.trap_frequency();
    c.m_omega0_sq = c.mass * omega0 * omega0;
    c.quartic = 4.0 * trap.nonlinearity;
    const double gs = scattering_rate(trap);
    c.scatt_slope = 32.0 * kPi * kPi * kHbar * gs / (3.0 * trap.wavelength);
    c.inv_zscale = trap.wavelength / (kPi * trap.waist_radius * trap.waist_radius);
    const double r = needle.tip_distance;
    c.coulomb = charge * needle.charge() /
                (4.0 * kPi * kVacuumPermittivity * std::sqrt(2.0) * r * r);
    c.beta = beta;
    return c;
  }

  // -d/dz (u_opt + u_scatt + u_el) - f_fb
  double force(double z, double p) const {
    const double a = inv_zscale * z;
    const double grad_opt_scatt =
        m_omega0_sq * z - quartic * z * z * z - scatt_slope / (1.0 + a * a);
    double f = -grad_opt_scatt - coulomb;
    if (beta != 0.0) f -= beta * grad_opt_scatt * z * p;
    return f;
  }
};

}  // namespace

double feedback_force(const ParticleState& state, const TrapConfig& trap, double beta) {
  const double omega0 = trap.trap_frequency();
  const double m = trap.particle_mass();
  const double z = state.z;
  const double a = trap.wavelength * z / (kPi * trap.waist_radius * trap.waist_radius);
  const double grad = m * omega0 * omega0 * z - 4.0 * trap.nonlinearity * z * z * z -
                      32.0 * kPi * kPi * kHbar * scattering_rate(trap) /
                          (3.0 * trap.wavelength) / (1.0 + a * a);
  return beta * grad * z * state.p_z;
}

Trajectory simulate(const TrapConfig& trap, const NeedleConfig& needle, double charge,
                    const SimulationConfig& sim) {
  trap.validate();
  needle.validate();
  sim.validate();
  ParticleState init{0.0, 0.0, charge};
  init.validate();

  const double z0 = find_equilibrium(trap, needle, charge);
  const double omega_m = harmonic_frequency(z0, trap);
  if (sim.timestep * omega_m >= 0.1)
    throw ResolutionGuardError("timestep * omega_m = " +
                               std::to_string(sim.timestep * omega_m) +
                               " (must stay below 0.1)");

  const double gamma =
      gas_damping(sim.gas_pressure, sim.gas_temperature, trap, sim.gas_molecular_mass);
  const auto coeffs = ForceCoeffs::make(trap, needle, charge, sim.feedback_strength);
  const double m = coeffs.mass;
  const double dt = sim.timestep;
  const double half_dt = 0.5 * dt;
  // Exact Ornstein-Uhlenbeck update for dp = -2 gamma p dt + sqrt(4 gamma m kB T) dW:
  // p -> c p + sqrt((1 - c^2) m kB T) xi with c = exp(-2 gamma dt).
  const double ou_decay = std::exp(-2.0 * gamma * dt);
  const double ou_noise = std::sqrt(std::max(
      0.0, (1.0 - ou_decay * ou_decay) * m * kBoltzmann * sim.gas_temperature));

  const auto n_steps = static_cast<std::int64_t>(std::llround(sim.duration / dt));
  const double z_limit = 10.0 * trap.waist_radius;

  Trajectory traj;
  traj.trap = trap;
  traj.needle = needle;
  traj.charge = charge;
  traj.sim = sim;
  traj.equilibrium_z = z0;
  traj.sample_interval = dt * sim.record_stride;
  const std::size_t n_samples = static_cast<std::size_t>(n_steps / sim.record_stride) + 1;
  traj.z.reserve(n_samples);
  traj.p.reserve(n_samples);

  std::mt19937_64 rng(sim.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  double z = z0 + sim.initial_displacement;
  double p = sim.initial_momentum;
  traj.z.push_back(z);
  traj.p.push_back(p);

  for (std::int64_t step = 1; step <= n_steps; ++step) {
    p += half_dt * coeffs.force(z, p);
    z += half_dt * p / m;
    if (ou_noise > 0.0) {
      p = ou_decay * p + ou_noise * gauss(rng);
    } else {
      p *= ou_decay;
    }
    z += half_dt * p / m;
    p += half_dt * coeffs.force(z, p);
    if (std::abs(z) > z_limit)
      throw UnstableError("particle left the trap (|z| > 10 w0) at step " +
                          std::to_string(step));
    if (step % sim.record_stride == 0) {
      traj.z.push_back(z);
      traj.p.push_back(p);
    }
  }
  return traj;
}

}  // namespace fanotrap
