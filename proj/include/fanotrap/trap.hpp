#pragma once

#include "fanotrap/constants.hpp"
#include "fanotrap/errors.hpp"

namespace fanotrap {

// Optical trap + trapped particle. The axial (z) degree of freedom only.
// Units: strict SI. All angular frequencies in rad/s.
struct TrapConfig {
  double laser_power = 0.05;         // W
  double wavelength = 1550e-9;       // m
  double waist_radius = 1.0e-6;      // m
  double rayleigh_length = 3.0e-6;   // m
  double particle_radius = 71.42e-9; // m
  double particle_density = 1800.0;  // kg/m^3
  double susceptibility = 0.9;       // effective coupling scalar, opaque here
  double nonlinearity = 0.0;         // J/m^4, quartic softening of the well
  // Dimensionless knob on the Rayleigh back-scattering cross section; the
  // printed sigma_R = pi^2 V0^2 / lambda^4 is dimensionally consistent but
  // not obviously the textbook sigma_R, so a correction factor is exposed.
  double scattering_cross_section_scale = 1.0;

  void validate() const;

  double particle_volume() const;    // (4/3) pi r^3
  double particle_mass() const;      // rho * V0
  double beam_cross_section() const; // sigma_L = pi w0^2
  double trap_frequency() const;     // omega_0, from omega_0^2 = 2 P chi / (c sigma_L rho z_R^2)
};

// Charged needle facing the trap. The needle tip sits a distance
// tip_distance from the trap center, at 45 degrees to the optical axis, so
// the linearized interaction energy along z is q*Q*z/(4 pi eps0 sqrt(2) R^2).
struct NeedleConfig {
  static constexpr double kNoOverride = -1.0e300;

  double voltage = 0.0;            // V
  double tip_distance = 14e-3;     // m, trap-center-to-tip
  double tip_radius = 68.81e-6;    // m, effective isolated-sphere radius
  double charge_calibration = 1.0; // dimensionless fudge on the sphere model
  // When set it overrides the isolated-sphere charge model.
  double needle_charge_override = kNoOverride;

  void validate() const;

  // Q = 4 pi eps0 * tip_radius * V * calibration, unless overridden.
  double charge() const;
};

// Instantaneous axial phase-space point of the trapped particle.
struct ParticleState {
  double z = 0.0;       // m
  double p_z = 0.0;     // kg m/s
  double charge = 0.0;  // C, must be an integer multiple of e0

  void validate() const;
};

// ---------- potentials (J) ----------

// Harmonic-plus-quartic optical well: (m/2) omega0^2 z^2 - eta z^4.
double u_opt(double z, const TrapConfig& trap);

// Photon-recoil (scattering) tilt:
//   -(32 pi^3 hbar Gamma_s w0^2 / (3 lambda^2)) * atan(lambda z / (pi w0^2)).
double u_scatt(double z, const TrapConfig& trap);

// Linearized Coulomb interaction with the needle: q Q z / (4 pi eps0 sqrt2 R^2).
double u_el(double z, const NeedleConfig& needle, double charge);

// Photon scattering rate Gamma_s = (sigma_R / sigma_L) * P / (hbar omega_L),
// with sigma_R = pi^2 V0^2 / lambda^4 (times the config correction factor)
// and omega_L = 2 pi c / lambda.
double scattering_rate(const TrapConfig& trap);

// ---------- forces and curvature (N, N/m) ----------

// Analytic -d/dz of (u_opt + u_scatt + u_el).
double total_force(double z, const TrapConfig& trap, const NeedleConfig& needle,
                   double charge);

// Analytic +d^2/dz^2 of the effective potential (stiffness; u_el drops out).
double total_stiffness(double z, const TrapConfig& trap);

// ---------- working point and frequencies ----------

// Root of total_force by damped Newton from z = 0. Converges when
// |F| < 1e-24 N; throws NoConvergenceError after 100 iterations and
// NotConfiningError when the stiffness at the root is non-positive.
double find_equilibrium(const TrapConfig& trap, const NeedleConfig& needle,
                        double charge);

// Small-displacement estimate of the working point:
//   z0 ~ -(1/(m omega0^2)) (qQ/(4 pi eps0 sqrt2 R^2) - 32 pi^2 Gamma_s hbar/(3 lambda)).
double linearized_equilibrium(const TrapConfig& trap, const NeedleConfig& needle,
                              double charge);

// Mechanical frequency at a working point z0:
//   omega_m = sqrt(omega0^2 - 12 eta z0^2/m
//                  + 64 pi^4 lambda w0^4 hbar z0 Gamma_s / (3 m (pi^2 w0^4 + lambda^2 z0^2)^2)),
// i.e. sqrt(total_stiffness(z0)/m). Throws ImaginaryFrequencyError if the
// radicand is non-positive.
double harmonic_frequency(double z0, const TrapConfig& trap);

// Coefficients of the linearized frequency response omega_m(m, qQ):
//   omega_m = omega0 + mass_shift_coefficient * m^2
//           + coulomb_shift_coefficient * q * Q.
// mass_shift_coefficient = (16 pi/3 * P / (omega0^{3/2} w0^4 c lambda^3 rho^2))^2.
// coulomb_shift_coefficient has magnitude 2 sqrt2 P/(3 pi eps0 R^2 lambda^2 w0^6 omega0^3 rho^2 c)
// and carries the sign fixed by the needle geometry: pushing the particle
// away from the tip lowers the recoil-tilt curvature, so d omega_m / d(qQ) < 0.
double mass_shift_coefficient(const TrapConfig& trap);
double coulomb_shift_coefficient(const TrapConfig& trap, const NeedleConfig& needle);

// Linearized mechanical frequency for a particle of the given mass and charge.
double frequency_shift_model(const TrapConfig& trap, const NeedleConfig& needle,
                             double charge, double mass);

}  // namespace fanotrap
