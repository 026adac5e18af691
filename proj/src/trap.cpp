#include "fanotrap/trap.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace fanotrap {

namespace {
using namespace fanotrap::constants;

void require_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ValidationError(field, "must be positive and finite, got " + std::to_string(v));
}
void require_finite(double v, const char* field) {
  if (!std::isfinite(v))
    throw ValidationError(field, "must be finite");
}
}  // namespace

void TrapConfig::validate() const {
  require_positive(laser_power, "trap.laser_power");
  require_positive(wavelength, "trap.wavelength");
  require_positive(waist_radius, "trap.waist_radius");
  require_positive(rayleigh_length, "trap.rayleigh_length");
  require_positive(particle_radius, "trap.particle_radius");
  require_positive(particle_density, "trap.particle_density");
  require_positive(susceptibility, "trap.susceptibility");
  require_positive(scattering_cross_section_scale, "trap.scattering_cross_section_scale");
  require_finite(nonlinearity, "trap.nonlinearity");
  if (nonlinearity < 0.0)
    throw ValidationError("trap.nonlinearity", "must be >= 0");
}

double TrapConfig::particle_volume() const {
  return 4.0 / 3.0 * kPi * particle_radius * particle_radius * particle_radius;
}

double TrapConfig::particle_mass() const { return particle_density * particle_volume(); }

double TrapConfig::beam_cross_section() const { return kPi * waist_radius * waist_radius; }

double TrapConfig::trap_frequency() const {
  const double w0_sq = 2.0 * laser_power * susceptibility /
                       (kSpeedOfLight * beam_cross_section() * particle_density *
                        rayleigh_length * rayleigh_length);
  return std::sqrt(w0_sq);
}

void NeedleConfig::validate() const {
  require_finite(voltage, "needle.voltage");
  require_positive(tip_distance, "needle.tip_distance");
  require_positive(tip_radius, "needle.tip_radius");
  require_positive(charge_calibration, "needle.charge_calibration");
  if (needle_charge_override != kNoOverride) {
    require_finite(needle_charge_override, "needle.needle_charge_override");
    // Sign of the charge must track the sign of the applied voltage.
    if (voltage != 0.0 && needle_charge_override * voltage < 0.0)
      throw ValidationError("needle.needle_charge_override",
                            "sign must match needle.voltage");
    if (voltage == 0.0 && needle_charge_override != 0.0)
      throw ValidationError("needle.needle_charge_override",
                            "must be 0 when needle.voltage is 0");
  }
}

double NeedleConfig::charge() const {
  if (needle_charge_override != kNoOverride) return needle_charge_override;
  return 4.0 * constants::kPi * constants::kVacuumPermittivity * tip_radius * voltage *
         charge_calibration;
}

void ParticleState::validate() const {
  require_finite(z, "state.z");
  require_finite(p_z, "state.p_z");
  require_finite(charge, "state.charge");
  // Charge quantization: integer multiple of e0 within 1e-6 relative.
  const double n = charge / constants::kElementaryCharge;
  const double nearest = std::round(n);
  const double tol = 1e-6 * std::max(1.0, std::abs(n));
  if (std::abs(n - nearest) > tol)
    throw ValidationError("state.charge",
                          "must be an integer multiple of the elementary charge");
}

// ---------- potentials ----------

double u_opt(double z, const TrapConfig& trap) {
  const double omega0 = trap.trap_frequency();
  const double m = trap.particle_mass();
  return 0.5 * m * omega0 * omega0 * z * z - trap.nonlinearity * z * z * z * z;
}

double scattering_rate(const TrapConfig& trap) {
  using namespace constants;
  const double v0 = trap.particle_volume();
  const double lam = trap.wavelength;
  const double sigma_r = kPi * kPi * v0 * v0 / (lam * lam * lam * lam) *
                         trap.scattering_cross_section_scale;
  const double omega_l = 2.0 * kPi * kSpeedOfLight / lam;
  return (sigma_r / trap.beam_cross_section()) * trap.laser_power / (kHbar * omega_l);
}

double u_scatt(double z, const TrapConfig& trap) {
  using namespace constants;
  const double w0 = trap.waist_radius;
  const double lam = trap.wavelength;
  const double gs = scattering_rate(trap);
  const double coef = 32.0 * kPi * kPi * kPi * kHbar * gs * w0 * w0 / (3.0 * lam * lam);
  return -coef * std::atan(lam * z / (kPi * w0 * w0));
}

double u_el(double z, const NeedleConfig& needle, double charge) {
  using namespace constants;
  const double r = needle.tip_distance;
  return charge * needle.charge() * z /
         (4.0 * kPi * kVacuumPermittivity * std::sqrt(2.0) * r * r);
}

// ---------- forces ----------

double total_force(double z, const TrapConfig& trap, const NeedleConfig& needle,
                   double charge) {
  using namespace constants;
  const double omega0 = trap.trap_frequency();
  const double m = trap.particle_mass();
  const double w0 = trap.waist_radius;
  const double lam = trap.wavelength;
  // -d u_opt/dz
  double f = -m * omega0 * omega0 * z + 4.0 * trap.nonlinearity * z * z * z;
  // -d u_scatt/dz = +(32 pi^2 hbar Gamma_s / (3 lambda)) / (1 + (lambda z / (pi w0^2))^2)
  const double gs = scattering_rate(trap);
  const double a = lam * z / (kPi * w0 * w0);
  f += 32.0 * kPi * kPi * kHbar * gs / (3.0 * lam) / (1.0 + a * a);
  // -d u_el/dz (constant)
  const double r = needle.tip_distance;
  f += -charge * needle.charge() / (4.0 * kPi * kVacuumPermittivity * std::sqrt(2.0) * r * r);
  return f;
}

double total_stiffness(double z, const TrapConfig& trap) {
  using namespace constants;
  const double omega0 = trap.trap_frequency();
  const double m = trap.particle_mass();
  const double w0 = trap.waist_radius;
  const double lam = trap.wavelength;
  const double gs = scattering_rate(trap);
  const double w0_4 = w0 * w0 * w0 * w0;
  const double denom = kPi * kPi * w0_4 + lam * lam * z * z;
  // d^2 u_scatt/dz^2 = 64 pi^4 lambda w0^4 hbar Gamma_s z / (3 (pi^2 w0^4 + lambda^2 z^2)^2)
  const double scatt = 64.0 * kPi * kPi * kPi * kPi * lam * w0_4 * kHbar * gs * z /
                       (3.0 * denom * denom);
  return m * omega0 * omega0 - 12.0 * trap.nonlinearity * z * z + scatt;
}

// ---------- working point ----------

double find_equilibrium(const TrapConfig& trap, const NeedleConfig& needle,
                        double charge) {
  constexpr double kForceTol = 1e-24;  // N
  constexpr int kMaxIter = 100;
  double z = 0.0;
  double f = total_force(z, trap, needle, charge);
  for (int it = 0; it < kMaxIter; ++it) {
    if (std::abs(f) < kForceTol) {
      if (total_stiffness(z, trap) <= 0.0)
        throw NotConfiningError("equilibrium at z = " + std::to_string(z) +
                                " has non-positive stiffness");
      return z;
    }
    const double k = total_stiffness(z, trap);
    if (k == 0.0 || !std::isfinite(k))
      throw NotConfiningError("zero or non-finite stiffness during Newton iteration");
    double step = f / k;  // dF/dz = -stiffness, so Newton step is +F/k
    // Damp the step while it overshoots (|F| grows).
    for (int halvings = 0; halvings < 60; ++halvings) {
      const double f_new = total_force(z + step, trap, needle, charge);
      if (std::abs(f_new) < std::abs(f) || std::abs(f_new) < kForceTol) {
        z += step;
        f = f_new;
        break;
      }
      step *= 0.5;
      if (halvings == 59)
        throw NoConvergenceError("equilibrium search stalled: step damping exhausted");
    }
  }
  throw NoConvergenceError("equilibrium search did not converge in 100 iterations");
}

double linearized_equilibrium(const TrapConfig& trap, const NeedleConfig& needle,
                              double charge) {
  using namespace constants;
  const double omega0 = trap.trap_frequency();
  const double m = trap.particle_mass();
  const double r = needle.tip_distance;
  const double slope_el = charge * needle.charge() /
                          (4.0 * kPi * kVacuumPermittivity * std::sqrt(2.0) * r * r);
  const double slope_scatt = 32.0 * kPi * kPi * scattering_rate(trap) * kHbar /
                             (3.0 * trap.wavelength);
  return -(slope_el - slope_scatt) / (m * omega0 * omega0);
}

double harmonic_frequency(double z0, const TrapConfig& trap) {
  const double m = trap.particle_mass();
  const double radicand = total_stiffness(z0, trap) / m;
  if (!(radicand > 0.0))
    throw ImaginaryFrequencyError("non-positive curvature at z0 = " + std::to_string(z0));
  return std::sqrt(radicand);
}

// ---------- linearized frequency response ----------

double mass_shift_coefficient(const TrapConfig& trap) {
  using namespace constants;
  const double omega0 = trap.trap_frequency();
  const double w0_4 = std::pow(trap.waist_radius, 4);
  const double lam3 = std::pow(trap.wavelength, 3);
  const double rho2 = trap.particle_density * trap.particle_density;
  const double inner = 16.0 * kPi / 3.0 * trap.laser_power /
                       (std::pow(omega0, 1.5) * w0_4 * kSpeedOfLight * lam3 * rho2);
  return inner * inner;
}

double coulomb_shift_coefficient(const TrapConfig& trap, const NeedleConfig& needle) {
  using namespace constants;
  const double omega0 = trap.trap_frequency();
  const double r2 = needle.tip_distance * needle.tip_distance;
  const double lam2 = trap.wavelength * trap.wavelength;
  const double w0_6 = std::pow(trap.waist_radius, 6);
  const double rho2 = trap.particle_density * trap.particle_density;
  const double magnitude =
      2.0 * std::sqrt(2.0) * trap.laser_power /
      (3.0 * kPi * kVacuumPermittivity * r2 * lam2 * w0_6 * std::pow(omega0, 3) * rho2 *
       kSpeedOfLight);
  // Repulsion from the tip moves the working point to the low-curvature side
  // of the recoil tilt, so the frequency falls as qQ grows.
  return -magnitude;
}

double frequency_shift_model(const TrapConfig& trap, const NeedleConfig& needle,
                             double charge, double mass) {
  return trap.trap_frequency() + mass_shift_coefficient(trap) * mass * mass +
         coulomb_shift_coefficient(trap, needle) * charge * needle.charge();
}

}  // namespace fanotrap
