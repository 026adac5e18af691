#include "fanotrap/inference.hpp"

#include <cmath>
#include <string>

#include "fanotrap/constants.hpp"
#include "fanotrap/errors.hpp"

namespace fanotrap {

double needle_charge_at(const NeedleConfig& needle, double voltage) {
  NeedleConfig biased = needle;
  biased.voltage = voltage;
  return biased.charge();
}

double fano_parameter_prediction(double particle_charge, double needle_charge) {
  const double qq = particle_charge * needle_charge;
  if (qq == 0.0 || !std::isfinite(qq))
    throw InvalidInputError("fano parameter undefined for q*Q = 0");
  const double e0 = constants::kElementaryCharge;
  return e0 * e0 / qq;
}

double static_force(double particle_charge, double needle_charge, double distance) {
  if (!(distance > 0.0) || !std::isfinite(distance))
    throw InvalidInputError("separation distance must be positive");
  return particle_charge * needle_charge /
         (4.0 * constants::kPi * constants::kVacuumPermittivity * distance * distance);
}

InferenceResult fit_frequency_vs_voltage(
    const TrapConfig& trap, const NeedleConfig& needle,
    const std::vector<FrequencyObservation>& observations) {
  trap.validate();
  needle.validate();
  const std::size_t n = observations.size();
  if (n < 2)
    throw DegenerateDesignError("need at least 2 observations, got " +
                                std::to_string(n));

  const double omega0 = trap.trap_frequency();
  const double mass_shift = mass_shift_coefficient(trap);
  const double coulomb_shift = coulomb_shift_coefficient(trap, needle);

  bool weighted = true;
  for (const auto& obs : observations) {
    if (!std::isfinite(obs.voltage) || !std::isfinite(obs.omega_m) ||
        !(obs.omega_m > 0.0))
      throw ValidationError("observations", "voltages and frequencies must be finite, omega_m > 0");
    if (!(obs.omega_error > 0.0)) weighted = false;
  }

  // Design: y_i = omega_i - omega0 = x1 * s + x2_i * q with s = m^2,
  // x1 = mass_shift (same for every row), x2_i = coulomb_shift * Q(V_i).
  double m11 = 0.0, m12 = 0.0, m22 = 0.0, b1 = 0.0, b2 = 0.0;
  for (const auto& obs : observations) {
    const double w = weighted ? 1.0 / (obs.omega_error * obs.omega_error) : 1.0;
    const double x1 = mass_shift;
    const double x2 = coulomb_shift * needle_charge_at(needle, obs.voltage);
    const double y = obs.omega_m - omega0;
    m11 += w * x1 * x1;
    m12 += w * x1 * x2;
    m22 += w * x2 * x2;
    b1 += w * x1 * y;
    b2 += w * x2 * y;
  }

  const double det = m11 * m22 - m12 * m12;
  if (!(det > 1e-12 * m11 * m22) || m11 == 0.0 || m22 == 0.0)
    throw DegenerateDesignError(
        "voltage design cannot separate mass and charge (constant or all-zero bias?)");

  const double s = (m22 * b1 - m12 * b2) / det;
  const double q = (m11 * b2 - m12 * b1) / det;
  if (!(s > 0.0)) throw NegativeMassError("recovered m^2 = " + std::to_string(s));

  // Covariance of (s, q) is the inverse normal matrix; in unweighted mode it
  // is rescaled by the residual variance.
  double cov_ss = m22 / det, cov_sq = -m12 / det, cov_qq = m11 / det;
  double chi2 = 0.0;
  for (const auto& obs : observations) {
    const double w = weighted ? 1.0 / (obs.omega_error * obs.omega_error) : 1.0;
    const double y = obs.omega_m - omega0;
    const double pred = mass_shift * s +
                        coulomb_shift * needle_charge_at(needle, obs.voltage) * q;
    chi2 += w * (y - pred) * (y - pred);
  }
  const double dof = static_cast<double>(n) - 2.0;
  if (!weighted && dof > 0.0) {
    const double scale = chi2 / dof;
    cov_ss *= scale;
    cov_sq *= scale;
    cov_qq *= scale;
  }

  InferenceResult result;
  result.n_points = static_cast<int>(n);
  result.mass_squared = s;
  result.mass_squared_error = std::sqrt(std::max(cov_ss, 0.0));
  result.charge = q;
  result.charge_error = std::sqrt(std::max(cov_qq, 0.0));
  result.mass_charge_covariance = cov_sq;
  result.chi2_per_dof = dof > 0.0 ? chi2 / dof : 0.0;

  result.mass = std::sqrt(s);
  result.mass_error = result.mass_squared_error / (2.0 * result.mass);

  const double e0 = constants::kElementaryCharge;
  result.charge_in_e0 = q / e0;
  result.nearest_integer_charge = std::round(result.charge_in_e0);
  const double residual_e0 = std::abs(result.charge_in_e0 - result.nearest_integer_charge);
  result.charge_quantized =
      residual_e0 <= std::max(0.25, 2.0 * result.charge_error / e0);

  result.charge_to_mass = q / result.mass;
  // Delta method on (s, q): d(q/sqrt(s))/dq = 1/m, d/ds = -q / (2 s^{3/2}).
  const double dq = 1.0 / result.mass;
  const double ds = -q / (2.0 * s * result.mass);
  const double var_qm =
      dq * dq * cov_qq + ds * ds * cov_ss + 2.0 * dq * ds * cov_sq;
  result.charge_to_mass_error = std::sqrt(std::max(var_qm, 0.0));
  return result;
}

}  // namespace fanotrap
