#pragma once

#include <vector>

#include "fanotrap/trap.hpp"

namespace fanotrap {

// Needle charge at an explicit bias voltage, honoring the calibration factor
// and the charge override if one is set.
double needle_charge_at(const NeedleConfig& needle, double voltage);

// Predicted asymmetry parameter of the anti-resonance for a particle of
// charge q against needle charge Q: e0^2 / (q Q), signed. Throws
// InvalidInputError when q Q = 0.
double fano_parameter_prediction(double particle_charge, double needle_charge);

// Static Coulomb force between particle and tip at separation R,
// q Q / (4 pi eps0 R^2); positive = repulsive. Distance must be positive.
double static_force(double particle_charge, double needle_charge, double distance);

// One point of a frequency-vs-voltage sweep.
struct FrequencyObservation {
  double voltage = 0.0;      // needle bias (V)
  double omega_m = 0.0;      // measured mechanical frequency (rad/s)
  double omega_error = 0.0;  // 1-sigma of omega_m (rad/s); any value <= 0
                             // switches the whole fit to unweighted mode
};

struct InferenceResult {
  double mass = 0.0;  // kg
  double mass_error = 0.0;
  double charge = 0.0;  // C, signed
  double charge_error = 0.0;
  double charge_in_e0 = 0.0;
  double nearest_integer_charge = 0.0;
  bool charge_quantized = false;  // recovered charge consistent with an
                                  // integer multiple of e0
  double charge_to_mass = 0.0;  // C/kg, signed
  double charge_to_mass_error = 0.0;
  double mass_squared = 0.0;  // raw linear unknown s = m^2
  double mass_squared_error = 0.0;
  double mass_charge_covariance = 0.0;  // cov(s, q) of the linear solve
  double chi2_per_dof = 0.0;
  int n_points = 0;
};

// Invert the linearized frequency response
//   omega_i = omega_0 + mass_shift * m^2 + coulomb_shift * q * Q(V_i)
// for (m^2, q) by exact weighted least squares. omega_0 and both shift
// coefficients come from the trap/needle configuration, Q(V) from the
// needle's sphere model. Throws DegenerateDesignError when the two columns
// cannot be separated (e.g. all voltages equal) and NegativeMassError when
// the recovered m^2 is non-positive.
InferenceResult fit_frequency_vs_voltage(const TrapConfig& trap, const NeedleConfig& needle,
                                         const std::vector<FrequencyObservation>& observations);

}  // namespace fanotrap
