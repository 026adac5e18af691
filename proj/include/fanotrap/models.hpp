#pragma once

#include <cmath>

#include "fanotrap/errors.hpp"

namespace fanotrap {

// One-sided displacement-PSD line shapes, all in angular frequency (rad/s).
// Amplitudes are in arbitrary (detector) units: the physical scale factors
// are absorbed into the weights, only ratios and shapes carry meaning.

// floor + amplitude / (w^2 G^2 + (w^2 - wm^2)^2)
struct LorentzianParams {
  double omega_m = 0.0;    // rad/s
  double gamma = 0.0;      // total linewidth Gamma (rad/s)
  double amplitude = 0.0;  // arbitrary units * (rad/s)^4
  double floor = 0.0;      // arbitrary units

  void validate() const;
};

// floor + lorentzian_weight * S_coll + fano_weight * S_el with
//   S_coll(w) = 1 / (w^2 G^2 + (w^2 - wm^2)^2)                  (unit numerator)
//   S_el(w)   = (-f gel^2 + (w^2 - wm^2))^2 / (w^2 G^2 + (w^2 - wm^2)^2),
// so S_el -> 1 for w -> inf (unit high-frequency plateau before weighting)
// and S_el = 0 exactly at w_dip^2 = wm^2 + f gel^2.
struct CompositeModelParams {
  double omega_m = 0.0;           // rad/s
  double gamma = 0.0;             // rad/s
  double noise_floor = 0.0;       // A
  double lorentzian_weight = 0.0; // B
  double fano_weight = 0.0;       // C
  double fano_param = 0.0;        // f, dimensionless, sign selects the dip side
  double gamma_el = 1.0;          // characteristic rate of the charge pathway, 1/s

  void validate() const;

  // f * gel^2: the only combination of (f, gel) the line shape depends on.
  double fano_shift() const { return fano_param * gamma_el * gamma_el; }
};

inline double lorentzian_kernel(double omega, double omega_m, double gamma) {
  const double y = omega * omega - omega_m * omega_m;
  return 1.0 / (omega * omega * gamma * gamma + y * y);
}

inline double fano_kernel(double omega, double omega_m, double gamma, double fano_shift) {
  const double y = omega * omega - omega_m * omega_m;
  const double num = y - fano_shift;
  return num * num / (omega * omega * gamma * gamma + y * y);
}

inline double lorentzian_model(double omega, const LorentzianParams& p) {
  return p.floor + p.amplitude * lorentzian_kernel(omega, p.omega_m, p.gamma);
}

inline double composite_model(double omega, const CompositeModelParams& p) {
  return p.noise_floor +
         p.lorentzian_weight * lorentzian_kernel(omega, p.omega_m, p.gamma) +
         p.fano_weight * fano_kernel(omega, p.omega_m, p.gamma, p.fano_shift());
}

// The matched Lorentzian-only reference curve: the Fano kernel replaced by its
// high-frequency plateau (1), so both curves share the same far-field floor.
// Anti-resonance suppression factors are measured against this envelope.
inline double lorentzian_envelope(double omega, const CompositeModelParams& p) {
  return p.noise_floor + p.fano_weight +
         p.lorentzian_weight * lorentzian_kernel(omega, p.omega_m, p.gamma);
}

// Location of the anti-resonance zero, w_dip = sqrt(wm^2 + f gel^2).
// Throws InvalidInputError when the radicand is non-positive (dip would sit
// at or below zero frequency).
double dip_frequency(const CompositeModelParams& p);

}  // namespace fanotrap
