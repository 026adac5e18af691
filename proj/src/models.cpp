#include "fanotrap/models.hpp"

#include <string>

namespace fanotrap {

void LorentzianParams::validate() const {
  if (!(omega_m > 0.0) || !std::isfinite(omega_m))
    throw ValidationError("lorentzian.omega_m", "must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw ValidationError("lorentzian.gamma", "must be positive");
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
    throw ValidationError("lorentzian.amplitude", "must be >= 0");
  if (!(floor >= 0.0) || !std::isfinite(floor))
    throw ValidationError("lorentzian.floor", "must be >= 0");
}

void CompositeModelParams::validate() const {
  if (!(omega_m > 0.0) || !std::isfinite(omega_m))
    throw ValidationError("composite.omega_m", "must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw ValidationError("composite.gamma", "must be positive");
  if (!(noise_floor >= 0.0) || !std::isfinite(noise_floor))
    throw ValidationError("composite.noise_floor", "must be >= 0");
  if (!(lorentzian_weight >= 0.0) || !std::isfinite(lorentzian_weight))
    throw ValidationError("composite.lorentzian_weight", "must be >= 0");
  if (!(fano_weight >= 0.0) || !std::isfinite(fano_weight))
    throw ValidationError("composite.fano_weight", "must be >= 0");
  if (!(gamma_el > 0.0) || !std::isfinite(gamma_el))
    throw ValidationError("composite.gamma_el", "must be positive");
  if (!std::isfinite(fano_param))
    throw ValidationError("composite.fano_param", "must be finite");
}

double dip_frequency(const CompositeModelParams& p) {
  const double radicand = p.omega_m * p.omega_m + p.fano_shift();
  if (!(radicand > 0.0))
    throw InvalidInputError("anti-resonance lies at non-positive frequency: wm^2 + f gel^2 = " +
                            std::to_string(radicand));
  return std::sqrt(radicand);
}

}  // namespace fanotrap
