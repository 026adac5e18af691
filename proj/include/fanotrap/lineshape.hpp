#pragma once

#include <limits>

#include "fanotrap/models.hpp"
#include "fanotrap/spectrum.hpp"

namespace fanotrap {

// Whether the additive noise floor is a free parameter or pinned to zero
// (e.g. for noiseless synthetic detectors).
enum class FloorMode { Free, FixedZero };

// The anti-resonance line shape depends on (fano_param, gamma_el) only through
// the product u = fano_param * gamma_el^2, so a fit can identify u but never
// the factors. The gauge says how to split the fitted u for reporting.
enum class FanoGauge {
  UnitFanoParam,   // |fano_param| = 1, gamma_el = sqrt(|u|)
  FixedFanoParam,  // |fano_param| supplied (e.g. from a charge model)
  FixedGammaEl,    // gamma_el supplied (e.g. averaged over a sweep)
};

struct FitOptions {
  double f_min_hz = 0.0;  // fit window; bins outside [f_min, f_max] are ignored
  double f_max_hz = std::numeric_limits<double>::infinity();
  FloorMode floor_mode = FloorMode::Free;
  FanoGauge gauge = FanoGauge::UnitFanoParam;
  double fixed_fano_magnitude = 1.0;  // used when gauge == FixedFanoParam
  double fixed_gamma_el = 1.0;        // used when gauge == FixedGammaEl
  int max_iterations = 200;
};

struct LorentzianFit {
  LorentzianParams params;
  double omega_m_error = 0.0;
  double gamma_error = 0.0;
  double amplitude_error = 0.0;
  double floor_error = 0.0;
  double chi2_per_dof = 0.0;
  int n_points = 0;
  int n_iterations = 0;
  bool converged = false;
};

struct FanoFit {
  CompositeModelParams params;  // fano_param / gamma_el resolved per gauge
  double fano_shift = 0.0;      // u = fano_param * gamma_el^2, signed; what the
                                // data actually constrains
  double fano_shift_error = 0.0;
  double omega_m_error = 0.0;
  double noise_floor_error = 0.0;
  double lorentzian_weight_error = 0.0;
  double fano_weight_error = 0.0;
  // Correlation of (ln fano_param, ln gamma_el) along the u = const ridge:
  // exactly -1 by construction, recorded so downstream consumers see the
  // degeneracy instead of two seemingly independent numbers.
  double log_factor_correlation = -1.0;
  double dip_frequency_hz = 0.0;         // sqrt(wm^2 + u) / 2pi from the fit
  double second_dip_frequency_hz = 0.0;  // next-deepest candidate, 0 if none
  double chi2_per_dof = 0.0;
  int n_points = 0;
  int n_iterations = 0;
  bool converged = false;
};

// Fit floor + amplitude * S_coll to a spectrum in log space, weighting each
// bin by the exact log-variance of a chi^2-averaged periodogram (trigamma of
// n_averages) and correcting the log-mean bias (digamma). Throws NoPeakError
// when the window holds no usable resonance (peak on the window edge, or
// peak-to-median contrast below 3).
LorentzianFit fit_lorentzian(const Spectrum& spectrum, const FitOptions& options = {});

// Two-stage composite fit against a zero-charge reference. The composite
// curve is a ratio of quadratics in omega^2 with five identifiable
// coefficients, so floating {floor, weights, u} together leaves an exact
// one-parameter degeneracy; anchoring the floor A and collisional weight B
// to the zero-voltage measurement (where the charge pathway is absent and
// both are cleanly identified) removes it. Stage 1 takes {A, B, Gamma} from
// `baseline` (a converged fit of the zero-voltage spectrum); stage 2 locates
// the anti-resonance as a local minimum of data / baseline below 0.5
// (NoDipError otherwise, with the baseline carrier re-anchored on this
// spectrum's argmax bin since needle voltage softens the trap), then fits
// {omega_m, C, u} with A and B held near their anchors — hard +-50% rails
// plus a unit-sigma prior on the rail coordinate, so the anchors and not
// optimizer drift decide the position along the residual ridge — and Gamma
// frozen. The sign of u is frozen to the dip side found in the hunt.
FanoFit fit_fano(const Spectrum& spectrum, const LorentzianFit& baseline,
                 const FitOptions& options = {});

}  // namespace fanotrap
