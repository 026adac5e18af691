#include "fanotrap/lineshape.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "fanotrap/constants.hpp"
#include "fanotrap/errors.hpp"
#include "fanotrap/levmar.hpp"
#include "fanotrap/stats.hpp"

namespace fanotrap {

namespace {

struct WindowedData {
  std::vector<double> omega;    // rad/s
  std::vector<double> log_psd;  // ln(psd) minus the chi^2 log-mean bias
  double sigma_log = 1.0;       // exact per-bin sd of ln(psd), sqrt(trigamma(K))
};

WindowedData select_window(const Spectrum& spec, const FitOptions& opt) {
  spec.validate();
  if (!(opt.f_min_hz >= 0.0) || !(opt.f_max_hz > opt.f_min_hz))
    throw ValidationError("fit.window", "need 0 <= f_min < f_max");
  WindowedData d;
  d.sigma_log = log_psd_sigma(spec.n_averages);
  const double bias = log_psd_bias(spec.n_averages);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double f = spec.frequency_hz[i];
    if (f <= 0.0 || f < opt.f_min_hz || f > opt.f_max_hz) continue;
    if (!(spec.psd[i] > 0.0)) continue;  // detrended DC bins etc.
    d.omega.push_back(2.0 * constants::kPi * f);
    d.log_psd.push_back(std::log(spec.psd[i]) - bias);
  }
  if (d.omega.size() < 16)
    throw TooShortError("fit window holds " + std::to_string(d.omega.size()) +
                        " usable bins, need >= 16");
  return d;
}

struct LorentzianSeed {
  std::size_t peak_index = 0;
  double omega_m = 0.0;
  double gamma = 0.0;
  double amplitude = 0.0;
  double floor = 0.0;
};

LorentzianSeed seed_lorentzian(const WindowedData& d) {
  const std::size_t n = d.omega.size();
  LorentzianSeed seed;
  for (std::size_t i = 1; i < n; ++i)
    if (d.log_psd[i] > d.log_psd[seed.peak_index]) seed.peak_index = i;
  if (seed.peak_index == 0 || seed.peak_index == n - 1)
    throw NoPeakError("spectrum maximum sits on the fit-window edge");

  std::vector<double> sorted_log(d.log_psd);
  std::nth_element(sorted_log.begin(), sorted_log.begin() + n / 2, sorted_log.end());
  const double median_log = sorted_log[n / 2];
  if (d.log_psd[seed.peak_index] - median_log < std::log(3.0))
    throw NoPeakError("peak-to-median contrast below 3");

  // Floor guess: median of the outermost 10% of bins on each side.
  const std::size_t edge = std::max<std::size_t>(3, n / 10);
  std::vector<double> edges;
  for (std::size_t i = 0; i < edge; ++i) {
    edges.push_back(d.log_psd[i]);
    edges.push_back(d.log_psd[n - 1 - i]);
  }
  std::nth_element(edges.begin(), edges.begin() + edges.size() / 2, edges.end());
  seed.floor = std::exp(edges[edges.size() / 2]);

  seed.omega_m = d.omega[seed.peak_index];
  const double s_max = std::exp(d.log_psd[seed.peak_index]);
  const double half_log = std::log(0.5 * (s_max + seed.floor));
  std::size_t lo = seed.peak_index, hi = seed.peak_index;
  while (lo > 0 && d.log_psd[lo] > half_log) --lo;
  while (hi + 1 < n && d.log_psd[hi] > half_log) ++hi;
  // FWHM of the unit-numerator kernel in omega equals gamma.
  const double step = d.omega[1] - d.omega[0];
  seed.gamma = std::max(d.omega[hi] - d.omega[lo], step);
  seed.amplitude = std::max(s_max - seed.floor, 0.1 * s_max) * seed.omega_m *
                   seed.omega_m * seed.gamma * seed.gamma;
  return seed;
}

}  // namespace

LorentzianFit fit_lorentzian(const Spectrum& spectrum, const FitOptions& options) {
  const WindowedData d = select_window(spectrum, options);
  const LorentzianSeed seed = seed_lorentzian(d);
  const bool free_floor = options.floor_mode == FloorMode::Free;
  const std::size_t n = d.omega.size();

  // theta = [omega_m, ln gamma, ln amplitude, (ln floor)]
  std::vector<double> theta{seed.omega_m, std::log(seed.gamma),
                            std::log(seed.amplitude)};
  if (free_floor) theta.push_back(std::log(std::max(seed.floor, 1e-300)));

  auto residuals = [&](const std::vector<double>& t, std::vector<double>& r) {
    r.resize(n);
    const double wm = t[0];
    const double gamma = std::exp(t[1]);
    const double amp = std::exp(t[2]);
    const double floor = free_floor ? std::exp(t[3]) : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double model = floor + amp * lorentzian_kernel(d.omega[i], wm, gamma);
      r[i] = (std::log(model) - d.log_psd[i]) / d.sigma_log;
    }
  };

  LevMarOptions lm;
  lm.max_iterations = options.max_iterations;
  const LevMarResult res = levmar_fit(residuals, theta, n, lm);

  LorentzianFit fit;
  fit.params.omega_m = std::abs(res.params[0]);
  fit.params.gamma = std::exp(res.params[1]);
  fit.params.amplitude = std::exp(res.params[2]);
  fit.params.floor = free_floor ? std::exp(res.params[3]) : 0.0;
  fit.omega_m_error = res.standard_errors[0];
  fit.gamma_error = fit.params.gamma * res.standard_errors[1];
  fit.amplitude_error = fit.params.amplitude * res.standard_errors[2];
  fit.floor_error = free_floor ? fit.params.floor * res.standard_errors[3] : 0.0;
  fit.n_points = static_cast<int>(n);
  fit.n_iterations = res.n_iterations;
  fit.converged = res.converged;
  const std::size_t dof = n - res.params.size();
  fit.chi2_per_dof = dof > 0 ? res.chi_square / static_cast<double>(dof) : 0.0;
  return fit;
}

FanoFit fit_fano(const Spectrum& spectrum, const LorentzianFit& baseline,
                 const FitOptions& options) {
  if (!baseline.converged)
    throw InvalidInputError("fano fit needs a converged zero-voltage baseline");
  baseline.params.validate();
  const WindowedData d = select_window(spectrum, options);
  const std::size_t n = d.omega.size();
  // Carrier location and plateau estimate for this spectrum, sharing the
  // edge / contrast guards of the plain resonance seeding.
  const LorentzianSeed seed = seed_lorentzian(d);
  const std::size_t imax = seed.peak_index;

  // Dip hunt on data / envelope. The composite curve equals the zero-voltage
  // baseline plus the non-negative charge term, so it never undercuts the
  // baseline itself; the anti-resonance undercuts the carrier-plus-plateau
  // *envelope*. The zero-voltage amplitude does not transfer (the charge
  // pathway can dominate the carrier), so the envelope is the plain Lorentzian
  // interpolation of this spectrum: it tracks carrier, plateau, and peak
  // position, and only a genuine notch undercuts it by half. The floor stays
  // free even when the composite floor is pinned at zero: the plateau it must
  // ride on is A + C, which the charge pathway alone keeps nonzero.
  FitOptions envelope_options = options;
  envelope_options.floor_mode = FloorMode::Free;
  const LorentzianFit envelope = fit_lorentzian(spectrum, envelope_options);
  std::vector<double> ratio_log(n);
  for (std::size_t i = 0; i < n; ++i)
    ratio_log[i] =
        d.log_psd[i] - std::log(lorentzian_model(d.omega[i], envelope.params));

  // A single bin dropping below half the envelope is routine gamma noise at
  // small average counts (~3 sigma in log at K=16), so the half-depth test is
  // applied to a 3-bin mean; the physical notch spans several bins while an
  // isolated noise excursion does not.
  std::vector<double> trough_log(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i)
    trough_log[i] = (ratio_log[i - 1] + ratio_log[i] + ratio_log[i + 1]) / 3.0;

  // The envelope's own peak-position compromise on the skewed carrier skirt
  // leaves ratio structure inside the peak core, where a notch could not be
  // resolved anyway; candidates there are excluded.
  const double core = 3.0 * envelope.params.gamma;
  std::vector<std::pair<double, std::size_t>> candidates;  // (depth, index)
  const double half_log = std::log(0.5);
  for (std::size_t i = 2; i + 2 < n; ++i)
    if (trough_log[i] < half_log && trough_log[i] < trough_log[i - 1] &&
        trough_log[i] < trough_log[i + 1] &&
        std::abs(d.omega[i] - d.omega[imax]) >= core)
      candidates.emplace_back(trough_log[i], i);
  if (candidates.empty())
    throw NoDipError("no trough falls below half the baseline curve");
  std::sort(candidates.begin(), candidates.end());
  const std::size_t dip_index = candidates[0].second;

  const double wm0 = d.omega[imax];
  const double gamma0 = baseline.params.gamma;
  const double b_base = baseline.params.amplitude;
  const double a_base =
      options.floor_mode == FloorMode::Free ? baseline.params.floor : 0.0;
  const bool split_floor = a_base > 0.0;
  const double u_init = d.omega[dip_index] * d.omega[dip_index] - wm0 * wm0;
  const double u_sign = u_init >= 0.0 ? 1.0 : -1.0;

  // C seed from the far plateau (band-edge median estimates A + C).
  const double plateau = seed.floor;
  const double c_seed = std::max(plateau - a_base, 0.05 * plateau);

  // theta = [omega_m, tB, (tA), ln C, ln|u|]. A and B ride +-50% boxes around
  // the zero-voltage anchors; the sign of u is frozen to the dip side.
  std::vector<double> theta{wm0, 0.0};
  if (split_floor) theta.push_back(0.0);
  theta.push_back(std::log(c_seed));
  theta.push_back(std::log(std::abs(u_init)));
  const std::size_t k_b = 1;
  const std::size_t k_a = 2;
  const std::size_t k_c = split_floor ? 3 : 2;
  const std::size_t k_u = k_c + 1;

  // The curve family is a ratio of quadratics in omega^2 with only three
  // numerator coefficients for the four unknowns {A, B, C, u}: an exact flat
  // ridge. Unit-sigma priors on the box coordinates make the zero-voltage
  // anchors decide the ridge position instead of optimizer drift.
  const std::size_t n_priors = split_floor ? 2 : 1;
  auto residuals = [&](const std::vector<double>& t, std::vector<double>& r) {
    r.resize(n + n_priors);
    const double wm = t[0];
    const double b = b_base * (1.0 + 0.5 * std::tanh(t[k_b]));
    const double a = split_floor ? a_base * (1.0 + 0.5 * std::tanh(t[k_a])) : a_base;
    const double c = std::exp(t[k_c]);
    const double u = u_sign * std::exp(t[k_u]);
    for (std::size_t i = 0; i < n; ++i) {
      const double model = a + b * lorentzian_kernel(d.omega[i], wm, gamma0) +
                           c * fano_kernel(d.omega[i], wm, gamma0, u);
      r[i] = (std::log(model) - d.log_psd[i]) / d.sigma_log;
    }
    r[n] = t[k_b];
    if (split_floor) r[n + 1] = t[k_a];
  };

  LevMarOptions lm;
  lm.max_iterations = options.max_iterations;
  const LevMarResult res = levmar_fit(residuals, theta, n + n_priors, lm);

  const double u = u_sign * std::exp(res.params[k_u]);
  const double tb = res.params[k_b];
  const double ta = split_floor ? res.params[k_a] : 0.0;

  FanoFit fit;
  fit.params.omega_m = std::abs(res.params[0]);
  fit.params.gamma = gamma0;
  fit.params.lorentzian_weight = b_base * (1.0 + 0.5 * std::tanh(tb));
  fit.params.fano_weight = std::exp(res.params[k_c]);
  fit.params.noise_floor =
      split_floor ? a_base * (1.0 + 0.5 * std::tanh(ta)) : a_base;
  fit.fano_shift = u;
  switch (options.gauge) {
    case FanoGauge::UnitFanoParam:
      fit.params.fano_param = u_sign;
      fit.params.gamma_el = std::sqrt(std::abs(u));
      break;
    case FanoGauge::FixedFanoParam: {
      if (!(options.fixed_fano_magnitude > 0.0))
        throw ValidationError("fit.fixed_fano_magnitude", "must be positive");
      fit.params.fano_param = u_sign * options.fixed_fano_magnitude;
      fit.params.gamma_el = std::sqrt(std::abs(u) / options.fixed_fano_magnitude);
      break;
    }
    case FanoGauge::FixedGammaEl:
      if (!(options.fixed_gamma_el > 0.0))
        throw ValidationError("fit.fixed_gamma_el", "must be positive");
      fit.params.gamma_el = options.fixed_gamma_el;
      fit.params.fano_param = u / (options.fixed_gamma_el * options.fixed_gamma_el);
      break;
  }

  // Delta method through the box transforms (d/dt of 1 + 0.5 tanh t) and the
  // log reparameterizations.
  const std::size_t np = res.params.size();
  fit.omega_m_error = res.standard_errors[0];
  fit.lorentzian_weight_error =
      0.5 * b_base * (1.0 - std::tanh(tb) * std::tanh(tb)) *
      res.standard_errors[k_b];
  fit.noise_floor_error =
      split_floor ? 0.5 * a_base * (1.0 - std::tanh(ta) * std::tanh(ta)) *
                        res.standard_errors[k_a]
                  : 0.0;
  fit.fano_weight_error = fit.params.fano_weight * res.standard_errors[k_c];
  fit.fano_shift_error = std::abs(u) * res.standard_errors[k_u];

  fit.dip_frequency_hz = dip_frequency(fit.params) / (2.0 * constants::kPi);
  if (candidates.size() > 1) {
    const std::size_t second = candidates[1].second;
    fit.second_dip_frequency_hz = d.omega[second] / (2.0 * constants::kPi);
  }
  fit.n_points = static_cast<int>(n);
  fit.n_iterations = res.n_iterations;
  fit.converged = res.converged;
  const std::size_t dof = n + n_priors - np;
  fit.chi2_per_dof = dof > 0 ? res.chi_square / static_cast<double>(dof) : 0.0;
  return fit;
}

}  // namespace fanotrap
