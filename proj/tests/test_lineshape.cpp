#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fanotrap/constants.hpp"
#include "fanotrap/errors.hpp"
#include "fanotrap/lineshape.hpp"
#include "fanotrap/models.hpp"
#include "fanotrap/spectrum.hpp"

using namespace fanotrap;

namespace {

CompositeModelParams golden_composite(double fano_sign = 1.0) {
  CompositeModelParams p;
  p.omega_m = 77700.0;
  p.gamma = 2.0 * constants::kPi * 30.0;
  p.noise_floor = 1.0;
  p.lorentzian_weight = 7e16;
  p.fano_weight = 4.3;
  p.gamma_el = 3.2e9;
  p.fano_param = fano_sign * 9.920755999415e-11;
  return p;
}

FrequencyGrid golden_grid() {
  FrequencyGrid g;
  g.f_start_hz = 10000.0;
  g.f_step_hz = 4.0;
  g.n_bins = 1501;
  return g;
}

// Exact model curve tagged with a large average count, so the gamma-law
// log-bias correction is negligible and a fit should sit on the input.
Spectrum exact_spectrum(const CompositeModelParams& p, const FrequencyGrid& g) {
  Spectrum s;
  s.frequency_hz = g.frequencies();
  s.psd.resize(s.frequency_hz.size());
  for (std::size_t i = 0; i < s.psd.size(); ++i)
    s.psd[i] = composite_model(2.0 * constants::kPi * s.frequency_hz[i], p);
  s.n_averages = 100000;
  s.resolution_bandwidth_hz = g.f_step_hz;
  s.source = "synthetic";
  return s;
}

Spectrum exact_lorentzian(const LorentzianParams& p, const FrequencyGrid& g) {
  Spectrum s;
  s.frequency_hz = g.frequencies();
  s.psd.resize(s.frequency_hz.size());
  for (std::size_t i = 0; i < s.psd.size(); ++i)
    s.psd[i] = lorentzian_model(2.0 * constants::kPi * s.frequency_hz[i], p);
  s.n_averages = 100000;
  s.resolution_bandwidth_hz = g.f_step_hz;
  s.source = "synthetic";
  return s;
}

// The zero-voltage reference fit that anchors the floor and collisional
// weight of every composite fit. Noiseless by default; pass an average count
// to draw a gamma-law noisy baseline instead.
LorentzianFit golden_baseline(std::size_t n_averages = 0, std::uint64_t seed = 1) {
  CompositeModelParams base = golden_composite();
  base.fano_weight = 0.0;
  if (n_averages > 0)
    return fit_lorentzian(synthesize_spectrum(base, golden_grid(), n_averages, seed));
  LorentzianParams lp;
  lp.omega_m = base.omega_m;
  lp.gamma = base.gamma;
  lp.amplitude = base.lorentzian_weight;
  lp.floor = base.noise_floor;
  return fit_lorentzian(exact_lorentzian(lp, golden_grid()));
}

}  // namespace

TEST_CASE("noiseless lorentzian data is recovered to high precision") {
  LorentzianParams truth;
  truth.omega_m = 77700.0;
  truth.gamma = 2.0 * constants::kPi * 30.0;
  truth.amplitude = 7e16;
  truth.floor = 1.0;
  const Spectrum s = exact_lorentzian(truth, golden_grid());
  const LorentzianFit fit = fit_lorentzian(s);
  CHECK(fit.converged);
  CHECK(fit.params.omega_m == doctest::Approx(truth.omega_m).epsilon(1e-8));
  CHECK(fit.params.gamma == doctest::Approx(truth.gamma).epsilon(1e-4));
  CHECK(fit.params.amplitude == doctest::Approx(truth.amplitude).epsilon(1e-3));
  CHECK(fit.params.floor == doctest::Approx(truth.floor).epsilon(1e-3));
  CHECK(fit.chi2_per_dof < 1e-6);
  CHECK(fit.n_points == 1501);
}

TEST_CASE("fixed-zero floor mode pins the floor and still recovers the peak") {
  LorentzianParams truth;
  truth.omega_m = 77700.0;
  truth.gamma = 2.0 * constants::kPi * 30.0;
  truth.amplitude = 7e16;
  truth.floor = 0.0;
  const Spectrum s = exact_lorentzian(truth, golden_grid());
  FitOptions opt;
  opt.floor_mode = FloorMode::FixedZero;
  const LorentzianFit fit = fit_lorentzian(s, opt);
  CHECK(fit.converged);
  CHECK(fit.params.floor == 0.0);
  CHECK(fit.params.omega_m == doctest::Approx(truth.omega_m).epsilon(1e-8));
  CHECK(fit.params.amplitude == doctest::Approx(truth.amplitude).epsilon(1e-3));
}

TEST_CASE("noiseless composite data: anti-resonance and carrier recovered") {
  const CompositeModelParams truth = golden_composite();
  const Spectrum s = exact_spectrum(truth, golden_grid());
  const FanoFit fit = fit_fano(s, golden_baseline());
  CHECK(fit.converged);
  CHECK(fit.params.omega_m == doctest::Approx(truth.omega_m).epsilon(1e-6));
  CHECK(fit.fano_shift == doctest::Approx(truth.fano_shift()).epsilon(1e-3));
  CHECK(fit.dip_frequency_hz ==
        doctest::Approx(dip_frequency(truth) / (2.0 * constants::kPi)).epsilon(1e-4));
  CHECK(fit.params.noise_floor == doctest::Approx(truth.noise_floor).epsilon(0.1));
  CHECK(fit.params.fano_weight == doctest::Approx(truth.fano_weight).epsilon(0.1));
  CHECK(fit.params.lorentzian_weight == doctest::Approx(truth.lorentzian_weight).epsilon(0.05));
  CHECK(fit.chi2_per_dof < 1e-2);
  CHECK(fit.log_factor_correlation == -1.0);
  CHECK(fit.second_dip_frequency_hz == 0.0);
}

TEST_CASE("composite fit refuses a baseline that did not converge") {
  const Spectrum s = exact_spectrum(golden_composite(), golden_grid());
  LorentzianFit stale = golden_baseline();
  stale.converged = false;
  CHECK_THROWS_AS(fit_fano(s, stale), InvalidInputError);
}

TEST_CASE("dip side follows the sign of the asymmetry parameter") {
  const LorentzianFit baseline = golden_baseline();
  for (double sign : {1.0, -1.0}) {
    const CompositeModelParams truth = golden_composite(sign);
    const Spectrum s = exact_spectrum(truth, golden_grid());
    const FanoFit fit = fit_fano(s, baseline);
    CHECK(fit.converged);
    CHECK(fit.fano_shift * sign > 0.0);
    const double dip_w = 2.0 * constants::kPi * fit.dip_frequency_hz;
    CHECK((dip_w - fit.params.omega_m) * sign > 0.0);
    CHECK(fit.fano_shift == doctest::Approx(truth.fano_shift()).epsilon(1e-3));
  }
}

TEST_CASE("noisy round-trip at K = 16 stays within a few percent") {
  const CompositeModelParams truth = golden_composite();
  const Spectrum s = synthesize_spectrum(truth, golden_grid(), 16, 2711);
  const FanoFit fit = fit_fano(s, golden_baseline(16, 2712));
  CHECK(fit.converged);
  CHECK(fit.params.omega_m == doctest::Approx(truth.omega_m).epsilon(5e-4));
  CHECK(fit.fano_shift == doctest::Approx(truth.fano_shift()).epsilon(0.05));
  CHECK(fit.chi2_per_dof == doctest::Approx(1.0).epsilon(0.25));
}

TEST_CASE("recovery error shrinks with the average count") {
  const CompositeModelParams truth = golden_composite();
  const LorentzianFit baseline = golden_baseline();
  FitOptions opt;
  opt.max_iterations = 500;  // K = 4 spectra are rough going
  double rms4 = 0.0, rms64 = 0.0;
  const int n_draws = 20;
  for (int i = 0; i < n_draws; ++i) {
    for (std::size_t k : {std::size_t{4}, std::size_t{64}}) {
      const Spectrum s = synthesize_spectrum(truth, golden_grid(), k,
                                             9000 + 2 * i + (k == 64));
      const FanoFit fit = fit_fano(s, baseline, opt);
      REQUIRE(fit.converged);
      const double rel = fit.fano_shift / truth.fano_shift() - 1.0;
      (k == 4 ? rms4 : rms64) += rel * rel;
    }
  }
  rms4 = std::sqrt(rms4 / n_draws);
  rms64 = std::sqrt(rms64 / n_draws);
  CHECK(rms64 < rms4);
}

// With a pinned floor the composite family is fully identifiable (three
// numerator coefficients, three free weights), so every standard error is
// data-limited and scales with the exact log-sd of the bin statistics.
TEST_CASE("standard errors scale with the log-variance of the bin statistics") {
  CompositeModelParams truth = golden_composite();
  truth.noise_floor = 0.0;

  LorentzianParams lp;
  lp.omega_m = truth.omega_m;
  lp.gamma = truth.gamma;
  lp.amplitude = truth.lorentzian_weight;
  lp.floor = 0.0;
  FitOptions opt;
  opt.floor_mode = FloorMode::FixedZero;
  const LorentzianFit baseline =
      fit_lorentzian(exact_lorentzian(lp, golden_grid()), opt);

  Spectrum s4 = exact_spectrum(truth, golden_grid());
  Spectrum s64 = s4;
  s4.n_averages = 4;
  s64.n_averages = 64;
  const FanoFit f4 = fit_fano(s4, baseline, opt);
  const FanoFit f64 = fit_fano(s64, baseline, opt);
  REQUIRE(f4.converged);
  REQUIRE(f64.converged);
  CHECK(f4.params.noise_floor == 0.0);
  // sqrt(trigamma(4) / trigamma(64)) = 4.2454
  CHECK(f4.omega_m_error / f64.omega_m_error == doctest::Approx(4.2454).epsilon(0.05));
  CHECK(f4.fano_shift_error / f64.fano_shift_error == doctest::Approx(4.2454).epsilon(0.05));
}

// With a free floor the ridge direction of the quadratic-ratio family is
// pinned by the zero-voltage prior, not the data, so the asymmetry-shift
// error saturates instead of shrinking with averaging.
TEST_CASE("free-floor shift errors are prior-limited") {
  const CompositeModelParams truth = golden_composite();
  const LorentzianFit baseline = golden_baseline();
  Spectrum s4 = exact_spectrum(truth, golden_grid());
  Spectrum s64 = s4;
  s4.n_averages = 4;
  s64.n_averages = 64;
  const FanoFit f4 = fit_fano(s4, baseline);
  const FanoFit f64 = fit_fano(s64, baseline);
  REQUIRE(f4.converged);
  REQUIRE(f64.converged);
  CHECK(f4.omega_m_error / f64.omega_m_error == doctest::Approx(4.2454).epsilon(0.05));
  CHECK(f4.fano_shift_error / f64.fano_shift_error < 3.0);
  CHECK(f64.fano_shift_error / std::abs(f64.fano_shift) > 5e-3);
}

TEST_CASE("gauges split the fitted shift as requested") {
  const CompositeModelParams truth = golden_composite();
  const Spectrum s = exact_spectrum(truth, golden_grid());
  const LorentzianFit baseline = golden_baseline();

  FitOptions unit;  // defaults
  const FanoFit fu = fit_fano(s, baseline, unit);
  CHECK(std::abs(fu.params.fano_param) == 1.0);
  CHECK(fu.params.gamma_el == doctest::Approx(std::sqrt(std::abs(fu.fano_shift))).epsilon(1e-12));

  FitOptions fixed_gamma;
  fixed_gamma.gauge = FanoGauge::FixedGammaEl;
  fixed_gamma.fixed_gamma_el = 3.2e9;
  const FanoFit fg = fit_fano(s, baseline, fixed_gamma);
  CHECK(fg.params.gamma_el == 3.2e9);
  CHECK(fg.params.fano_param == doctest::Approx(truth.fano_param).epsilon(2e-3));

  FitOptions fixed_fano;
  fixed_fano.gauge = FanoGauge::FixedFanoParam;
  fixed_fano.fixed_fano_magnitude = std::abs(truth.fano_param);
  const FanoFit ff = fit_fano(s, baseline, fixed_fano);
  CHECK(std::abs(ff.params.fano_param) == doctest::Approx(std::abs(truth.fano_param)).epsilon(1e-12));
  CHECK(ff.params.gamma_el == doctest::Approx(truth.gamma_el).epsilon(1e-3));

  FitOptions bad;
  bad.gauge = FanoGauge::FixedGammaEl;
  bad.fixed_gamma_el = 0.0;
  CHECK_THROWS_AS(fit_fano(s, baseline, bad), ValidationError);
}

TEST_CASE("fit window restricts the used bins") {
  const Spectrum s = exact_spectrum(golden_composite(), golden_grid());
  FitOptions opt;
  opt.f_min_hz = 12000.0;
  opt.f_max_hz = 14500.0;
  const FanoFit fit = fit_fano(s, golden_baseline(), opt);
  CHECK(fit.converged);
  CHECK(fit.n_points == 626);
  CHECK(fit.params.omega_m == doctest::Approx(77700.0).epsilon(1e-5));
}

TEST_CASE("degenerate inputs raise the documented errors") {
  // Flat spectrum: no usable resonance.
  CompositeModelParams flat;
  flat.omega_m = 77700.0;
  flat.gamma = 200.0;
  flat.noise_floor = 1.0;
  flat.lorentzian_weight = 0.0;
  flat.fano_weight = 0.0;
  const Spectrum s_flat = synthesize_spectrum(flat, golden_grid(), 16, 5);
  CHECK_THROWS_AS(fit_lorentzian(s_flat), NoPeakError);

  // Pure resonance: no anti-resonance to latch onto. Doubles as the nesting
  // check: data generated with zero fano weight must not yield a dip.
  LorentzianParams lor;
  lor.omega_m = 77700.0;
  lor.gamma = 2.0 * constants::kPi * 30.0;
  lor.amplitude = 7e16;
  lor.floor = 1.0;
  const Spectrum s_lor = exact_lorentzian(lor, golden_grid());
  CHECK_THROWS_AS(fit_fano(s_lor, golden_baseline()), NoDipError);

  // Too few usable bins.
  FrequencyGrid tiny = golden_grid();
  tiny.n_bins = 10;
  const Spectrum s_tiny = exact_spectrum(golden_composite(), tiny);
  CHECK_THROWS_AS(fit_lorentzian(s_tiny), TooShortError);
}

TEST_CASE("fitting leaves the input spectrum untouched") {
  const Spectrum s = synthesize_spectrum(golden_composite(), golden_grid(), 16, 77);
  const Spectrum copy = s;
  (void)fit_fano(s, golden_baseline());
  CHECK(s.psd == copy.psd);
  CHECK(s.frequency_hz == copy.frequency_hz);
  CHECK(s.n_averages == copy.n_averages);
}
