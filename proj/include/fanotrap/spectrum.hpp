#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fanotrap/langevin.hpp"
#include "fanotrap/models.hpp"

namespace fanotrap {

// One-sided power spectral density on a uniform frequency grid. External
// convention: Hz and (unit)^2/Hz; models convert to rad/s internally.
struct Spectrum {
  std::vector<double> frequency_hz;
  std::vector<double> psd;
  int n_averages = 1;
  double resolution_bandwidth_hz = 0.0;  // equivalent noise bandwidth per bin
  std::string source;                    // "welch" or "synthetic"
  std::uint64_t seed = 0;                // synthesis seed (0 for welch output)

  std::size_t size() const { return frequency_hz.size(); }
  double frequency_step() const;

  // Grid strictly increasing and uniform, PSD finite and >= 0, n_averages >= 1.
  void validate() const;
};

// Uniform grid helper for synthetic spectra.
struct FrequencyGrid {
  double f_start_hz = 0.0;
  double f_step_hz = 0.0;
  std::size_t n_bins = 0;

  std::vector<double> frequencies() const;
  void validate() const;
};

// Welch-averaged one-sided PSD of the recorded z series: Hann window,
// segment-mean detrend, overlap in [0, 0.95], power normalization
// 1/(fs * sum w^2) with one-sided doubling (DC/Nyquist exempt). Satisfies
// Parseval within the windowing bias: sum(psd) * df ~ var(z).
// Throws TooShortError when fewer than two full segments fit.
Spectrum welch_psd(const Trajectory& traj, std::size_t segment_length,
                   double overlap_fraction = 0.5);

// Same estimator on a bare sample series (used by the CLI and by tests that
// build signals directly).
Spectrum welch_psd(const std::vector<double>& samples, double sample_interval,
                   std::size_t segment_length, double overlap_fraction = 0.5);

// Draw a noisy spectrum around the composite model: each bin is an
// independent Gamma(n_averages, S(w)/n_averages) variate, i.e. exactly the
// distribution an n_averages-segment Welch estimate of that model would have.
// Deterministic for fixed (params, grid, n_averages, seed).
Spectrum synthesize_spectrum(const CompositeModelParams& params, const FrequencyGrid& grid,
                             int n_averages, std::uint64_t seed);

}  // namespace fanotrap
