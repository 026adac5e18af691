#include "fanotrap/spectrum.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <random>
#include <string>

#include "fanotrap/constants.hpp"

namespace fanotrap {

double Spectrum::frequency_step() const {
  if (frequency_hz.size() < 2) return 0.0;
  return frequency_hz[1] - frequency_hz[0];
}

void Spectrum::validate() const {
  if (frequency_hz.size() != psd.size())
    throw ValidationError("spectrum", "frequency and psd lengths differ");
  if (frequency_hz.size() < 2) throw ValidationError("spectrum", "needs at least 2 bins");
  if (n_averages < 1) throw ValidationError("spectrum.n_averages", "must be >= 1");
  const double df = frequency_hz[1] - frequency_hz[0];
  if (!(df > 0.0)) throw ValidationError("spectrum", "grid must be strictly increasing");
  for (std::size_t i = 0; i < frequency_hz.size(); ++i) {
    if (!std::isfinite(frequency_hz[i]) || frequency_hz[i] < 0.0)
      throw ValidationError("spectrum", "non-finite or negative frequency");
    if (!std::isfinite(psd[i]) || psd[i] < 0.0)
      throw ValidationError("spectrum", "non-finite or negative psd value");
    if (i > 0) {
      const double step = frequency_hz[i] - frequency_hz[i - 1];
      if (!(step > 0.0) || std::abs(step - df) > 1e-6 * df)
        throw ValidationError("spectrum", "grid must be uniform");
    }
  }
}

std::vector<double> FrequencyGrid::frequencies() const {
  validate();
  std::vector<double> f(n_bins);
  for (std::size_t i = 0; i < n_bins; ++i)
    f[i] = f_start_hz + f_step_hz * static_cast<double>(i);
  return f;
}

void FrequencyGrid::validate() const {
  if (!(f_start_hz >= 0.0) || !std::isfinite(f_start_hz))
    throw ValidationError("grid.f_start_hz", "must be >= 0 and finite");
  if (!(f_step_hz > 0.0) || !std::isfinite(f_step_hz))
    throw ValidationError("grid.f_step_hz", "must be positive");
  if (n_bins < 2) throw ValidationError("grid.n_bins", "must be >= 2");
}

namespace {

// The FFTW planner is not thread-safe; executing distinct plans is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct RealFft {
  std::size_t n;
  std::vector<double> in;
  std::vector<std::complex<double>> out;
  fftw_plan plan;

  explicit RealFft(std::size_t n_)
      : n(n_), in(n_, 0.0), out(n_ / 2 + 1) {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_ESTIMATE);  // timing-free: deterministic plans
  }
  ~RealFft() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  void execute() { fftw_execute(plan); }
};

}  // namespace

Spectrum welch_psd(const std::vector<double>& samples, double sample_interval,
                   std::size_t segment_length, double overlap_fraction) {
  if (!(sample_interval > 0.0) || !std::isfinite(sample_interval))
    throw ValidationError("sample_interval", "must be positive");
  if (segment_length < 32)
    throw ValidationError("segment_length", "must be >= 32 samples");
  if (overlap_fraction < 0.0 || overlap_fraction > 0.95)
    throw ValidationError("overlap_fraction", "must lie in [0, 0.95]");
  const std::size_t n = samples.size();
  const std::size_t hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(
             static_cast<double>(segment_length) * (1.0 - overlap_fraction))));
  if (n < segment_length + hop)
    throw TooShortError("need at least 2 full segments: " + std::to_string(n) +
                        " samples < " + std::to_string(segment_length + hop));
  const std::size_t n_segments = (n - segment_length) / hop + 1;

  // Periodic Hann window.
  const std::size_t L = segment_length;
  std::vector<double> window(L);
  double wsum = 0.0, w2sum = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    window[i] = 0.5 * (1.0 - std::cos(2.0 * constants::kPi * static_cast<double>(i) /
                                      static_cast<double>(L)));
    wsum += window[i];
    w2sum += window[i] * window[i];
  }

  const double fs = 1.0 / sample_interval;
  const std::size_t n_bins = L / 2 + 1;
  std::vector<double> accum(n_bins, 0.0);

  RealFft fft(L);
  for (std::size_t s = 0; s < n_segments; ++s) {
    const double* seg = samples.data() + s * hop;
    double mean = 0.0;
    for (std::size_t i = 0; i < L; ++i) mean += seg[i];
    mean /= static_cast<double>(L);
    for (std::size_t i = 0; i < L; ++i) fft.in[i] = (seg[i] - mean) * window[i];
    fft.execute();
    for (std::size_t k = 0; k < n_bins; ++k) accum[k] += std::norm(fft.out[k]);
  }

  Spectrum spec;
  spec.source = "welch";
  spec.n_averages = static_cast<int>(n_segments);
  // Equivalent noise bandwidth of the Hann window (1.5 * fs / L).
  spec.resolution_bandwidth_hz = fs * w2sum / (wsum * wsum);
  spec.frequency_hz.resize(n_bins);
  spec.psd.resize(n_bins);
  const double scale = 1.0 / (fs * w2sum * static_cast<double>(n_segments));
  for (std::size_t k = 0; k < n_bins; ++k) {
    spec.frequency_hz[k] = static_cast<double>(k) * fs / static_cast<double>(L);
    const bool interior = (k != 0) && !(L % 2 == 0 && k == n_bins - 1);
    spec.psd[k] = (interior ? 2.0 : 1.0) * accum[k] * scale;
  }
  return spec;
}

Spectrum welch_psd(const Trajectory& traj, std::size_t segment_length,
                   double overlap_fraction) {
  return welch_psd(traj.z, traj.sample_interval, segment_length, overlap_fraction);
}

Spectrum synthesize_spectrum(const CompositeModelParams& params, const FrequencyGrid& grid,
                             int n_averages, std::uint64_t seed) {
  params.validate();
  grid.validate();
  if (n_averages < 1) throw ValidationError("n_averages", "must be >= 1");

  Spectrum spec;
  spec.source = "synthetic";
  spec.seed = seed;
  spec.n_averages = n_averages;
  spec.resolution_bandwidth_hz = grid.f_step_hz;
  spec.frequency_hz = grid.frequencies();
  spec.psd.resize(grid.n_bins);

  std::mt19937_64 rng(seed);
  const double shape = static_cast<double>(n_averages);
  for (std::size_t i = 0; i < grid.n_bins; ++i) {
    const double omega = 2.0 * constants::kPi * spec.frequency_hz[i];
    const double mean = composite_model(omega, params);
    // Gamma(shape = K, scale = mean/K): mean preserved, relative sd 1/sqrt(K).
    std::gamma_distribution<double> gamma_draw(shape, mean / shape);
    spec.psd[i] = gamma_draw(rng);
  }
  return spec;
}

}  // namespace fanotrap
