#pragma once

#include <limits>
#include <string>
#include <vector>

#include "fanotrap/constants.hpp"
#include "fanotrap/langevin.hpp"
#include "fanotrap/trap.hpp"

namespace fanotrap {

// How each sweep point produces its spectrum and how fits window it.
// mode "sim": integrate the Langevin dynamics and Welch-average the recorded
// track (first-principles; no anti-resonance, the dynamics do not contain the
// charge pathway). mode "synth": gamma-distributed draws around the composite
// model curve (exercises the full anti-resonance pipeline).
struct SpectralConfig {
  std::string mode = "sim";
  std::size_t segment_length = 1 << 16;  // sim mode
  double overlap = 0.5;                  // sim mode
  int n_averages = 16;                   // synth mode: draws per bin
  double f_min_hz = 0.0;                 // fit window; synth grid start
  double f_max_hz = std::numeric_limits<double>::infinity();  // synth grid end
  double f_step_hz = 4.0;                // synth grid step
  double noise_floor = 1.0;              // synth A
  double lorentzian_weight = 7e16;       // synth B
  double fano_weight = 4.3;              // synth C
  double linewidth = 0.0;  // synth Gamma (rad/s); 0 = twice the gas damping

  void validate() const;
};

struct FittingConfig {
  std::string floor_mode = "free";  // "free" | "fixed_zero"
  std::string gauge = "theory";     // "unit" | "theory" | "fixed_gamma_el"
  double gamma_el = 3.2e9;          // 1/s, used by gauge = fixed_gamma_el
  int max_iterations = 200;

  void validate() const;
};

struct SweepConfig {
  std::vector<double> voltages = {0.0, 200.0, 400.0, 600.0, 800.0, 1000.0};
  int n_workers = 1;

  void validate() const;
};

struct ExperimentConfig {
  TrapConfig trap;
  NeedleConfig needle;
  double particle_charge_e0 = 48.0;  // signed integer count of e0
  SimulationConfig simulation;
  SpectralConfig spectral;
  FittingConfig fitting;
  SweepConfig sweep;

  void validate() const;
  double particle_charge() const {
    return particle_charge_e0 * constants::kElementaryCharge;
  }
};

// INI-style text: [section] headers, key = value lines, '#'/';' comments.
// Unknown sections or keys and malformed values raise ParseError with the
// 1-based line and column. Absent keys keep their defaults.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical INI text of the effective configuration (for run provenance).
std::string serialize_config(const ExperimentConfig& config);

}  // namespace fanotrap
