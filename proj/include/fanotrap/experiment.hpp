#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fanotrap/config.hpp"
#include "fanotrap/inference.hpp"
#include "fanotrap/lineshape.hpp"

namespace fanotrap {

// Stateless splitmix-style mixer: one master seed fans out into independent
// per-point streams, so results do not depend on worker scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// Composite-model parameters the synth mode draws from at a given bias:
// omega_m from the static working point, linewidth from config or gas
// damping, asymmetry from the charge prediction (zero weight at q*Q = 0).
CompositeModelParams synth_model_at(const ExperimentConfig& config, double voltage);

// Everything that defines a sweep run. The voltage schedule always starts
// with the mandatory 0 V baseline point; per-point seeds derive from the
// config's master seed. `outputs` is filled by run_sweep (relative paths).
struct ExperimentManifest {
  std::string experiment_id;
  ExperimentConfig config;
  std::vector<double> voltage_schedule;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> outputs;
  std::string code_version;
  std::string created_at;

  void validate() const;
};

// Build a manifest from a config. Empty experiment_id derives a stable
// "run-<16 hex>" id from the config text and created_at; empty created_at
// falls back to the fixed placeholder (never the wall clock).
ExperimentManifest make_manifest(const ExperimentConfig& config,
                                 std::string experiment_id = "",
                                 std::string created_at = "");

std::string serialize_manifest(const ExperimentManifest& manifest);

struct SweepPoint {
  int index = 0;
  double voltage = 0.0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;  // empty when ok
  std::string spectrum_csv;
  std::string fit_json;
  std::string model;  // "lorentzian" or "composite"
  bool has_dip = false;
  double omega_m = 0.0;       // rad/s
  double omega_error = 0.0;   // rad/s
  double fano_shift = 0.0;    // u (rad/s)^2, 0 without a dip
  double fano_shift_error = 0.0;
  double dip_frequency_hz = 0.0;
  double chi2_per_dof = 0.0;
};

struct FanoTableRow {
  double voltage = 0.0;
  double fano_shift = 0.0;     // fitted u
  double fano_theory = 0.0;    // e0^2 / (q_hat Q(V))
  double gamma_el = 0.0;       // sqrt(u / fano_theory); 0 when signs disagree
  double fano_reported = 0.0;  // u / mean(gamma_el)^2
  double dip_frequency_hz = 0.0;
};

struct SweepResult {
  ExperimentManifest manifest;  // with outputs filled in
  std::vector<SweepPoint> points;
  bool inference_ok = false;
  std::string inference_error;
  InferenceResult inference;
  std::vector<FanoTableRow> fano_table;
  double gamma_el_mean = 0.0;
  int n_failed = 0;
  std::string status;  // "ok" | "partial" | "failed"
  std::string output_dir;
};

// Execute the sweep into <output_root>/<experiment_id>/:
//   config.ini           effective configuration
//   spectra/point_NNN.csv(+.json)   one spectrum per voltage
//   fits/point_NNN.json             per-point line-shape fit
//   observations.csv     voltage / frequency / error table
//   plots/psd_overlay.csv            baseline vs max-voltage spectra
//   plots/fano_vs_voltage.csv        asymmetry parameter vs bias
//   plots/frequency_shift_vs_voltage.csv
//   report.json          fits + inference + asymmetry table + provenance
//   manifest.json        the manifest with outputs and their content hashes
// Spectra are produced concurrently (sweep.n_workers); files are written and
// the report assembled single-threaded. Per-point failures are recorded
// without aborting; status is "failed" only when the 0 V baseline fit fails,
// otherwise "partial" when any point failed, else "ok".
SweepResult run_sweep(const ExperimentManifest& manifest, const std::string& output_root);

}  // namespace fanotrap
