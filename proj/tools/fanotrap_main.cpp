#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "fanotrap/config.hpp"
#include "fanotrap/constants.hpp"
#include "fanotrap/errors.hpp"
#include "fanotrap/experiment.hpp"
#include "fanotrap/inference.hpp"
#include "fanotrap/io.hpp"
#include "fanotrap/langevin.hpp"
#include "fanotrap/lineshape.hpp"
#include "fanotrap/spectrum.hpp"
#include "fanotrap/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitPartial = 3;

fanotrap::ExperimentConfig load_or_default(const std::string& path) {
  if (path.empty()) return fanotrap::ExperimentConfig{};
  return fanotrap::load_config(path);
}

fanotrap::FitOptions fit_options_from(const fanotrap::ExperimentConfig& cfg,
                                      double voltage) {
  fanotrap::FitOptions fo;
  fo.f_min_hz = cfg.spectral.f_min_hz;
  fo.f_max_hz = cfg.spectral.f_max_hz;
  fo.floor_mode = cfg.fitting.floor_mode == "fixed_zero"
                      ? fanotrap::FloorMode::FixedZero
                      : fanotrap::FloorMode::Free;
  fo.max_iterations = cfg.fitting.max_iterations;
  if (cfg.fitting.gauge == "unit") {
    fo.gauge = fanotrap::FanoGauge::UnitFanoParam;
  } else if (cfg.fitting.gauge == "fixed_gamma_el") {
    fo.gauge = fanotrap::FanoGauge::FixedGammaEl;
    fo.fixed_gamma_el = cfg.fitting.gamma_el;
  } else {
    const double q = cfg.particle_charge();
    const double needle_q = fanotrap::needle_charge_at(cfg.needle, voltage);
    if (q * needle_q != 0.0) {
      fo.gauge = fanotrap::FanoGauge::FixedFanoParam;
      fo.fixed_fano_magnitude =
          std::abs(fanotrap::fano_parameter_prediction(q, needle_q));
    }
  }
  return fo;
}

nlohmann::json lorentzian_fit_json(const fanotrap::LorentzianFit& f) {
  nlohmann::json j;
  j["model"] = "lorentzian";
  j["omega_m"] = f.params.omega_m;
  j["omega_m_error"] = f.omega_m_error;
  j["frequency_hz"] = f.params.omega_m / (2.0 * fanotrap::constants::kPi);
  j["gamma"] = f.params.gamma;
  j["gamma_error"] = f.gamma_error;
  j["amplitude"] = f.params.amplitude;
  j["amplitude_error"] = f.amplitude_error;
  j["floor"] = f.params.floor;
  j["floor_error"] = f.floor_error;
  j["chi2_per_dof"] = f.chi2_per_dof;
  j["n_points"] = f.n_points;
  j["n_iterations"] = f.n_iterations;
  j["converged"] = f.converged;
  return j;
}

nlohmann::json fano_fit_json(const fanotrap::FanoFit& f) {
  nlohmann::json j;
  j["model"] = "composite";
  j["omega_m"] = f.params.omega_m;
  j["omega_m_error"] = f.omega_m_error;
  j["frequency_hz"] = f.params.omega_m / (2.0 * fanotrap::constants::kPi);
  j["gamma"] = f.params.gamma;
  j["noise_floor"] = f.params.noise_floor;
  j["noise_floor_error"] = f.noise_floor_error;
  j["lorentzian_weight"] = f.params.lorentzian_weight;
  j["lorentzian_weight_error"] = f.lorentzian_weight_error;
  j["fano_weight"] = f.params.fano_weight;
  j["fano_weight_error"] = f.fano_weight_error;
  j["fano_param"] = f.params.fano_param;
  j["gamma_el"] = f.params.gamma_el;
  j["fano_shift"] = f.fano_shift;
  j["fano_shift_error"] = f.fano_shift_error;
  j["log_factor_correlation"] = f.log_factor_correlation;
  j["dip_frequency_hz"] = f.dip_frequency_hz;
  j["second_dip_frequency_hz"] = f.second_dip_frequency_hz;
  j["chi2_per_dof"] = f.chi2_per_dof;
  j["n_points"] = f.n_points;
  j["n_iterations"] = f.n_iterations;
  j["converged"] = f.converged;
  return j;
}

void emit_json(const nlohmann::json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw fanotrap::Error("cannot open for writing: " + out);
    os << text;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"force sensing with a feedback-cooled nanoparticle: simulate, "
               "estimate spectra, fit line shapes, infer charge and force"};
  app.set_version_flag("--version",
                       std::string(fanotrap::kToolName) + " " + fanotrap::kVersion);
  app.require_subcommand(1);

  std::string config_path, in_path, out_path, model = "auto";
  std::string experiment_id, created_at, baseline_path;
  std::uint64_t seed = 0;
  double voltage = 0.0;
  std::size_t segment_length = 0;
  double overlap = -1.0;

  auto* cmd_simulate =
      app.add_subcommand("simulate", "integrate the Langevin dynamics, write a trajectory CSV");
  cmd_simulate->add_option("--config", config_path, "INI configuration file");
  auto* sim_seed = cmd_simulate->add_option("--seed", seed, "override the RNG seed");
  auto* sim_voltage = cmd_simulate->add_option("--voltage", voltage, "override the needle bias (V)");
  cmd_simulate->add_option("--out", out_path, "trajectory CSV path")->required();

  auto* cmd_psd =
      app.add_subcommand("psd", "Welch-average a trajectory CSV into a spectrum CSV");
  cmd_psd->add_option("--config", config_path, "INI configuration file");
  cmd_psd->add_option("--in", in_path, "trajectory CSV")->required();
  cmd_psd->add_option("--out", out_path, "spectrum CSV path")->required();
  auto* psd_seg = cmd_psd->add_option("--segment-length", segment_length, "samples per Welch segment");
  auto* psd_overlap = cmd_psd->add_option("--overlap", overlap, "segment overlap fraction");

  auto* cmd_fit = app.add_subcommand("fit", "fit a line shape to a spectrum CSV");
  cmd_fit->add_option("--config", config_path, "INI configuration file");
  cmd_fit->add_option("--in", in_path, "spectrum CSV")->required();
  cmd_fit->add_option("--out", out_path, "result JSON path (default: stdout)");
  cmd_fit->add_option("--model", model, "auto | lorentzian | composite")
      ->check(CLI::IsMember({"auto", "lorentzian", "composite"}));
  auto* fit_voltage = cmd_fit->add_option("--voltage", voltage,
                                          "needle bias for the theory gauge (V)");
  auto* fit_baseline = cmd_fit->add_option(
      "--baseline", baseline_path,
      "zero-voltage spectrum CSV whose Lorentzian fit anchors the composite fit");

  auto* cmd_synth = app.add_subcommand(
      "synth", "draw a gamma-distributed spectrum around the model curve");
  cmd_synth->add_option("--config", config_path, "INI configuration file");
  auto* synth_seed = cmd_synth->add_option("--seed", seed, "override the RNG seed");
  auto* synth_voltage = cmd_synth->add_option("--voltage", voltage, "needle bias (V)");
  cmd_synth->add_option("--out", out_path, "spectrum CSV path")->required();

  auto* cmd_sweep = app.add_subcommand(
      "sweep", "run a full voltage sweep: spectra, fits, inference, report");
  cmd_sweep->add_option("--config", config_path, "INI configuration file");
  auto* sweep_seed = cmd_sweep->add_option("--seed", seed, "override the master seed");
  cmd_sweep->add_option("--out", out_path, "output root (default: current directory)");
  cmd_sweep->add_option("--id", experiment_id, "experiment id (default: derived from config)");
  cmd_sweep->add_option("--created-at", created_at,
                        "timestamp recorded in manifest/report (default: fixed placeholder)");

  auto* cmd_infer = app.add_subcommand(
      "infer", "invert a frequency-vs-voltage table into mass, charge, q/m");
  cmd_infer->add_option("--config", config_path, "INI configuration file");
  cmd_infer->add_option("--in", in_path, "observations CSV (voltage_v,frequency_hz,frequency_error_hz)")
      ->required();
  cmd_infer->add_option("--out", out_path, "result JSON path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (app.got_subcommand(cmd_simulate)) {
      fanotrap::ExperimentConfig cfg = load_or_default(config_path);
      if (sim_seed->count() > 0) cfg.simulation.seed = seed;
      if (sim_voltage->count() > 0) cfg.needle.voltage = voltage;
      const fanotrap::Trajectory traj = fanotrap::simulate(
          cfg.trap, cfg.needle, cfg.particle_charge(), cfg.simulation);
      fanotrap::write_trajectory_csv(out_path, traj);
      const double f_m = fanotrap::harmonic_frequency(traj.equilibrium_z, cfg.trap) /
                         (2.0 * fanotrap::constants::kPi);
      std::printf("wrote %s: %zu samples, dt %s s, z0 %s m, f_m %.3f Hz\n",
                  out_path.c_str(), traj.size(),
                  fanotrap::format_double(traj.sample_interval).c_str(),
                  fanotrap::format_double(traj.equilibrium_z).c_str(), f_m);
      return kExitOk;
    }

    if (app.got_subcommand(cmd_psd)) {
      fanotrap::ExperimentConfig cfg = load_or_default(config_path);
      if (psd_seg->count() > 0) cfg.spectral.segment_length = segment_length;
      if (psd_overlap->count() > 0) cfg.spectral.overlap = overlap;
      const fanotrap::Trajectory traj = fanotrap::read_trajectory_csv(in_path);
      const fanotrap::Spectrum spec =
          fanotrap::welch_psd(traj.z, traj.sample_interval,
                              cfg.spectral.segment_length, cfg.spectral.overlap);
      fanotrap::write_spectrum_csv(out_path, spec);
      std::printf("wrote %s: %zu bins, %d averages, rbw %.6g Hz\n", out_path.c_str(),
                  spec.size(), spec.n_averages, spec.resolution_bandwidth_hz);
      return kExitOk;
    }

    if (app.got_subcommand(cmd_fit)) {
      fanotrap::ExperimentConfig cfg = load_or_default(config_path);
      const double bias = fit_voltage->count() > 0 ? voltage : cfg.needle.voltage;
      const fanotrap::Spectrum spec = fanotrap::read_spectrum_csv(in_path);
      const fanotrap::FitOptions fo = fit_options_from(cfg, bias);
      const bool have_baseline = fit_baseline->count() > 0;
      // The composite model is only identifiable once the noise floor and the
      // thermal amplitude are anchored by a dip-free reference fit.
      auto anchor = [&]() {
        return fanotrap::fit_lorentzian(fanotrap::read_spectrum_csv(baseline_path),
                                        fo);
      };
      nlohmann::json j;
      if (model == "lorentzian") {
        j = lorentzian_fit_json(fanotrap::fit_lorentzian(spec, fo));
      } else if (model == "composite") {
        if (!have_baseline)
          throw fanotrap::InvalidInputError(
              "composite fits need --baseline (a zero-voltage spectrum CSV)");
        j = fano_fit_json(fanotrap::fit_fano(spec, anchor(), fo));
      } else if (!have_baseline) {
        j = lorentzian_fit_json(fanotrap::fit_lorentzian(spec, fo));
      } else {
        try {
          j = fano_fit_json(fanotrap::fit_fano(spec, anchor(), fo));
        } catch (const fanotrap::NoDipError&) {
          j = lorentzian_fit_json(fanotrap::fit_lorentzian(spec, fo));
        }
      }
      emit_json(j, out_path);
      return kExitOk;
    }

    if (app.got_subcommand(cmd_synth)) {
      fanotrap::ExperimentConfig cfg = load_or_default(config_path);
      if (!std::isfinite(cfg.spectral.f_max_hz))
        throw fanotrap::ValidationError("spectral.f_max",
                                        "set a finite grid end for synth");
      const double bias = synth_voltage->count() > 0 ? voltage : cfg.needle.voltage;
      const std::uint64_t use_seed =
          synth_seed->count() > 0 ? seed : cfg.simulation.seed;
      const fanotrap::CompositeModelParams params =
          fanotrap::synth_model_at(cfg, bias);
      fanotrap::FrequencyGrid grid;
      grid.f_start_hz = cfg.spectral.f_min_hz;
      grid.f_step_hz = cfg.spectral.f_step_hz;
      grid.n_bins = static_cast<std::size_t>(
                        std::floor((cfg.spectral.f_max_hz - cfg.spectral.f_min_hz) /
                                   cfg.spectral.f_step_hz)) +
                    1;
      const fanotrap::Spectrum spec = fanotrap::synthesize_spectrum(
          params, grid, cfg.spectral.n_averages, use_seed);
      fanotrap::write_spectrum_csv(out_path, spec);
      std::printf("wrote %s: %zu bins, f_m %.3f Hz, dip shift %s (rad/s)^2\n",
                  out_path.c_str(), spec.size(),
                  params.omega_m / (2.0 * fanotrap::constants::kPi),
                  fanotrap::format_double(params.fano_shift()).c_str());
      return kExitOk;
    }

    if (app.got_subcommand(cmd_sweep)) {
      fanotrap::ExperimentConfig cfg = load_or_default(config_path);
      if (sweep_seed->count() > 0) cfg.simulation.seed = seed;
      const fanotrap::ExperimentManifest manifest =
          fanotrap::make_manifest(cfg, experiment_id, created_at);
      const fanotrap::SweepResult res =
          fanotrap::run_sweep(manifest, out_path.empty() ? "." : out_path);
      std::printf("sweep %s -> %s [%s]\n", manifest.experiment_id.c_str(),
                  res.output_dir.c_str(), res.status.c_str());
      for (const auto& pt : res.points)
        std::printf("  %7.1f V : %s%s\n", pt.voltage,
                    pt.ok ? pt.model.c_str() : "FAILED",
                    pt.ok ? "" : (" (" + pt.error + ")").c_str());
      if (res.inference_ok) {
        const auto& inf = res.inference;
        std::printf("  mass %s kg +- %s, charge %.2f e0 +- %.2f, q/m %.3f C/kg +- %.3f\n",
                    fanotrap::format_double(inf.mass).c_str(),
                    fanotrap::format_double(inf.mass_error).c_str(), inf.charge_in_e0,
                    inf.charge_error / fanotrap::constants::kElementaryCharge,
                    inf.charge_to_mass, inf.charge_to_mass_error);
      } else {
        std::printf("  inference failed: %s\n", res.inference_error.c_str());
      }
      if (res.status == "ok") return kExitOk;
      return res.status == "failed" ? kExitRuntime : kExitPartial;
    }

    if (app.got_subcommand(cmd_infer)) {
      fanotrap::ExperimentConfig cfg = load_or_default(config_path);
      const std::vector<fanotrap::FrequencyObservation> observations =
          fanotrap::read_observations_csv(in_path);
      const fanotrap::InferenceResult r =
          fanotrap::fit_frequency_vs_voltage(cfg.trap, cfg.needle, observations);
      nlohmann::json j;
      j["mass_kg"] = r.mass;
      j["mass_error_kg"] = r.mass_error;
      j["charge_c"] = r.charge;
      j["charge_error_c"] = r.charge_error;
      j["charge_in_e0"] = r.charge_in_e0;
      j["nearest_integer_charge"] = r.nearest_integer_charge;
      j["charge_quantized"] = r.charge_quantized;
      j["charge_to_mass_c_per_kg"] = r.charge_to_mass;
      j["charge_to_mass_error_c_per_kg"] = r.charge_to_mass_error;
      j["chi2_per_dof"] = r.chi2_per_dof;
      j["n_points"] = r.n_points;
      emit_json(j, out_path);
      return kExitOk;
    }
  } catch (const fanotrap::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadInput;
  } catch (const fanotrap::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadInput;
  } catch (const fanotrap::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
