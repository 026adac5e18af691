#include "fanotrap/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <thread>

#include <json.hpp>

#include "fanotrap/constants.hpp"
#include "fanotrap/errors.hpp"
#include "fanotrap/io.hpp"
#include "fanotrap/langevin.hpp"
#include "fanotrap/spectrum.hpp"
#include "fanotrap/version.hpp"

namespace fanotrap {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t x = master + 0x9e3779b97f4a7c15ull * (stream + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

void ExperimentManifest::validate() const {
  config.validate();
  if (experiment_id.empty())
    throw ValidationError("manifest.experiment_id", "must not be empty");
  for (char c : experiment_id)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_')
      throw ValidationError("manifest.experiment_id",
                            "only [A-Za-z0-9_-] (it names a directory)");
  if (voltage_schedule.empty())
    throw ValidationError("manifest.voltage_schedule", "must not be empty");
  if (voltage_schedule[0] != 0.0)
    throw ValidationError("manifest.voltage_schedule",
                          "must start with the 0 V baseline point");
  for (double v : voltage_schedule)
    if (!std::isfinite(v))
      throw ValidationError("manifest.voltage_schedule", "must be finite");
  if (seeds.size() != voltage_schedule.size())
    throw ValidationError("manifest.seeds", "need exactly one seed per voltage point");
  if (code_version.empty())
    throw ValidationError("manifest.code_version", "must not be empty");
  if (created_at.empty())
    throw ValidationError("manifest.created_at", "must not be empty");
}

ExperimentManifest make_manifest(const ExperimentConfig& config,
                                 std::string experiment_id, std::string created_at) {
  config.validate();
  ExperimentManifest m;
  m.config = config;
  m.code_version = kVersion;
  m.created_at = created_at.empty() ? kDefaultCreatedAt : std::move(created_at);
  m.voltage_schedule.push_back(0.0);
  for (double v : config.sweep.voltages)
    if (v != 0.0) m.voltage_schedule.push_back(v);
  m.seeds.reserve(m.voltage_schedule.size());
  for (std::size_t i = 0; i < m.voltage_schedule.size(); ++i)
    m.seeds.push_back(derive_seed(config.simulation.seed, i));
  if (experiment_id.empty()) {
    const std::string basis = serialize_config(config) + "\n" + m.created_at;
    char buf[24];
    std::snprintf(buf, sizeof buf, "run-%016llx",
                  static_cast<unsigned long long>(
                      fnv1a_hash(basis.data(), basis.size())));
    m.experiment_id = buf;
  } else {
    m.experiment_id = std::move(experiment_id);
  }
  m.validate();
  return m;
}

std::string serialize_manifest(const ExperimentManifest& m) {
  nlohmann::json j;
  j["experiment_id"] = m.experiment_id;
  j["created_at"] = m.created_at;
  j["code_version"] = m.code_version;
  j["config_ini"] = serialize_config(m.config);
  j["voltage_schedule"] = m.voltage_schedule;
  j["seeds"] = m.seeds;
  j["outputs"] = m.outputs;
  return j.dump(2) + "\n";
}

namespace {

namespace fs = std::filesystem;

void parallel_for(int n_workers, std::size_t n_tasks,
                  const std::function<void(std::size_t)>& task) {
  if (n_workers <= 1 || n_tasks <= 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_tasks) break;
      task(i);
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min<int>(n_workers, static_cast<int>(n_tasks));
  pool.reserve(static_cast<std::size_t>(count));
  for (int w = 0; w < count; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace

CompositeModelParams synth_model_at(const ExperimentConfig& cfg, double voltage) {
  NeedleConfig needle = cfg.needle;
  needle.voltage = voltage;
  const double q = cfg.particle_charge();
  CompositeModelParams p;
  p.omega_m = harmonic_frequency(find_equilibrium(cfg.trap, needle, q), cfg.trap);
  double gamma = cfg.spectral.linewidth;
  if (gamma <= 0.0)
    gamma = 2.0 * gas_damping(cfg.simulation.gas_pressure, cfg.simulation.gas_temperature,
                              cfg.trap, cfg.simulation.gas_molecular_mass);
  if (!(gamma > 0.0))
    throw ValidationError("spectral.linewidth",
                          "synth mode needs a linewidth or nonzero gas pressure");
  p.gamma = gamma;
  p.noise_floor = cfg.spectral.noise_floor;
  p.lorentzian_weight = cfg.spectral.lorentzian_weight;
  p.gamma_el = cfg.fitting.gamma_el;
  const double needle_q = needle.charge();
  if (q * needle_q != 0.0 && cfg.spectral.fano_weight > 0.0) {
    p.fano_weight = cfg.spectral.fano_weight;
    p.fano_param = fano_parameter_prediction(q, needle_q);
  }
  return p;
}

namespace {

struct PointCompute {
  bool spectrum_ok = false;
  bool fit_ok = false;
  std::string error;
  Spectrum spectrum;
  std::string model;
  LorentzianFit lfit;
  FanoFit ffit;
  bool is_composite = false;
};

void compute_spectrum(const ExperimentConfig& cfg, double voltage,
                      std::uint64_t seed, PointCompute& pc) {
  if (cfg.spectral.mode == "sim") {
    NeedleConfig needle = cfg.needle;
    needle.voltage = voltage;
    SimulationConfig sim = cfg.simulation;
    sim.seed = seed;
    const Trajectory traj = simulate(cfg.trap, needle, cfg.particle_charge(), sim);
    pc.spectrum = welch_psd(traj, cfg.spectral.segment_length, cfg.spectral.overlap);
  } else {
    const CompositeModelParams params = synth_model_at(cfg, voltage);
    FrequencyGrid grid;
    grid.f_start_hz = cfg.spectral.f_min_hz;
    grid.f_step_hz = cfg.spectral.f_step_hz;
    grid.n_bins = static_cast<std::size_t>(std::floor(
                      (cfg.spectral.f_max_hz - cfg.spectral.f_min_hz) /
                      cfg.spectral.f_step_hz)) +
                  1;
    pc.spectrum = synthesize_spectrum(params, grid, cfg.spectral.n_averages, seed);
  }
  pc.spectrum_ok = true;
}

// baseline == nullptr means no usable zero-voltage point exists; charged
// points then fail individually (the composite fit needs the anchor).
void fit_point(const ExperimentConfig& cfg, double voltage,
               const LorentzianFit* baseline, PointCompute& pc) {
  FitOptions fo;
  fo.f_min_hz = cfg.spectral.f_min_hz;
  fo.f_max_hz = cfg.spectral.f_max_hz;
  fo.floor_mode =
      cfg.fitting.floor_mode == "fixed_zero" ? FloorMode::FixedZero : FloorMode::Free;
  fo.max_iterations = cfg.fitting.max_iterations;
  if (voltage == 0.0) {
    pc.lfit = fit_lorentzian(pc.spectrum, fo);
    pc.model = "lorentzian";
    pc.fit_ok = true;
    return;
  }
  if (cfg.fitting.gauge == "unit") {
    fo.gauge = FanoGauge::UnitFanoParam;
  } else if (cfg.fitting.gauge == "fixed_gamma_el") {
    fo.gauge = FanoGauge::FixedGammaEl;
    fo.fixed_gamma_el = cfg.fitting.gamma_el;
  } else {  // "theory": split u with the config-charge prediction
    const double q = cfg.particle_charge();
    const double needle_q = needle_charge_at(cfg.needle, voltage);
    if (q * needle_q != 0.0) {
      fo.gauge = FanoGauge::FixedFanoParam;
      fo.fixed_fano_magnitude = std::abs(fano_parameter_prediction(q, needle_q));
    }
  }
  if (baseline == nullptr)
    throw Error("no zero-voltage baseline available to anchor the composite fit");
  try {
    pc.ffit = fit_fano(pc.spectrum, *baseline, fo);
    pc.is_composite = true;
    pc.model = "composite";
  } catch (const NoDipError&) {
    // No anti-resonance (e.g. sim mode): keep the plain resonance fit.
    pc.lfit = fit_lorentzian(pc.spectrum, fo);
    pc.model = "lorentzian";
  }
  pc.fit_ok = true;
}

nlohmann::json fit_to_json(const SweepPoint& pt, const PointCompute& pc) {
  nlohmann::json j;
  j["index"] = pt.index;
  j["voltage"] = pt.voltage;
  j["seed"] = pt.seed;
  j["model"] = pc.model;
  if (pc.is_composite) {
    const FanoFit& f = pc.ffit;
    j["omega_m"] = f.params.omega_m;
    j["omega_m_error"] = f.omega_m_error;
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
  } else {
    const LorentzianFit& f = pc.lfit;
    j["omega_m"] = f.params.omega_m;
    j["omega_m_error"] = f.omega_m_error;
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
  }
  return j;
}

nlohmann::json inference_to_json(const InferenceResult& r) {
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
  j["mass_squared_kg2"] = r.mass_squared;
  j["mass_squared_error_kg2"] = r.mass_squared_error;
  j["mass_charge_covariance"] = r.mass_charge_covariance;
  j["chi2_per_dof"] = r.chi2_per_dof;
  j["n_points"] = r.n_points;
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace

SweepResult run_sweep(const ExperimentManifest& manifest, const std::string& output_root) {
  manifest.validate();
  const ExperimentConfig& cfg = manifest.config;
  const std::size_t n_points = manifest.voltage_schedule.size();

  SweepResult result;
  result.manifest = manifest;
  result.manifest.outputs.clear();

  const fs::path dir = fs::path(output_root) / manifest.experiment_id;
  fs::create_directories(dir / "spectra");
  fs::create_directories(dir / "fits");
  fs::create_directories(dir / "plots");
  result.output_dir = dir.string();

  auto track = [&](const std::string& relative) {
    result.manifest.outputs.push_back(relative);
  };

  write_text(dir / "config.ini", serialize_config(cfg));
  track("config.ini");

  // Phase 1 (concurrent): spectra.
  std::vector<PointCompute> computed(n_points);
  parallel_for(cfg.sweep.n_workers, n_points, [&](std::size_t i) {
    try {
      compute_spectrum(cfg, manifest.voltage_schedule[i], manifest.seeds[i],
                       computed[i]);
    } catch (const std::exception& e) {
      computed[i].error = e.what();
    }
  });

  // Phase 2: the zero-voltage fit anchors the floor and collisional weight of
  // every charged-point fit, so it runs first; the rest fan out afterwards.
  std::ptrdiff_t base_index = -1;
  for (std::size_t i = 0; i < n_points; ++i)
    if (manifest.voltage_schedule[i] == 0.0 && computed[i].spectrum_ok) {
      base_index = static_cast<std::ptrdiff_t>(i);
      break;
    }
  if (base_index >= 0) {
    PointCompute& pc = computed[static_cast<std::size_t>(base_index)];
    try {
      fit_point(cfg, 0.0, nullptr, pc);
    } catch (const std::exception& e) {
      pc.error = e.what();
    }
  }
  const LorentzianFit* baseline =
      base_index >= 0 && computed[static_cast<std::size_t>(base_index)].fit_ok
          ? &computed[static_cast<std::size_t>(base_index)].lfit
          : nullptr;
  parallel_for(cfg.sweep.n_workers, n_points, [&](std::size_t i) {
    PointCompute& pc = computed[i];
    if (static_cast<std::ptrdiff_t>(i) == base_index || !pc.spectrum_ok ||
        pc.fit_ok)
      return;
    try {
      fit_point(cfg, manifest.voltage_schedule[i], baseline, pc);
    } catch (const std::exception& e) {
      pc.error = e.what();
    }
  });

  // Persist per-point artifacts in schedule order.
  result.points.resize(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    SweepPoint& pt = result.points[i];
    PointCompute& pc = computed[i];
    pt.index = static_cast<int>(i);
    pt.voltage = manifest.voltage_schedule[i];
    pt.seed = manifest.seeds[i];
    pt.ok = pc.spectrum_ok && pc.fit_ok;
    pt.error = pc.error;
    char name[32];
    std::snprintf(name, sizeof name, "point_%03zu", i);
    if (pc.spectrum_ok) {
      pt.spectrum_csv = std::string("spectra/") + name + ".csv";
      write_spectrum_csv((dir / pt.spectrum_csv).string(), pc.spectrum);
      track(pt.spectrum_csv);
      track(std::string("spectra/") + name + ".json");
    }
    if (pt.ok) {
      pt.model = pc.model;
      if (pc.is_composite) {
        pt.has_dip = true;
        pt.omega_m = pc.ffit.params.omega_m;
        pt.omega_error = pc.ffit.omega_m_error;
        pt.fano_shift = pc.ffit.fano_shift;
        pt.fano_shift_error = pc.ffit.fano_shift_error;
        pt.dip_frequency_hz = pc.ffit.dip_frequency_hz;
        pt.chi2_per_dof = pc.ffit.chi2_per_dof;
      } else {
        pt.omega_m = pc.lfit.params.omega_m;
        pt.omega_error = pc.lfit.omega_m_error;
        pt.chi2_per_dof = pc.lfit.chi2_per_dof;
      }
      pt.fit_json = std::string("fits/") + name + ".json";
      write_text(dir / pt.fit_json, fit_to_json(pt, pc).dump(2) + "\n");
      track(pt.fit_json);
    } else {
      ++result.n_failed;
    }
  }

  // Sweep-level inversion for mass / charge / q/m.
  std::vector<FrequencyObservation> observations;
  for (const SweepPoint& pt : result.points)
    if (pt.ok) observations.push_back({pt.voltage, pt.omega_m, pt.omega_error});
  try {
    result.inference = fit_frequency_vs_voltage(cfg.trap, cfg.needle, observations);
    result.inference_ok = true;
  } catch (const std::exception& e) {
    result.inference_error = e.what();
  }
  write_observations_csv((dir / "observations.csv").string(), observations);
  track("observations.csv");

  // Asymmetry-parameter table: theory prediction with the *inferred* charge
  // fixes the (f, gamma_el) split per point; the sweep-mean gamma_el then
  // gives the reported per-point f.
  const double e0 = constants::kElementaryCharge;
  if (result.inference_ok && result.inference.charge != 0.0) {
    double gamma_el_sum = 0.0;
    int gamma_el_count = 0;
    for (const SweepPoint& pt : result.points) {
      if (!pt.ok || !pt.has_dip || pt.voltage == 0.0) continue;
      const double needle_q = needle_charge_at(cfg.needle, pt.voltage);
      if (needle_q == 0.0) continue;
      FanoTableRow row;
      row.voltage = pt.voltage;
      row.fano_shift = pt.fano_shift;
      row.fano_theory = e0 * e0 / (result.inference.charge * needle_q);
      row.dip_frequency_hz = pt.dip_frequency_hz;
      const double ratio = pt.fano_shift / row.fano_theory;
      if (ratio > 0.0) {
        row.gamma_el = std::sqrt(ratio);
        gamma_el_sum += row.gamma_el;
        ++gamma_el_count;
      }
      result.fano_table.push_back(row);
    }
    if (gamma_el_count > 0) {
      result.gamma_el_mean = gamma_el_sum / gamma_el_count;
      for (FanoTableRow& row : result.fano_table)
        row.fano_reported =
            row.fano_shift / (result.gamma_el_mean * result.gamma_el_mean);
    }
  }

  // Status per the baseline rule: only a dead 0 V point kills the sweep.
  if (!result.points.empty() && !result.points[0].ok)
    result.status = "failed";
  else if (result.n_failed > 0 || !result.inference_ok)
    result.status = "partial";
  else
    result.status = "ok";

  // Plot data: baseline vs max-|V| overlay with fitted curves.
  {
    std::size_t vmax_index = 0;
    for (std::size_t i = 1; i < n_points; ++i)
      if (result.points[i].ok &&
          std::abs(result.points[i].voltage) >
              std::abs(result.points[vmax_index].voltage))
        vmax_index = i;
    if (vmax_index != 0 && result.points[0].ok) {
      const Spectrum& s0 = computed[0].spectrum;
      const Spectrum& s1 = computed[vmax_index].spectrum;
      const std::size_t rows = std::min(s0.size(), s1.size());
      std::string csv = "frequency_hz,psd_baseline,model_baseline,psd_vmax,model_vmax\n";
      for (std::size_t k = 0; k < rows; ++k) {
        const double omega = 2.0 * constants::kPi * s0.frequency_hz[k];
        const double model0 = lorentzian_model(omega, computed[0].lfit.params);
        const double model1 =
            computed[vmax_index].is_composite
                ? composite_model(omega, computed[vmax_index].ffit.params)
                : lorentzian_model(omega, computed[vmax_index].lfit.params);
        csv += format_double(s0.frequency_hz[k]);
        csv += ',';
        csv += format_double(s0.psd[k]);
        csv += ',';
        csv += format_double(model0);
        csv += ',';
        csv += format_double(s1.psd[k]);
        csv += ',';
        csv += format_double(model1);
        csv += '\n';
      }
      write_text(dir / "plots/psd_overlay.csv", csv);
      track("plots/psd_overlay.csv");
    }
  }
  {
    std::string csv = "voltage_v,fano_reported,fano_theory,fano_shift,gamma_el,dip_frequency_hz\n";
    for (const FanoTableRow& row : result.fano_table) {
      csv += format_double(row.voltage);
      csv += ',';
      csv += format_double(row.fano_reported);
      csv += ',';
      csv += format_double(row.fano_theory);
      csv += ',';
      csv += format_double(row.fano_shift);
      csv += ',';
      csv += format_double(row.gamma_el);
      csv += ',';
      csv += format_double(row.dip_frequency_hz);
      csv += '\n';
    }
    write_text(dir / "plots/fano_vs_voltage.csv", csv);
    track("plots/fano_vs_voltage.csv");
  }
  {
    const double two_pi = 2.0 * constants::kPi;
    const double f_baseline =
        result.points.empty() || !result.points[0].ok
            ? std::numeric_limits<double>::quiet_NaN()
            : result.points[0].omega_m / two_pi;
    std::string csv =
        "voltage_v,frequency_hz,frequency_error_hz,shift_from_baseline_hz,model_hz\n";
    for (const SweepPoint& pt : result.points) {
      if (!pt.ok) continue;
      double model_hz = std::numeric_limits<double>::quiet_NaN();
      if (result.inference_ok) {
        NeedleConfig at_point = cfg.needle;
        at_point.voltage = pt.voltage;
        model_hz = frequency_shift_model(cfg.trap, at_point, result.inference.charge,
                                         result.inference.mass) /
                   two_pi;
      }
      csv += format_double(pt.voltage);
      csv += ',';
      csv += format_double(pt.omega_m / two_pi);
      csv += ',';
      csv += format_double(pt.omega_error / two_pi);
      csv += ',';
      csv += format_double(pt.omega_m / two_pi - f_baseline);
      csv += ',';
      csv += format_double(model_hz);
      csv += '\n';
    }
    write_text(dir / "plots/frequency_shift_vs_voltage.csv", csv);
    track("plots/frequency_shift_vs_voltage.csv");
  }

  // Report.
  nlohmann::json report;
  report["experiment_id"] = manifest.experiment_id;
  report["created_at"] = manifest.created_at;
  report["code_version"] = manifest.code_version;
  report["status"] = result.status;
  report["master_seed"] = cfg.simulation.seed;
  report["mode"] = cfg.spectral.mode;
  nlohmann::json points_json = nlohmann::json::array();
  for (const SweepPoint& pt : result.points) {
    nlohmann::json p;
    p["index"] = pt.index;
    p["voltage"] = pt.voltage;
    p["seed"] = pt.seed;
    p["ok"] = pt.ok;
    p["error"] = pt.error;
    p["spectrum_csv"] = pt.spectrum_csv;
    p["fit_json"] = pt.fit_json;
    p["model"] = pt.model;
    p["has_dip"] = pt.has_dip;
    p["omega_m"] = pt.omega_m;
    p["omega_error"] = pt.omega_error;
    p["frequency_hz"] = pt.omega_m / (2.0 * constants::kPi);
    p["fano_shift"] = pt.fano_shift;
    p["fano_shift_error"] = pt.fano_shift_error;
    p["dip_frequency_hz"] = pt.dip_frequency_hz;
    p["chi2_per_dof"] = pt.chi2_per_dof;
    points_json.push_back(p);
  }
  report["points"] = points_json;
  if (result.inference_ok)
    report["inference"] = inference_to_json(result.inference);
  else
    report["inference_error"] = result.inference_error;
  nlohmann::json table_json = nlohmann::json::array();
  for (const FanoTableRow& row : result.fano_table) {
    nlohmann::json r;
    r["voltage"] = row.voltage;
    r["fano_shift"] = row.fano_shift;
    r["fano_theory"] = row.fano_theory;
    r["gamma_el"] = row.gamma_el;
    r["fano_reported"] = row.fano_reported;
    r["dip_frequency_hz"] = row.dip_frequency_hz;
    table_json.push_back(r);
  }
  report["fano_table"] = table_json;
  report["gamma_el_mean"] = result.gamma_el_mean;
  if (result.inference_ok) {
    nlohmann::json forces = nlohmann::json::array();
    for (const SweepPoint& pt : result.points) {
      nlohmann::json f;
      f["voltage"] = pt.voltage;
      f["newtons"] = static_force(result.inference.charge,
                                  needle_charge_at(cfg.needle, pt.voltage),
                                  cfg.needle.tip_distance);
      forces.push_back(f);
    }
    report["static_force"] = forces;
  }
  write_text(dir / "report.json", report.dump(2) + "\n");
  track("report.json");

  // Manifest goes last so it can fingerprint everything else.
  nlohmann::json mj = nlohmann::json::parse(serialize_manifest(result.manifest));
  nlohmann::json hashes;
  for (const std::string& rel : result.manifest.outputs) {
    const fs::path p = dir / rel;
    nlohmann::json h;
    h["bytes"] = static_cast<std::uint64_t>(fs::file_size(p));
    h["fnv1a"] = file_hash_hex(p.string());
    hashes[rel] = h;
  }
  mj["output_hashes"] = hashes;
  mj["status"] = result.status;
  write_text(dir / "manifest.json", mj.dump(2) + "\n");
  return result;
}

}  // namespace fanotrap
