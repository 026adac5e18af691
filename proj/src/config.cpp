#include "fanotrap/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string_view>

#include "fanotrap/errors.hpp"
#include "fanotrap/io.hpp"

namespace fanotrap {

void SpectralConfig::validate() const {
  if (mode != "sim" && mode != "synth")
    throw ValidationError("spectral.mode", "must be 'sim' or 'synth'");
  if (segment_length < 64)
    throw ValidationError("spectral.segment_length", "must be >= 64");
  if (!(overlap >= 0.0 && overlap <= 0.95))
    throw ValidationError("spectral.overlap", "must lie in [0, 0.95]");
  if (n_averages < 1) throw ValidationError("spectral.n_averages", "must be >= 1");
  if (!(f_min_hz >= 0.0)) throw ValidationError("spectral.f_min", "must be >= 0");
  if (!(f_max_hz > f_min_hz))
    throw ValidationError("spectral.f_max", "must exceed f_min");
  if (!(f_step_hz > 0.0) || !std::isfinite(f_step_hz))
    throw ValidationError("spectral.f_step", "must be positive");
  if (mode == "synth" && !std::isfinite(f_max_hz))
    throw ValidationError("spectral.f_max", "synth mode needs a finite grid end");
  if (!(noise_floor >= 0.0) || !(lorentzian_weight >= 0.0) || !(fano_weight >= 0.0))
    throw ValidationError("spectral.weights", "model weights must be >= 0");
  if (!(linewidth >= 0.0) || !std::isfinite(linewidth))
    throw ValidationError("spectral.linewidth", "must be >= 0");
}

void FittingConfig::validate() const {
  if (floor_mode != "free" && floor_mode != "fixed_zero")
    throw ValidationError("fitting.floor_mode", "must be 'free' or 'fixed_zero'");
  if (gauge != "unit" && gauge != "theory" && gauge != "fixed_gamma_el")
    throw ValidationError("fitting.gauge",
                          "must be 'unit', 'theory' or 'fixed_gamma_el'");
  if (!(gamma_el > 0.0) || !std::isfinite(gamma_el))
    throw ValidationError("fitting.gamma_el", "must be positive");
  if (max_iterations < 10)
    throw ValidationError("fitting.max_iterations", "must be >= 10");
}

void SweepConfig::validate() const {
  if (voltages.empty()) throw ValidationError("sweep.voltages", "must not be empty");
  for (double v : voltages)
    if (!std::isfinite(v)) throw ValidationError("sweep.voltages", "must be finite");
  if (n_workers < 1 || n_workers > 64)
    throw ValidationError("sweep.n_workers", "must lie in [1, 64]");
}

void ExperimentConfig::validate() const {
  trap.validate();
  needle.validate();
  simulation.validate();
  spectral.validate();
  fitting.validate();
  sweep.validate();
  if (!std::isfinite(particle_charge_e0) ||
      std::abs(particle_charge_e0 - std::round(particle_charge_e0)) > 1e-6)
    throw ValidationError("particle.charge_e0", "must be an integer count of e0");
}

namespace {

double parse_double_value(const std::string& value, int line, int col) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || p != value.data() + value.size())
    throw ParseError(line, col, "expected a number, got '" + value + "'");
  return v;
}

long long parse_integer_value(const std::string& value, int line, int col) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || p != value.data() + value.size())
    throw ParseError(line, col, "expected an integer, got '" + value + "'");
  return v;
}

std::uint64_t parse_seed_value(const std::string& value, int line, int col) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || p != value.data() + value.size())
    throw ParseError(line, col, "expected a non-negative integer, got '" + value + "'");
  return v;
}

std::vector<double> parse_list_value(const std::string& value, int line, int col) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    std::size_t comma = value.find(',', pos);
    if (comma == std::string::npos) comma = value.size();
    std::size_t a = pos, b = comma;
    while (a < b && std::isspace(static_cast<unsigned char>(value[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(value[b - 1]))) --b;
    if (a == b) throw ParseError(line, col + static_cast<int>(pos), "empty list entry");
    out.push_back(
        parse_double_value(value.substr(a, b - a), line, col + static_cast<int>(a)));
    pos = comma + 1;
    if (comma == value.size()) break;
  }
  if (out.empty()) throw ParseError(line, col, "empty list");
  return out;
}

struct KeyContext {
  ExperimentConfig* cfg;
  int line;
  int key_col;
  int value_col;
};

void apply_key(const KeyContext& ctx, const std::string& section,
               const std::string& key, const std::string& value) {
  ExperimentConfig& c = *ctx.cfg;
  const int line = ctx.line, vcol = ctx.value_col;
  auto num = [&] { return parse_double_value(value, line, vcol); };
  auto integer = [&] { return parse_integer_value(value, line, vcol); };

  if (section == "trap") {
    if (key == "laser_power") c.trap.laser_power = num();
    else if (key == "wavelength") c.trap.wavelength = num();
    else if (key == "waist_radius") c.trap.waist_radius = num();
    else if (key == "rayleigh_length") c.trap.rayleigh_length = num();
    else if (key == "susceptibility") c.trap.susceptibility = num();
    else if (key == "nonlinearity") c.trap.nonlinearity = num();
    else if (key == "scattering_scale") c.trap.scattering_cross_section_scale = num();
    else throw ParseError(line, ctx.key_col, "unknown key '" + key + "' in [trap]");
  } else if (section == "particle") {
    if (key == "radius") c.trap.particle_radius = num();
    else if (key == "density") c.trap.particle_density = num();
    else if (key == "charge_e0") c.particle_charge_e0 = num();
    else throw ParseError(line, ctx.key_col, "unknown key '" + key + "' in [particle]");
  } else if (section == "needle") {
    if (key == "voltage") c.needle.voltage = num();
    else if (key == "tip_distance") c.needle.tip_distance = num();
    else if (key == "tip_radius") c.needle.tip_radius = num();
    else if (key == "charge_calibration") c.needle.charge_calibration = num();
    else if (key == "charge_override") c.needle.needle_charge_override = num();
    else throw ParseError(line, ctx.key_col, "unknown key '" + key + "' in [needle]");
  } else if (section == "simulation") {
    if (key == "timestep") c.simulation.timestep = num();
    else if (key == "duration") c.simulation.duration = num();
    else if (key == "seed") c.simulation.seed = parse_seed_value(value, line, vcol);
    else if (key == "gas_pressure") c.simulation.gas_pressure = num();
    else if (key == "gas_temperature") c.simulation.gas_temperature = num();
    else if (key == "gas_molecular_mass") c.simulation.gas_molecular_mass = num();
    else if (key == "feedback_strength") c.simulation.feedback_strength = num();
    else if (key == "record_stride") c.simulation.record_stride = static_cast<int>(integer());
    else if (key == "initial_displacement") c.simulation.initial_displacement = num();
    else if (key == "initial_momentum") c.simulation.initial_momentum = num();
    else throw ParseError(line, ctx.key_col, "unknown key '" + key + "' in [simulation]");
  } else if (section == "spectral") {
    if (key == "mode") c.spectral.mode = value;
    else if (key == "segment_length") c.spectral.segment_length = static_cast<std::size_t>(integer());
    else if (key == "overlap") c.spectral.overlap = num();
    else if (key == "n_averages") c.spectral.n_averages = static_cast<int>(integer());
    else if (key == "f_min") c.spectral.f_min_hz = num();
    else if (key == "f_max") c.spectral.f_max_hz = num();
    else if (key == "f_step") c.spectral.f_step_hz = num();
    else if (key == "noise_floor") c.spectral.noise_floor = num();
    else if (key == "lorentzian_weight") c.spectral.lorentzian_weight = num();
    else if (key == "fano_weight") c.spectral.fano_weight = num();
    else if (key == "linewidth") c.spectral.linewidth = num();
    else throw ParseError(line, ctx.key_col, "unknown key '" + key + "' in [spectral]");
  } else if (section == "fitting") {
    if (key == "floor_mode") c.fitting.floor_mode = value;
    else if (key == "gauge") c.fitting.gauge = value;
    else if (key == "gamma_el") c.fitting.gamma_el = num();
    else if (key == "max_iterations") c.fitting.max_iterations = static_cast<int>(integer());
    else throw ParseError(line, ctx.key_col, "unknown key '" + key + "' in [fitting]");
  } else if (section == "sweep") {
    if (key == "voltages") c.sweep.voltages = parse_list_value(value, line, vcol);
    else if (key == "n_workers") c.sweep.n_workers = static_cast<int>(integer());
    else throw ParseError(line, ctx.key_col, "unknown key '" + key + "' in [sweep]");
  } else {
    throw ParseError(line, 1, "unknown section [" + section + "]");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#' || line[first] == ';') continue;

    if (line[first] == '[') {
      const std::size_t close = line.find(']', first);
      if (close == std::string::npos)
        throw ParseError(line_no, static_cast<int>(first) + 1, "unterminated section header");
      const std::size_t tail = line.find_first_not_of(" \t", close + 1);
      if (tail != std::string::npos && line[tail] != '#' && line[tail] != ';')
        throw ParseError(line_no, static_cast<int>(tail) + 1, "trailing text after section header");
      section = line.substr(first + 1, close - first - 1);
      if (section != "trap" && section != "particle" && section != "needle" &&
          section != "simulation" && section != "spectral" && section != "fitting" &&
          section != "sweep")
        throw ParseError(line_no, static_cast<int>(first) + 2, "unknown section [" + section + "]");
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(line_no, static_cast<int>(first) + 1, "expected 'key = value' or a [section]");
    if (section.empty())
      throw ParseError(line_no, static_cast<int>(first) + 1, "key outside any [section]");

    std::size_t key_end = eq;
    while (key_end > first && std::isspace(static_cast<unsigned char>(line[key_end - 1]))) --key_end;
    const std::string key = line.substr(first, key_end - first);
    if (key.empty()) throw ParseError(line_no, static_cast<int>(first) + 1, "empty key");

    std::size_t vstart = line.find_first_not_of(" \t", eq + 1);
    std::size_t vend = line.size();
    while (vend > eq + 1 && std::isspace(static_cast<unsigned char>(line[vend - 1]))) --vend;
    if (vstart == std::string::npos || vstart >= vend)
      throw ParseError(line_no, static_cast<int>(eq) + 2, "empty value");
    const std::string value = line.substr(vstart, vend - vstart);

    KeyContext ctx{&cfg, line_no, static_cast<int>(first) + 1, static_cast<int>(vstart) + 1};
    apply_key(ctx, section, key, value);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config: " + path);
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  return parse_config(text);
}

std::string serialize_config(const ExperimentConfig& c) {
  std::string out;
  auto kv = [&](const char* key, double v) {
    out += key;
    out += " = ";
    out += format_double(v);
    out += '\n';
  };
  auto kvs = [&](const char* key, const std::string& v) {
    out += key;
    out += " = ";
    out += v;
    out += '\n';
  };

  out += "[trap]\n";
  kv("laser_power", c.trap.laser_power);
  kv("wavelength", c.trap.wavelength);
  kv("waist_radius", c.trap.waist_radius);
  kv("rayleigh_length", c.trap.rayleigh_length);
  kv("susceptibility", c.trap.susceptibility);
  kv("nonlinearity", c.trap.nonlinearity);
  kv("scattering_scale", c.trap.scattering_cross_section_scale);

  out += "\n[particle]\n";
  kv("radius", c.trap.particle_radius);
  kv("density", c.trap.particle_density);
  kv("charge_e0", c.particle_charge_e0);

  out += "\n[needle]\n";
  kv("voltage", c.needle.voltage);
  kv("tip_distance", c.needle.tip_distance);
  kv("tip_radius", c.needle.tip_radius);
  kv("charge_calibration", c.needle.charge_calibration);
  if (c.needle.needle_charge_override != NeedleConfig::kNoOverride)
    kv("charge_override", c.needle.needle_charge_override);

  out += "\n[simulation]\n";
  kv("timestep", c.simulation.timestep);
  kv("duration", c.simulation.duration);
  kvs("seed", std::to_string(c.simulation.seed));
  kv("gas_pressure", c.simulation.gas_pressure);
  kv("gas_temperature", c.simulation.gas_temperature);
  kv("gas_molecular_mass", c.simulation.gas_molecular_mass);
  kv("feedback_strength", c.simulation.feedback_strength);
  kvs("record_stride", std::to_string(c.simulation.record_stride));
  kv("initial_displacement", c.simulation.initial_displacement);
  kv("initial_momentum", c.simulation.initial_momentum);

  out += "\n[spectral]\n";
  kvs("mode", c.spectral.mode);
  kvs("segment_length", std::to_string(c.spectral.segment_length));
  kv("overlap", c.spectral.overlap);
  kvs("n_averages", std::to_string(c.spectral.n_averages));
  kv("f_min", c.spectral.f_min_hz);
  kv("f_max", c.spectral.f_max_hz);
  kv("f_step", c.spectral.f_step_hz);
  kv("noise_floor", c.spectral.noise_floor);
  kv("lorentzian_weight", c.spectral.lorentzian_weight);
  kv("fano_weight", c.spectral.fano_weight);
  kv("linewidth", c.spectral.linewidth);

  out += "\n[fitting]\n";
  kvs("floor_mode", c.fitting.floor_mode);
  kvs("gauge", c.fitting.gauge);
  kv("gamma_el", c.fitting.gamma_el);
  kvs("max_iterations", std::to_string(c.fitting.max_iterations));

  out += "\n[sweep]\n";
  out += "voltages = ";
  for (std::size_t i = 0; i < c.sweep.voltages.size(); ++i) {
    if (i) out += ", ";
    out += format_double(c.sweep.voltages[i]);
  }
  out += '\n';
  kvs("n_workers", std::to_string(c.sweep.n_workers));
  return out;
}

}  // namespace fanotrap
