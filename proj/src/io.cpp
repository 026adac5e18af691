#include "fanotrap/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <system_error>

#include <json.hpp>

#include "fanotrap/constants.hpp"
#include "fanotrap/errors.hpp"

namespace fanotrap {

namespace {

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

// Comma-split a CSV row into exactly `expected` doubles; 1-based column of the
// offending character goes into the ParseError.
std::vector<double> parse_row(const std::string& line, int line_no,
                              std::size_t expected) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    const std::size_t end = comma == std::string::npos ? line.size() : comma;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + end, v);
    if (ec != std::errc() || ptr != line.data() + end)
      throw ParseError(line_no, static_cast<int>(pos) + 1, "expected a number");
    values.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (values.size() != expected)
    throw ParseError(line_no, 1,
                     "expected " + std::to_string(expected) + " columns, got " +
                         std::to_string(values.size()));
  return values;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open for reading: " + path);
  return in;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a_hash(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= static_cast<std::uint64_t>(bytes[i]);
    h *= 1099511628211ull;
  }
  return h;
}

std::string file_hash_hex(const std::string& path) {
  std::ifstream in = open_for_read(path);
  const std::string contents((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(
                    fnv1a_hash(contents.data(), contents.size())));
  return std::string(buf);
}

void write_trajectory_csv(const std::string& path, const Trajectory& trajectory) {
  std::ofstream out = open_for_write(path);
  std::string buffer = "time_s,position_m,momentum_kgms\n";
  buffer.reserve(1 << 20);
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    buffer += format_double(trajectory.time_at(i));
    buffer += ',';
    buffer += format_double(trajectory.z[i]);
    buffer += ',';
    buffer += format_double(trajectory.p[i]);
    buffer += '\n';
    if (buffer.size() > (1 << 20) - 128) {
      out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
      buffer.clear();
    }
  }
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  if (!out) throw Error("write failed: " + path);
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::string line;
  int line_no = 0;
  Trajectory traj;
  std::vector<double> times;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line.rfind("time_s,", 0) != 0)
        throw ParseError(1, 1, "expected header time_s,position_m,momentum_kgms");
      continue;
    }
    const std::vector<double> row = parse_row(line, line_no, 3);
    times.push_back(row[0]);
    traj.z.push_back(row[1]);
    traj.p.push_back(row[2]);
  }
  if (times.size() < 2) throw ParseError(line_no, 1, "trajectory needs >= 2 rows");
  traj.sample_interval = times[1] - times[0];
  if (!(traj.sample_interval > 0.0))
    throw ParseError(3, 1, "time column must be strictly increasing");
  return traj;
}

std::string sidecar_path(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".json");
  return p.string();
}

void write_spectrum_csv(const std::string& path, const Spectrum& spectrum) {
  spectrum.validate();
  std::ofstream out = open_for_write(path);
  std::string buffer = "frequency_hz,psd\n";
  buffer.reserve(1 << 20);
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    buffer += format_double(spectrum.frequency_hz[i]);
    buffer += ',';
    buffer += format_double(spectrum.psd[i]);
    buffer += '\n';
    if (buffer.size() > (1 << 20) - 128) {
      out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
      buffer.clear();
    }
  }
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  if (!out) throw Error("write failed: " + path);

  nlohmann::json meta;
  meta["n_averages"] = spectrum.n_averages;
  meta["resolution_bandwidth_hz"] = spectrum.resolution_bandwidth_hz;
  meta["source"] = spectrum.source;
  meta["seed"] = spectrum.seed;
  std::ofstream side = open_for_write(sidecar_path(path));
  side << meta.dump(2) << '\n';
  if (!side) throw Error("write failed: " + sidecar_path(path));
}

Spectrum read_spectrum_csv(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::string line;
  int line_no = 0;
  Spectrum spec;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line.rfind("frequency_hz,", 0) != 0)
        throw ParseError(1, 1, "expected header frequency_hz,psd");
      continue;
    }
    const std::vector<double> row = parse_row(line, line_no, 2);
    spec.frequency_hz.push_back(row[0]);
    spec.psd.push_back(row[1]);
  }

  const std::string side = sidecar_path(path);
  std::error_code ec;
  if (std::filesystem::exists(side, ec)) {
    std::ifstream sin = open_for_read(side);
    try {
      const nlohmann::json meta = nlohmann::json::parse(sin);
      spec.n_averages = meta.value("n_averages", 1);
      spec.resolution_bandwidth_hz = meta.value("resolution_bandwidth_hz", 0.0);
      spec.source = meta.value("source", std::string("file"));
      spec.seed = meta.value("seed", std::uint64_t{0});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(1, 1, std::string("sidecar ") + side + ": " + e.what());
    }
  } else {
    spec.source = "file";
  }
  if (spec.resolution_bandwidth_hz == 0.0 && spec.frequency_hz.size() > 1)
    spec.resolution_bandwidth_hz = spec.frequency_hz[1] - spec.frequency_hz[0];
  spec.validate();
  return spec;
}

void write_observations_csv(const std::string& path,
                            const std::vector<FrequencyObservation>& observations) {
  std::ofstream out = open_for_write(path);
  out << "voltage_v,frequency_hz,frequency_error_hz\n";
  const double two_pi = 2.0 * constants::kPi;
  for (const auto& obs : observations)
    out << format_double(obs.voltage) << ',' << format_double(obs.omega_m / two_pi)
        << ',' << format_double(obs.omega_error / two_pi) << '\n';
  if (!out) throw Error("write failed: " + path);
}

std::vector<FrequencyObservation> read_observations_csv(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::string line;
  int line_no = 0;
  std::vector<FrequencyObservation> observations;
  const double two_pi = 2.0 * constants::kPi;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line.rfind("voltage_v,", 0) != 0)
        throw ParseError(1, 1,
                         "expected header voltage_v,frequency_hz,frequency_error_hz");
      continue;
    }
    const std::vector<double> row = parse_row(line, line_no, 3);
    FrequencyObservation obs;
    obs.voltage = row[0];
    obs.omega_m = row[1] * two_pi;
    obs.omega_error = row[2] * two_pi;
    observations.push_back(obs);
  }
  return observations;
}

}  // namespace fanotrap
