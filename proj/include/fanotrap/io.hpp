#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fanotrap/inference.hpp"
#include "fanotrap/langevin.hpp"
#include "fanotrap/spectrum.hpp"

namespace fanotrap {

// Locale-independent shortest round-trip decimal text for a double.
std::string format_double(double value);

// 64-bit FNV-1a, used to fingerprint every file an experiment run produces.
std::uint64_t fnv1a_hash(const void* data, std::size_t size);
std::string file_hash_hex(const std::string& path);  // 16 lowercase hex digits

// Trajectory CSV: time_s,position_m,momentum_kgms (self-describing grid).
void write_trajectory_csv(const std::string& path, const Trajectory& trajectory);
Trajectory read_trajectory_csv(const std::string& path);

// Spectrum CSV: frequency_hz,psd. The averaging metadata the log-space fit
// weights depend on travels in a JSON sidecar next to the CSV.
void write_spectrum_csv(const std::string& path, const Spectrum& spectrum);
Spectrum read_spectrum_csv(const std::string& path);
std::string sidecar_path(const std::string& csv_path);

// Sweep observations CSV: voltage_v,frequency_hz,frequency_error_hz.
void write_observations_csv(const std::string& path,
                            const std::vector<FrequencyObservation>& observations);
std::vector<FrequencyObservation> read_observations_csv(const std::string& path);

}  // namespace fanotrap
