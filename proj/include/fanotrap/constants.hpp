#pragma once

// Physical constants, CODATA 2018. Strict SI throughout the library;
// angular frequencies are rad/s internally and only converted to Hz at
// file/JSON boundaries.
namespace fanotrap::constants {

inline constexpr double kSpeedOfLight = 299792458.0;        // m/s (exact)
inline constexpr double kHbar = 1.054571817e-34;            // J s
inline constexpr double kBoltzmann = 1.380649e-23;          // J/K (exact)
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m
inline constexpr double kElementaryCharge = 1.602176634e-19;     // C (exact)
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;     // kg

inline constexpr double kPi = 3.14159265358979323846;

// Molecular mass of N2, the default residual gas species.
inline constexpr double kNitrogenMass = 28.0134 * kAtomicMassUnit;  // kg

}  // namespace fanotrap::constants
