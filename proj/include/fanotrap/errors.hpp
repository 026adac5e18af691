#pragma once

#include <stdexcept>
#include <string>

namespace fanotrap {

// Base class for all library errors. The CLI maps ConfigError-derived types
// to exit code 1 (bad input) and everything else to exit code 2 (runtime).
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// ---- input/configuration errors ----

// A config value violates a documented constraint; carries the field name.
struct ValidationError : Error {
  std::string field;
  ValidationError(std::string field_, const std::string& msg)
      : Error(field_ + ": " + msg), field(std::move(field_)) {}
};

// Config text could not be parsed; 1-based line/column of the offending token.
struct ParseError : Error {
  int line = 0;
  int column = 0;
  ParseError(int line_, int column_, const std::string& msg)
      : Error("parse error at line " + std::to_string(line_) + ", column " +
              std::to_string(column_) + ": " + msg),
        line(line_),
        column(column_) {}
};

// ---- physics / numerics errors ----

// Newton search for the trap equilibrium did not converge.
struct NoConvergenceError : Error { using Error::Error; };

// The effective potential has non-positive curvature at the requested point.
struct NotConfiningError : Error { using Error::Error; };

// Radicand of the mechanical frequency went non-positive.
struct ImaginaryFrequencyError : Error { using Error::Error; };

// Trajectory left the trapping region (|z| > 10 w0).
struct UnstableError : Error { using Error::Error; };

// timestep * omega_m >= 0.1: the integrator cannot resolve the oscillation.
struct ResolutionGuardError : Error { using Error::Error; };

// Not enough samples for the requested Welch segmentation.
struct TooShortError : Error { using Error::Error; };

// No usable resonance peak in the fit window.
struct NoPeakError : Error { using Error::Error; };

// No bin falls below half the baseline model: nothing to anchor a dip fit on.
struct NoDipError : Error { using Error::Error; };

// Voltage design matrix is rank deficient (e.g. all voltages equal).
struct DegenerateDesignError : Error { using Error::Error; };

// Frequency-vs-voltage inversion produced m^2 <= 0.
struct NegativeMassError : Error { using Error::Error; };

// Invalid argument to a pure function (e.g. q*Q = 0 in the Fano prediction).
struct InvalidInputError : Error { using Error::Error; };

}  // namespace fanotrap
