#pragma once

namespace fanotrap {

inline constexpr const char* kToolName = "fanotrap";
inline constexpr const char* kVersion = "1.0.0";

// Placeholder timestamp used when the caller does not supply one: outputs
// must be byte-reproducible, so nothing in this library reads a wall clock.
inline constexpr const char* kDefaultCreatedAt = "1970-01-01T00:00:00Z";

}  // namespace fanotrap
