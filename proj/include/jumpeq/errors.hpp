#pragma once

#include <stdexcept>
#include <string>

namespace jumpeq {

inline constexpr const char* kVersion = "0.1.0";

// Invalid user-facing input: bad config key/value, inconsistent grids, bad
// argument ranges.  Maps to status 2 at the C boundary.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure inside a solver: non-finite iterates, Newton stall,
// non-contracting sweeps.  Maps to status 3 at the C boundary.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace jumpeq
