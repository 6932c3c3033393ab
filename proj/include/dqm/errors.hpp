#pragma once

#include <stdexcept>
#include <string>

namespace dqm {

// base class for all errors raised by this library
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// bad user input: malformed config, invalid parameter combinations
struct ConfigError : Error {
  using Error::Error;
};

// pulse/gap layout cannot be realized (e.g. pulse blocks overlap)
struct GeometryError : Error {
  using Error::Error;
};

// correction-basis integral too small to solve for alpha
struct DegenerateBasisError : Error {
  using Error::Error;
};

// modulation function left the invertible range of its segment
struct RangeViolationError : Error {
  RangeViolationError(const std::string& what, int segment, double time)
      : Error(what), segment_index(segment), time(time) {}
  int segment_index;
  double time;
};

// accumulated pulse area deviates from the pi/2 target
struct AreaError : Error {
  using Error::Error;
};

// propagation failure (non-converged step size, dimension mismatch)
struct SolverError : Error {
  using Error::Error;
};

}  // namespace dqm
