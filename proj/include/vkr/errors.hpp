#pragma once

#include <stdexcept>
#include <string>

namespace vkr {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A quadratic-form reduction hit a singular minimized-over block.
struct ReductionError : Error {
  using Error::Error;
};

// A linear or nonlinear solve failed (singular system, non-convergence).
struct SolveError : Error {
  using Error::Error;
};

// Newton inversion of a chart map failed at a concrete point.
struct NewtonError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// A runtime consistency assertion (convergence bound, bracket, ...) failed.
struct CheckError : Error {
  using Error::Error;
};

}  // namespace vkr
