#pragma once

#include <stdexcept>
#include <string>

namespace mchom {

/// Invalid configuration or misuse of a library contract (bad arguments,
/// non-nested spaces, malformed config files).  CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical failure: singular factorization, non-convergent iteration,
/// non-positive coefficient detected during assembly.  CLI exit code 3.
struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem failure while reading or writing run artifacts.  CLI exit code 4.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mchom
