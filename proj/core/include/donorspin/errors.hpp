#pragma once

#include <stdexcept>
#include <string>

namespace donorspin {

/// Bad input: configs, tables, parameter ranges. Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Solver-level failure: degenerate kernels, integration instability,
/// residuals out of tolerance. Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace donorspin
