#pragma once

#include <stdexcept>
#include <string>

namespace slitlab {

enum class Bc { Dirichlet, Neumann };

inline const char* to_string(Bc bc) {
  return bc == Bc::Dirichlet ? "dirichlet" : "neumann";
}

/// Bad problem setup (unparsable file, slit outside domain, ...). CLI exit 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical breakdown (integrator stall, factorization failure, ...). CLI exit 3.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Requested accuracy exceeds the discretization in use.
struct ResolutionError : NumericalError {
  explicit ResolutionError(const std::string& msg) : NumericalError(msg) {}
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

}  // namespace slitlab
