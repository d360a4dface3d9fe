#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace eqlab {

#define EQLAB_VERSION_STRING "0.1.0"

using Complex = std::complex<double>;
using Index = std::int64_t;

inline constexpr Complex imaginary_unit{0.0, 1.0};

/// Input violates a documented precondition (bad parameters, dimension
/// mismatch, non-Hermitian matrix, malformed config).
class InvalidInputError : public std::invalid_argument {
public:
  explicit InvalidInputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Request exceeds a documented size limit of the chosen algorithm.
class CapabilityError : public std::runtime_error {
public:
  explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical routine failed to meet its accuracy contract. Carries the
/// offending residual so callers can report it.
class NumericalError : public std::runtime_error {
public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_ = 0.0;
};

/// File or directory operation failed.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

inline const char* version() { return EQLAB_VERSION_STRING; }

} // namespace eqlab
