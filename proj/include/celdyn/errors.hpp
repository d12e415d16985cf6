#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace celdyn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input. `field()` names the offending parameter so front ends
/// can point at the flag that caused it.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class UnknownPreset : public ValidationError {
 public:
  explicit UnknownPreset(const std::string& name)
      : ValidationError("preset", "unknown preset '" + name + "' (expected fig1..fig12)") {}
};

/// Numerical failures. Distinct from validation errors so the CLI can map
/// them onto their own exit code.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DegenerateSpectrum : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NumericalInstability : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StepTooLarge : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularDrift : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class CutoffExceeded : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace celdyn
