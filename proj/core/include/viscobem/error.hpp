#pragma once

#include <stdexcept>
#include <string>

namespace viscobem {

enum class ErrorCode {
  InvalidGeometry,
  InvalidMaterial,
  InvalidRheology,
  SingularEvaluation,
  InvalidNormal,
  UnsupportedConfiguration,
  DegenerateRheology,
  NonInvertibleTransform,
  Configuration,
  IllPosed,
  NonConvergence,
  OutOfDomain,
  UnsupportedRheology,
  SingularSystem,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for errors caused by user input rather than by the numerics.
  bool is_configuration_error() const noexcept {
    switch (code_) {
      case ErrorCode::InvalidGeometry:
      case ErrorCode::InvalidMaterial:
      case ErrorCode::InvalidRheology:
      case ErrorCode::UnsupportedConfiguration:
      case ErrorCode::Configuration:
      case ErrorCode::UnsupportedRheology:
      case ErrorCode::Io:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorCode code_;
};

}  // namespace viscobem
