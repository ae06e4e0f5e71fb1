#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace synctrans {

enum class ErrorCode {
  NoSignChange,
  NotABifurcationPoint,
  DegenerateDenominator,
  NonFiniteState,
  StepTooLarge,
  NoPeaks,
  NotLocked,
  NoCycleFound,
  AdjointNotConverged,
  FitFailed,
  GridMismatch,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Failure of a numerical operation. The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Non-finite state during integration; carries the simulation time of failure.
class NonFiniteStateError : public NumericalError {
 public:
  NonFiniteStateError(double time, const std::string& what)
      : NumericalError(ErrorCode::NonFiniteState, what), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Bad user-supplied configuration (grid strings, JSON, flags). Exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace synctrans
