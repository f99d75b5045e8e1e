#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fastlight {

enum class ErrorKind {
  InvalidParameter,
  OutsideAsymptoticRegime,
  SingularVelocity,
  NotFound,
  InvalidStep,
  WeakProbeViolated,
  InsufficientData,
  WindowTooSmall,
  GridResolution,
  Unfittable,
  CalibrationFailed,
  Regime,
  Config,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace fastlight
