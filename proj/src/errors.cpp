#include "fastlight/errors.hpp"

namespace fastlight {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::OutsideAsymptoticRegime: return "outside-asymptotic-regime";
    case ErrorKind::SingularVelocity: return "singular-velocity";
    case ErrorKind::NotFound: return "not-found";
    case ErrorKind::InvalidStep: return "invalid-step";
    case ErrorKind::WeakProbeViolated: return "weak-probe-violated";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::WindowTooSmall: return "window-too-small";
    case ErrorKind::GridResolution: return "grid-resolution";
    case ErrorKind::Unfittable: return "unfittable";
    case ErrorKind::CalibrationFailed: return "calibration-failed";
    case ErrorKind::Regime: return "regime";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace fastlight
