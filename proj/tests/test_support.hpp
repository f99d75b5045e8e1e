#pragma once

#include <cmath>
#include <complex>

#include "fastlight/experiments.hpp"

namespace testing {

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

inline double rel(std::complex<double> a, std::complex<double> b) {
  return std::abs(a - b) / std::abs(b);
}

// Calibrated once per binary.
inline const fastlight::MediumParams& calibrated() {
  static const fastlight::MediumParams p =
      fastlight::calibrate(fastlight::fig2_target()).apply(fastlight::fig2_base_params());
  return p;
}

}  // namespace testing
