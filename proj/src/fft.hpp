#pragma once

#include <complex>
#include <vector>

namespace fastlight::detail {

enum class FftDirection { Forward, Inverse };

/// Unnormalized DFT: forward uses e^{-2 pi i k n / N}, inverse e^{+2 pi i k n / N}.
std::vector<std::complex<double>> fft(std::vector<std::complex<double>> data,
                                      FftDirection direction);

}  // namespace fastlight::detail
