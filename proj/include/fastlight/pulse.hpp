#pragma once

// Gaussian probe pulses on a uniform time grid, propagation through the Raman
// medium in the Fourier domain, and Gaussian-fit pulse metrology.
//
// Envelopes live in the frame rotating at the probe carrier. Sample k sits at
// t0 + k*dt. The spectrum is taken with the medium's e^{-i omega t} synthesis
// convention, so the DFT bin of ordinary angular frequency nu maps to
// omega = -nu.

#include <functional>
#include <vector>

#include "fastlight/medium.hpp"

namespace fastlight {

struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t n = 0;

  /// n must be a power of two >= 1024 and dt > 0.
  void validate() const;
  double window() const { return dt * static_cast<double>(n); }
  double time(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
  double center() const { return t0 + 0.5 * window(); }

  bool operator==(const TimeGrid&) const = default;
};

/// fwhm is the full width at half maximum of the intensity |envelope|^2.
struct PulseSpec {
  double fwhm = 0.0;
  double peak_amplitude = 1.0;
  double center_time = 0.0;
};

struct PulseEnvelope {
  TimeGrid grid;
  std::vector<Complex> samples;

  /// sum |s|^2 dt
  double energy() const;
};

/// Estimate with its one-sigma numerical uncertainty.
struct Measured {
  double value = 0.0;
  double uncertainty = 0.0;
};

struct GaussianFit {
  Measured peak_time;
  Measured fwhm;  // of |s|^2
  double height = 0.0;
  double residual = 0.0;  // RMS of (data - fit)/height over the fit window
};

struct PulseMetrics {
  GaussianFit input;
  GaussianFit output;
  Measured peak_time;  // output
  Measured fwhm;       // output
  double energy_gain = 0.0;
  double advance = 0.0;  // input peak - output peak; positive = superluminal
  double narrowing_fraction = 0.0;
  double distortion = 0.0;
};

enum class PropagationMode {
  VacuumReferenced,  // drops the i*omega*L/c phase: compare with a vacuum-propagated reference
  Absolute,
};

/// Complex kernel K(omega) in m^-1, excluding the vacuum term.
using KernelFn = std::function<Complex(double omega)>;

/// Default grid for a pulse of the given FWHM: window 12*fwhm and 2^16 samples,
/// widened/refined as needed to resolve the medium's Raman line.
TimeGrid default_grid(double fwhm, const MediumParams& p, std::size_t min_n = 1u << 16,
                      double window_factor = 12.0);

/// peak_amplitude * exp(-2 ln2 (t - center)^2 / fwhm^2), so |s|^2 has the
/// requested FWHM. Throws WindowTooSmall unless the window spans >= 8*fwhm
/// and the center sits >= 4*fwhm from both edges.
PulseEnvelope make_gaussian_pulse(const PulseSpec& spec, const TimeGrid& grid);

/// DFT angular frequencies of the grid in the medium convention (omega = -nu).
std::vector<double> spectral_omegas(const TimeGrid& grid);

/// Forward DFT of the samples (bins ordered as the standard FFT output).
std::vector<Complex> spectrum(const PulseEnvelope& env);

/// Multiplies the spectrum by exp((i*omega/c [absolute only] + K(omega)) * length).
PulseEnvelope propagate(const PulseEnvelope& env, const KernelFn& kernel, double length,
                        PropagationMode mode);

/// Same with the medium kernel. Throws GridResolution (with a suggested grid)
/// unless pi/dt >= 50*max(gamma31, |delta_eff|) and 2*pi/(n*dt) <= gamma31/10.
PulseEnvelope propagate(const PulseEnvelope& env, const MediumParams& p, PropagationMode mode);

/// Least-squares Gaussian fit of |s|^2 over the samples above 0.1*max:
/// weighted log-domain quadratic regression followed by one Gauss-Newton step.
/// Throws Unfittable for multi-lobe data or fewer than 32 samples above half max.
GaussianFit fit_gaussian(const PulseEnvelope& env);

PulseMetrics pulse_metrics(const PulseEnvelope& input, const PulseEnvelope& output);

}  // namespace fastlight
