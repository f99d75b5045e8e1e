#pragma once

// Calibration of the two unpublished medium constants (kappa12, gamma31)
// and the three demonstrations: advanced Gaussian pulse, pump-Rabi sweep,
// two-photon-detuning sweep, plus the pulse-narrowing study.

#include <string>
#include <vector>

#include "fastlight/constants.hpp"
#include "fastlight/medium.hpp"
#include "fastlight/pulse.hpp"

namespace fastlight {

/// Where the gain target is evaluated.
enum class GainReference {
  ProbeCarrier,  // 2 Re K(0): the gain the probe pulse actually sees
  Peak,          // max over omega of 2 Re K
};

struct CalibrationTarget {
  double gain_target = 5.0;         // intensity gain, m^-1
  double advance_target = 220e-9;   // L/c - group delay, s
  GainReference reference = GainReference::ProbeCarrier;
  MediumParams fixed;               // kappa12 and gamma31 are ignored

  void validate() const;
};

struct CalibrationStep {
  int iteration = 0;
  double kappa12 = 0.0;
  double gamma31 = 0.0;
  double gain_residual = 0.0;     // relative
  double advance_residual = 0.0;  // relative
};

struct Calibration {
  double kappa12 = 0.0;
  double gamma31 = 0.0;
  double gain_residual = 0.0;
  double advance_residual = 0.0;
  std::vector<CalibrationStep> history;

  MediumParams apply(MediumParams p) const {
    p.kappa12 = kappa12;
    p.gamma31 = gamma31;
    return p;
  }
};

/// Medium parameters of the advanced-pulse demonstration: pump 2pi*25 MHz,
/// one-photon detuning 2pi*3 GHz, two-photon detuning 2pi*400 kHz,
/// gamma21 = gamma23 = 2pi*3 MHz, L = 0.1 m. kappa12 and gamma31 are zero.
MediumParams fig2_base_params();
CalibrationTarget fig2_target();

/// Seed from the far-detuned closure of gain and advance.
struct Seed {
  double kappa12 = 0.0;
  double gamma31 = 0.0;
};
Seed asymptotic_seed(const CalibrationTarget& target);

/// Model observables for a candidate pair, in target units.
double model_gain(const CalibrationTarget& target, double kappa12, double gamma31);
double model_advance(const CalibrationTarget& target, double kappa12, double gamma31);

/// Damped Newton on log(kappa12), log(gamma31) with a finite-difference
/// Jacobian, full kernel throughout. Throws CalibrationFailed after 100
/// iterations or if the relative residuals stay above 1e-6.
Calibration calibrate(const CalibrationTarget& target, Seed seed);
Calibration calibrate(const CalibrationTarget& target);

struct EdgeSample {
  std::string region;  // "front" or "rear"
  double time = 0.0;
  double reference_intensity = 0.0;
  double probe_intensity = 0.0;
};

struct Fig2Report {
  MediumParams params;
  TimeGrid grid;
  PulseSpec pulse;
  PulseMetrics metrics;
  double analytic_advance = 0.0;  // L/c - group_delay_exact
  std::vector<EdgeSample> edges;
};

struct GridOverrides {
  std::size_t min_n = 1u << 16;
  double window_factor = 12.0;
};

/// Vacuum-referenced propagation of a Gaussian pulse of the given FWHM.
Fig2Report run_fig2(const MediumParams& calibrated, double fwhm = 15.4e-6,
                    const GridOverrides& grid = {});

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;  // log-space intercept, exp'd
  double r_squared = 0.0;
  std::size_t n_points = 0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

struct SweepResult {
  std::string variable;       // name of the independent variable
  std::vector<double> x;      // rad/s
  std::vector<double> vg;     // m/s
  std::vector<double> advance;  // s
  std::vector<bool> in_fit_range;
};

struct RabiSweep {
  SweepResult sweep;
  std::vector<double> stark;  // per point
  PowerLawFit fit;            // |Vg| vs omega_c over the valid subrange
  /// max relative departure of |Vg| from the fitted power law at points
  /// beyond the valid subrange (0 if none).
  double departure_beyond_range = 0.0;
};

/// Pump-Rabi sweep at fixed delta_c, delta_2ph. Valid subrange:
/// stark_shift < delta_2ph/4. Throws Regime if it is empty.
RabiSweep sweep_rabi(const MediumParams& calibrated, const std::vector<double>& omega_c,
                     double delta_2ph = hz_to_rad(400e3), double delta_c = hz_to_rad(2.2e9));

struct DetuningSweep {
  SweepResult sweep;
  std::vector<double> effective_detuning;
  double center = 0.0;   // shifted resonance, rad/s
  LinearFit vg_vs_detuning_squared;       // |Vg| vs delta_eff^2, |delta_eff| > 5 gamma31
  LinearFit advance_vs_inverse_squared;   // advance vs delta_eff^-2, same subrange
  double max_symmetry_error = 0.0;        // relative, advance(c + x) vs advance(c - x)
  std::vector<double> crossovers;
};

/// Two-photon-detuning sweep; the range must contain the shifted resonance
/// with >= 10 gamma31 margin on both sides.
DetuningSweep sweep_detuning(const MediumParams& calibrated, const std::vector<double>& delta_2ph);

/// n equally spaced detunings over resonance +- half_span_gamma31*gamma31.
std::vector<double> detuning_grid(const MediumParams& p, double half_span_gamma31, int n);

struct NarrowingCell {
  double fwhm = 0.0;
  double delta_2ph = 0.0;
  double effective_detuning = 0.0;
  PulseMetrics metrics;
};

struct NarrowingStudy {
  std::vector<NarrowingCell> cells;  // fwhm-major
  /// For every detuning, narrowing grows as the pulse gets shorter.
  bool narrowing_increases_as_fwhm_decreases = false;
  /// For every fwhm, over the superluminal cells, narrowing grows as
  /// |delta_eff| shrinks.
  bool narrowing_increases_as_detuning_decreases = false;
};

NarrowingStudy narrowing_study(const MediumParams& calibrated, const std::vector<double>& fwhms,
                               const std::vector<double>& delta_2ph,
                               const GridOverrides& grid = {});

}  // namespace fastlight
