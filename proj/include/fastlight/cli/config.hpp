#pragma once

// Flat `key = value` run configuration. Frequencies are ordinary frequencies
// in Hz (converted to angular 2*pi*nu internally), times in s, lengths in m.
// A numeric value may carry a unit suffix of the key's dimension, e.g.
// `omega_c_hz = 25 MHz`, `pulse_fwhm_s = 15.4 us`, `gain_target_per_m = 0.05 1/cm`.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fastlight/experiments.hpp"
#include "fastlight/medium.hpp"
#include "fastlight/pulse.hpp"

namespace fastlight::cli {

enum class KappaSource { Calibrate, Explicit, Microscopic };

struct RunConfig {
  // Medium. gamma31_hz and kappa12 come from calibration unless kappa_source says otherwise.
  double omega_c_hz = 25e6;
  double delta_c_hz = 3e9;
  double delta_2ph_hz = 400e3;
  double gamma21_hz = 3e6;
  double gamma23_hz = 3e6;
  std::optional<double> gamma31_hz;
  std::optional<double> kappa12;  // m^-1 s^-1
  double length_m = 0.1;

  KappaSource kappa_source = KappaSource::Calibrate;
  std::optional<double> n0_per_m3;
  std::optional<double> probe_carrier_hz;
  std::optional<double> d21;

  // Calibration.
  double gain_target_per_m = 5.0;
  double advance_target_s = 220e-9;
  GainReference gain_reference = GainReference::ProbeCarrier;
  std::optional<double> seed_kappa12;
  std::optional<double> seed_gamma31_hz;

  // Pulse and grid.
  double pulse_fwhm_s = 15.4e-6;
  double pulse_peak_amplitude = 1.0;
  std::size_t grid_n = 1u << 16;  // minimum; raised when the medium needs more
  double window_factor = 12.0;
  PropagationMode propagate_mode = PropagationMode::VacuumReferenced;
  int csv_stride = 16;

  // dispersion
  double dispersion_min_hz = -1e6;
  double dispersion_max_hz = 1e6;
  int dispersion_points = 401;

  // sweep-rabi
  double rabi_min_hz = 5e6;
  double rabi_max_hz = 15e6;
  int rabi_points = 21;
  double rabi_delta_c_hz = 2.2e9;
  double rabi_delta_2ph_hz = 400e3;

  // sweep-detuning: explicit range, or resonance +- span * gamma31
  std::optional<double> detuning_min_hz;
  std::optional<double> detuning_max_hz;
  double detuning_span_gamma31 = 10.0;
  int detuning_points = 201;

  // narrowing
  std::vector<double> narrowing_fwhm_s{15.4e-6, 5e-6};
  std::vector<double> narrowing_delta_2ph_hz{350e3, 400e3, 500e3, 600e3, 800e3};

  // oracle-check. The ODE runs at scaled parameters with the same
  // dimensionless ratios as the experiment.
  double oracle_probe_fraction = 1e-3;  // omega_p / omega_c
  double ode_omega_c_hz = 2e6;
  double ode_delta_c_hz = 50e6;
  double ode_delta_2ph_hz = 200e3;
  double ode_gamma21_hz = 50e3;
  double ode_gamma23_hz = 50e3;
  double ode_gamma31_hz = 50e3;
  double ode_duration_gamma31 = 40.0;
  double ode_step_divisor = 200.0;

  /// Medium parameters in angular units. kappa12/gamma31 are zero when they
  /// still have to be calibrated.
  MediumParams medium() const;
  CalibrationTarget calibration_target() const;
  GridOverrides grid() const { return {grid_n, window_factor}; }

  bool operator==(const RunConfig&) const = default;
};

/// Throws Error(Config) naming the key and line for unknown or duplicate
/// keys, unparsable values, unit-suffix mismatches and missing keys that
/// the chosen kappa_source requires.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// One `key = value` line per set field, numbers in shortest round-trip form.
/// parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// Shortest decimal string that parses back to the same double.
std::string format_number(double value);

}  // namespace fastlight::cli
