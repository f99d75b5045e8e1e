#pragma once

// Linear response of a three-level active Raman gain medium to a weak probe.
//
// Level scheme: the pump (half Rabi frequency omega_c, one-photon detuning
// delta_c) drives |3> -> |2>, the probe drives |1> -> |2>, and nearly all
// population sits in |3>. Eliminating the excited state gives a single
// Raman pole in the Fourier variable omega (detuning from the probe carrier),
//
//   W(omega) = 1 / (omega + delta_2ph + i*gamma31 - |omega_c|^2/(delta_c + i*gamma21))
//   K(omega) = i*kappa12*|omega_c|^2 * W(omega) / ((delta_c - i*gamma23)(delta_c + i*gamma21))
//
// and the probe spectrum obeys dLambda/dz = (i*omega/c + K(omega)) * Lambda.
// Spectral convention: a field f(t) is synthesized as integral F(omega) e^{-i omega t},
// so a phase slope d(Im K)/d omega is a group delay per unit length.
//
// All quantities are angular (rad/s); detunings are signed.

#include <complex>
#include <utility>
#include <vector>

namespace fastlight {

using Complex = std::complex<double>;

struct MediumParams {
  double kappa12 = 0.0;    // propagation coupling, m^-1 s^-1
  double omega_c = 0.0;    // pump half Rabi frequency
  double delta_c = 0.0;    // pump one-photon detuning
  double delta_2ph = 0.0;  // two-photon detuning, delta_p - delta_c
  double gamma21 = 0.0;    // |1>-|2> decoherence
  double gamma23 = 0.0;    // |2>-|3> decoherence
  double gamma31 = 0.0;    // ground-state (Raman) decoherence
  double length = 0.0;     // m

  /// Throws InvalidParameter unless all rates and the length are positive,
  /// kappa12 is non-negative and every field is finite.
  void validate() const;

  /// Probe one-photon detuning.
  double delta_p() const { return delta_c + delta_2ph; }

  bool operator==(const MediumParams&) const = default;
};

/// Inputs of the microscopic coupling formula.
struct MicroscopicInputs {
  double n0 = 0.0;       // atom number density, m^-3
  double omega_p = 0.0;  // probe carrier angular frequency, rad/s
  double d21 = 0.0;      // |D21|
};

struct DispersionPoint {
  double omega = 0.0;
  Complex kernel;
  double intensity_gain = 0.0;       // 2 Re K, m^-1
  double group_delay_density = 0.0;  // d(Im K)/d omega, s/m
};

struct DispersionProfile {
  MediumParams params;
  std::vector<DispersionPoint> points;
};

/// kappa12 = 2*pi*n0*omega_p*|d21|^2 / c, evaluated exactly as written.
///
/// The formula as published carries no hbar and no unit-system factor, so the
/// result is not an SI coupling constant. Prefer a calibrated kappa12; this is
/// kept for order-of-magnitude comparisons.
double kappa_from_microscopic(const MicroscopicInputs& m);

/// Pump self-energy |omega_c|^2 / (delta_c + i*gamma21). Its real part is the
/// ac Stark shift of the Raman line, its imaginary part (negative) the power
/// broadening.
Complex pump_self_energy(const MediumParams& p);

Complex raman_response(double omega, const MediumParams& p);

/// Same as raman_response but with the pump self-energy supplied by the
/// caller instead of computed from omega_c.
Complex raman_response_with_self_energy(double omega, const MediumParams& p,
                                        Complex self_energy);

/// K(omega) without the vacuum term i*omega/c.
Complex transfer_kernel(double omega, const MediumParams& p);

Complex transfer_kernel_with_self_energy(double omega, const MediumParams& p,
                                         Complex self_energy);

/// d(Im K)/d omega, closed form for the single-pole kernel.
double group_delay_density(double omega, const MediumParams& p);

/// Position in omega of the real part of the W pole.
double pole_center(const MediumParams& p);

/// Half width of the Raman line, gamma31 plus power broadening.
double raman_linewidth(const MediumParams& p);

/// Two-photon detuning that places the Raman pole exactly on the probe
/// carrier (Re of the pump self-energy).
double resonance_detuning(const MediumParams& p);

/// delta_2ph - resonance_detuning(p): signed distance of the carrier from
/// the shifted Raman line.
double effective_detuning(const MediumParams& p);

/// max over real omega of 2 Re K(omega), closed form.
double peak_intensity_gain(const MediumParams& p);

/// |omega_c|^2 / delta_c. Throws InvalidParameter for delta_c == 0.
double stark_shift(const MediumParams& p);

/// L/c + L * d(Im K)/d omega at the probe carrier.
double group_delay_exact(const MediumParams& p);

/// Central finite difference of Im K at the carrier with step 1e-6*gamma31.
/// Independent cross-check of group_delay_exact.
double group_delay_finite_difference(const MediumParams& p);

/// L / group_delay_exact(p). Throws SingularVelocity when the delay is
/// within 1e-15 s of zero.
double group_velocity_exact(const MediumParams& p);

/// Far-detuned asymptotic group velocity
///   -delta_c^2 (delta_2ph - |omega_c|^2/delta_c)^2 / (kappa12 |omega_c|^2).
/// Throws OutsideAsymptoticRegime unless |delta_2ph - stark| > 3*gamma31 and
/// |delta_c| > 100*max(gamma21, gamma23, omega_c).
double group_velocity_eq3(const MediumParams& p);

/// Two-photon detunings within [lo, hi] at which the transit time equals
/// the vacuum time L/c. The window must contain the shifted resonance.
/// Sign changes are bracketed on a gamma31/20 scan and refined by bisection.
std::vector<double> find_crossover_detunings(const MediumParams& p, double lo, double hi);

/// Uniform tabulation of the kernel over [omega_min, omega_max].
DispersionProfile dispersion_profile(const MediumParams& p, double omega_min,
                                     double omega_max, int n_samples);

}  // namespace fastlight
