#pragma once

// Time-domain density-matrix equations of the weak-probe Raman system, used
// as an independent check of the frequency-domain kernel in medium.hpp.
//
// With rho33 = 1 and real half Rabi frequencies:
//   d rho12/dt = -i Wc e^{ i Dc t} rho13 - g12 rho12
//   d rho13/dt =  i Wp e^{ i Dp t} rho23 - i Wc e^{-i Dc t} rho12 - g13 rho13
//   d rho23/dt =  i Wp e^{-i Dp t} rho13 + i Wc e^{-i Dc t} rho33 - g23 rho23
// g12 is MediumParams::gamma21 and g13 is MediumParams::gamma31.

#include <complex>
#include <vector>

#include "fastlight/medium.hpp"

namespace fastlight {

struct BlochState {
  Complex rho12;
  Complex rho13;
  Complex rho23;
  double time = 0.0;
};

struct DriveParams {
  double omega_p = 0.0;  // probe half Rabi frequency
  MediumParams medium;

  double delta_p() const { return medium.delta_p(); }
};

struct IntegrationOptions {
  double t_start = 0.0;
  BlochState initial{};   // time field is overwritten with t_start
  int record_stride = 1;  // keep every n-th step (the final state is always kept)
};

using Trajectory = std::vector<BlochState>;

/// Fixed-step classical RK4 of the three coherences from t_start to t_end.
///
/// Requires dt <= 1/(50*max(|Dc|, |Dp|, Wc, gammas)) and
/// t_end - t_start >= 10/gamma31. Throws InvalidStep otherwise and
/// WeakProbeViolated if any |rho| exceeds 1.1.
Trajectory integrate_bloch(const DriveParams& d, double t_end, double dt,
                           const IntegrationOptions& options = {});

/// Largest step accepted by integrate_bloch.
double max_bloch_step(const DriveParams& d);

/// First-order-in-probe steady state:
///   rho23 = a e^{-i Dc t}, rho13 = b e^{i (Dp - Dc) t}, rho12 = c e^{i Dp t}.
struct SteadyState {
  Complex a;
  Complex b;
  Complex c;
};

/// Closed form
///   a = i Wc / (g23 - i Dc)
///   b = i Wp a / (i (Dp - Dc) + g13 + Wc^2/(g12 + i Dp))
///   c = -i Wc b / (g12 + i Dp)
/// Replacing Dp by Dc inside (g12 + i Dp) turns i*denominator(b) into
/// -conj(1/W(0)), which is what ties c to the propagation kernel.
SteadyState steady_state_perturbative(const DriveParams& d);

enum class Coherence { Rho12, Rho13, Rho23 };

/// Mean of coherence * e^{-i ref t} over the final 20% of the trajectory.
/// Throws InsufficientData when that window spans fewer than 5 periods of
/// `reference` (or fewer than 2 samples).
Complex extract_coherence_amplitude(const Trajectory& trajectory, Coherence which,
                                    double reference);

/// Which detuning enters the (g12 + i D) factors of the closed form when it
/// is compared to the kernel.
enum class OracleDetuning {
  Probe,  // Dp, physical
  Pump,   // Dc, makes the identity with K(0) exact
};

struct OracleResult {
  Complex coherence_c;
  Complex kernel_prediction;
  double relative_deviation = 0.0;
  double bound = 0.0;  // (gamma21 + |delta_2ph|)/|delta_c| + 1e-6
};

/// Compares conj(c)/Wp from the closed form with K(0)/(i kappa12) from the
/// kernel (kappa12 itself drops out, so kappa12 = 0 is fine).
OracleResult cross_check_kernel(const DriveParams& d,
                                OracleDetuning detuning = OracleDetuning::Probe);

struct OdeCheck {
  SteadyState closed_form;
  SteadyState integrated;  // demodulated from the trajectory
  double relative_deviation = 0.0;  // on c
};

/// Integrates from rest over duration_gamma31/gamma31 with
/// dt = 1/(step_divisor * fastest rate) and demodulates all three coherences
/// on their carriers. step_divisor must be >= 50.
OdeCheck cross_check_ode(const DriveParams& d, double duration_gamma31 = 40.0,
                         double step_divisor = 200.0, double t_start = 0.0);

}  // namespace fastlight
