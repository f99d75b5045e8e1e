#include "fastlight/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fastlight/errors.hpp"

namespace fastlight {

namespace {

constexpr Complex kI{0.0, 1.0};

struct Derivative {
  Complex d12;
  Complex d13;
  Complex d23;
};

class BlochRhs {
 public:
  explicit BlochRhs(const DriveParams& d)
      : wp_(d.omega_p),
        wc_(d.medium.omega_c),
        dp_(d.delta_p()),
        dc_(d.medium.delta_c),
        g12_(d.medium.gamma21),
        g13_(d.medium.gamma31),
        g23_(d.medium.gamma23) {}

  Derivative operator()(double t, Complex r12, Complex r13, Complex r23) const {
    const Complex pump = std::polar(1.0, -dc_ * t);   // e^{-i Dc t}
    const Complex probe = std::polar(1.0, -dp_ * t);  // e^{-i Dp t}
    return {
        -kI * wc_ * std::conj(pump) * r13 - g12_ * r12,
        kI * wp_ * std::conj(probe) * r23 - kI * wc_ * pump * r12 - g13_ * r13,
        kI * wp_ * probe * r13 + kI * wc_ * pump - g23_ * r23,
    };
  }

 private:
  double wp_, wc_, dp_, dc_, g12_, g13_, g23_;
};

void check_weak_probe(const BlochState& s) {
  for (const Complex& v : {s.rho12, s.rho13, s.rho23}) {
    if (!(std::abs(v) <= 1.1)) {
      fail(ErrorKind::WeakProbeViolated,
           "coherence magnitude " + std::to_string(std::abs(v)) + " exceeds 1.1 at t = " +
               std::to_string(s.time));
    }
  }
}

}  // namespace

double max_bloch_step(const DriveParams& d) {
  const MediumParams& m = d.medium;
  const double fastest = std::max({std::abs(m.delta_c), std::abs(d.delta_p()),
                                   std::abs(m.omega_c), m.gamma21, m.gamma23, m.gamma31});
  return 1.0 / (50.0 * fastest);
}

Trajectory integrate_bloch(const DriveParams& d, double t_end, double dt,
                           const IntegrationOptions& options) {
  d.medium.validate();
  if (!std::isfinite(d.omega_p) || d.omega_p < 0.0) {
    fail(ErrorKind::InvalidParameter, "probe Rabi frequency must be finite and >= 0");
  }
  if (!(dt > 0.0) || dt > max_bloch_step(d)) {
    fail(ErrorKind::InvalidStep, "dt must lie in (0, 1/(50*fastest rate)]");
  }
  const double span = t_end - options.t_start;
  if (!(span >= 10.0 / d.medium.gamma31)) {
    fail(ErrorKind::InvalidStep, "integration must span at least 10/gamma31");
  }
  if (options.record_stride < 1) fail(ErrorKind::InvalidParameter, "record_stride must be >= 1");

  const BlochRhs rhs(d);
  const auto n_steps = static_cast<long>(std::ceil(span / dt - 1e-9));
  const double h = span / static_cast<double>(n_steps);

  Trajectory out;
  out.reserve(static_cast<std::size_t>(n_steps / options.record_stride + 2));
  BlochState s = options.initial;
  s.time = options.t_start;
  check_weak_probe(s);
  out.push_back(s);

  for (long i = 1; i <= n_steps; ++i) {
    const double t = s.time;
    const Derivative k1 = rhs(t, s.rho12, s.rho13, s.rho23);
    const Derivative k2 = rhs(t + 0.5 * h, s.rho12 + 0.5 * h * k1.d12,
                              s.rho13 + 0.5 * h * k1.d13, s.rho23 + 0.5 * h * k1.d23);
    const Derivative k3 = rhs(t + 0.5 * h, s.rho12 + 0.5 * h * k2.d12,
                              s.rho13 + 0.5 * h * k2.d13, s.rho23 + 0.5 * h * k2.d23);
    const Derivative k4 =
        rhs(t + h, s.rho12 + h * k3.d12, s.rho13 + h * k3.d13, s.rho23 + h * k3.d23);
    s.rho12 += h / 6.0 * (k1.d12 + 2.0 * k2.d12 + 2.0 * k3.d12 + k4.d12);
    s.rho13 += h / 6.0 * (k1.d13 + 2.0 * k2.d13 + 2.0 * k3.d13 + k4.d13);
    s.rho23 += h / 6.0 * (k1.d23 + 2.0 * k2.d23 + 2.0 * k3.d23 + k4.d23);
    // Index-based time keeps the grid free of accumulated rounding.
    s.time = options.t_start + static_cast<double>(i) * h;
    check_weak_probe(s);
    if (i % options.record_stride == 0 || i == n_steps) out.push_back(s);
  }
  return out;
}

SteadyState steady_state_perturbative(const DriveParams& d) {
  d.medium.validate();
  const MediumParams& m = d.medium;
  const double dp = d.delta_p();
  const Complex a = kI * m.omega_c / Complex(m.gamma23, -m.delta_c);
  const Complex g12_dp(m.gamma21, dp);
  const Complex denom_b = kI * (dp - m.delta_c) + m.gamma31 + m.omega_c * m.omega_c / g12_dp;
  const Complex b = kI * d.omega_p * a / denom_b;
  const Complex c = -kI * m.omega_c * b / g12_dp;
  return {a, b, c};
}

Complex extract_coherence_amplitude(const Trajectory& trajectory, Coherence which,
                                    double reference) {
  if (trajectory.size() < 2) fail(ErrorKind::InsufficientData, "trajectory has < 2 samples");
  const double t_first = trajectory.front().time;
  const double t_last = trajectory.back().time;
  const double window = 0.2 * (t_last - t_first);
  const double t_from = t_last - window;
  if (reference != 0.0 && std::abs(reference) * window < 5.0 * 2.0 * std::numbers::pi) {
    fail(ErrorKind::InsufficientData,
         "demodulation window covers fewer than 5 periods of the reference");
  }

  Complex sum{};
  long count = 0;
  for (const BlochState& s : trajectory) {
    if (s.time < t_from) continue;
    const Complex value = which == Coherence::Rho12   ? s.rho12
                          : which == Coherence::Rho13 ? s.rho13
                                                      : s.rho23;
    sum += value * std::polar(1.0, -reference * s.time);
    ++count;
  }
  if (count < 2) fail(ErrorKind::InsufficientData, "demodulation window holds < 2 samples");
  return sum / static_cast<double>(count);
}

OracleResult cross_check_kernel(const DriveParams& d, OracleDetuning detuning) {
  d.medium.validate();
  if (!(d.omega_p > 0.0)) fail(ErrorKind::InvalidParameter, "oracle needs a probe field");

  DriveParams drive = d;
  SteadyState ss;
  if (detuning == OracleDetuning::Probe) {
    ss = steady_state_perturbative(drive);
  } else {
    // Dp -> Dc in the (g12 + i D) factors only; the i(Dp - Dc) term stays.
    const MediumParams& m = d.medium;
    const Complex a = kI * m.omega_c / Complex(m.gamma23, -m.delta_c);
    const Complex g12_dc(m.gamma21, m.delta_c);
    const Complex denom_b = kI * m.delta_2ph + m.gamma31 + m.omega_c * m.omega_c / g12_dc;
    const Complex b = kI * d.omega_p * a / denom_b;
    ss = {a, b, -kI * m.omega_c * b / g12_dc};
  }

  MediumParams unit = d.medium;
  unit.kappa12 = 1.0;
  const Complex prediction = transfer_kernel(0.0, unit) / kI;
  const Complex response = std::conj(ss.c) / d.omega_p;

  OracleResult r;
  r.coherence_c = ss.c;
  r.kernel_prediction = prediction;
  r.relative_deviation = std::abs(response - prediction) / std::abs(prediction);
  r.bound = (d.medium.gamma21 + std::abs(d.medium.delta_2ph)) / std::abs(d.medium.delta_c) + 1e-6;
  return r;
}

OdeCheck cross_check_ode(const DriveParams& d, double duration_gamma31, double step_divisor,
                         double t_start) {
  if (step_divisor < 50.0) fail(ErrorKind::InvalidStep, "step_divisor must be >= 50");
  const double dt = max_bloch_step(d) * 50.0 / step_divisor;
  const double t_end = t_start + duration_gamma31 / d.medium.gamma31;

  // About 25 samples per period of the fastest carrier.
  const double fastest = 1.0 / (50.0 * max_bloch_step(d));
  const double period = 2.0 * std::numbers::pi / fastest;
  IntegrationOptions options;
  options.t_start = t_start;
  options.record_stride = std::max(1, static_cast<int>(period / (25.0 * dt)));

  const Trajectory traj = integrate_bloch(d, t_end, dt, options);
  const double dp = d.delta_p();
  const double dc = d.medium.delta_c;

  OdeCheck check;
  check.closed_form = steady_state_perturbative(d);
  check.integrated = {
      extract_coherence_amplitude(traj, Coherence::Rho23, -dc),
      extract_coherence_amplitude(traj, Coherence::Rho13, dp - dc),
      extract_coherence_amplitude(traj, Coherence::Rho12, dp),
  };
  check.relative_deviation =
      std::abs(check.integrated.c - check.closed_form.c) / std::abs(check.closed_form.c);
  return check;
}

}  // namespace fastlight
