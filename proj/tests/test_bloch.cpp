#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fastlight/bloch.hpp"
#include "fastlight/constants.hpp"
#include "fastlight/errors.hpp"
#include "test_support.hpp"

using namespace fastlight;
using testing::rel;

namespace {

// Scaled-down drive: same Omega_c/Delta_c and gamma/Delta_c as the experiment.
MediumParams scaled_medium() {
  MediumParams m;
  m.kappa12 = 1.0;
  m.omega_c = hz_to_rad(2e6);
  m.delta_c = hz_to_rad(50e6);
  m.delta_2ph = hz_to_rad(200e3);
  m.gamma21 = hz_to_rad(50e3);
  m.gamma23 = hz_to_rad(50e3);
  m.gamma31 = hz_to_rad(50e3);
  m.length = 0.1;
  return m;
}

DriveParams scaled_drive(double probe_fraction = 1e-3) {
  const MediumParams m = scaled_medium();
  return {probe_fraction * m.omega_c, m};
}

// Cheap drive for integrator-level checks.
DriveParams slow_drive() {
  MediumParams m = scaled_medium();
  m.delta_c = hz_to_rad(2e6);
  m.omega_c = hz_to_rad(200e3);
  m.delta_2ph = hz_to_rad(100e3);
  return {m.omega_c * 1e-3, m};
}

Trajectory pure_tone(Complex a, double ref, double t_end, int n) {
  Trajectory tr;
  for (int k = 0; k < n; ++k) {
    const double t = t_end * k / (n - 1);
    tr.push_back({a * std::polar(1.0, ref * t), {}, {}, t});
  }
  return tr;
}

}  // namespace

TEST_CASE("free decay") {
  DriveParams d = slow_drive();
  d.omega_p = 0.0;
  d.medium.omega_c = 0.0;
  IntegrationOptions opt;
  opt.initial = {Complex(0.3, -0.1), Complex(-0.2, 0.25), Complex(0.1, 0.4), 0.0};
  const double t_end = 12.0 / d.medium.gamma31;
  const Trajectory tr = integrate_bloch(d, t_end, max_bloch_step(d), opt);
  for (const BlochState& s : {tr[tr.size() / 3], tr.back()}) {
    CHECK(std::abs(s.rho12 - opt.initial.rho12 * std::exp(-d.medium.gamma21 * s.time)) < 1e-10);
    CHECK(std::abs(s.rho13 - opt.initial.rho13 * std::exp(-d.medium.gamma31 * s.time)) < 1e-10);
    CHECK(std::abs(s.rho23 - opt.initial.rho23 * std::exp(-d.medium.gamma23 * s.time)) < 1e-10);
  }
  CHECK(tr.back().time == doctest::Approx(t_end).epsilon(1e-14));
}

TEST_CASE("pump-only coherence") {
  DriveParams d = slow_drive();
  d.omega_p = 0.0;
  const Trajectory tr = integrate_bloch(d, 40.0 / d.medium.gamma31, max_bloch_step(d));
  const Complex a = extract_coherence_amplitude(tr, Coherence::Rho23, -d.medium.delta_c);
  const Complex expected = Complex(0.0, d.medium.omega_c) / Complex(d.medium.gamma23, -d.medium.delta_c);
  CHECK(rel(a, expected) < 1e-6);
  CHECK(std::abs(extract_coherence_amplitude(tr, Coherence::Rho12, d.delta_p())) == 0.0);
}

TEST_CASE("step refinement") {
  const DriveParams d = slow_drive();
  const double t_end = 10.0 / d.medium.gamma31;
  const double dt = max_bloch_step(d);
  const BlochState coarse = integrate_bloch(d, t_end, dt).back();
  const BlochState fine = integrate_bloch(d, t_end, 0.5 * dt).back();
  CHECK(std::abs(coarse.rho12 - fine.rho12) < 1e-8);
  CHECK(std::abs(coarse.rho13 - fine.rho13) < 1e-8);
  CHECK(std::abs(coarse.rho23 - fine.rho23) < 1e-8);
}

TEST_CASE("integrator preconditions") {
  const DriveParams d = slow_drive();
  const double dt = max_bloch_step(d);
  const double t_end = 10.0 / d.medium.gamma31;
  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;  // sentinel: nothing thrown
  };
  CHECK(kind_of([&] { integrate_bloch(d, t_end, 1.01 * dt); }) == ErrorKind::InvalidStep);
  CHECK(kind_of([&] { integrate_bloch(d, 0.5 * t_end, dt); }) == ErrorKind::InvalidStep);
  CHECK(kind_of([&] { integrate_bloch(d, t_end, -dt); }) == ErrorKind::InvalidStep);

  DriveParams strong = d;
  strong.medium.delta_c = hz_to_rad(10e3);  // near-resonant pump: |rho23| ~ omega_c/gamma23 = 4
  CHECK(kind_of([&] { integrate_bloch(strong, t_end, dt); }) == ErrorKind::WeakProbeViolated);

  IntegrationOptions big;
  big.initial.rho12 = Complex(1.2, 0.0);
  CHECK(kind_of([&] { integrate_bloch(d, t_end, dt, big); }) == ErrorKind::WeakProbeViolated);
}

TEST_CASE("record stride keeps the final state") {
  const DriveParams d = slow_drive();
  const double t_end = 10.0 / d.medium.gamma31;
  const double dt = max_bloch_step(d);
  const Trajectory all = integrate_bloch(d, t_end, dt);
  IntegrationOptions opt;
  opt.record_stride = 7;
  const Trajectory some = integrate_bloch(d, t_end, dt, opt);
  CHECK(some.size() < all.size() / 6);
  CHECK(some.back().time == all.back().time);
  CHECK(some.back().rho12 == all.back().rho12);
}

TEST_CASE("closed-form steady state") {
  const MediumParams fig2 = testing::calibrated();
  DriveParams d{0.0, fig2};
  SUBCASE("no probe") {
    const SteadyState s = steady_state_perturbative(d);
    CHECK(s.b == Complex(0.0, 0.0));
    CHECK(s.c == Complex(0.0, 0.0));
    CHECK(rel(s.a, Complex(0.0, fig2.omega_c) / Complex(fig2.gamma23, -fig2.delta_c)) < 1e-15);
  }
  SUBCASE("far-detuned pump coherence") {
    const SteadyState s = steady_state_perturbative(d);
    CHECK(rel(s.a, Complex(-fig2.omega_c / fig2.delta_c, 0.0)) < 2.0 * fig2.gamma23 / fig2.delta_c);
  }
  SUBCASE("linear in the probe") {
    d.omega_p = 1e-3 * fig2.omega_c;
    const SteadyState one = steady_state_perturbative(d);
    d.omega_p *= 2.0;
    const SteadyState two = steady_state_perturbative(d);
    CHECK(two.a == one.a);
    CHECK(rel(two.b, 2.0 * one.b) < 1e-15);
    CHECK(rel(two.c, 2.0 * one.c) < 1e-15);
  }
  SUBCASE("|B| peaks on the shifted resonance, where |W| peaks") {
    d.omega_p = 1e-3 * fig2.omega_c;
    auto magnitude_b = [&](double delta) {
      DriveParams q = d;
      q.medium.delta_2ph = delta;
      return std::abs(steady_state_perturbative(q).b);
    };
    // Golden-section search for the maximum.
    const double g = fig2.gamma31;
    double lo = resonance_detuning(fig2) - 5.0 * g;
    double hi = resonance_detuning(fig2) + 5.0 * g;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int i = 0; i < 200 && hi - lo > 1e-7 * g; ++i) {
      const double x1 = hi - phi * (hi - lo);
      const double x2 = lo + phi * (hi - lo);
      if (magnitude_b(x1) < magnitude_b(x2)) {
        lo = x1;
      } else {
        hi = x2;
      }
    }
    MediumParams zero = fig2;
    zero.delta_2ph = 0.0;
    const double w_peak = pole_center(zero);  // argmax over omega of |W| at delta_2ph = 0
    CHECK(std::abs(0.5 * (lo + hi) - w_peak) < 1e-3 * g);
  }
}

TEST_CASE("demodulation") {
  const double ref = kTwoPi * 1e6;
  const double t_end = 50e-6;
  SUBCASE("pure tone") {
    const Complex a(0.3, -0.7);
    const Trajectory tr = pure_tone(a, ref, t_end, 20001);
    CHECK(std::abs(extract_coherence_amplitude(tr, Coherence::Rho12, ref) - a) < 1e-9);
  }
  SUBCASE("leakage from a tone ten window-cycles away") {
    const Complex a(1.0, 0.0);
    const Complex b(0.5, 0.5);
    const int n = 20001;
    Trajectory tr = pure_tone(a, ref, t_end, n);
    const double window = 0.2 * t_end;
    const double other = ref + kTwoPi * 10.0 / window;
    for (BlochState& s : tr) s.rho12 += b * std::polar(1.0, other * s.time);
    const Complex got = extract_coherence_amplitude(tr, Coherence::Rho12, ref);
    CHECK(std::abs(got - a) / std::abs(b) < 0.05);
  }
  SUBCASE("zero signal") {
    const Trajectory tr = pure_tone(Complex(0.0, 0.0), ref, t_end, 1001);
    CHECK(extract_coherence_amplitude(tr, Coherence::Rho13, ref) == Complex(0.0, 0.0));
  }
  SUBCASE("window too short") {
    const Trajectory tr = pure_tone(Complex(1.0, 0.0), ref, 10e-6, 1001);  // 2 periods in window
    CHECK_THROWS_AS(extract_coherence_amplitude(tr, Coherence::Rho12, ref), Error);
    CHECK_THROWS_AS(extract_coherence_amplitude(Trajectory{}, Coherence::Rho12, ref), Error);
  }
}

TEST_CASE("closed form against the kernel") {
  const MediumParams fig2 = testing::calibrated();
  const DriveParams d{1e-3 * fig2.omega_c, fig2};

  const OracleResult identity = cross_check_kernel(d, OracleDetuning::Pump);
  CHECK(identity.relative_deviation < 1e-9);

  const OracleResult full = cross_check_kernel(d);
  CHECK(full.relative_deviation < 1e-2);
  CHECK(full.relative_deviation < full.bound);
  CHECK(full.bound == doctest::Approx((fig2.gamma21 + std::abs(fig2.delta_2ph)) / fig2.delta_c + 1e-6));
  CHECK(rel(full.kernel_prediction, transfer_kernel(0.0, fig2) / Complex(0.0, fig2.kappa12)) < 1e-12);

  // kappa12 drops out of the comparison.
  DriveParams zero = d;
  zero.medium.kappa12 = 0.0;
  CHECK(cross_check_kernel(zero).relative_deviation ==
        doctest::Approx(full.relative_deviation).epsilon(1e-12));

  DriveParams dark = d;
  dark.omega_p = 0.0;
  CHECK_THROWS_AS(cross_check_kernel(dark), Error);
}

const OdeCheck& base_ode() {
  static const OdeCheck check = cross_check_ode(scaled_drive());
  return check;
}

TEST_CASE("numerical integration against the closed form") {
  const OdeCheck& base = base_ode();
  CHECK(base.relative_deviation < 1e-3);
  CHECK(rel(base.integrated.a, base.closed_form.a) < 1e-3);
  CHECK(rel(base.integrated.b, base.closed_form.b) < 1e-3);
  CHECK_THROWS_AS(cross_check_ode(scaled_drive(), 40.0, 10.0), Error);
}

TEST_CASE("integration frame independence") {
  const OdeCheck& base = base_ode();
  const double period = kTwoPi / scaled_medium().delta_c;
  const OdeCheck shifted = cross_check_ode(scaled_drive(), 40.0, 200.0, 1234.0 * period);
  CHECK(rel(shifted.integrated.a, base.integrated.a) < 1e-6);
  CHECK(rel(shifted.integrated.b, base.integrated.b) < 1e-6);
  CHECK(rel(shifted.integrated.c, base.integrated.c) < 1e-6);
}

TEST_CASE("integrated response is linear in the probe") {
  const OdeCheck one = cross_check_ode(scaled_drive(1e-4));
  const OdeCheck two = cross_check_ode(scaled_drive(2e-4));
  CHECK(rel(two.integrated.a, one.integrated.a) < 1e-6);
  CHECK(rel(two.integrated.b, 2.0 * one.integrated.b) < 1e-6);
  CHECK(rel(two.integrated.c, 2.0 * one.integrated.c) < 1e-6);
}
