// Acceptance runner. `fastlight_acceptance N` checks criterion N (1-7);
// without an argument every criterion runs. One PASS/FAIL line per criterion,
// exit status 1 if any failed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "fastlight/bloch.hpp"
#include "fastlight/constants.hpp"
#include "fastlight/experiments.hpp"
#include "fastlight/medium.hpp"
#include "fastlight/pulse.hpp"

using namespace fastlight;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

MediumParams calibrated() { return calibrate(fig2_target()).apply(fig2_base_params()); }

double max_abs(const std::vector<Complex>& v) {
  double m = 0.0;
  for (const Complex& s : v) m = std::max(m, std::abs(s));
  return m;
}

double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

Outcome fig2_advance() {
  const Stopwatch clock;
  const Fig2Report fig = run_fig2(calibrated());
  const double t = clock.seconds();
  const double advance = fig.metrics.advance;
  const double ratio = advance / fig.pulse.fwhm;
  const bool pass = std::abs(advance - 220e-9) <= 20e-9 && std::abs(ratio - 0.014) <= 0.002 && t < 5.0;
  return {pass, fmt("advance %.2f ns (220 +- 20), advance/FWHM %.3f%% (1.4 +- 0.2), runtime %.2f s (< 5)",
                    advance * 1e9, ratio * 100.0, t)};
}

Outcome shape_preservation() {
  const Fig2Report fig = run_fig2(calibrated());
  const PulseMetrics& m = fig.metrics;
  const bool pass = m.distortion < 1e-3 && std::abs(m.narrowing_fraction) <= 0.02;
  return {pass, fmt("distortion %.3g (< 1e-3), narrowing %.3f%% (|.| <= 2%%)", m.distortion,
                    m.narrowing_fraction * 100.0)};
}

Outcome rabi_scaling() {
  const Stopwatch clock;
  const MediumParams p = calibrated();
  std::vector<double> omegas;
  for (int i = 0; i <= 20; ++i) omegas.push_back(hz_to_rad(5e6 + 10e6 * i / 20.0));
  const RabiSweep s = sweep_rabi(p, omegas, hz_to_rad(400e3), hz_to_rad(2.2e9));
  const double t = clock.seconds();
  const bool negative = std::all_of(s.sweep.vg.begin(), s.sweep.vg.end(), [](double v) { return v < 0.0; });
  const bool pass = std::abs(s.fit.exponent + 2.0) <= 0.1 && negative && t < 10.0;
  return {pass, fmt("log-log slope %.4f (-2.0 +- 0.1) over %zu points, all Vg < 0: %s, runtime %.2f s (< 10)",
                    s.fit.exponent, s.fit.n_points, negative ? "yes" : "no", t)};
}

Outcome detuning_shape() {
  const Stopwatch clock;
  const MediumParams p = calibrated();
  const DetuningSweep s = sweep_detuning(p, detuning_grid(p, 10.0, 201));
  const double t = clock.seconds();
  const double midpoint =
      s.crossovers.size() == 2 ? rad_to_hz(0.5 * (s.crossovers[0] + s.crossovers[1])) : 0.0;
  const bool pass = s.vg_vs_detuning_squared.r_squared > 0.999 && s.max_symmetry_error < 1e-6 &&
                    s.crossovers.size() == 2 && std::abs(midpoint) >= 150e3 &&
                    std::abs(midpoint) <= 250e3 && t < 10.0;
  return {pass, fmt("R^2 %.6f (> 0.999), symmetry %.3g (< 1e-6), crossovers %zu (== 2) centred at "
                    "%.1f kHz (150-250), runtime %.2f s (< 10)",
                    s.vg_vs_detuning_squared.r_squared, s.max_symmetry_error, s.crossovers.size(),
                    midpoint * 1e-3, t)};
}

Outcome oracle_equivalence() {
  const Stopwatch clock;
  const MediumParams p = calibrated();
  const OracleResult closed = cross_check_kernel({1e-3 * p.omega_c, p});

  MediumParams scaled = p;
  scaled.omega_c = hz_to_rad(2e6);
  scaled.delta_c = hz_to_rad(50e6);
  scaled.delta_2ph = hz_to_rad(200e3);
  scaled.gamma21 = hz_to_rad(50e3);
  scaled.gamma23 = hz_to_rad(50e3);
  scaled.gamma31 = hz_to_rad(50e3);
  const OdeCheck ode = cross_check_ode({1e-3 * scaled.omega_c, scaled});
  const double t = clock.seconds();
  const bool pass = closed.relative_deviation < 1e-2 && ode.relative_deviation < 1e-3 && t < 60.0;
  return {pass, fmt("closed form vs kernel %.3g (< 1e-2), ODE vs closed form %.3g (< 1e-3), runtime %.2f s (< 60)",
                    closed.relative_deviation, ode.relative_deviation, t)};
}

Outcome numerics() {
  const MediumParams p = calibrated();
  const double fwhm = 15.4e-6;
  const TimeGrid g = default_grid(fwhm, p);
  const PulseEnvelope f = make_gaussian_pulse({fwhm, 1.0, g.center()}, g);
  const PulseEnvelope h = make_gaussian_pulse({5e-6, 1.0, g.center() + 20e-6}, g);

  const Complex a(0.8, -0.3);
  const Complex b(-1.7, 0.4);
  PulseEnvelope mix{g, std::vector<Complex>(g.n)};
  for (std::size_t k = 0; k < g.n; ++k) mix.samples[k] = a * f.samples[k] + b * h.samples[k];
  const auto vref = PropagationMode::VacuumReferenced;
  const PulseEnvelope pf = propagate(f, p, vref);
  const PulseEnvelope ph = propagate(h, p, vref);
  const PulseEnvelope pm = propagate(mix, p, vref);
  std::vector<Complex> combo(g.n);
  for (std::size_t k = 0; k < g.n; ++k) combo[k] = a * pf.samples[k] + b * ph.samples[k];
  const double linearity = max_abs_diff(pm.samples, combo) / max_abs(pm.samples);

  MediumParams first = p;
  first.length = 0.037;
  MediumParams second = p;
  second.length = p.length - first.length;
  const auto abs = PropagationMode::Absolute;
  const PulseEnvelope one = propagate(f, p, abs);
  const PulseEnvelope two = propagate(propagate(f, first, abs), second, abs);
  const double cascade = max_abs_diff(one.samples, two.samples) / max_abs(one.samples);

  const std::vector<Complex> s = spectrum(f);
  const std::vector<double> w = spectral_omegas(g);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    num += std::norm(s[k]) * std::exp(2.0 * transfer_kernel(w[k], p).real() * p.length);
    den += std::norm(s[k]);
  }
  const double parseval = std::abs(pf.energy() / f.energy() - num / den) / (num / den);

  const TimeGrid g2 = default_grid(fwhm, p, 2 * g.n);
  const PulseEnvelope f2 = make_gaussian_pulse({fwhm, 1.0, g2.center()}, g2);
  const double doubling =
      std::abs(pulse_metrics(f, pf).advance - pulse_metrics(f2, propagate(f2, p, vref)).advance);

  const double exact = group_delay_exact(p);
  const double fd = std::abs(group_delay_finite_difference(p) - exact) / std::abs(exact);

  const bool pass = linearity < 1e-10 && cascade < 1e-10 && parseval < 1e-9 && doubling < 0.1e-9 && fd < 1e-6;
  return {pass, fmt("linearity %.2g, cascade %.2g (< 1e-10), Parseval %.2g (< 1e-9), grid doubling %.3g ns "
                    "(< 0.1), group-delay FD %.2g (< 1e-6)",
                    linearity, cascade, parseval, doubling * 1e9, fd)};
}

Outcome narrowing_trend() {
  const MediumParams p = calibrated();
  const NarrowingStudy study = narrowing_study(p, {15.4e-6, 5e-6}, {p.delta_2ph});
  const PulseMetrics& long_pulse = study.cells.at(0).metrics;
  const PulseMetrics& short_pulse = study.cells.at(1).metrics;
  const double ratio = short_pulse.narrowing_fraction / long_pulse.narrowing_fraction;
  const bool pass = ratio >= 4.0 && short_pulse.advance > 220e-9;
  return {pass, fmt("5 us narrowing %.2f%% = %.2fx the 15.4 us value (>= 4), 5 us lead %.1f ns (> 220)",
                    short_pulse.narrowing_fraction * 100.0, ratio, short_pulse.advance * 1e9)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"advanced pulse", fig2_advance},       {"shape preservation", shape_preservation},
      {"pump Rabi scaling", rabi_scaling},    {"two-photon detuning shape", detuning_shape},
      {"oracle equivalence", oracle_equivalence}, {"numerical properties", numerics},
      {"narrowing trend", narrowing_trend},
  };

  std::vector<int> selected;
  if (argc < 2) {
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);
  } else {
    for (int a = 1; a < argc; ++a) {
      const int n = std::atoi(argv[a]);
      if (n < 1 || n > static_cast<int>(criteria.size())) {
        std::fprintf(stderr, "usage: %s [criterion 1-%zu ...]\n", argv[0], criteria.size());
        return 2;
      }
      selected.push_back(n);
    }
  }

  int failures = 0;
  for (const int n : selected) {
    const auto& [name, check] = criteria[static_cast<std::size_t>(n - 1)];
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
