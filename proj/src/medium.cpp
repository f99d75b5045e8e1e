#include "fastlight/medium.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fastlight/constants.hpp"
#include "fastlight/errors.hpp"

namespace fastlight {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) {
    fail(ErrorKind::InvalidParameter, std::string(name) + " must be finite");
  }
}

void require_positive(double value, const char* name) {
  require_finite(value, name);
  if (value <= 0.0) {
    fail(ErrorKind::InvalidParameter, std::string(name) + " must be > 0");
  }
}

// K(omega) = amplitude / (omega - pole)
Complex kernel_amplitude(const MediumParams& p) {
  const Complex one_photon = Complex(p.delta_c, -p.gamma23) * Complex(p.delta_c, p.gamma21);
  return kI * p.kappa12 * p.omega_c * p.omega_c / one_photon;
}

Complex raman_pole(const MediumParams& p, Complex self_energy) {
  return Complex(-p.delta_2ph, -p.gamma31) + self_energy;
}

}  // namespace

void MediumParams::validate() const {
  require_finite(omega_c, "omega_c");
  require_finite(delta_c, "delta_c");
  require_finite(delta_2ph, "delta_2ph");
  require_finite(kappa12, "kappa12");
  if (kappa12 < 0.0) fail(ErrorKind::InvalidParameter, "kappa12 must be >= 0");
  require_positive(gamma21, "gamma21");
  require_positive(gamma23, "gamma23");
  require_positive(gamma31, "gamma31");
  require_positive(length, "length");
}

double kappa_from_microscopic(const MicroscopicInputs& m) {
  for (auto [value, name] : {std::pair{m.n0, "n0"}, std::pair{m.omega_p, "omega_p"},
                             std::pair{m.d21, "d21"}}) {
    require_finite(value, name);
    if (value < 0.0) fail(ErrorKind::InvalidParameter, std::string(name) + " must be >= 0");
  }
  return kTwoPi * m.n0 * m.omega_p * m.d21 * m.d21 / kSpeedOfLight;
}

Complex pump_self_energy(const MediumParams& p) {
  return p.omega_c * p.omega_c / Complex(p.delta_c, p.gamma21);
}

Complex raman_response_with_self_energy(double omega, const MediumParams& p,
                                        Complex self_energy) {
  p.validate();
  return 1.0 / (omega - raman_pole(p, self_energy));
}

Complex raman_response(double omega, const MediumParams& p) {
  return raman_response_with_self_energy(omega, p, pump_self_energy(p));
}

Complex transfer_kernel_with_self_energy(double omega, const MediumParams& p,
                                         Complex self_energy) {
  return kernel_amplitude(p) * raman_response_with_self_energy(omega, p, self_energy);
}

Complex transfer_kernel(double omega, const MediumParams& p) {
  return transfer_kernel_with_self_energy(omega, p, pump_self_energy(p));
}

double group_delay_density(double omega, const MediumParams& p) {
  p.validate();
  const Complex d = omega - raman_pole(p, pump_self_energy(p));
  return std::imag(-kernel_amplitude(p) / (d * d));
}

double pole_center(const MediumParams& p) {
  p.validate();
  return std::real(raman_pole(p, pump_self_energy(p)));
}

double raman_linewidth(const MediumParams& p) {
  p.validate();
  return -std::imag(raman_pole(p, pump_self_energy(p)));
}

double resonance_detuning(const MediumParams& p) {
  p.validate();
  return std::real(pump_self_energy(p));
}

double effective_detuning(const MediumParams& p) {
  return p.delta_2ph - resonance_detuning(p);
}

double peak_intensity_gain(const MediumParams& p) {
  // Re[a/(u + i G)] = (Re a * u + Im a * G)/(u^2 + G^2) peaks at (|a| + Im a)/(2G).
  const Complex a = kernel_amplitude(p);
  return (std::abs(a) + std::imag(a)) / raman_linewidth(p);
}

double stark_shift(const MediumParams& p) {
  p.validate();
  if (p.delta_c == 0.0) fail(ErrorKind::InvalidParameter, "stark shift needs delta_c != 0");
  return p.omega_c * p.omega_c / p.delta_c;
}

double group_delay_exact(const MediumParams& p) {
  return p.length / kSpeedOfLight + p.length * group_delay_density(0.0, p);
}

double group_delay_finite_difference(const MediumParams& p) {
  const double h = 1e-6 * p.gamma31;
  const double slope =
      (std::imag(transfer_kernel(h, p)) - std::imag(transfer_kernel(-h, p))) / (2.0 * h);
  return p.length / kSpeedOfLight + p.length * slope;
}

double group_velocity_exact(const MediumParams& p) {
  const double delay = group_delay_exact(p);
  if (std::abs(delay) < 1e-15) {
    fail(ErrorKind::SingularVelocity,
         "group delay " + std::to_string(delay) + " s is at the sub/superluminal crossover");
  }
  return p.length / delay;
}

double group_velocity_eq3(const MediumParams& p) {
  const double shift = stark_shift(p);
  const double detuning = p.delta_2ph - shift;
  if (std::abs(detuning) <= 3.0 * p.gamma31) {
    fail(ErrorKind::OutsideAsymptoticRegime,
         "|delta_2ph - stark| must exceed 3*gamma31; use group_velocity_exact");
  }
  const double widest = std::max({p.gamma21, p.gamma23, std::abs(p.omega_c)});
  if (std::abs(p.delta_c) <= 100.0 * widest) {
    fail(ErrorKind::OutsideAsymptoticRegime,
         "|delta_c| must exceed 100*max(gamma21, gamma23, omega_c)");
  }
  if (p.kappa12 == 0.0 || p.omega_c == 0.0) {
    fail(ErrorKind::OutsideAsymptoticRegime, "asymptotic velocity needs kappa12, omega_c != 0");
  }
  return -p.delta_c * p.delta_c * detuning * detuning / (p.kappa12 * p.omega_c * p.omega_c);
}

std::vector<double> find_crossover_detunings(const MediumParams& p, double lo, double hi) {
  p.validate();
  if (!(lo < hi)) fail(ErrorKind::InvalidParameter, "crossover window must satisfy lo < hi");
  const double center = resonance_detuning(p);
  if (center < lo || center > hi) {
    fail(ErrorKind::InvalidParameter, "crossover window does not contain the shifted resonance");
  }

  const double vacuum = p.length / kSpeedOfLight;
  auto excess = [&](double detuning) {
    MediumParams q = p;
    q.delta_2ph = detuning;
    return group_delay_exact(q) - vacuum;
  };

  const double step = p.gamma31 / 20.0;
  const auto n_steps = static_cast<long>(std::ceil((hi - lo) / step));
  std::vector<double> roots;
  double a = lo;
  double fa = excess(a);
  for (long i = 1; i <= n_steps; ++i) {
    const double b = (i == n_steps) ? hi : lo + static_cast<double>(i) * step;
    const double fb = excess(b);
    if (fa == 0.0) {
      roots.push_back(a);
    } else if ((fa < 0.0) != (fb < 0.0) && fb != 0.0) {
      double left = a;
      double right = b;
      double f_left = fa;
      // Far below the 1e-3*gamma31 contract so mirrored roots stay comparable.
      while (right - left > 1e-10 * p.gamma31) {
        const double mid = 0.5 * (left + right);
        if (mid == left || mid == right) break;
        const double f_mid = excess(mid);
        if ((f_mid < 0.0) == (f_left < 0.0)) {
          left = mid;
          f_left = f_mid;
        } else {
          right = mid;
        }
      }
      roots.push_back(0.5 * (left + right));
    }
    a = b;
    fa = fb;
  }
  if (fa == 0.0) roots.push_back(a);
  if (roots.empty()) {
    fail(ErrorKind::NotFound, "no sub/superluminal crossover inside the search window");
  }
  return roots;
}

DispersionProfile dispersion_profile(const MediumParams& p, double omega_min,
                                     double omega_max, int n_samples) {
  p.validate();
  if (!(omega_min < omega_max) || !std::isfinite(omega_min) || !std::isfinite(omega_max)) {
    fail(ErrorKind::InvalidParameter, "dispersion range must satisfy omega_min < omega_max");
  }
  if (n_samples < 2) fail(ErrorKind::InvalidParameter, "dispersion profile needs >= 2 samples");

  DispersionProfile profile{p, {}};
  profile.points.reserve(static_cast<std::size_t>(n_samples));
  const double step = (omega_max - omega_min) / static_cast<double>(n_samples - 1);
  for (int i = 0; i < n_samples; ++i) {
    const double omega = (i == n_samples - 1) ? omega_max : omega_min + i * step;
    const Complex k = transfer_kernel(omega, p);
    profile.points.push_back({omega, k, 2.0 * k.real(), group_delay_density(omega, p)});
  }
  return profile;
}

}  // namespace fastlight
