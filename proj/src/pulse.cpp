#include "fastlight/pulse.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "fastlight/constants.hpp"
#include "fastlight/errors.hpp"
#include "fft.hpp"

namespace fastlight {

namespace {

constexpr double kFitThreshold = 0.1;
constexpr std::size_t kMinHalfMaxSamples = 32;

std::size_t next_pow2(double value) {
  const auto v = static_cast<std::size_t>(std::ceil(std::max(value, 1.0)));
  return std::bit_ceil(v);
}

double required_spectral_range(const MediumParams& p) {
  return 50.0 * std::max(p.gamma31, std::abs(effective_detuning(p)));
}

}  // namespace

void TimeGrid::validate() const {
  if (n < 1024 || !std::has_single_bit(n)) {
    fail(ErrorKind::InvalidParameter, "grid size must be a power of two >= 1024");
  }
  if (!(dt > 0.0) || !std::isfinite(dt) || !std::isfinite(t0)) {
    fail(ErrorKind::InvalidParameter, "grid step must be finite and > 0");
  }
}

double PulseEnvelope::energy() const {
  double sum = 0.0;
  for (const Complex& s : samples) sum += std::norm(s);
  return sum * grid.dt;
}

TimeGrid default_grid(double fwhm, const MediumParams& p, std::size_t min_n,
                      double window_factor) {
  p.validate();
  if (!(fwhm > 0.0)) fail(ErrorKind::InvalidParameter, "pulse fwhm must be > 0");
  if (!(window_factor >= 8.0)) fail(ErrorKind::InvalidParameter, "window factor must be >= 8");
  // Spectral sampling 2*pi/window must resolve gamma31/10, with 20% margin.
  const double window = std::max(window_factor * fwhm, 1.2 * 20.0 * std::numbers::pi / p.gamma31);
  const std::size_t n = std::max({next_pow2(static_cast<double>(min_n)), std::size_t{1024},
                                  next_pow2(window * required_spectral_range(p) / std::numbers::pi)});
  return {0.0, window / static_cast<double>(n), n};
}

PulseEnvelope make_gaussian_pulse(const PulseSpec& spec, const TimeGrid& grid) {
  grid.validate();
  if (!(spec.fwhm > 0.0) || !std::isfinite(spec.peak_amplitude)) {
    fail(ErrorKind::InvalidParameter, "pulse needs fwhm > 0 and a finite amplitude");
  }
  const double t_first = grid.t0;
  const double t_last = grid.time(grid.n - 1);
  if (grid.window() < 8.0 * spec.fwhm || spec.center_time - t_first < 4.0 * spec.fwhm ||
      t_last - spec.center_time < 4.0 * spec.fwhm) {
    fail(ErrorKind::WindowTooSmall,
         "pulse must sit >= 4 fwhm from both grid edges in a window >= 8 fwhm");
  }

  PulseEnvelope env{grid, std::vector<Complex>(grid.n)};
  const double rate = 2.0 * kLn2 / (spec.fwhm * spec.fwhm);
  for (std::size_t k = 0; k < grid.n; ++k) {
    const double x = grid.time(k) - spec.center_time;
    env.samples[k] = spec.peak_amplitude * std::exp(-rate * x * x);
  }
  return env;
}

std::vector<double> spectral_omegas(const TimeGrid& grid) {
  grid.validate();
  std::vector<double> omegas(grid.n);
  const double bin = kTwoPi / grid.window();
  const auto n = static_cast<long>(grid.n);
  for (long k = 0; k < n; ++k) {
    const long signed_k = (k < n / 2) ? k : k - n;  // Nyquist bin counted as -n/2
    omegas[static_cast<std::size_t>(k)] = -bin * static_cast<double>(signed_k);
  }
  return omegas;
}

std::vector<Complex> spectrum(const PulseEnvelope& env) {
  env.grid.validate();
  return detail::fft(env.samples, detail::FftDirection::Forward);
}

PulseEnvelope propagate(const PulseEnvelope& env, const KernelFn& kernel, double length,
                        PropagationMode mode) {
  env.grid.validate();
  if (env.samples.size() != env.grid.n) {
    fail(ErrorKind::InvalidParameter, "envelope length does not match its grid");
  }
  if (!(length >= 0.0)) fail(ErrorKind::InvalidParameter, "propagation length must be >= 0");

  std::vector<Complex> spec = spectrum(env);
  const std::vector<double> omegas = spectral_omegas(env.grid);
  const double norm = 1.0 / static_cast<double>(env.grid.n);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    Complex exponent = kernel(omegas[k]);
    if (mode == PropagationMode::Absolute) exponent += Complex(0.0, omegas[k] / kSpeedOfLight);
    spec[k] *= std::exp(exponent * length) * norm;
  }
  return {env.grid, detail::fft(std::move(spec), detail::FftDirection::Inverse)};
}

PulseEnvelope propagate(const PulseEnvelope& env, const MediumParams& p, PropagationMode mode) {
  p.validate();
  env.grid.validate();
  const double nyquist = std::numbers::pi / env.grid.dt;
  const double bin = kTwoPi / env.grid.window();
  if (nyquist < required_spectral_range(p) || bin > p.gamma31 / 10.0) {
    const TimeGrid suggested =
        default_grid(env.grid.window() / 12.0, p, env.grid.n, 12.0);
    std::ostringstream msg;
    msg << "grid does not resolve the Raman line (need pi/dt >= " << required_spectral_range(p)
        << " rad/s and 2pi/window <= " << p.gamma31 / 10.0 << " rad/s); suggested grid: n = "
        << suggested.n << ", dt = " << suggested.dt << " s";
    fail(ErrorKind::GridResolution, msg.str());
  }
  return propagate(
      env, [&p](double omega) { return transfer_kernel(omega, p); }, p.length, mode);
}

GaussianFit fit_gaussian(const PulseEnvelope& env) {
  env.grid.validate();
  const std::size_t n = env.samples.size();
  std::vector<double> y(n);
  for (std::size_t k = 0; k < n; ++k) y[k] = std::norm(env.samples[k]);

  const auto peak_it = std::max_element(y.begin(), y.end());
  const double y_max = *peak_it;
  if (!(y_max > 0.0) || !std::isfinite(y_max)) fail(ErrorKind::Unfittable, "envelope is empty");
  const auto k_peak = static_cast<std::size_t>(peak_it - y.begin());

  const double threshold = kFitThreshold * y_max;
  std::size_t lo = k_peak;
  std::size_t hi = k_peak;
  while (lo > 0 && y[lo - 1] >= threshold) --lo;
  while (hi + 1 < n && y[hi + 1] >= threshold) ++hi;
  std::size_t above_half = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if ((k < lo || k > hi) && y[k] >= threshold) {
      fail(ErrorKind::Unfittable, "envelope has more than one lobe above 0.1 of the maximum");
    }
    if (y[k] >= 0.5 * y_max) ++above_half;
  }
  if (above_half < kMinHalfMaxSamples) {
    fail(ErrorKind::Unfittable, "fewer than 32 samples above half maximum");
  }

  // Work in u = (t - t_peak)/scale for conditioning.
  const std::size_t m = hi - lo + 1;
  const double t_ref = env.grid.time(k_peak);
  const double scale = 0.5 * static_cast<double>(m) * env.grid.dt;
  Eigen::VectorXd u(m);
  Eigen::VectorXd data(m);
  for (std::size_t i = 0; i < m; ++i) {
    u[i] = (env.grid.time(lo + i) - t_ref) / scale;
    data[i] = y[lo + i];
  }

  // ln y = c0 + c1 u + c2 u^2, weighted by y^2.
  Eigen::MatrixXd design(m, 3);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    const double w = data[i];
    design(i, 0) = w;
    design(i, 1) = w * u[i];
    design(i, 2) = w * u[i] * u[i];
    rhs[i] = w * std::log(data[i]);
  }
  const Eigen::Vector3d c = design.colPivHouseholderQr().solve(rhs);
  if (!(c[2] < 0.0)) fail(ErrorKind::Unfittable, "log-intensity is not concave");

  const double four_ln2 = 4.0 * kLn2;
  double height = std::exp(c[0] - c[1] * c[1] / (4.0 * c[2]));
  double center = -c[1] / (2.0 * c[2]);
  double width = std::sqrt(-four_ln2 / c[2]);

  auto jacobian = [&](Eigen::MatrixXd& jac, Eigen::VectorXd& resid) {
    for (Eigen::Index i = 0; i < jac.rows(); ++i) {
      const double x = u[i] - center;
      const double e = std::exp(-four_ln2 * x * x / (width * width));
      const double f = height * e;
      jac(i, 0) = e;
      jac(i, 1) = f * 2.0 * four_ln2 * x / (width * width);
      jac(i, 2) = f * 2.0 * four_ln2 * x * x / (width * width * width);
      resid[i] = data[i] - f;
    }
  };

  Eigen::MatrixXd jac(m, 3);
  Eigen::VectorXd resid(m);
  jacobian(jac, resid);
  const Eigen::Vector3d step = jac.colPivHouseholderQr().solve(resid);
  height += step[0];
  center += step[1];
  width += step[2];
  jacobian(jac, resid);

  const double rss = resid.squaredNorm();
  const double sigma2 = m > 3 ? rss / static_cast<double>(m - 3) : 0.0;
  const Eigen::Matrix3d cov = sigma2 * (jac.transpose() * jac).inverse();

  GaussianFit fit;
  fit.height = height;
  fit.peak_time = {t_ref + scale * center, scale * std::sqrt(std::max(cov(1, 1), 0.0))};
  fit.fwhm = {scale * width, scale * std::sqrt(std::max(cov(2, 2), 0.0))};
  fit.residual = std::sqrt(rss / static_cast<double>(m)) / height;
  return fit;
}

PulseMetrics pulse_metrics(const PulseEnvelope& input, const PulseEnvelope& output) {
  PulseMetrics metrics;
  metrics.input = fit_gaussian(input);
  metrics.output = fit_gaussian(output);
  metrics.peak_time = metrics.output.peak_time;
  metrics.fwhm = metrics.output.fwhm;
  metrics.energy_gain = output.energy() / input.energy();
  metrics.advance = metrics.input.peak_time.value - metrics.output.peak_time.value;
  metrics.narrowing_fraction =
      (metrics.input.fwhm.value - metrics.output.fwhm.value) / metrics.input.fwhm.value;
  metrics.distortion = metrics.output.residual;
  return metrics;
}

}  // namespace fastlight
