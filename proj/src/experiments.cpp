#include "fastlight/experiments.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "fastlight/errors.hpp"

namespace fastlight {

namespace {

constexpr int kMaxIterations = 100;
constexpr double kConvergedResidual = 1e-6;
constexpr double kTargetResidual = 1e-13;

Eigen::Vector2d residuals(const CalibrationTarget& target, const Eigen::Vector2d& log_vars) {
  const double kappa = std::exp(log_vars[0]);
  const double gamma = std::exp(log_vars[1]);
  return {model_gain(target, kappa, gamma) / target.gain_target - 1.0,
          model_advance(target, kappa, gamma) / target.advance_target - 1.0};
}

MediumParams with_constants(const CalibrationTarget& target, double kappa12, double gamma31) {
  MediumParams p = target.fixed;
  p.kappa12 = kappa12;
  p.gamma31 = gamma31;
  return p;
}

}  // namespace

void CalibrationTarget::validate() const {
  if (!(gain_target > 0.0) || !(advance_target > 0.0)) {
    fail(ErrorKind::InvalidParameter, "calibration targets must be positive");
  }
  with_constants(*this, 1.0, 1.0).validate();
}

MediumParams fig2_base_params() {
  MediumParams p;
  p.omega_c = hz_to_rad(25e6);
  p.delta_c = hz_to_rad(3e9);
  p.delta_2ph = hz_to_rad(400e3);
  p.gamma21 = hz_to_rad(3e6);
  p.gamma23 = hz_to_rad(3e6);
  p.length = 0.1;
  return p;
}

CalibrationTarget fig2_target() {
  CalibrationTarget target;
  target.fixed = fig2_base_params();
  return target;
}

double model_gain(const CalibrationTarget& target, double kappa12, double gamma31) {
  const MediumParams p = with_constants(target, kappa12, gamma31);
  return target.reference == GainReference::Peak ? peak_intensity_gain(p)
                                                 : 2.0 * transfer_kernel(0.0, p).real();
}

double model_advance(const CalibrationTarget& target, double kappa12, double gamma31) {
  const MediumParams p = with_constants(target, kappa12, gamma31);
  return p.length / kSpeedOfLight - group_delay_exact(p);
}

Seed asymptotic_seed(const CalibrationTarget& target) {
  target.validate();
  // The Stark shift does not depend on the two unknowns.
  const MediumParams p = with_constants(target, 1.0, 1.0);
  const double detuning = p.delta_2ph - stark_shift(p);
  if (detuning == 0.0 || p.omega_c == 0.0) {
    fail(ErrorKind::InvalidParameter, "asymptotic seed needs omega_c != 0 off the Raman line");
  }
  // advance ~ L a / x^2 with a = kappa |Wc|^2 / Dc^2
  const double a = target.advance_target * detuning * detuning / p.length;
  Seed seed;
  seed.kappa12 = a * p.delta_c * p.delta_c / (p.omega_c * p.omega_c);
  seed.gamma31 = target.reference == GainReference::Peak
                     ? 2.0 * a / target.gain_target                  // peak gain 2a/gamma
                     : target.gain_target * detuning * detuning / (2.0 * a);  // 2a gamma/x^2
  return seed;
}

Calibration calibrate(const CalibrationTarget& target) {
  return calibrate(target, asymptotic_seed(target));
}

Calibration calibrate(const CalibrationTarget& target, Seed seed) {
  target.validate();
  if (!(seed.kappa12 > 0.0) || !(seed.gamma31 > 0.0)) {
    fail(ErrorKind::InvalidParameter, "calibration seed must be positive");
  }

  Calibration out;
  Eigen::Vector2d v{std::log(seed.kappa12), std::log(seed.gamma31)};
  Eigen::Vector2d r = residuals(target, v);
  auto record = [&](int iteration) {
    out.history.push_back({iteration, std::exp(v[0]), std::exp(v[1]), r[0], r[1]});
  };
  record(0);

  for (int it = 1; it <= kMaxIterations && r.lpNorm<Eigen::Infinity>() > kTargetResidual; ++it) {
    Eigen::Matrix2d jac;
    for (int j = 0; j < 2; ++j) {
      constexpr double h = 1e-6;
      Eigen::Vector2d plus = v;
      Eigen::Vector2d minus = v;
      plus[j] += h;
      minus[j] -= h;
      jac.col(j) = (residuals(target, plus) - residuals(target, minus)) / (2.0 * h);
    }
    const Eigen::FullPivLU<Eigen::Matrix2d> lu(jac);
    if (!lu.isInvertible()) break;
    Eigen::Vector2d step = -lu.solve(r);
    const double longest = step.lpNorm<Eigen::Infinity>();
    if (longest > 1.0) step /= longest;  // at most a factor e per iteration

    double lambda = 1.0;
    Eigen::Vector2d trial_r = residuals(target, v + step);
    while (!(trial_r.norm() < r.norm()) && lambda > 1.0 / 1024.0) {
      lambda *= 0.5;
      trial_r = residuals(target, v + lambda * step);
    }
    if (!(trial_r.norm() < r.norm())) break;  // stalled
    v += lambda * step;
    r = trial_r;
    record(it);
  }

  out.kappa12 = std::exp(v[0]);
  out.gamma31 = std::exp(v[1]);
  out.gain_residual = r[0];
  out.advance_residual = r[1];
  if (!(r.lpNorm<Eigen::Infinity>() <= kConvergedResidual)) {
    std::ostringstream msg;
    msg << "calibration did not converge after " << out.history.size() - 1
        << " iterations: relative residuals gain " << r[0] << ", advance " << r[1];
    fail(ErrorKind::CalibrationFailed, msg.str());
  }
  return out;
}

Fig2Report run_fig2(const MediumParams& calibrated, double fwhm, const GridOverrides& grid) {
  Fig2Report report;
  report.params = calibrated;
  report.grid = default_grid(fwhm, calibrated, grid.min_n, grid.window_factor);
  report.pulse = {fwhm, 1.0, report.grid.center()};

  const PulseEnvelope input = make_gaussian_pulse(report.pulse, report.grid);
  const PulseEnvelope output = propagate(input, calibrated, PropagationMode::VacuumReferenced);
  report.metrics = pulse_metrics(input, output);
  report.analytic_advance = calibrated.length / kSpeedOfLight - group_delay_exact(calibrated);

  // Edge samples for plotting, each trace normalized to its own peak.
  double in_peak = 0.0;
  double out_peak = 0.0;
  for (std::size_t k = 0; k < report.grid.n; ++k) {
    in_peak = std::max(in_peak, std::norm(input.samples[k]));
    out_peak = std::max(out_peak, std::norm(output.samples[k]));
  }
  const double center = report.pulse.center_time;
  const auto stride = std::max<std::size_t>(1, static_cast<std::size_t>(fwhm / report.grid.dt / 200.0));
  for (std::size_t k = 0; k < report.grid.n; k += stride) {
    const double t = report.grid.time(k);
    const double offset = t - center;
    const char* region = nullptr;
    if (offset >= -1.5 * fwhm && offset <= -0.5 * fwhm) region = "front";
    if (offset >= 0.5 * fwhm && offset <= 1.5 * fwhm) region = "rear";
    if (region == nullptr) continue;
    report.edges.push_back({region, t, std::norm(input.samples[k]) / in_peak,
                            std::norm(output.samples[k]) / out_peak});
  }
  return report;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    fail(ErrorKind::InsufficientData, "linear fit needs >= 2 paired points");
  }
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) fail(ErrorKind::InsufficientData, "linear fit needs distinct abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  fit.n_points = x.size();
  return fit;
}

RabiSweep sweep_rabi(const MediumParams& calibrated, const std::vector<double>& omega_c,
                     double delta_2ph, double delta_c) {
  RabiSweep out;
  out.sweep.variable = "omega_c";
  std::vector<double> log_w;
  std::vector<double> log_v;
  for (const double w : omega_c) {
    MediumParams p = calibrated;
    p.omega_c = w;
    p.delta_c = delta_c;
    p.delta_2ph = delta_2ph;
    const double vg = group_velocity_exact(p);
    const double shift = stark_shift(p);
    const bool valid = std::abs(shift) < std::abs(delta_2ph) / 4.0;
    out.sweep.x.push_back(w);
    out.sweep.vg.push_back(vg);
    out.sweep.advance.push_back(p.length / kSpeedOfLight - group_delay_exact(p));
    out.sweep.in_fit_range.push_back(valid);
    out.stark.push_back(shift);
    if (valid) {
      log_w.push_back(std::log(w));
      log_v.push_back(std::log(std::abs(vg)));
    }
  }
  if (log_w.size() < 2) {
    fail(ErrorKind::Regime, "no two sweep points satisfy stark_shift < delta_2ph/4");
  }
  const LinearFit line = linear_fit(log_w, log_v);
  out.fit = {line.slope, std::exp(line.intercept), line.r_squared, line.n_points};

  for (std::size_t i = 0; i < omega_c.size(); ++i) {
    if (out.sweep.in_fit_range[i]) continue;
    const double model = out.fit.prefactor * std::pow(omega_c[i], out.fit.exponent);
    out.departure_beyond_range =
        std::max(out.departure_beyond_range, std::abs(std::abs(out.sweep.vg[i]) / model - 1.0));
  }
  return out;
}

std::vector<double> detuning_grid(const MediumParams& p, double half_span_gamma31, int n) {
  if (n < 2 || !(half_span_gamma31 > 0.0)) {
    fail(ErrorKind::InvalidParameter, "detuning grid needs n >= 2 and a positive span");
  }
  const double center = resonance_detuning(p);
  const double half = half_span_gamma31 * p.gamma31;
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Symmetric construction keeps mirrored points bitwise mirrored.
    const double frac = (2.0 * i - (n - 1)) / static_cast<double>(n - 1);
    grid[static_cast<std::size_t>(i)] = center + frac * half;
  }
  return grid;
}

DetuningSweep sweep_detuning(const MediumParams& calibrated, const std::vector<double>& delta_2ph) {
  calibrated.validate();
  if (delta_2ph.size() < 2) fail(ErrorKind::InvalidParameter, "sweep needs >= 2 detunings");
  DetuningSweep out;
  out.center = resonance_detuning(calibrated);
  const auto [lo_it, hi_it] = std::minmax_element(delta_2ph.begin(), delta_2ph.end());
  const double margin = 10.0 * calibrated.gamma31;
  // Relative slack absorbs rounding in grids built as center +- 10 gamma31.
  const double slack = 1e-9 * margin;
  if (*lo_it > out.center - margin + slack || *hi_it < out.center + margin - slack) {
    fail(ErrorKind::InvalidParameter,
         "detuning range must extend >= 10 gamma31 either side of the shifted resonance");
  }

  auto advance_at = [&](double detuning) {
    MediumParams p = calibrated;
    p.delta_2ph = detuning;
    return p.length / kSpeedOfLight - group_delay_exact(p);
  };

  out.sweep.variable = "delta_2ph";
  std::vector<double> fit_x2;
  std::vector<double> fit_vg;
  std::vector<double> fit_inv;
  std::vector<double> fit_adv;
  double max_advance = 0.0;
  for (const double d : delta_2ph) {
    MediumParams p = calibrated;
    p.delta_2ph = d;
    const double eff = effective_detuning(p);
    const double vg = group_velocity_exact(p);
    const double adv = advance_at(d);
    const bool in_range = std::abs(eff) > 5.0 * calibrated.gamma31;
    out.sweep.x.push_back(d);
    out.sweep.vg.push_back(vg);
    out.sweep.advance.push_back(adv);
    out.sweep.in_fit_range.push_back(in_range);
    out.effective_detuning.push_back(eff);
    max_advance = std::max(max_advance, std::abs(adv));
    if (in_range) {
      fit_x2.push_back(eff * eff);
      fit_vg.push_back(std::abs(vg));
      fit_inv.push_back(1.0 / (eff * eff));
      fit_adv.push_back(adv);
    }
  }
  out.vg_vs_detuning_squared = linear_fit(fit_x2, fit_vg);
  out.advance_vs_inverse_squared = linear_fit(fit_inv, fit_adv);

  // Symmetry measured against the sweep's largest |advance|: pointwise ratios
  // are meaningless at the crossovers where the advance passes through zero.
  for (std::size_t i = 0; i < delta_2ph.size(); ++i) {
    const double mirrored = advance_at(2.0 * out.center - delta_2ph[i]);
    out.max_symmetry_error =
        std::max(out.max_symmetry_error, std::abs(out.sweep.advance[i] - mirrored) / max_advance);
  }
  out.crossovers = find_crossover_detunings(calibrated, *lo_it, *hi_it);
  return out;
}

NarrowingStudy narrowing_study(const MediumParams& calibrated, const std::vector<double>& fwhms,
                               const std::vector<double>& delta_2ph, const GridOverrides& grid) {
  if (fwhms.empty() || delta_2ph.empty()) {
    fail(ErrorKind::InvalidParameter, "narrowing study needs at least one fwhm and detuning");
  }
  NarrowingStudy study;
  for (const double fwhm : fwhms) {
    for (const double d : delta_2ph) {
      MediumParams p = calibrated;
      p.delta_2ph = d;
      const Fig2Report run = run_fig2(p, fwhm, grid);
      study.cells.push_back({fwhm, d, effective_detuning(p), run.metrics});
    }
  }

  auto cell = [&](std::size_t f, std::size_t d) -> const NarrowingCell& {
    return study.cells[f * delta_2ph.size() + d];
  };

  study.narrowing_increases_as_fwhm_decreases = true;
  for (std::size_t d = 0; d < delta_2ph.size(); ++d) {
    std::vector<std::size_t> order(fwhms.size());
    for (std::size_t f = 0; f < order.size(); ++f) order[f] = f;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fwhms[a] < fwhms[b]; });
    for (std::size_t i = 1; i < order.size(); ++i) {
      if (cell(order[i], d).metrics.narrowing_fraction >
          cell(order[i - 1], d).metrics.narrowing_fraction) {
        study.narrowing_increases_as_fwhm_decreases = false;
      }
    }
  }

  study.narrowing_increases_as_detuning_decreases = true;
  for (std::size_t f = 0; f < fwhms.size(); ++f) {
    // Superluminal cells only, split by side of the Raman line.
    std::map<bool, std::vector<const NarrowingCell*>> sides;
    for (std::size_t d = 0; d < delta_2ph.size(); ++d) {
      const NarrowingCell& c = cell(f, d);
      if (c.metrics.advance > 0.0) sides[c.effective_detuning > 0.0].push_back(&c);
    }
    for (auto& [side, cells] : sides) {
      std::sort(cells.begin(), cells.end(), [](auto* a, auto* b) {
        return std::abs(a->effective_detuning) < std::abs(b->effective_detuning);
      });
      for (std::size_t i = 1; i < cells.size(); ++i) {
        if (cells[i]->metrics.narrowing_fraction > cells[i - 1]->metrics.narrowing_fraction) {
          study.narrowing_increases_as_detuning_decreases = false;
        }
      }
    }
  }
  return study;
}

}  // namespace fastlight
