#include "fastlight/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "fastlight/bloch.hpp"
#include "fastlight/constants.hpp"
#include "fastlight/pulse.hpp"

namespace fastlight::cli {

namespace {

using Json = nlohmann::ordered_json;

struct ResolvedMedium {
  MediumParams params;
  std::optional<Calibration> calibration;
};

Calibration run_calibration(const RunConfig& cfg) {
  const CalibrationTarget target = cfg.calibration_target();
  if (cfg.seed_kappa12 && cfg.seed_gamma31_hz) {
    return calibrate(target, Seed{*cfg.seed_kappa12, hz_to_rad(*cfg.seed_gamma31_hz)});
  }
  return calibrate(target);
}

ResolvedMedium resolve_medium(const RunConfig& cfg) {
  ResolvedMedium out{cfg.medium(), std::nullopt};
  switch (cfg.kappa_source) {
    case KappaSource::Calibrate:
      out.calibration = run_calibration(cfg);
      out.params = out.calibration->apply(out.params);
      break;
    case KappaSource::Explicit:
      break;
    case KappaSource::Microscopic:
      out.params.kappa12 = kappa_from_microscopic(
          {*cfg.n0_per_m3, hz_to_rad(*cfg.probe_carrier_hz), *cfg.d21});
      break;
  }
  out.params.validate();
  return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2 || !(lo < hi)) fail(ErrorKind::InvalidParameter, "range needs lo < hi and >= 2 points");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)] = (i == n - 1) ? hi : lo + (hi - lo) * i / (n - 1);
  }
  return v;
}

CriterionResult criterion(std::string name, double value, double lower, double upper) {
  return {std::move(name), value, lower, upper, value >= lower && value <= upper};
}

Json medium_json(const MediumParams& p) {
  return {{"kappa12", p.kappa12},
          {"omega_c_hz", rad_to_hz(p.omega_c)},
          {"delta_c_hz", rad_to_hz(p.delta_c)},
          {"delta_2ph_hz", rad_to_hz(p.delta_2ph)},
          {"gamma21_hz", rad_to_hz(p.gamma21)},
          {"gamma23_hz", rad_to_hz(p.gamma23)},
          {"gamma31_hz", rad_to_hz(p.gamma31)},
          {"length_m", p.length}};
}

Json fit_json(const GaussianFit& f) {
  return {{"peak_time_s", f.peak_time.value},
          {"peak_time_uncertainty_s", f.peak_time.uncertainty},
          {"fwhm_s", f.fwhm.value},
          {"fwhm_uncertainty_s", f.fwhm.uncertainty},
          {"height", f.height},
          {"residual", f.residual}};
}

Json metrics_json(const PulseMetrics& m) {
  return {{"advance_s", m.advance},
          {"peak_time_s", m.peak_time.value},
          {"peak_time_uncertainty_s", m.peak_time.uncertainty},
          {"fwhm_s", m.fwhm.value},
          {"fwhm_uncertainty_s", m.fwhm.uncertainty},
          {"energy_gain", m.energy_gain},
          {"narrowing_fraction", m.narrowing_fraction},
          {"distortion", m.distortion},
          {"input_fit", fit_json(m.input)},
          {"output_fit", fit_json(m.output)}};
}

CommandOutput cmd_dispersion(const RunConfig& cfg) {
  CommandOutput out;
  const ResolvedMedium medium = resolve_medium(cfg);
  const MediumParams& p = medium.params;
  out.report.calibration = medium.calibration;
  const DispersionProfile profile =
      dispersion_profile(p, hz_to_rad(cfg.dispersion_min_hz), hz_to_rad(cfg.dispersion_max_hz),
                         cfg.dispersion_points);
  out.table.header = {"omega_hz", "kernel_re_per_m", "kernel_im_per_m", "intensity_gain_per_m",
                      "group_delay_density_s_per_m"};
  for (const DispersionPoint& pt : profile.points) {
    out.table.rows.push_back({rad_to_hz(pt.omega), pt.kernel.real(), pt.kernel.imag(),
                              pt.intensity_gain, pt.group_delay_density});
  }
  out.report.metrics = {{"medium", medium_json(p)},
                        {"n_samples", profile.points.size()},
                        {"peak_intensity_gain_per_m", peak_intensity_gain(p)},
                        {"probe_intensity_gain_per_m", 2.0 * transfer_kernel(0.0, p).real()},
                        {"pole_center_hz", rad_to_hz(pole_center(p))},
                        {"linewidth_hz", rad_to_hz(raman_linewidth(p))},
                        {"stark_shift_hz", rad_to_hz(stark_shift(p))},
                        {"group_delay_s", group_delay_exact(p)},
                        {"group_velocity_m_s", group_velocity_exact(p)}};
  return out;
}

CommandOutput cmd_propagate(const RunConfig& cfg) {
  CommandOutput out;
  const ResolvedMedium medium = resolve_medium(cfg);
  const MediumParams& p = medium.params;
  out.report.calibration = medium.calibration;
  const TimeGrid grid = default_grid(cfg.pulse_fwhm_s, p, cfg.grid_n, cfg.window_factor);
  const PulseEnvelope input =
      make_gaussian_pulse({cfg.pulse_fwhm_s, cfg.pulse_peak_amplitude, grid.center()}, grid);
  const PulseEnvelope output = propagate(input, p, cfg.propagate_mode);
  const PulseMetrics metrics = pulse_metrics(input, output);

  if (cfg.csv_stride < 1) fail(ErrorKind::InvalidParameter, "csv_stride must be >= 1");
  out.table.header = {"time_s", "input_re", "input_im", "output_re", "output_im"};
  for (std::size_t k = 0; k < grid.n; k += static_cast<std::size_t>(cfg.csv_stride)) {
    out.table.rows.push_back({grid.time(k), input.samples[k].real(), input.samples[k].imag(),
                              output.samples[k].real(), output.samples[k].imag()});
  }
  out.report.metrics = {{"medium", medium_json(p)},
                        {"grid", {{"t0_s", grid.t0}, {"dt_s", grid.dt}, {"n", grid.n}}},
                        {"mode", cfg.propagate_mode == PropagationMode::Absolute
                                     ? "absolute"
                                     : "vacuum-referenced"},
                        {"analytic_advance_s", p.length / kSpeedOfLight - group_delay_exact(p)},
                        {"pulse", metrics_json(metrics)}};
  return out;
}

CommandOutput cmd_fig2(const RunConfig& cfg) {
  CommandOutput out;
  const ResolvedMedium medium = resolve_medium(cfg);
  out.report.calibration = medium.calibration;
  const Fig2Report fig = run_fig2(medium.params, cfg.pulse_fwhm_s, cfg.grid());
  const PulseMetrics& m = fig.metrics;

  out.table.header = {"region", "time_s", "reference_intensity", "probe_intensity"};
  for (const EdgeSample& e : fig.edges) {
    out.table.rows.push_back({e.region, e.time, e.reference_intensity, e.probe_intensity});
  }
  out.report.metrics = {{"medium", medium_json(fig.params)},
                        {"grid", {{"t0_s", fig.grid.t0}, {"dt_s", fig.grid.dt}, {"n", fig.grid.n}}},
                        {"pulse_fwhm_s", fig.pulse.fwhm},
                        {"advance", m.advance},
                        {"advance_over_fwhm", m.advance / fig.pulse.fwhm},
                        {"analytic_advance_s", fig.analytic_advance},
                        {"pulse", metrics_json(m)}};
  out.report.criteria = {
      criterion("advance_s", m.advance, 200e-9, 240e-9),
      criterion("advance_over_fwhm", m.advance / fig.pulse.fwhm, 0.012, 0.016),
      criterion("distortion", m.distortion, 0.0, 1e-3),
      criterion("abs_narrowing_fraction", std::abs(m.narrowing_fraction), 0.0, 0.02),
  };
  return out;
}

CommandOutput cmd_sweep_rabi(const RunConfig& cfg) {
  CommandOutput out;
  const ResolvedMedium medium = resolve_medium(cfg);
  out.report.calibration = medium.calibration;
  std::vector<double> omegas = linspace(cfg.rabi_min_hz, cfg.rabi_max_hz, cfg.rabi_points);
  for (double& w : omegas) w = hz_to_rad(w);
  const RabiSweep sweep = sweep_rabi(medium.params, omegas, hz_to_rad(cfg.rabi_delta_2ph_hz),
                                     hz_to_rad(cfg.rabi_delta_c_hz));

  out.table.header = {"omega_c_hz", "stark_shift_hz", "vg_m_s", "advance_s", "in_fit_range"};
  bool all_negative = true;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    const bool valid = sweep.sweep.in_fit_range[i];
    if (valid && !(sweep.sweep.vg[i] < 0.0)) all_negative = false;
    out.table.rows.push_back({rad_to_hz(omegas[i]), rad_to_hz(sweep.stark[i]), sweep.sweep.vg[i],
                              sweep.sweep.advance[i], std::int64_t{valid ? 1 : 0}});
  }
  out.report.metrics = {{"medium", medium_json(medium.params)},
                        {"fit_exponent", sweep.fit.exponent},
                        {"fit_prefactor", sweep.fit.prefactor},
                        {"fit_r_squared", sweep.fit.r_squared},
                        {"fit_points", sweep.fit.n_points},
                        {"all_vg_negative_in_fit_range", all_negative},
                        {"departure_beyond_range", sweep.departure_beyond_range}};
  out.report.criteria = {criterion("fit_exponent", sweep.fit.exponent, -2.1, -1.9),
                         criterion("all_vg_negative", all_negative ? 1.0 : 0.0, 1.0, 1.0)};
  return out;
}

CommandOutput cmd_sweep_detuning(const RunConfig& cfg) {
  CommandOutput out;
  const ResolvedMedium medium = resolve_medium(cfg);
  const MediumParams& p = medium.params;
  out.report.calibration = medium.calibration;
  std::vector<double> detunings;
  if (cfg.detuning_min_hz && cfg.detuning_max_hz) {
    detunings = linspace(*cfg.detuning_min_hz, *cfg.detuning_max_hz, cfg.detuning_points);
    for (double& d : detunings) d = hz_to_rad(d);
  } else {
    detunings = detuning_grid(p, cfg.detuning_span_gamma31, cfg.detuning_points);
  }
  const DetuningSweep sweep = sweep_detuning(p, detunings);

  out.table.header = {"delta_2ph_hz", "delta_eff_hz", "vg_m_s", "advance_s", "in_fit_range"};
  for (std::size_t i = 0; i < detunings.size(); ++i) {
    out.table.rows.push_back({rad_to_hz(detunings[i]), rad_to_hz(sweep.effective_detuning[i]),
                              sweep.sweep.vg[i], sweep.sweep.advance[i],
                              std::int64_t{sweep.sweep.in_fit_range[i] ? 1 : 0}});
  }
  Json crossings = Json::array();
  for (const double c : sweep.crossovers) crossings.push_back(rad_to_hz(c));
  const double midpoint =
      sweep.crossovers.empty()
          ? 0.0
          : 0.5 * (sweep.crossovers.front() + sweep.crossovers.back());
  out.report.metrics = {
      {"medium", medium_json(p)},
      {"resonance_center_hz", rad_to_hz(sweep.center)},
      {"vg_vs_delta_eff_squared", {{"slope", sweep.vg_vs_detuning_squared.slope},
                                   {"intercept", sweep.vg_vs_detuning_squared.intercept},
                                   {"r_squared", sweep.vg_vs_detuning_squared.r_squared},
                                   {"points", sweep.vg_vs_detuning_squared.n_points}}},
      {"advance_vs_inverse_delta_eff_squared",
       {{"slope", sweep.advance_vs_inverse_squared.slope},
        {"intercept", sweep.advance_vs_inverse_squared.intercept},
        {"r_squared", sweep.advance_vs_inverse_squared.r_squared}}},
      {"max_symmetry_error", sweep.max_symmetry_error},
      {"crossovers_hz", crossings},
      {"crossover_midpoint_hz", rad_to_hz(midpoint)}};
  out.report.criteria = {
      criterion("vg_quadratic_r_squared", sweep.vg_vs_detuning_squared.r_squared, 0.999, 1.0),
      criterion("advance_symmetry_error", sweep.max_symmetry_error, 0.0, 1e-6),
      criterion("crossover_count", static_cast<double>(sweep.crossovers.size()), 2.0, 2.0),
      criterion("crossover_midpoint_hz", std::abs(rad_to_hz(midpoint)), 150e3, 250e3),
  };
  return out;
}

CommandOutput cmd_narrowing(const RunConfig& cfg) {
  CommandOutput out;
  const ResolvedMedium medium = resolve_medium(cfg);
  out.report.calibration = medium.calibration;
  std::vector<double> detunings = cfg.narrowing_delta_2ph_hz;
  for (double& d : detunings) d = hz_to_rad(d);
  const NarrowingStudy study =
      narrowing_study(medium.params, cfg.narrowing_fwhm_s, detunings, cfg.grid());

  out.table.header = {"fwhm_s", "delta_2ph_hz", "delta_eff_hz", "advance_s",
                      "narrowing_fraction", "energy_gain", "distortion"};
  for (std::size_t i = 0; i < study.cells.size(); ++i) {
    const NarrowingCell& c = study.cells[i];
    out.table.rows.push_back({c.fwhm, cfg.narrowing_delta_2ph_hz[i % detunings.size()], rad_to_hz(c.effective_detuning),
                              c.metrics.advance, c.metrics.narrowing_fraction,
                              c.metrics.energy_gain, c.metrics.distortion});
  }
  out.report.metrics = {
      {"medium", medium_json(medium.params)},
      {"cells", study.cells.size()},
      {"narrowing_increases_as_fwhm_decreases", study.narrowing_increases_as_fwhm_decreases},
      {"narrowing_increases_as_detuning_decreases",
       study.narrowing_increases_as_detuning_decreases}};
  return out;
}

CommandOutput cmd_calibrate(const RunConfig& cfg) {
  CommandOutput out;
  const Calibration cal = run_calibration(cfg);
  out.report.calibration = cal;
  out.table.header = {"iteration", "kappa12", "gamma31_hz", "gain_residual", "advance_residual"};
  for (const CalibrationStep& s : cal.history) {
    out.table.rows.push_back({std::int64_t{s.iteration}, s.kappa12, rad_to_hz(s.gamma31),
                              s.gain_residual, s.advance_residual});
  }
  const MediumParams p = cal.apply(cfg.medium());
  out.report.metrics = {{"medium", medium_json(p)},
                        {"iterations", cal.history.size() - 1},
                        {"peak_intensity_gain_per_m", peak_intensity_gain(p)},
                        {"probe_intensity_gain_per_m", 2.0 * transfer_kernel(0.0, p).real()},
                        {"probe_amplitude_gain_per_m", transfer_kernel(0.0, p).real()},
                        {"advance_s", p.length / kSpeedOfLight - group_delay_exact(p)}};
  const double worst = std::max(std::abs(cal.gain_residual), std::abs(cal.advance_residual));
  out.report.criteria = {criterion("max_relative_residual", worst, 0.0, 1e-6)};
  return out;
}

CommandOutput cmd_oracle_check(const RunConfig& cfg) {
  CommandOutput out;
  const ResolvedMedium medium = resolve_medium(cfg);
  out.report.calibration = medium.calibration;
  const MediumParams& p = medium.params;

  DriveParams full{cfg.oracle_probe_fraction * p.omega_c, p};
  const OracleResult physical = cross_check_kernel(full, OracleDetuning::Probe);
  const OracleResult identity = cross_check_kernel(full, OracleDetuning::Pump);

  MediumParams scaled = p;
  scaled.omega_c = hz_to_rad(cfg.ode_omega_c_hz);
  scaled.delta_c = hz_to_rad(cfg.ode_delta_c_hz);
  scaled.delta_2ph = hz_to_rad(cfg.ode_delta_2ph_hz);
  scaled.gamma21 = hz_to_rad(cfg.ode_gamma21_hz);
  scaled.gamma23 = hz_to_rad(cfg.ode_gamma23_hz);
  scaled.gamma31 = hz_to_rad(cfg.ode_gamma31_hz);
  const DriveParams small{cfg.oracle_probe_fraction * scaled.omega_c, scaled};
  const OdeCheck ode = cross_check_ode(small, cfg.ode_duration_gamma31, cfg.ode_step_divisor);

  out.report.criteria = {
      criterion("closed_form_vs_kernel", physical.relative_deviation, 0.0, 1e-2),
      criterion("closed_form_vs_kernel_within_bound", physical.relative_deviation, 0.0,
                physical.bound),
      criterion("pump_detuning_identity", identity.relative_deviation, 0.0, 1e-9),
      criterion("ode_vs_closed_form", ode.relative_deviation, 0.0, 1e-3),
  };
  out.table.header = {"check", "relative_deviation", "upper_bound", "pass"};
  for (const CriterionResult& c : out.report.criteria) {
    out.table.rows.push_back({c.name, c.value, c.upper, std::int64_t{c.pass ? 1 : 0}});
  }
  out.report.metrics = {
      {"medium", medium_json(p)},
      {"relative_deviation", physical.relative_deviation},
      {"approximation_bound", physical.bound},
      {"identity_relative_deviation", identity.relative_deviation},
      {"ode_relative_deviation", ode.relative_deviation},
      {"ode_medium", medium_json(scaled)},
      {"coherence_c", {{"re", physical.coherence_c.real()}, {"im", physical.coherence_c.imag()}}},
      {"kernel_prediction",
       {{"re", physical.kernel_prediction.real()}, {"im", physical.kernel_prediction.imag()}}}};
  return out;
}

using Handler = std::function<CommandOutput(const RunConfig&)>;

const std::map<std::string, Handler, std::less<>>& handlers() {
  static const std::map<std::string, Handler, std::less<>> table{
      {"dispersion", cmd_dispersion},       {"propagate", cmd_propagate},
      {"fig2", cmd_fig2},                   {"sweep-rabi", cmd_sweep_rabi},
      {"sweep-detuning", cmd_sweep_detuning}, {"narrowing", cmd_narrowing},
      {"calibrate", cmd_calibrate},         {"oracle-check", cmd_oracle_check},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"dispersion",     "propagate", "fig2",
                                              "sweep-rabi",     "sweep-detuning",
                                              "narrowing",      "calibrate", "oracle-check"};
  return names;
}

nlohmann::ordered_json RunReport::to_json() const {
  Json j;
  j["tool"] = "fastlight";
  j["version"] = std::string(kToolVersion);
  j["command"] = command;
  // One string per key, exactly as serialize_config writes it.
  Json echo = Json::object();
  const std::string text = serialize_config(config);
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto eol = rest.find('\n');
    const std::string_view line = rest.substr(0, eol);
    rest.remove_prefix(eol == std::string_view::npos ? rest.size() : eol + 1);
    const auto eq = line.find(" = ");
    if (eq != std::string_view::npos) {
      echo[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 3));
    }
  }
  j["config"] = echo;
  if (calibration) {
    j["calibration"] = {{"kappa12", calibration->kappa12},
                        {"gamma31_hz", rad_to_hz(calibration->gamma31)},
                        {"gain_residual", calibration->gain_residual},
                        {"advance_residual", calibration->advance_residual},
                        {"iterations", calibration->history.size() - 1}};
  } else {
    j["calibration"] = nullptr;
  }
  j["metrics"] = metrics;
  Json crit = Json::array();
  for (const CriterionResult& c : criteria) {
    crit.push_back({{"name", c.name},
                    {"value", c.value},
                    {"lower", c.lower},
                    {"upper", c.upper},
                    {"pass", c.pass}});
  }
  j["criteria"] = crit;
  return j;
}

CommandOutput execute_command(std::string_view name, const RunConfig& config) {
  const auto it = handlers().find(name);
  if (it == handlers().end()) {
    fail(ErrorKind::Config, "unknown command '" + std::string(name) + "'");
  }
  try {
    CommandOutput out = it->second(config);
    out.report.command = std::string(name);
    out.report.config = config;
    return out;
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(name) + ": " + e.what());
  }
}

RunReport run_command(std::string_view name, const RunConfig& config,
                      const std::filesystem::path& out_dir) {
  CommandOutput out = execute_command(name, config);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory '" + out_dir.string() + "'");
  write_csv(out.table, out_dir / (std::string(name) + ".csv"));
  write_file_atomic(out_dir / (std::string(name) + ".json"), out.report.to_json().dump(2) + "\n");
  return out.report;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::InvalidParameter:
      return 2;
    case ErrorKind::Io:
      return 4;
    default:
      return 3;
  }
}

}  // namespace fastlight::cli
