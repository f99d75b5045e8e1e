#include "fastlight/cli/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <span>
#include <sstream>

#include "fastlight/constants.hpp"
#include "fastlight/errors.hpp"

namespace fastlight::cli {

namespace {

enum class Dimension { None, Frequency, Time, Length, InverseLength };

struct UnitSuffix {
  std::string_view name;
  double factor;
};

std::span<const UnitSuffix> suffixes(Dimension dim) {
  static constexpr std::array<UnitSuffix, 4> kFrequency{
      {{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}}};
  static constexpr std::array<UnitSuffix, 4> kTime{
      {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}}};
  static constexpr std::array<UnitSuffix, 3> kLength{{{"m", 1.0}, {"cm", 1e-2}, {"mm", 1e-3}}};
  static constexpr std::array<UnitSuffix, 2> kInverseLength{{{"1/m", 1.0}, {"1/cm", 1e2}}};
  switch (dim) {
    case Dimension::Frequency: return kFrequency;
    case Dimension::Time: return kTime;
    case Dimension::Length: return kLength;
    case Dimension::InverseLength: return kInverseLength;
    case Dimension::None: break;
  }
  return {};
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void config_error(int line, std::string_view key, const std::string& what) {
  std::ostringstream msg;
  if (line > 0) msg << "line " << line << ": ";
  msg << "key '" << key << "': " << what;
  fail(ErrorKind::Config, msg.str());
}

struct Context {
  int line;
  std::string_view key;
};

double parse_number(std::string_view text, Dimension dim, const Context& ctx) {
  text = trim(text);
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  // from_chars rejects a leading '+'.
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr == begin) {
    config_error(ctx.line, ctx.key, "cannot parse '" + std::string(text) + "' as a number");
  }
  if (!std::isfinite(value)) config_error(ctx.line, ctx.key, "value must be finite");
  const std::string_view suffix = trim(std::string_view(ptr, static_cast<std::size_t>(end - ptr)));
  if (suffix.empty()) return value;
  for (const UnitSuffix& u : suffixes(dim)) {
    if (u.name == suffix) return value * u.factor;
  }
  config_error(ctx.line, ctx.key, "unit suffix '" + std::string(suffix) + "' does not match the key");
}

template <typename Int>
Int parse_integer(std::string_view text, const Context& ctx) {
  text = trim(text);
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    config_error(ctx.line, ctx.key, "cannot parse '" + std::string(text) + "' as an integer");
  }
  return value;
}

std::vector<double> parse_list(std::string_view text, Dimension dim, const Context& ctx) {
  std::vector<double> values;
  while (true) {
    const auto comma = text.find(',');
    values.push_back(parse_number(text.substr(0, comma), dim, ctx));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return values;
}

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::array<std::pair<std::string_view, Enum>, N>& names,
                const Context& ctx) {
  text = trim(text);
  for (const auto& [name, value] : names) {
    if (name == text) return value;
  }
  std::string allowed;
  for (const auto& [name, value] : names) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
  config_error(ctx.line, ctx.key, "'" + std::string(text) + "' is not one of " + allowed);
}

template <typename Enum, std::size_t N>
std::string enum_name(Enum value, const std::array<std::pair<std::string_view, Enum>, N>& names) {
  for (const auto& [name, v] : names) {
    if (v == value) return std::string(name);
  }
  return {};
}

constexpr std::array<std::pair<std::string_view, KappaSource>, 3> kKappaSources{
    {{"calibrate", KappaSource::Calibrate},
     {"explicit", KappaSource::Explicit},
     {"microscopic", KappaSource::Microscopic}}};
constexpr std::array<std::pair<std::string_view, GainReference>, 2> kGainReferences{
    {{"probe", GainReference::ProbeCarrier}, {"peak", GainReference::Peak}}};
constexpr std::array<std::pair<std::string_view, PropagationMode>, 2> kModes{
    {{"vacuum-referenced", PropagationMode::VacuumReferenced},
     {"absolute", PropagationMode::Absolute}}};

struct KeyDef {
  std::string_view name;
  std::function<void(RunConfig&, std::string_view, const Context&)> parse;
  std::function<std::optional<std::string>(const RunConfig&)> format;
};

KeyDef number_key(std::string_view name, double RunConfig::*field, Dimension dim) {
  return {name,
          [field, dim](RunConfig& c, std::string_view v, const Context& ctx) {
            c.*field = parse_number(v, dim, ctx);
          },
          [field](const RunConfig& c) { return std::optional(format_number(c.*field)); }};
}

KeyDef optional_key(std::string_view name, std::optional<double> RunConfig::*field, Dimension dim) {
  return {name,
          [field, dim](RunConfig& c, std::string_view v, const Context& ctx) {
            c.*field = parse_number(v, dim, ctx);
          },
          [field](const RunConfig& c) -> std::optional<std::string> {
            if (!(c.*field)) return std::nullopt;
            return format_number(*(c.*field));
          }};
}

template <typename Int>
KeyDef integer_key(std::string_view name, Int RunConfig::*field) {
  return {name,
          [field](RunConfig& c, std::string_view v, const Context& ctx) {
            c.*field = parse_integer<Int>(v, ctx);
          },
          [field](const RunConfig& c) { return std::optional(std::to_string(c.*field)); }};
}

KeyDef list_key(std::string_view name, std::vector<double> RunConfig::*field, Dimension dim) {
  return {name,
          [field, dim](RunConfig& c, std::string_view v, const Context& ctx) {
            c.*field = parse_list(v, dim, ctx);
          },
          [field](const RunConfig& c) {
            std::string out;
            for (const double v : c.*field) out += (out.empty() ? "" : ", ") + format_number(v);
            return std::optional(out);
          }};
}

template <typename Enum, std::size_t N>
KeyDef enum_key(std::string_view name, Enum RunConfig::*field,
                const std::array<std::pair<std::string_view, Enum>, N>& names) {
  return {name,
          [field, &names](RunConfig& c, std::string_view v, const Context& ctx) {
            c.*field = parse_enum(v, names, ctx);
          },
          [field, &names](const RunConfig& c) { return std::optional(enum_name(c.*field, names)); }};
}

const std::vector<KeyDef>& key_defs() {
  using D = Dimension;
  using C = RunConfig;
  static const std::vector<KeyDef> defs{
      number_key("omega_c_hz", &C::omega_c_hz, D::Frequency),
      number_key("delta_c_hz", &C::delta_c_hz, D::Frequency),
      number_key("delta_2ph_hz", &C::delta_2ph_hz, D::Frequency),
      number_key("gamma21_hz", &C::gamma21_hz, D::Frequency),
      number_key("gamma23_hz", &C::gamma23_hz, D::Frequency),
      optional_key("gamma31_hz", &C::gamma31_hz, D::Frequency),
      optional_key("kappa12", &C::kappa12, D::None),
      number_key("length_m", &C::length_m, D::Length),
      enum_key("kappa_source", &C::kappa_source, kKappaSources),
      optional_key("n0_per_m3", &C::n0_per_m3, D::None),
      optional_key("probe_carrier_hz", &C::probe_carrier_hz, D::Frequency),
      optional_key("d21", &C::d21, D::None),
      number_key("gain_target_per_m", &C::gain_target_per_m, D::InverseLength),
      number_key("advance_target_s", &C::advance_target_s, D::Time),
      enum_key("gain_reference", &C::gain_reference, kGainReferences),
      optional_key("seed_kappa12", &C::seed_kappa12, D::None),
      optional_key("seed_gamma31_hz", &C::seed_gamma31_hz, D::Frequency),
      number_key("pulse_fwhm_s", &C::pulse_fwhm_s, D::Time),
      number_key("pulse_peak_amplitude", &C::pulse_peak_amplitude, D::None),
      integer_key("grid_n", &C::grid_n),
      number_key("window_factor", &C::window_factor, D::None),
      enum_key("propagate_mode", &C::propagate_mode, kModes),
      integer_key("csv_stride", &C::csv_stride),
      number_key("dispersion_min_hz", &C::dispersion_min_hz, D::Frequency),
      number_key("dispersion_max_hz", &C::dispersion_max_hz, D::Frequency),
      integer_key("dispersion_points", &C::dispersion_points),
      number_key("rabi_min_hz", &C::rabi_min_hz, D::Frequency),
      number_key("rabi_max_hz", &C::rabi_max_hz, D::Frequency),
      integer_key("rabi_points", &C::rabi_points),
      number_key("rabi_delta_c_hz", &C::rabi_delta_c_hz, D::Frequency),
      number_key("rabi_delta_2ph_hz", &C::rabi_delta_2ph_hz, D::Frequency),
      optional_key("detuning_min_hz", &C::detuning_min_hz, D::Frequency),
      optional_key("detuning_max_hz", &C::detuning_max_hz, D::Frequency),
      number_key("detuning_span_gamma31", &C::detuning_span_gamma31, D::None),
      integer_key("detuning_points", &C::detuning_points),
      list_key("narrowing_fwhm_s", &C::narrowing_fwhm_s, D::Time),
      list_key("narrowing_delta_2ph_hz", &C::narrowing_delta_2ph_hz, D::Frequency),
      number_key("oracle_probe_fraction", &C::oracle_probe_fraction, D::None),
      number_key("ode_omega_c_hz", &C::ode_omega_c_hz, D::Frequency),
      number_key("ode_delta_c_hz", &C::ode_delta_c_hz, D::Frequency),
      number_key("ode_delta_2ph_hz", &C::ode_delta_2ph_hz, D::Frequency),
      number_key("ode_gamma21_hz", &C::ode_gamma21_hz, D::Frequency),
      number_key("ode_gamma23_hz", &C::ode_gamma23_hz, D::Frequency),
      number_key("ode_gamma31_hz", &C::ode_gamma31_hz, D::Frequency),
      number_key("ode_duration_gamma31", &C::ode_duration_gamma31, D::None),
      number_key("ode_step_divisor", &C::ode_step_divisor, D::None),
  };
  return defs;
}

void require_keys(const RunConfig& c) {
  auto need = [](bool present, std::string_view key, std::string_view why) {
    if (!present) config_error(0, key, "missing, required by " + std::string(why));
  };
  if (c.kappa_source == KappaSource::Explicit) {
    need(c.kappa12.has_value(), "kappa12", "kappa_source = explicit");
    need(c.gamma31_hz.has_value(), "gamma31_hz", "kappa_source = explicit");
  }
  if (c.kappa_source == KappaSource::Microscopic) {
    need(c.n0_per_m3.has_value(), "n0_per_m3", "kappa_source = microscopic");
    need(c.probe_carrier_hz.has_value(), "probe_carrier_hz", "kappa_source = microscopic");
    need(c.d21.has_value(), "d21", "kappa_source = microscopic");
    need(c.gamma31_hz.has_value(), "gamma31_hz", "kappa_source = microscopic");
  }
  if (c.seed_kappa12.has_value() != c.seed_gamma31_hz.has_value()) {
    need(c.seed_kappa12.has_value(), "seed_kappa12", "seed_gamma31_hz");
    need(c.seed_gamma31_hz.has_value(), "seed_gamma31_hz", "seed_kappa12");
  }
  if (c.detuning_min_hz.has_value() != c.detuning_max_hz.has_value()) {
    need(c.detuning_min_hz.has_value(), "detuning_min_hz", "detuning_max_hz");
    need(c.detuning_max_hz.has_value(), "detuning_max_hz", "detuning_min_hz");
  }
}

}  // namespace

std::string format_number(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

MediumParams RunConfig::medium() const {
  MediumParams p;
  p.omega_c = hz_to_rad(omega_c_hz);
  p.delta_c = hz_to_rad(delta_c_hz);
  p.delta_2ph = hz_to_rad(delta_2ph_hz);
  p.gamma21 = hz_to_rad(gamma21_hz);
  p.gamma23 = hz_to_rad(gamma23_hz);
  p.gamma31 = gamma31_hz ? hz_to_rad(*gamma31_hz) : 0.0;
  p.kappa12 = kappa12.value_or(0.0);
  p.length = length_m;
  return p;
}

CalibrationTarget RunConfig::calibration_target() const {
  CalibrationTarget target;
  target.gain_target = gain_target_per_m;
  target.advance_target = advance_target_s;
  target.reference = gain_reference;
  target.fixed = medium();
  return target;
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      config_error(line_no, line, "expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto& defs = key_defs();
    const auto def = std::find_if(defs.begin(), defs.end(), [&](const KeyDef& d) { return d.name == key; });
    if (def == defs.end()) config_error(line_no, key, "unknown key");
    if (!seen.insert(std::string(key)).second) config_error(line_no, key, "given more than once");
    if (value.empty()) config_error(line_no, key, "missing value");
    def->parse(config, value, {line_no, key});
  }
  require_keys(config);
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const KeyDef& def : key_defs()) {
    if (const auto value = def.format(config)) {
      out += std::string(def.name) + " = " + *value + "\n";
    }
  }
  return out;
}

}  // namespace fastlight::cli
