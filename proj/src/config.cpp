#include "cqed/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cqed/constants.hpp"
#include "cqed/version.hpp"

namespace cqed {

namespace {

using std::numbers::pi;
using json = nlohmann::json;

enum class Unit {
  plain,       // dimensionless, seconds, kelvin, counts
  frequency,   // angular flag required; non-angular values get *2*pi
  jump_rate,   // angular flag required; non-angular events/s used as-is
};

struct Value {
  std::string text;
  bool has_angular = false;
  bool angular = false;
  int line = 0;
};

struct RawConfig {
  std::map<std::string, Value> entries;  // "section.key" -> value
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

RawConfig read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  RawConfig cfg;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section header", line_no);
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError("empty section name", line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value'", line_no);
    const std::string key = trim(line.substr(0, eq));
    std::string rest = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line_no);
    if (section.empty()) throw ConfigError("key outside any [section]", line_no);

    Value v;
    v.line = line_no;
    // a trailing "angular=true|false" token is the per-key unit flag
    const auto flag_pos = rest.rfind("angular=");
    if (flag_pos != std::string::npos &&
        (flag_pos == 0 || std::isspace(static_cast<unsigned char>(rest[flag_pos - 1])))) {
      const std::string flag = trim(rest.substr(flag_pos + 8));
      if (flag == "true")
        v.angular = true;
      else if (flag == "false")
        v.angular = false;
      else
        throw ConfigError("angular flag must be true or false", line_no);
      v.has_angular = true;
      rest = trim(rest.substr(0, flag_pos));
    }
    v.text = rest;
    if (v.text.empty()) throw ConfigError("missing value for key " + key, line_no);
    const std::string full = section + "." + key;
    if (cfg.entries.count(full)) throw ConfigError("duplicate key " + full, line_no);
    cfg.entries[full] = v;
  }
  return cfg;
}

double parse_double(const Value& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v.text, &used);
    if (used != v.text.size()) throw std::invalid_argument("trailing junk");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("expected a number for " + key + ", got '" + v.text + "'",
                      v.line);
  }
}

long parse_long(const Value& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const long x = std::stol(v.text, &used);
    if (used != v.text.size()) throw std::invalid_argument("trailing junk");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("expected an integer for " + key, v.line);
  }
}

bool parse_bool(const Value& v, const std::string& key) {
  if (v.text == "true") return true;
  if (v.text == "false") return false;
  throw ConfigError("expected true or false for " + key, v.line);
}

std::vector<double> parse_list(const Value& v, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(v.text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) throw ConfigError("empty element in list " + key, v.line);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument("junk");
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + tok + "' in list " + key, v.line);
    }
  }
  if (out.empty()) throw ConfigError("empty list for " + key, v.line);
  return out;
}

// Unit resolution. angular=true: value already rad/s. angular=false:
// frequencies are cycles/s (* 2*pi); jump rates are events/s (as-is).
double resolve_unit(double value, const Value& v, Unit unit, const std::string& key) {
  if (unit == Unit::plain) {
    if (v.has_angular)
      throw ConfigError("key " + key + " takes no angular flag", v.line);
    return value;
  }
  if (!v.has_angular)
    throw ConfigError("key " + key + " needs an explicit angular=true|false flag",
                      v.line);
  if (v.angular) return value;
  return unit == Unit::frequency ? value * 2.0 * pi : value;
}

struct Schema {
  std::string key;  // "section.key"
  Unit unit;
};

// every key the parser accepts, with its unit class
const std::vector<Schema>& schema() {
  static const std::vector<Schema> s = {
      {"run.experiment", Unit::plain},
      {"run.preset", Unit::plain},
      {"run.workers", Unit::plain},
      {"run.force", Unit::plain},
      {"params.omega_c", Unit::frequency},
      {"params.kappa_c", Unit::frequency},
      {"params.kappa_1", Unit::frequency},
      {"params.omega_s", Unit::frequency},
      {"params.omega_d", Unit::frequency},
      {"params.gamma_s", Unit::frequency},
      {"params.chi_s", Unit::frequency},
      {"params.g_s", Unit::frequency},
      {"params.eta_s", Unit::jump_rate},
      {"params.n_spins", Unit::plain},
      {"params.temperature", Unit::plain},
      {"drive.amplitude", Unit::frequency},
      {"drive.pulse_amplitude", Unit::frequency},
      {"drive.pulse_duration", Unit::plain},
      {"drive.tail_duration", Unit::plain},
      {"sweep.span", Unit::frequency},
      {"sweep.points", Unit::plain},
      {"sweep.eta_values", Unit::jump_rate},
      {"sweep.temperatures", Unit::plain},
      {"sweep.map_etas", Unit::jump_rate},
      {"sweep.spin_detunings", Unit::frequency},
      {"sweep.drive_offsets", Unit::frequency},
      {"sweep.span_b", Unit::frequency},
      {"sweep.points_b", Unit::plain},
      {"sweep.transient_samples", Unit::plain},
      {"integration.rel_tol", Unit::plain},
      {"integration.abs_tol", Unit::plain},
      {"integration.max_step", Unit::plain},
      {"integration.max_steps", Unit::plain},
      {"steady.rel_tol", Unit::plain},
      {"steady.window_factor", Unit::plain},
      {"steady.time_cap_factor", Unit::plain},
      {"steady.method", Unit::plain},
      {"oracle.spin_counts", Unit::plain},
      {"oracle.strong_drive_factor", Unit::plain},
      {"output.dir", Unit::plain},
      {"output.plot_script", Unit::plain},
  };
  return s;
}

const Schema* find_schema(const std::string& key) {
  for (const auto& s : schema())
    if (s.key == key) return &s;
  return nullptr;
}

ExperimentSpec build_spec(const RawConfig& cfg, std::optional<ExperimentKind> forced) {
  // reject unknown keys first
  for (const auto& [key, v] : cfg.entries)
    if (!find_schema(key))
      throw ConfigError("unknown key '" + key + "'", v.line);

  auto get = [&](const std::string& key) -> const Value* {
    auto it = cfg.entries.find(key);
    return it == cfg.entries.end() ? nullptr : &it->second;
  };

  // experiment kind: subcommand wins; a config key must agree when present
  std::optional<ExperimentKind> kind = forced;
  if (const Value* v = get("run.experiment")) {
    const auto parsed = experiment_kind_from_string(v->text);
    if (!parsed)
      throw ConfigError("unknown experiment '" + v->text + "'", v->line);
    if (kind && *kind != *parsed)
      throw ConfigError("config names experiment '" + v->text +
                            "' but the command line selected '" +
                            std::string(to_string(*kind)) + "'",
                        v->line);
    kind = parsed;
  }
  if (!kind)
    throw ConfigError(
        "missing required key: run.experiment = dicke-map | rabi-transient | "
        "rabi-spectrum | superradiance | sense | oracle-check "
        "(and run.preset = fig3 | fig4 | oracle-check unless [params] is complete)");

  ExperimentSpec spec = default_spec(*kind);

  if (const Value* v = get("run.preset")) {
    if (v->text == "fig3")
      spec.params = preset_fig3();
    else if (v->text == "fig4")
      spec.params = preset_fig4();
    else if (v->text == "oracle-check")
      spec.params = preset_oracle_check();
    else
      throw ConfigError("unknown preset '" + v->text + "'", v->line);
    spec.preset = v->text;
  }

  auto unit_of = [&](const std::string& key) { return find_schema(key)->unit; };
  auto set_rate = [&](const std::string& key, double& field) {
    if (const Value* v = get(key))
      field = resolve_unit(parse_double(*v, key), *v, unit_of(key), key);
  };
  auto set_plain = [&](const std::string& key, double& field) {
    if (const Value* v = get(key)) field = parse_double(*v, key);
  };
  auto set_list = [&](const std::string& key, std::vector<double>& field) {
    if (const Value* v = get(key)) {
      field = parse_list(*v, key);
      for (auto& x : field) x = resolve_unit(x, *v, unit_of(key), key);
    }
  };

  set_rate("params.omega_c", spec.params.omega_c);
  set_rate("params.kappa_c", spec.params.kappa_c);
  set_rate("params.kappa_1", spec.params.kappa_1);
  set_rate("params.omega_s", spec.params.omega_s);
  set_rate("params.omega_d", spec.params.omega_d);
  set_rate("params.gamma_s", spec.params.gamma_s);
  set_rate("params.chi_s", spec.params.chi_s);
  set_rate("params.g_s", spec.params.g_s);
  set_rate("params.eta_s", spec.params.eta_s);
  set_plain("params.n_spins", spec.params.n_spins);
  set_plain("params.temperature", spec.params.temperature);

  set_rate("drive.amplitude", spec.drive_amplitude);
  set_rate("drive.pulse_amplitude", spec.pulse_amplitude);
  set_plain("drive.pulse_duration", spec.pulse_duration);
  set_plain("drive.tail_duration", spec.tail_duration);

  set_rate("sweep.span", spec.sweep_span);
  set_rate("sweep.span_b", spec.sense_span_b);
  set_list("sweep.eta_values", spec.eta_values);
  set_list("sweep.temperatures", spec.map_temperatures);
  set_list("sweep.map_etas", spec.map_etas);
  set_list("sweep.spin_detunings", spec.spin_detunings);
  set_list("sweep.drive_offsets", spec.drive_offsets);
  if (const Value* v = get("sweep.points"))
    spec.sweep_points = static_cast<int>(parse_long(*v, "sweep.points"));
  if (const Value* v = get("sweep.points_b"))
    spec.sense_points_b = static_cast<int>(parse_long(*v, "sweep.points_b"));
  if (const Value* v = get("sweep.transient_samples"))
    spec.transient_samples =
        static_cast<int>(parse_long(*v, "sweep.transient_samples"));

  set_plain("integration.rel_tol", spec.integ.rel_tol);
  set_plain("integration.abs_tol", spec.integ.abs_tol);
  set_plain("integration.max_step", spec.integ.max_step);
  if (const Value* v = get("integration.max_steps"))
    spec.integ.max_steps = parse_long(*v, "integration.max_steps");
  spec.steady.integ = spec.integ;

  set_plain("steady.rel_tol", spec.steady.rel_tol);
  set_plain("steady.window_factor", spec.steady.window_factor);
  set_plain("steady.time_cap_factor", spec.steady.time_cap_factor);
  if (const Value* v = get("steady.method")) {
    if (v->text == "newton")
      spec.use_newton = true;
    else if (v->text == "integrate")
      spec.use_newton = false;
    else
      throw ConfigError("steady.method must be integrate or newton", v->line);
  }

  if (const Value* v = get("oracle.spin_counts")) {
    spec.oracle_spin_counts.clear();
    for (double x : parse_list(*v, "oracle.spin_counts"))
      spec.oracle_spin_counts.push_back(static_cast<int>(x));
  }
  set_plain("oracle.strong_drive_factor", spec.oracle_strong_drive_factor);

  if (const Value* v = get("run.workers"))
    spec.workers = static_cast<int>(parse_long(*v, "run.workers"));
  if (const Value* v = get("run.force")) spec.force = parse_bool(*v, "run.force");
  if (const Value* v = get("output.dir")) spec.out_dir = v->text;
  if (const Value* v = get("output.plot_script"))
    spec.emit_plot_script = parse_bool(*v, "output.plot_script");

  try {
    spec.params.validate();
    spec.integ.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return spec;
}

json spec_to_json(const ExperimentSpec& s) {
  json j;
  j["experiment"] = to_string(s.kind);
  j["preset"] = s.preset;
  j["params"] = {
      {"omega_c", s.params.omega_c},   {"kappa_c", s.params.kappa_c},
      {"kappa_1", s.params.kappa_1},   {"omega_s", s.params.omega_s},
      {"omega_d", s.params.omega_d},   {"gamma_s", s.params.gamma_s},
      {"eta_s", s.params.eta_s},       {"chi_s", s.params.chi_s},
      {"g_s", s.params.g_s},           {"n_spins", s.params.n_spins},
      {"temperature", s.params.temperature},
  };
  j["units"] = "angular rad/s unless stated; eta_s in events/s";
  j["drive"] = {{"amplitude", s.drive_amplitude},
                {"pulse_amplitude", s.pulse_amplitude},
                {"pulse_duration", s.pulse_duration},
                {"tail_duration", s.tail_duration}};
  j["grids"] = {{"eta_values", s.eta_values},
                {"map_temperatures", s.map_temperatures},
                {"map_etas", s.map_etas},
                {"sweep_span", s.sweep_span},
                {"sweep_points", s.sweep_points},
                {"spin_detunings", s.spin_detunings},
                {"drive_offsets", s.drive_offsets},
                {"sense_span_b", s.sense_span_b},
                {"sense_points_b", s.sense_points_b},
                {"transient_samples", s.transient_samples},
                {"oracle_spin_counts", s.oracle_spin_counts},
                {"oracle_strong_drive_factor", s.oracle_strong_drive_factor}};
  j["integration"] = {{"rel_tol", s.integ.rel_tol},
                      {"abs_tol", s.integ.abs_tol},
                      {"max_step", s.integ.max_step},
                      {"max_steps", s.integ.max_steps}};
  j["steady"] = {{"rel_tol", s.steady.rel_tol},
                 {"window_factor", s.steady.window_factor},
                 {"time_cap_factor", s.steady.time_cap_factor},
                 {"method", s.use_newton ? "newton" : "integrate"}};
  j["workers"] = s.workers;
  j["out_dir"] = s.out_dir;
  j["emit_plot_script"] = s.emit_plot_script;
  j["constants"] = {{"hbar", constants::hbar},
                    {"k_boltzmann", constants::k_boltzmann}};
  return j;
}

ExperimentSpec spec_from_json(const json& j) {
  const auto kind = experiment_kind_from_string(j.at("experiment"));
  if (!kind) throw ConfigError("manifest names an unknown experiment");
  ExperimentSpec s = default_spec(*kind);
  s.preset = j.at("preset");
  const auto& p = j.at("params");
  s.params.omega_c = p.at("omega_c");
  s.params.kappa_c = p.at("kappa_c");
  s.params.kappa_1 = p.at("kappa_1");
  s.params.omega_s = p.at("omega_s");
  s.params.omega_d = p.at("omega_d");
  s.params.gamma_s = p.at("gamma_s");
  s.params.eta_s = p.at("eta_s");
  s.params.chi_s = p.at("chi_s");
  s.params.g_s = p.at("g_s");
  s.params.n_spins = p.at("n_spins");
  s.params.temperature = p.at("temperature");
  const auto& d = j.at("drive");
  s.drive_amplitude = d.at("amplitude");
  s.pulse_amplitude = d.at("pulse_amplitude");
  s.pulse_duration = d.at("pulse_duration");
  s.tail_duration = d.at("tail_duration");
  const auto& g = j.at("grids");
  s.eta_values = g.at("eta_values").get<std::vector<double>>();
  s.map_temperatures = g.at("map_temperatures").get<std::vector<double>>();
  s.map_etas = g.at("map_etas").get<std::vector<double>>();
  s.sweep_span = g.at("sweep_span");
  s.sweep_points = g.at("sweep_points");
  s.spin_detunings = g.at("spin_detunings").get<std::vector<double>>();
  s.drive_offsets = g.at("drive_offsets").get<std::vector<double>>();
  s.sense_span_b = g.at("sense_span_b");
  s.sense_points_b = g.at("sense_points_b");
  s.transient_samples = g.at("transient_samples");
  s.oracle_spin_counts = g.at("oracle_spin_counts").get<std::vector<int>>();
  s.oracle_strong_drive_factor = g.at("oracle_strong_drive_factor");
  const auto& in = j.at("integration");
  s.integ.rel_tol = in.at("rel_tol");
  s.integ.abs_tol = in.at("abs_tol");
  s.integ.max_step = in.at("max_step");
  s.integ.max_steps = in.at("max_steps");
  s.steady.integ = s.integ;
  const auto& st = j.at("steady");
  s.steady.rel_tol = st.at("rel_tol");
  s.steady.window_factor = st.at("window_factor");
  s.steady.time_cap_factor = st.at("time_cap_factor");
  s.use_newton = st.at("method") == "newton";
  s.workers = j.at("workers");
  s.out_dir = j.at("out_dir");
  s.emit_plot_script = j.at("emit_plot_script");
  return s;
}

}  // namespace

ExperimentSpec parse_config(const std::string& path) {
  return build_spec(read_file(path), std::nullopt);
}

ExperimentSpec parse_config(const std::string& path, ExperimentKind kind) {
  return build_spec(read_file(path), kind);
}

RunManifest make_manifest(const ExperimentSpec& spec, const RunDiagnostics& diag) {
  RunManifest m;
  m.tool_version = kVersion;
  m.spec = spec;
  m.wall_time_s = diag.wall_time_s;
  m.total_points = diag.total_points;
  m.nonconverged_points = diag.nonconverged_points;
  m.errors = diag.errors;
  return m;
}

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["tool_version"] = m.tool_version;
  j["run"] = spec_to_json(m.spec);
  j["outcome"] = {{"wall_time_s", m.wall_time_s},
                  {"total_points", m.total_points},
                  {"nonconverged_points", m.nonconverged_points},
                  {"errors", m.errors}};
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  const json j = json::parse(text);
  RunManifest m;
  m.tool_version = j.at("tool_version");
  m.spec = spec_from_json(j.at("run"));
  const auto& o = j.at("outcome");
  m.wall_time_s = o.at("wall_time_s");
  m.total_points = o.at("total_points");
  m.nonconverged_points = o.at("nonconverged_points");
  m.errors = o.at("errors").get<std::vector<std::string>>();
  return m;
}

}  // namespace cqed
