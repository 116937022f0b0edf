#pragma once

/// \file config.hpp
/// Scenario configuration: a line-oriented "key = value" document.
///
/// Grammar
///   document := { line }
///   line     := blank | comment | key "=" value [ comment ]
///   comment  := "#" any text to end of line
///   key      := [a-z0-9_]+
/// Lists are comma separated. Trigonometric polynomials are written
/// "c0; a1, b1; a2, b2; ..." for c0 + a1 cos x + b1 sin x + a2 cos 2x + ...
/// Booleans accept true/false/yes/no/on/off/1/0. Keys may appear once.
///
/// A "preset" key (or, failing that, the scenario) selects the initial data
/// and the defaults listed in preset_defaults(); any later key overrides them
/// regardless of its position in the document.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kolmo/grid.hpp"
#include "kolmo/model.hpp"
#include "kolmo/timestepper.hpp"
#include "kolmo/trig_poly.hpp"

namespace kolmo {

enum class Scenario { uniform, blowup, generic, epsilon_sweep, stability, convergence, toy, oracle_check };

inline const char* to_string(Scenario s) noexcept {
  switch (s) {
    case Scenario::uniform:
      return "uniform";
    case Scenario::blowup:
      return "blowup";
    case Scenario::generic:
      return "generic";
    case Scenario::epsilon_sweep:
      return "epsilon_sweep";
    case Scenario::stability:
      return "stability";
    case Scenario::convergence:
      return "convergence";
    case Scenario::toy:
      return "toy";
    case Scenario::oracle_check:
      return "oracle_check";
  }
  return "unknown";
}

inline std::optional<Scenario> scenario_from_string(const std::string& s) {
  static const std::map<std::string, Scenario> table = {
      {"uniform", Scenario::uniform},         {"blowup", Scenario::blowup},
      {"generic", Scenario::generic},         {"epsilon_sweep", Scenario::epsilon_sweep},
      {"stability", Scenario::stability},     {"convergence", Scenario::convergence},
      {"toy", Scenario::toy},                 {"oracle_check", Scenario::oracle_check}};
  auto it = table.find(s);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

/// Initial data as trigonometric polynomials. Exactly one of beta0 / k0 is
/// used: when k0 is set, beta0 = sqrt(k0) node-wise.
struct InitialData {
  TrigPoly u0 = TrigPoly::constant(0.0);
  TrigPoly omega0 = TrigPoly::constant(1.0);
  TrigPoly beta0 = TrigPoly::constant(1.0);
  std::optional<TrigPoly> k0;
  TrigPoly gamma0 = TrigPoly::constant(1.0);
};

struct ScenarioConfig {
  Scenario scenario = Scenario::generic;
  std::string preset = "generic";
  std::string name;
  std::size_t n_points = 256;
  std::vector<std::size_t> n_points_list;
  double t_final = 1.0;
  Params params;
  StepControl step_control;
  InitialData initial;
  std::vector<double> epsilon_list;
  std::vector<double> delta_list;
  std::string output_dir = "out";
  std::size_t output_stride = 1;
  double k_fit = 0.0;
  double c_cal = 1e-2;
  std::size_t workers = 1;

  std::string label() const { return name.empty() ? std::string(to_string(scenario)) : name; }

  /// Grid sizes used by the scenario: n_points_list if given, else n_points.
  std::vector<std::size_t> grid_sizes() const {
    return n_points_list.empty() ? std::vector<std::size_t>{n_points} : n_points_list;
  }
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline double parse_real(const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("expected a number, got '" + v + "'");
  }
  if (used != v.size()) throw std::invalid_argument("expected a number, got '" + v + "'");
  if (!std::isfinite(x)) throw std::invalid_argument("number must be finite, got '" + v + "'");
  return x;
}

inline std::size_t parse_count(const std::string& v) {
  if (v.empty() || !std::all_of(v.begin(), v.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw std::invalid_argument("expected a nonnegative integer, got '" + v + "'");
  }
  return static_cast<std::size_t>(std::stoull(v));
}

inline bool parse_bool(const std::string& v) {
  std::string s = v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw std::invalid_argument("expected a boolean, got '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw std::invalid_argument("empty list item in '" + v + "'");
    out.push_back(item);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

inline std::vector<double> parse_real_list(const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(parse_real(s));
  return out;
}

inline std::vector<std::size_t> parse_count_list(const std::string& v) {
  std::vector<std::size_t> out;
  for (const auto& s : split_list(v)) out.push_back(parse_count(s));
  return out;
}

}  // namespace detail

/// Applies the defaults of a named preset. Known presets: generic, blowup,
/// uniform, toy, epsilon_sweep, stability, convergence, oracle_check.
inline void apply_preset(ScenarioConfig& c, const std::string& preset) {
  auto trig = [](const char* s) { return TrigPoly::parse(s); };
  c.preset = preset;
  if (preset == "generic" || preset == "stability" || preset == "convergence" || preset == "oracle_check") {
    // u0 = sin x, omega0 = 2 + cos x, beta0 = 1 + cos(x)/2
    c.initial.u0 = trig("0; 0, 1");
    c.initial.omega0 = trig("2; 1, 0");
    c.initial.beta0 = trig("1; 0.5, 0");
    c.initial.k0.reset();
    c.t_final = 1.0;
    c.n_points = 256;
    if (preset == "stability") {
      c.t_final = 0.5;
      c.delta_list = {1e-2, 1e-3, 1e-4};
      c.step_control.sample_interval = 1e-3;
    }
    if (preset == "convergence") c.n_points_list = {128, 256, 512};
  } else if (preset == "blowup" || preset == "epsilon_sweep") {
    // u0 = -sin x, omega0 = 1, k0 = (1 - cos x)^2, i.e. beta0 = 1 - cos x
    c.initial.u0 = trig("0; 0, -1");
    c.initial.omega0 = trig("1");
    c.initial.beta0 = trig("1; -1, 0");
    c.initial.k0.reset();
    c.t_final = 1.1;
    c.n_points = 256;
    if (preset == "blowup") {
      c.n_points_list = {256, 512, 1024};
      c.output_stride = 50;
    }
    if (preset == "epsilon_sweep") {
      c.t_final = 0.5;
      c.epsilon_list = {1e-1, 1e-2, 1e-3};
      c.step_control.sample_interval = 1e-3;
    }
  } else if (preset == "uniform") {
    c.initial.u0 = trig("0");
    c.initial.omega0 = trig("1");
    c.initial.beta0 = trig("1");
    c.initial.k0.reset();
    c.params.alpha2 = 2.0;
    c.t_final = 1.0;
    c.n_points = 64;
  } else if (preset == "toy") {
    // u0 = -sin x, gamma0 = 1 - cos x
    c.initial.u0 = trig("0; 0, -1");
    c.initial.gamma0 = trig("1; -1, 0");
    c.t_final = 1.0;
    c.n_points = 256;
  } else {
    throw std::invalid_argument("unknown preset '" + preset + "'");
  }
}

/// Node values of beta0, from k0 when it is given.
inline Field initial_beta(const InitialData& d, const Grid& g) {
  if (!d.k0) return d.beta0.sample(g);
  Field k = d.k0->sample(g);
  Field b(g);
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (k[j] < 0.0) {
      throw std::invalid_argument("k0 must be nonnegative; k0(" + std::to_string(g.node(j)) +
                                  ") = " + std::to_string(k[j]));
    }
    b[j] = std::sqrt(k[j]);
  }
  return b;
}

inline State initial_state(const ScenarioConfig& c, std::size_t n) {
  const Grid g(n);
  return State(0.0, c.initial.u0.sample(g), c.initial.omega0.sample(g), initial_beta(c.initial, g));
}

inline ToyState initial_toy_state(const ScenarioConfig& c, std::size_t n) {
  const Grid g(n);
  return ToyState(0.0, c.initial.u0.sample(g), c.initial.gamma0.sample(g));
}

/// Checks the invariants of a configuration; throws ConfigError naming the
/// violated hypothesis.
inline void validate(const ScenarioConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError(0, m); };
  try {
    c.params.validate();
    c.step_control.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (!(c.t_final >= 0.0)) fail("t_final must be nonnegative");
  if (c.output_stride == 0) fail("output_stride must be at least 1");
  if (c.workers == 0) fail("workers must be at least 1");
  if (!(c.c_cal > 0.0)) fail("c_cal must be positive");
  if (!(c.k_fit >= 0.0)) fail("k_fit must be nonnegative (0 selects a fitted value)");
  for (std::size_t n : c.grid_sizes()) {
    if (n < 8 || n % 2 != 0) fail("n_points must be even and at least 8, got " + std::to_string(n));
  }
  for (double e : c.epsilon_list) {
    if (!(e > 0.0)) fail("epsilon_list entries must be positive");
  }
  for (double d : c.delta_list) {
    if (!(d > 0.0)) fail("delta_list entries must be positive");
  }
  if (c.scenario == Scenario::epsilon_sweep && c.epsilon_list.empty()) fail("epsilon_sweep needs epsilon_list");
  if (c.scenario == Scenario::stability && c.delta_list.empty()) fail("stability needs delta_list");
  if (c.scenario == Scenario::oracle_check) return;

  for (std::size_t n : c.grid_sizes()) {
    const Grid g(n);
    if (c.scenario == Scenario::toy) {
      const Field gam = c.initial.gamma0.sample(g);
      const Extrema e = extrema(gam);
      if (e.min < 0.0) fail("gamma0 must be nonnegative; min gamma0 = " + std::to_string(e.min));
      continue;
    }
    const Field w = c.initial.omega0.sample(g);
    const Extrema we = extrema(w);
    if (!(we.min > 0.0)) {
      fail("omega0 must be bounded below by a positive constant; min omega0 = " + std::to_string(we.min));
    }
    Field b(g);
    try {
      b = initial_beta(c.initial, g);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    const Extrema be = extrema(b);
    if (be.min < 0.0) fail("beta0 = sqrt(k0) must be nonnegative; min beta0 = " + std::to_string(be.min));
  }

  if (c.scenario == Scenario::blowup) {
    const auto& d = c.initial;
    if (!d.u0.is_odd()) fail("blow-up hypothesis violated: u0 must be odd about x = 0");
    if (!d.omega0.is_even()) fail("blow-up hypothesis violated: omega0 must be even about x = 0");
    if (d.k0 ? !d.k0->is_even() : !d.beta0.is_even()) {
      fail("blow-up hypothesis violated: k0 must be even about x = 0");
    }
    const double k_at_0 = d.k0 ? (*d.k0)(0.0) : d.beta0(0.0) * d.beta0(0.0);
    if (std::abs(k_at_0) > 1e-14) {
      fail("blow-up hypothesis violated: k0(0) must vanish, got " + std::to_string(k_at_0));
    }
    const double slope = d.u0.derivative(1)(0.0);
    if (!(slope < 0.0)) {
      fail("blow-up hypothesis violated: u0'(0) must be negative, got " + std::to_string(slope));
    }
  }
}

/// Every key accepted by parse_config, in documentation order.
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "scenario",      "preset",        "name",          "n_points",
      "n_points_list", "t_final",       "nu",            "alpha1",
      "alpha2",        "alpha3",        "alpha4",        "ell_constant",
      "cfl_advective", "cfl_diffusive", "dt_min",        "dt_max",
      "blowup_grad_threshold", "omega_floor", "beta_tol", "monotone_window",
      "sample_interval", "symmetry_projection", "u0",   "omega0",
      "beta0",         "k0",            "gamma0",        "epsilon_list",
      "delta_list",    "output_dir",    "output_stride", "k_fit",
      "c_cal",         "workers"};
  return keys;
}

/// Parses and validates a configuration document.
inline ScenarioConfig parse_config(const std::string& text) {
  struct Entry {
    std::string value;
    std::size_t line;
  };
  std::map<std::string, Entry> entries;
  const std::set<std::string> known(config_keys().begin(), config_keys().end());

  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value', got '" + line + "'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "missing key before '='");
    if (!known.count(key)) throw ConfigError(line_no, "unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(line_no, "missing value for '" + key + "'");
    if (entries.count(key)) {
      throw ConfigError(line_no, "duplicate key '" + key + "' (first set on line " +
                                     std::to_string(entries[key].line) + ")");
    }
    entries[key] = {value, line_no};
  }

  ScenarioConfig c;
  auto take = [&](const std::string& key, auto&& apply) {
    auto it = entries.find(key);
    if (it == entries.end()) return;
    try {
      apply(it->second.value);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(it->second.line, key + ": " + e.what());
    }
  };

  take("scenario", [&](const std::string& v) {
    auto s = scenario_from_string(v);
    if (!s) throw std::invalid_argument("unknown scenario '" + v + "'");
    c.scenario = *s;
  });
  std::string preset = to_string(c.scenario);
  take("preset", [&](const std::string& v) { preset = v; });
  if (entries.count("preset")) {
    take("preset", [&](const std::string& v) { apply_preset(c, v); });
  } else {
    apply_preset(c, preset);
  }

  take("name", [&](const std::string& v) { c.name = v; });
  take("n_points", [&](const std::string& v) { c.n_points = detail::parse_count(v); });
  take("n_points_list", [&](const std::string& v) { c.n_points_list = detail::parse_count_list(v); });
  take("t_final", [&](const std::string& v) { c.t_final = detail::parse_real(v); });
  take("nu", [&](const std::string& v) { c.params.nu = detail::parse_real(v); });
  take("alpha1", [&](const std::string& v) { c.params.alpha1 = detail::parse_real(v); });
  take("alpha2", [&](const std::string& v) { c.params.alpha2 = detail::parse_real(v); });
  take("alpha3", [&](const std::string& v) { c.params.alpha3 = detail::parse_real(v); });
  take("alpha4", [&](const std::string& v) { c.params.alpha4 = detail::parse_real(v); });
  take("ell_constant", [&](const std::string& v) { c.params.ell_constant = detail::parse_real(v); });
  take("cfl_advective", [&](const std::string& v) { c.step_control.cfl_advective = detail::parse_real(v); });
  take("cfl_diffusive", [&](const std::string& v) { c.step_control.cfl_diffusive = detail::parse_real(v); });
  take("dt_min", [&](const std::string& v) { c.step_control.dt_min = detail::parse_real(v); });
  take("dt_max", [&](const std::string& v) { c.step_control.dt_max = detail::parse_real(v); });
  take("blowup_grad_threshold",
       [&](const std::string& v) { c.step_control.blowup_grad_threshold = detail::parse_real(v); });
  take("omega_floor", [&](const std::string& v) { c.step_control.omega_floor = detail::parse_real(v); });
  take("beta_tol", [&](const std::string& v) { c.step_control.beta_tol = detail::parse_real(v); });
  take("monotone_window", [&](const std::string& v) { c.step_control.monotone_window = detail::parse_count(v); });
  take("sample_interval", [&](const std::string& v) { c.step_control.sample_interval = detail::parse_real(v); });
  take("symmetry_projection",
       [&](const std::string& v) { c.step_control.symmetry_projection = detail::parse_bool(v); });
  take("u0", [&](const std::string& v) { c.initial.u0 = TrigPoly::parse(v); });
  take("omega0", [&](const std::string& v) { c.initial.omega0 = TrigPoly::parse(v); });
  if (entries.count("beta0") && entries.count("k0")) {
    throw ConfigError(std::max(entries["beta0"].line, entries["k0"].line), "give either beta0 or k0, not both");
  }
  take("beta0", [&](const std::string& v) {
    c.initial.beta0 = TrigPoly::parse(v);
    c.initial.k0.reset();
  });
  take("k0", [&](const std::string& v) { c.initial.k0 = TrigPoly::parse(v); });
  take("gamma0", [&](const std::string& v) { c.initial.gamma0 = TrigPoly::parse(v); });
  take("epsilon_list", [&](const std::string& v) { c.epsilon_list = detail::parse_real_list(v); });
  take("delta_list", [&](const std::string& v) { c.delta_list = detail::parse_real_list(v); });
  take("output_dir", [&](const std::string& v) { c.output_dir = v; });
  take("output_stride", [&](const std::string& v) { c.output_stride = detail::parse_count(v); });
  take("k_fit", [&](const std::string& v) { c.k_fit = detail::parse_real(v); });
  take("c_cal", [&](const std::string& v) { c.c_cal = detail::parse_real(v); });
  take("workers", [&](const std::string& v) { c.workers = detail::parse_count(v); });

  // Scenario-specific hypotheses come last so that their errors point at the
  // offending key.
  try {
    validate(c);
  } catch (const ConfigError& e) {
    std::size_t line = 0;
    const std::string msg = e.what();
    auto mentions = [&msg](const std::string& key) {
      auto ident = [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; };
      for (auto p = msg.find(key); p != std::string::npos; p = msg.find(key, p + 1)) {
        const bool left = p == 0 || !ident(msg[p - 1]);
        const bool right = p + key.size() == msg.size() || !ident(msg[p + key.size()]);
        if (left && right) return true;
      }
      return false;
    };
    for (const char* key : {"u0", "omega0", "beta0", "k0", "gamma0"}) {
      if (entries.count(key) && mentions(key)) {
        line = entries[key].line;
        break;
      }
    }
    if (line == 0) {
      for (const auto& [key, entry] : entries) {
        if (msg.rfind(key + " ", 0) == 0) {
          line = entry.line;
          break;
        }
      }
    }
    throw ConfigError(line, msg);
  }
  return c;
}

/// Renders a configuration back into the document grammar, one key per line,
/// in config_keys() order. parse_config(to_text(c)) reproduces c.
inline std::string to_text(const ScenarioConfig& c) {
  std::ostringstream os;
  os.precision(17);
  auto list = [&](const auto& v) {
    std::ostringstream s;
    s.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? ", " : "") << v[i];
    return s.str();
  };
  os << "scenario = " << to_string(c.scenario) << "\n";
  os << "preset = " << c.preset << "\n";
  if (!c.name.empty()) os << "name = " << c.name << "\n";
  os << "n_points = " << c.n_points << "\n";
  if (!c.n_points_list.empty()) os << "n_points_list = " << list(c.n_points_list) << "\n";
  os << "t_final = " << c.t_final << "\n";
  os << "nu = " << c.params.nu << "\n";
  os << "alpha1 = " << c.params.alpha1 << "\n";
  os << "alpha2 = " << c.params.alpha2 << "\n";
  os << "alpha3 = " << c.params.alpha3 << "\n";
  os << "alpha4 = " << c.params.alpha4 << "\n";
  os << "ell_constant = " << c.params.ell_constant << "\n";
  const StepControl& s = c.step_control;
  os << "cfl_advective = " << s.cfl_advective << "\n";
  os << "cfl_diffusive = " << s.cfl_diffusive << "\n";
  os << "dt_min = " << s.dt_min << "\n";
  os << "dt_max = " << s.dt_max << "\n";
  os << "blowup_grad_threshold = " << s.blowup_grad_threshold << "\n";
  os << "omega_floor = " << s.omega_floor << "\n";
  os << "beta_tol = " << s.beta_tol << "\n";
  os << "monotone_window = " << s.monotone_window << "\n";
  os << "sample_interval = " << s.sample_interval << "\n";
  os << "symmetry_projection = " << (s.symmetry_projection ? "true" : "false") << "\n";
  os << "u0 = " << c.initial.u0.to_string() << "\n";
  os << "omega0 = " << c.initial.omega0.to_string() << "\n";
  if (c.initial.k0) {
    os << "k0 = " << c.initial.k0->to_string() << "\n";
  } else {
    os << "beta0 = " << c.initial.beta0.to_string() << "\n";
  }
  os << "gamma0 = " << c.initial.gamma0.to_string() << "\n";
  if (!c.epsilon_list.empty()) os << "epsilon_list = " << list(c.epsilon_list) << "\n";
  if (!c.delta_list.empty()) os << "delta_list = " << list(c.delta_list) << "\n";
  os << "output_dir = " << c.output_dir << "\n";
  os << "output_stride = " << c.output_stride << "\n";
  os << "k_fit = " << c.k_fit << "\n";
  os << "c_cal = " << c.c_cal << "\n";
  os << "workers = " << c.workers << "\n";
  return os.str();
}

}  // namespace kolmo
