#pragma once

/// \file experiments.hpp
/// Scenario execution: audited runs, sweeps over a worker pool, refinement
/// studies and the files they produce (CSV time series, JSON summaries and
/// whitespace-separated plot columns).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kolmo/config.hpp"
#include "kolmo/diagnostics.hpp"
#include "kolmo/grid.hpp"
#include "kolmo/model.hpp"
#include "kolmo/oracles.hpp"
#include "kolmo/timestepper.hpp"
#include "kolmo/trig_poly.hpp"
#include "kolmo/version.hpp"

namespace kolmo {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Serialization helpers

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_header() {
  std::string s;
  for (auto name : DiagnosticsRow::column_names()) {
    if (!s.empty()) s += ',';
    s += name;
  }
  return s;
}

inline std::string csv_line(const DiagnosticsRow& r) {
  std::string s;
  for (double v : r.values()) {
    if (!s.empty()) s += ',';
    s += format_g17(v);
  }
  return s;
}

inline Json row_to_json(const DiagnosticsRow& r) {
  Json j = Json::object();
  const auto names = DiagnosticsRow::column_names();
  const auto vals = r.values();
  for (std::size_t i = 0; i < names.size(); ++i) j[std::string(names[i])] = vals[i];
  return j;
}

/// Finite doubles as numbers, everything else as null.
inline Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json config_to_json(const ScenarioConfig& c) {
  Json j = Json::object();
  j["scenario"] = to_string(c.scenario);
  j["preset"] = c.preset;
  j["name"] = c.name;
  j["n_points"] = c.n_points;
  j["n_points_list"] = c.n_points_list;
  j["t_final"] = c.t_final;
  j["params"] = {{"nu", c.params.nu},         {"alpha1", c.params.alpha1}, {"alpha2", c.params.alpha2},
                 {"alpha3", c.params.alpha3}, {"alpha4", c.params.alpha4}, {"ell_constant", c.params.ell_constant}};
  const StepControl& s = c.step_control;
  j["step_control"] = {{"cfl_advective", s.cfl_advective},
                       {"cfl_diffusive", s.cfl_diffusive},
                       {"dt_min", s.dt_min},
                       {"dt_max", s.dt_max},
                       {"blowup_grad_threshold", s.blowup_grad_threshold},
                       {"omega_floor", s.omega_floor},
                       {"beta_tol", s.beta_tol},
                       {"monotone_window", s.monotone_window},
                       {"sample_interval", s.sample_interval},
                       {"symmetry_projection", s.symmetry_projection}};
  Json init = Json::object();
  init["u0"] = c.initial.u0.to_string();
  init["omega0"] = c.initial.omega0.to_string();
  if (c.initial.k0) {
    init["k0"] = c.initial.k0->to_string();
  } else {
    init["beta0"] = c.initial.beta0.to_string();
  }
  init["gamma0"] = c.initial.gamma0.to_string();
  j["initial_data"] = init;
  j["epsilon_list"] = c.epsilon_list;
  j["delta_list"] = c.delta_list;
  j["output_stride"] = c.output_stride;
  j["k_fit"] = c.k_fit;
  j["c_cal"] = c.c_cal;
  return j;
}

// ---------------------------------------------------------------------------
// Small numerical helpers for refinement studies

/// log2(e_coarse / e_fine): the observed order for a halving of the mesh.
inline double observed_order(double e_coarse, double e_fine) {
  return std::log2(std::abs(e_coarse) / std::abs(e_fine));
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< root-mean-square residual
};

inline LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares: need two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LinearFit f;
  const double den = n * sxx - sx * sx;
  f.slope = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
  f.intercept = (sy - f.slope * sx) / n;
  double r2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    r2 += r * r;
  }
  f.residual = std::sqrt(r2 / n);
  return f;
}

/// Richardson extrapolation of a sequence on meshes refined by 2.
struct Richardson {
  bool valid = false;
  double order = 0.0;
  double limit = 0.0;
  std::vector<double> differences;
};

inline Richardson richardson(const std::vector<double>& v) {
  Richardson r;
  for (std::size_t i = 1; i < v.size(); ++i) r.differences.push_back(v[i] - v[i - 1]);
  if (v.size() < 3) return r;
  const double d1 = r.differences[r.differences.size() - 2];
  const double d2 = r.differences.back();
  if (d1 == 0.0 || d2 == 0.0 || (d1 > 0) != (d2 > 0)) return r;
  r.order = std::log2(d1 / d2);
  if (!(r.order > 0.0) || !std::isfinite(r.order)) return r;
  r.limit = v.back() + d2 / (std::pow(2.0, r.order) - 1.0);
  r.valid = true;
  return r;
}

/// Second-order derivative of samples f(t_i) on a nonuniform grid at an
/// interior index i.
inline double centered_derivative(const std::vector<double>& t, const std::vector<double>& f, std::size_t i) {
  const double h1 = t[i] - t[i - 1];
  const double h2 = t[i + 1] - t[i];
  return (h1 * h1 * f[i + 1] - h2 * h2 * f[i - 1] + (h2 * h2 - h1 * h1) * f[i]) / (h1 * h2 * (h1 + h2));
}

/// Exact right-hand side of the beta form for trigonometric-polynomial data,
/// evaluated from exact derivatives. Used as the reference in spatial
/// convergence studies.
inline BetaRhs exact_rhs_beta(const TrigPoly& u, const TrigPoly& w, const TrigPoly& b, const Params& p,
                              const Grid& g) {
  const TrigPoly u1 = u.derivative(1), u2 = u.derivative(2);
  const TrigPoly w1 = w.derivative(1), w2 = w.derivative(2);
  const TrigPoly b1 = b.derivative(1), b2 = b.derivative(2);
  BetaRhs r{Field(g), Field(g), Field(g)};
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = g.node(j);
    const double U = u(x), Ux = u1(x), Uxx = u2(x);
    const double W = w(x), Wx = w1(x), Wxx = w2(x);
    const double B = b(x), Bx = b1(x), Bxx = b2(x);
    const double c = B * B / W;
    const double cx = 2.0 * B * Bx / W - B * B * Wx / (W * W);
    r.du[j] = -U * Ux + p.nu * (cx * Ux + c * Uxx);
    r.domega[j] = -U * Wx + p.alpha1 * (cx * Wx + c * Wxx) - p.alpha2 * W * W;
    r.dbeta[j] = -U * Bx + p.alpha3 * (cx * Bx + c * Bxx) - 0.5 * B * W + 0.5 * p.alpha4 * (B / W) * Ux * Ux +
                 p.alpha3 * (B / W) * Bx * Bx;
  }
  return r;
}

inline double max_node_error(const BetaRhs& a, const BetaRhs& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.du.size(); ++j) {
    m = std::max({m, std::abs(a.du[j] - b.du[j]), std::abs(a.domega[j] - b.domega[j]),
                  std::abs(a.dbeta[j] - b.dbeta[j])});
  }
  return m;
}

// ---------------------------------------------------------------------------
// Audited runs

/// Everything a single audited trajectory reports.
struct MemberSummary {
  std::string label;
  double parameter = 0.0;
  std::size_t n_points = 0;
  RunStatus status = RunStatus::completed;
  double t_end = 0.0;
  std::string reason;
  std::size_t steps = 0;
  DiagnosticsRow initial;
  DiagnosticsRow terminal;
  double lifespan_bound = 0.0;
  double max_mean_drift = 0.0;
  double max_envelope_violation = 0.0;
  double cont_integral = 0.0;
  double a_integral = 0.0;
  double omega_l3_cubed_integral = 0.0;
  Json extra = Json::object();
  std::vector<std::string> files;

  Json to_json() const {
    Json j = Json::object();
    j["label"] = label;
    j["parameter"] = num(parameter);
    j["n_points"] = n_points;
    j["status"] = to_string(status);
    j["t_end"] = num(t_end);
    j["reason"] = reason;
    j["steps"] = steps;
    Json term = Json::object();
    const auto names = DiagnosticsRow::column_names();
    const auto vals = terminal.values();
    for (std::size_t i = 0; i < names.size(); ++i) term[std::string(names[i])] = num(vals[i]);
    j["terminal"] = term;
    j["lifespan_lower_bound"] = num(lifespan_bound);
    j["lifespan_bound_contradicted"] = status == RunStatus::blowup_detected && t_end < lifespan_bound;
    j["max_mean_drift"] = num(max_mean_drift);
    j["max_envelope_violation"] = num(max_envelope_violation);
    j["integrals"] = {{"cont_integrand", num(cont_integral)},
                      {"a_function", num(a_integral)},
                      {"omega_l3_cubed", num(omega_l3_cubed_integral)}};
    if (!extra.empty()) j["extra"] = extra;
    j["files"] = files;
    return j;
  }
};

using RowHook = std::function<void(const State* prev, const State& cur, const DiagnosticsRow& row)>;

namespace detail {

class CsvSink {
 public:
  CsvSink(const std::string& path, std::size_t stride) : stride_(stride) {
    if (path.empty()) return;
    out_.open(path, std::ios::out | std::ios::trunc | std::ios::binary);
    if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
    out_ << csv_header() << '\n';
  }

  void add(const DiagnosticsRow& r) {
    if (!out_.is_open()) return;
    if (count_ % stride_ == 0) {
      out_ << csv_line(r) << '\n';
      wrote_last_ = true;
    } else {
      pending_ = r;
      wrote_last_ = false;
    }
    ++count_;
  }

  void finish() {
    if (!out_.is_open()) return;
    if (!wrote_last_ && count_ > 0) out_ << csv_line(pending_) << '\n';
    out_.close();
  }

 private:
  std::ofstream out_;
  std::size_t stride_;
  std::size_t count_ = 0;
  bool wrote_last_ = true;
  DiagnosticsRow pending_;
};

}  // namespace detail

/// Integrates s0 while auditing every accepted state; optionally writes the
/// CSV (every output_stride-th row plus the last) and forwards rows to hook.
inline MemberSummary run_member(const ScenarioConfig& cfg, const State& s0, std::string label, double parameter,
                                const std::string& csv_path, const RowHook& hook = {}) {
  MemberSummary m;
  m.label = std::move(label);
  m.parameter = parameter;
  m.n_points = s0.grid().size();
  m.lifespan_bound = lifespan_lower_bound(s0, cfg.params, cfg.c_cal);
  detail::CsvSink sink(csv_path, cfg.output_stride);
  AuditAccumulator acc;
  bool first = true;
  auto observer = [&](const State* prev, const State& cur) {
    const DiagnosticsRow row = audit_step(prev, cur, cfg.params, acc);
    if (first) {
      m.initial = row;
      first = false;
    }
    m.terminal = row;
    sink.add(row);
    if (hook) hook(prev, cur, row);
  };
  const RunReport rep = integrate(s0, cfg.params, cfg.step_control, cfg.t_final, observer);
  sink.finish();
  m.status = rep.status;
  m.t_end = rep.t_end;
  m.reason = rep.reason;
  m.steps = rep.steps_taken;
  m.max_mean_drift = acc.max_abs_mean_drift;
  m.max_envelope_violation = acc.max_envelope_violation;
  m.cont_integral = acc.cont_integral();
  m.a_integral = acc.a_integral();
  m.omega_l3_cubed_integral = acc.omega_l3_cubed_integral();
  if (!csv_path.empty()) m.files.push_back(csv_path);
  return m;
}

/// Runs task(i) for i in [0, count) on up to `workers` threads. Results are
/// stored by index, so the outcome does not depend on scheduling. A task that
/// throws yields the value produced by on_error(i, message).
template <class R, class Task, class OnError>
std::vector<R> run_pool(std::size_t count, std::size_t workers, Task&& task, OnError&& on_error) {
  std::vector<std::unique_ptr<R>> slots(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        slots[i] = std::make_unique<R>(task(i));
      } catch (const std::exception& e) {
        slots[i] = std::make_unique<R>(on_error(i, std::string(e.what())));
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(workers, count));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---------------------------------------------------------------------------
// Scenario execution

struct SweepSummary {
  ScenarioConfig config;
  std::vector<MemberSummary> members;
  Json analysis = Json::object();
  std::vector<std::string> files;

  Json to_json() const {
    Json j = Json::object();
    j["artifact"] = "kolmo";
    j["version"] = version;
    j["scenario"] = to_string(config.scenario);
    j["label"] = config.label();
    if (members.size() == 1) {
      const MemberSummary& m = members.front();
      j["status"] = to_string(m.status);
      j["t_end"] = num(m.t_end);
      j["reason"] = m.reason;
      j["steps"] = m.steps;
      j["terminal"] = m.to_json()["terminal"];
    }
    j["config"] = config_to_json(config);
    Json ms = Json::array();
    for (const auto& m : members) ms.push_back(m.to_json());
    j["members"] = ms;
    j["analysis"] = analysis;
    j["files"] = files;
    return j;
  }
};

struct RunOptions {
  std::string output_dir;  ///< overrides the config when non-empty
  std::size_t workers = 0;  ///< overrides the config when nonzero
  bool write_files = true;
  std::function<void(const std::string&)> log;
};

namespace detail {

struct Context {
  const ScenarioConfig& cfg;
  std::filesystem::path dir;
  bool write;
  std::size_t workers;
  std::function<void(const std::string&)> log;

  std::string path(const std::string& file) const { return write ? (dir / file).string() : std::string(); }
  void say(const std::string& s) const {
    if (log) log(s);
  }
};

inline std::string tag_n(std::size_t n) { return "n" + std::to_string(n); }

inline std::string tag_value(const char* prefix, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%.3g", prefix, v);
  std::string s = buf;
  for (char& c : s) {
    if (c == '+') c = 'p';
  }
  return s;
}

inline MemberSummary failed_member(const std::string& label, double parameter, const std::string& why) {
  MemberSummary m;
  m.label = label;
  m.parameter = parameter;
  m.status = RunStatus::scheme_failure;
  m.t_end = std::numeric_limits<double>::quiet_NaN();
  m.reason = "exception: " + why;
  return m;
}

class ColumnFile {
 public:
  explicit ColumnFile(const std::string& path, const std::string& header) {
    if (path.empty()) return;
    out_.open(path, std::ios::out | std::ios::trunc | std::ios::binary);
    if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
    out_ << "# " << header << '\n';
  }
  void row(std::initializer_list<double> values) {
    if (!out_.is_open()) return;
    bool firstv = true;
    for (double v : values) {
      if (!firstv) out_ << ' ';
      out_ << (std::isfinite(v) ? format_g17(v) : std::string("nan"));
      firstv = false;
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

/// Per-step samples kept in memory for plot files and Riccati analysis.
struct Trace {
  std::vector<double> t, xi, a, k_zero, omega_min, omega_max, k_min, cont;
  void add(const State& s, const DiagnosticsRow& r, double cont_integral) {
    const std::size_t j0 = s.grid().zero_index();
    t.push_back(r.t);
    xi.push_back(r.xi);
    a.push_back(r.a_ricc);
    k_zero.push_back(s.beta[j0] * s.beta[j0]);
    omega_min.push_back(r.omega_min);
    omega_max.push_back(r.omega_max);
    k_min.push_back(r.k_min);
    cont.push_back(cont_integral);
  }
};

inline double interpolate_at(const std::vector<double>& t, const std::vector<double>& f, double at) {
  if (t.empty() || at < t.front() || at > t.back()) return std::numeric_limits<double>::quiet_NaN();
  auto it = std::lower_bound(t.begin(), t.end(), at);
  const std::size_t i = static_cast<std::size_t>(it - t.begin());
  if (t[i] == at || i == 0) return f[i];
  const double w = (at - t[i - 1]) / (t[i] - t[i - 1]);
  return (1.0 - w) * f[i - 1] + w * f[i];
}

/// Writes the xi / Riccati overlay and the envelope columns; returns a JSON
/// note about the overlay.
inline Json write_trace_files(const Context& ctx, const std::string& stem, const Trace& tr, const Envelope& env,
                              double xi0, std::vector<std::string>& files) {
  Json note = Json::object();
  TimeSeries riccati;
  bool have_riccati = false;
  if (!tr.t.empty()) {
    TimeSeries a;
    for (std::size_t i = 0; i < tr.t.size(); ++i) a.push(tr.t[i], tr.a[i]);
    try {
      riccati = riccati_solve(xi0, a);
      have_riccati = true;
      note["riccati_overlay"] = "computed";
    } catch (const std::domain_error& e) {
      note["riccati_overlay"] = std::string("skipped: ") + e.what();
    }
  }
  if (!ctx.write) return note;
  const std::size_t stride = ctx.cfg.output_stride;
  {
    const std::string p = ctx.path(stem + "_xi.dat");
    ColumnFile f(p, "t xi riccati_bound riccati_solve");
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
      if (i % stride != 0 && i + 1 != tr.t.size()) continue;
      double bound = std::numeric_limits<double>::quiet_NaN();
      if (xi0 < 0.0 && tr.t[i] < 1.0 / -xi0) bound = riccati_bound(xi0, tr.t[i]);
      const double rs = have_riccati && i < riccati.size() ? riccati.value[i] : std::numeric_limits<double>::quiet_NaN();
      f.row({tr.t[i], tr.xi[i], bound, rs});
    }
    files.push_back(p);
  }
  {
    const std::string p = ctx.path(stem + "_envelopes.dat");
    ColumnFile f(p, "t omega_min omega_max omega_lower omega_upper k_min k_lower");
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
      if (i % stride != 0 && i + 1 != tr.t.size()) continue;
      const double t = tr.t[i] - tr.t.front();
      f.row({tr.t[i], tr.omega_min[i], tr.omega_max[i], env.omega_lower(t), env.omega_upper(t), tr.k_min[i],
             env.k_lower(t)});
    }
    files.push_back(p);
  }
  return note;
}

/// Blow-up diagnostics of one trace: comparison with the a = 0 Riccati
/// bound, sign of a, k at the zero node and the xi equation residual.
inline Json riccati_analysis(const Trace& tr, double xi0) {
  Json j = Json::object();
  double bound_margin = -std::numeric_limits<double>::infinity();
  double bound_margin_t = std::numeric_limits<double>::quiet_NaN();
  const double t_check = 0.95;
  double a_min = std::numeric_limits<double>::infinity();
  double k0_max = 0.0;
  double rel_max = 0.0;
  double rel_t = std::numeric_limits<double>::quiet_NaN();
  std::size_t rel_count = 0;
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    const double t = tr.t[i];
    if (xi0 < 0.0 && t <= t_check && t < 1.0 / -xi0) {
      const double m = tr.xi[i] - riccati_bound(xi0, t);
      if (m > bound_margin) {
        bound_margin = m;
        bound_margin_t = t;
      }
    }
    a_min = std::min(a_min, tr.a[i]);
    k0_max = std::max(k0_max, std::abs(tr.k_zero[i]));
    if (i > 0 && i + 1 < tr.t.size() && std::abs(tr.xi[i]) <= 100.0) {
      const double meas = centered_derivative(tr.t, tr.xi, i);
      const double model = -tr.xi[i] * tr.xi[i] + tr.a[i] * tr.xi[i];
      const double rel = std::abs(meas - model) / std::max(std::abs(model), 1e-300);
      ++rel_count;
      if (rel > rel_max) {
        rel_max = rel;
        rel_t = t;
      }
    }
  }
  j["xi0"] = xi0;
  j["riccati_bound_check_until"] = t_check;
  j["max_xi_minus_bound"] = num(bound_margin);
  j["max_xi_minus_bound_at"] = num(bound_margin_t);
  j["min_a_ricc"] = num(a_min);
  j["max_abs_k_at_zero"] = num(k0_max);
  j["xi_equation_max_rel_error"] = num(rel_max);
  j["xi_equation_max_rel_error_at"] = num(rel_t);
  j["xi_equation_samples"] = rel_count;
  j["min_xi"] = tr.xi.empty() ? Json(nullptr) : num(*std::min_element(tr.xi.begin(), tr.xi.end()));
  j["cont_integral_at_0.5"] = num(interpolate_at(tr.t, tr.cont, 0.5));
  j["cont_integral_final"] = tr.cont.empty() ? Json(nullptr) : num(tr.cont.back());
  return j;
}

// ---- individual scenarios --------------------------------------------------

/// Single runs (generic, uniform, blowup ladders): one member per grid size.
inline SweepSummary run_ladder(const Context& ctx) {
  const ScenarioConfig& cfg = ctx.cfg;
  SweepSummary sum{cfg, {}, Json::object(), {}};
  const std::vector<std::size_t> sizes = cfg.grid_sizes();
  const std::string base = cfg.label();
  const double xi0 = cfg.initial.u0.derivative(1)(0.0);

  struct Result {
    MemberSummary m;
    Json riccati;
  };
  auto results = run_pool<Result>(
      sizes.size(), ctx.workers,
      [&](std::size_t i) {
        const std::size_t n = sizes[i];
        const std::string stem = sizes.size() == 1 ? base : base + "_" + tag_n(n);
        ctx.say("running " + stem);
        Trace tr;
        double cont = 0.0;
        TimeIntegral cont_int;
        RowHook hook = [&](const State*, const State& cur, const DiagnosticsRow& row) {
          cont_int.add(row.t, row.cont_integrand);
          cont = cont_int.value();
          tr.add(cur, row, cont);
        };
        MemberSummary m = run_member(cfg, initial_state(cfg, n), stem, static_cast<double>(n),
                                     ctx.path(stem + ".csv"), hook);
        const State s0 = initial_state(cfg, n);
        const Extrema w = extrema(s0.omega);
        const Envelope env{w.min, w.max, extrema(s0.k()).min, cfg.params.alpha2};
        Json note = write_trace_files(ctx, stem, tr, env, xi0, m.files);
        Result r{std::move(m), riccati_analysis(tr, xi0)};
        for (auto& [k, v] : note.items()) r.riccati[k] = v;
        r.m.extra = r.riccati;
        return r;
      },
      [&](std::size_t i, const std::string& why) {
        return Result{failed_member(base + "_" + tag_n(sizes[i]), static_cast<double>(sizes[i]), why), Json::object()};
      });

  std::vector<double> t_ends;
  bool all_blowup = true;
  for (auto& r : results) {
    t_ends.push_back(r.m.t_end);
    all_blowup = all_blowup && r.m.status == RunStatus::blowup_detected;
    sum.members.push_back(std::move(r.m));
  }

  if (cfg.scenario == Scenario::blowup) {
    Json a = Json::object();
    a["all_members_blew_up"] = all_blowup;
    Json te = Json::array();
    for (double t : t_ends) te.push_back(num(t));
    a["t_end"] = te;
    const Richardson rich = richardson(t_ends);
    Json d = Json::array();
    for (double x : rich.differences) d.push_back(num(x));
    a["t_end_differences"] = d;
    a["richardson_valid"] = all_blowup && rich.valid;
    a["richardson_order"] = num(rich.valid ? rich.order : std::numeric_limits<double>::quiet_NaN());
    a["extrapolated_t0"] = num(all_blowup && rich.valid ? rich.limit : std::numeric_limits<double>::quiet_NaN());
    a["riccati_divergence_time"] = xi0 < 0.0 ? Json(1.0 / -xi0) : Json(nullptr);
    sum.analysis = a;
  } else if (cfg.scenario == Scenario::uniform) {
    Json a = Json::array();
    for (const auto& m : sum.members) {
      const UniformSolution ex = uniform_exact(cfg.initial.u0(0.0), cfg.initial.omega0(0.0),
                                               cfg.initial.beta0(0.0) * cfg.initial.beta0(0.0), cfg.params, m.t_end);
      Json e = Json::object();
      e["n_points"] = m.n_points;
      e["t"] = num(m.t_end);
      e["omega_exact"] = ex.omega;
      e["omega_computed_min"] = num(m.terminal.omega_min);
      e["omega_computed_max"] = num(m.terminal.omega_max);
      e["omega_rel_error"] = num(std::max(std::abs(m.terminal.omega_min - ex.omega),
                                          std::abs(m.terminal.omega_max - ex.omega)) /
                                 ex.omega);
      e["k_exact"] = ex.k;
      e["k_computed_min"] = num(m.terminal.k_min);
      e["k_computed_max"] = num(m.terminal.k_max);
      e["k_rel_error"] = ex.k > 0.0 ? num(std::max(std::abs(m.terminal.k_min - ex.k),
                                                   std::abs(m.terminal.k_max - ex.k)) /
                                          ex.k)
                                    : num(std::max(std::abs(m.terminal.k_min), std::abs(m.terminal.k_max)));
      a.push_back(e);
    }
    sum.analysis["uniform_exact_comparison"] = a;
  }
  if (sizes.size() >= 2) {
    Json orders = Json::array();
    for (std::size_t i = 1; i < sum.members.size(); ++i) {
      if (sum.members[i].n_points != 2 * sum.members[i - 1].n_points) continue;
      orders.push_back({{"n_coarse", sum.members[i - 1].n_points},
                        {"n_fine", sum.members[i].n_points},
                        {"envelope_margin_order", num(observed_order(sum.members[i - 1].max_envelope_violation,
                                                                     sum.members[i].max_envelope_violation))}});
    }
    sum.analysis["refinement"] = orders;
  }
  return sum;
}

struct Snapshots {
  std::vector<double> t;
  std::vector<State> states;
};

inline RowHook snapshot_hook(Snapshots& snaps, double interval) {
  return [&snaps, interval](const State*, const State& cur, const DiagnosticsRow&) {
    if (interval <= 0.0) {
      snaps.t.push_back(cur.time);
      snaps.states.push_back(cur);
      return;
    }
    const double m = cur.time / interval;
    if (std::abs(m - std::round(m)) <= 1e-9 * std::max(1.0, m)) {
      snaps.t.push_back(cur.time);
      snaps.states.push_back(cur);
    }
  };
}

inline SweepSummary run_epsilon_sweep(const Context& ctx) {
  const ScenarioConfig& cfg = ctx.cfg;
  SweepSummary sum{cfg, {}, Json::object(), {}};
  std::vector<double> eps = cfg.epsilon_list;
  std::sort(eps.begin(), eps.end(), std::greater<double>());
  std::vector<double> params = {0.0};
  params.insert(params.end(), eps.begin(), eps.end());
  const std::size_t n = cfg.n_points;
  const std::string base = cfg.label();

  struct Result {
    MemberSummary m;
    Snapshots snaps;
  };
  auto results = run_pool<Result>(
      params.size(), ctx.workers,
      [&](std::size_t i) {
        const double e = params[i];
        const std::string stem = base + "_" + tag_value("eps", e);
        ctx.say("running " + stem);
        State s0 = initial_state(cfg, n);
        s0.beta += e;
        Result r{MemberSummary{}, {}};
        r.m = run_member(cfg, s0, stem, e, ctx.path(stem + ".csv"),
                         snapshot_hook(r.snaps, cfg.step_control.sample_interval));
        return r;
      },
      [&](std::size_t i, const std::string& why) {
        return Result{failed_member(base + "_" + tag_value("eps", params[i]), params[i], why), {}};
      });

  const Snapshots& ref = results.front().snaps;
  Json gaps = Json::array();
  std::vector<double> lx, ly, gap_values;
  for (std::size_t i = 1; i < results.size(); ++i) {
    const Snapshots& s = results[i].snaps;
    double gap = 0.0;
    double gap_t = 0.0;
    std::size_t common = 0;
    for (std::size_t a = 0, b = 0; a < ref.t.size() && b < s.t.size();) {
      if (ref.t[a] < s.t[b]) {
        ++a;
      } else if (s.t[b] < ref.t[a]) {
        ++b;
      } else {
        const Field d = s.states[b].k() - ref.states[a].k();
        const double g = norm(d, Norm::L2);
        if (g > gap) {
          gap = g;
          gap_t = ref.t[a];
        }
        ++common;
        ++a;
        ++b;
      }
    }
    gaps.push_back({{"epsilon", params[i]},
                    {"sup_l2_gap_k", num(gap)},
                    {"attained_at", num(gap_t)},
                    {"common_samples", common},
                    {"status", to_string(results[i].m.status)}});
    gap_values.push_back(gap);
    if (gap > 0.0) {
      lx.push_back(std::log(params[i]));
      ly.push_back(std::log(gap));
    }
  }
  sum.analysis["baseline_status"] = to_string(results.front().m.status);
  sum.analysis["gaps"] = gaps;
  bool decreasing = gap_values.size() >= 2;
  for (std::size_t i = 1; i < gap_values.size(); ++i) decreasing = decreasing && gap_values[i] < gap_values[i - 1];
  sum.analysis["strictly_decreasing"] = decreasing;
  Json ratios = Json::array();
  for (std::size_t i = 1; i < gap_values.size(); ++i) ratios.push_back(num(gap_values[i] / gap_values[i - 1]));
  sum.analysis["successive_ratios"] = ratios;
  if (lx.size() >= 2) {
    const LinearFit f = least_squares(lx, ly);
    sum.analysis["empirical_rate"] = num(f.slope);
    sum.analysis["rate_fit_residual"] = num(f.residual);
  }
  for (auto& r : results) sum.members.push_back(std::move(r.m));
  return sum;
}

inline SweepSummary run_stability(const Context& ctx) {
  const ScenarioConfig& cfg = ctx.cfg;
  SweepSummary sum{cfg, {}, Json::object(), {}};
  std::vector<double> deltas = cfg.delta_list;
  std::sort(deltas.begin(), deltas.end(), std::greater<double>());
  std::vector<double> params = {0.0};
  params.insert(params.end(), deltas.begin(), deltas.end());
  const std::size_t n = cfg.n_points;
  const std::string base = cfg.label();

  struct Result {
    MemberSummary m;
    Snapshots snaps;
  };
  auto results = run_pool<Result>(
      params.size(), ctx.workers,
      [&](std::size_t i) {
        const double d = params[i];
        const std::string stem = base + "_" + tag_value("delta", d);
        ctx.say("running " + stem);
        State s0 = initial_state(cfg, n);
        if (d != 0.0) {
          for (std::size_t j = 0; j < n; ++j) s0.u[j] += d * std::sin(s0.grid().node(j));
        }
        Result r{MemberSummary{}, {}};
        r.m = run_member(cfg, s0, stem, d, ctx.path(stem + ".csv"),
                         snapshot_hook(r.snaps, cfg.step_control.sample_interval));
        return r;
      },
      [&](std::size_t i, const std::string& why) {
        return Result{failed_member(base + "_" + tag_value("delta", params[i]), params[i], why), {}};
      });

  const Snapshots& ref = results.front().snaps;
  // For every delta: log(E(t)/E(0)) and int theta on the common samples.
  struct Curve {
    std::vector<double> t, e, t1, t2, t3, log_ratio, theta_int;
  };
  std::vector<Curve> curves(results.size());
  for (std::size_t i = 1; i < results.size(); ++i) {
    const Snapshots& s = results[i].snaps;
    PairAccumulator acc;
    Curve& c = curves[i];
    for (std::size_t a = 0, b = 0; a < ref.t.size() && b < s.t.size();) {
      if (ref.t[a] < s.t[b]) {
        ++a;
      } else if (s.t[b] < ref.t[a]) {
        ++b;
      } else {
        const StabilityRow row = audit_pair(s.states[b], ref.states[a], cfg.params, 0.0, acc);
        c.t.push_back(row.t);
        c.e.push_back(row.e_stab);
        c.t1.push_back(row.theta1);
        c.t2.push_back(row.theta2);
        c.t3.push_back(row.theta3);
        c.log_ratio.push_back(std::log(row.e_stab / acc.e_stab0));
        c.theta_int.push_back(acc.theta_sum.value());
        ++a;
        ++b;
      }
    }
  }

  auto local_fit = [](const Curve& c) {
    double k = 0.0;
    for (std::size_t j = 0; j < c.t.size(); ++j) {
      if (c.theta_int[j] > 0.0) k = std::max(k, c.log_ratio[j] / c.theta_int[j]);
    }
    return k;
  };
  // Fit on the largest delta and audit every delta with that constant,
  // rounded up to three significant digits.
  double k_fit = cfg.k_fit;
  bool fitted = false;
  if (!(k_fit > 0.0) && results.size() > 1) {
    const double raw = local_fit(curves[1]);
    if (raw > 0.0) {
      const double scale = std::pow(10.0, std::floor(std::log10(raw)) - 2.0);
      k_fit = std::ceil(raw / scale) * scale;
    } else {
      k_fit = 0.0;
    }
    fitted = true;
  }

  Json per = Json::array();
  std::vector<double> amplification;
  for (std::size_t i = 1; i < results.size(); ++i) {
    const Curve& c = curves[i];
    const double d = params[i];
    double max_ratio = 0.0;
    std::string path = ctx.path(base + "_" + tag_value("delta", d) + "_stability.csv");
    std::ofstream out;
    if (!path.empty()) {
      out.open(path, std::ios::out | std::ios::trunc | std::ios::binary);
      out << "t,e_stab,theta1,theta2,theta3,gronwall_ratio\n";
      results[i].m.files.push_back(path);
    }
    for (std::size_t j = 0; j < c.t.size(); ++j) {
      const double ratio = c.e[j] == 0.0 ? 0.0 : std::exp(c.log_ratio[j] - k_fit * c.theta_int[j]);
      max_ratio = std::max(max_ratio, ratio);
      if (out.is_open() && (j % ctx.cfg.output_stride == 0 || j + 1 == c.t.size())) {
        out << format_g17(c.t[j]) << ',' << format_g17(c.e[j]) << ',' << format_g17(c.t1[j]) << ','
            << format_g17(c.t2[j]) << ',' << format_g17(c.t3[j]) << ',' << format_g17(ratio) << '\n';
      }
    }
    const double amp = c.e.empty() ? std::numeric_limits<double>::quiet_NaN() : std::sqrt(c.e.back()) / d;
    amplification.push_back(amp);
    per.push_back({{"delta", d},
                   {"samples", c.t.size()},
                   {"t_last", c.t.empty() ? Json(nullptr) : num(c.t.back())},
                   {"e_stab_initial", c.e.empty() ? Json(nullptr) : num(c.e.front())},
                   {"e_stab_final", c.e.empty() ? Json(nullptr) : num(c.e.back())},
                   {"amplification", num(amp)},
                   {"local_k", num(local_fit(c))},
                   {"max_gronwall_ratio", num(max_ratio)},
                   {"status", to_string(results[i].m.status)}});
  }
  double amp_min = std::numeric_limits<double>::infinity(), amp_max = 0.0;
  for (double a : amplification) {
    amp_min = std::min(amp_min, a);
    amp_max = std::max(amp_max, a);
  }
  sum.analysis["k_fit"] = num(k_fit);
  sum.analysis["k_fit_source"] = fitted ? "fitted on the largest delta, rounded up to 3 digits" : "config";
  sum.analysis["per_delta"] = per;
  sum.analysis["amplification_spread"] =
      amplification.empty() ? Json(nullptr) : num((amp_max - amp_min) / amp_min);
  for (auto& r : results) sum.members.push_back(std::move(r.m));
  return sum;
}

inline SweepSummary run_convergence(const Context& ctx) {
  const ScenarioConfig& cfg = ctx.cfg;
  SweepSummary sum = run_ladder(ctx);
  const std::vector<std::size_t> sizes = cfg.grid_sizes();

  // Spatial order: discrete right-hand side against the exact one for the
  // configured trigonometric data (beta0 form only).
  Json spatial = Json::array();
  if (!cfg.initial.k0) {
    std::vector<double> errs;
    for (std::size_t n : sizes) {
      const Grid g(n);
      const State s = initial_state(cfg, n);
      const BetaRhs num_rhs = rhs_beta_form(s, cfg.params);
      const BetaRhs ex = exact_rhs_beta(cfg.initial.u0, cfg.initial.omega0, cfg.initial.beta0, cfg.params, g);
      errs.push_back(max_node_error(num_rhs, ex));
    }
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      Json e = {{"n_points", sizes[i]}, {"max_error", num(errs[i])}};
      if (i > 0 && sizes[i] == 2 * sizes[i - 1]) e["observed_order"] = num(observed_order(errs[i - 1], errs[i]));
      spatial.push_back(e);
    }
  }
  sum.analysis["spatial_rhs"] = spatial;

  // Temporal order: spatially uniform data, where the spatial error vanishes,
  // on a dt_max ladder.
  Json temporal = Json::array();
  {
    ScenarioConfig u = cfg;
    apply_preset(u, "uniform");
    u.step_control = StepControl{};
    const std::size_t n = 8;
    std::vector<double> errs;
    std::vector<double> dts = {0.04, 0.02, 0.01, 0.005};
    for (double dt : dts) {
      u.step_control.dt_max = dt;
      u.step_control.dt_min = std::min(u.step_control.dt_min, dt / 10.0);
      State s0 = initial_state(u, n);
      const RunReport rep = integrate(s0, u.params, u.step_control, u.t_final);
      const UniformSolution ex = uniform_exact(0.0, 1.0, 1.0, u.params, rep.t_end);
      double err = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        err = std::max({err, std::abs(rep.final_state.omega[j] - ex.omega) / ex.omega,
                        std::abs(rep.final_state.beta[j] * rep.final_state.beta[j] - ex.k) / ex.k});
      }
      errs.push_back(err);
    }
    for (std::size_t i = 0; i < dts.size(); ++i) {
      Json e = {{"dt_max", dts[i]}, {"max_rel_error", num(errs[i])}};
      if (i > 0) e["observed_order"] = num(observed_order(errs[i - 1], errs[i]));
      temporal.push_back(e);
    }
  }
  sum.analysis["temporal_uniform"] = temporal;
  return sum;
}

inline ToyRunReport run_toy_member(const ScenarioConfig& cfg, const ToyState& s0, const std::string& csv_path,
                                   Json& stats) {
  std::ofstream out;
  if (!csv_path.empty()) {
    out.open(csv_path, std::ios::out | std::ios::trunc | std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + csv_path);
    out << "t,dt,u_min,u_max,gamma_min,gamma_max,l2_u_sq,l1_gamma,mean_u,xi\n";
  }
  double gamma_min = std::numeric_limits<double>::infinity();
  double mean0 = 0.0, drift = 0.0;
  std::size_t count = 0;
  std::string pending;
  auto obs = [&](const ToyState* prev, const ToyState& cur) {
    const Extrema ue = extrema(cur.u);
    const Extrema ge = extrema(cur.gamma);
    const double mean = quadrature(cur.u) / two_pi;
    if (!prev) mean0 = mean;
    drift = std::max(drift, std::abs(mean - mean0));
    gamma_min = std::min(gamma_min, ge.min);
    if (out.is_open()) {
      std::string line = format_g17(cur.time) + ',' + format_g17(prev ? cur.time - prev->time : 0.0) + ',' +
                         format_g17(ue.min) + ',' + format_g17(ue.max) + ',' + format_g17(ge.min) + ',' +
                         format_g17(ge.max) + ',' + format_g17(l2_sq(cur.u)) + ',' +
                         format_g17(norm(cur.gamma, Norm::L1)) + ',' + format_g17(mean) + ',' +
                         format_g17(deriv1_at(cur.u, cur.grid().zero_index()));
      if (count % cfg.output_stride == 0) {
        out << line << '\n';
        pending.clear();
      } else {
        pending = line;
      }
    }
    ++count;
  };
  ToyRunReport rep = integrate(s0, cfg.step_control, cfg.t_final, obs);
  if (out.is_open() && !pending.empty()) out << pending << '\n';
  stats["min_gamma"] = num(gamma_min);
  stats["max_mean_drift"] = num(drift);
  return rep;
}

inline SweepSummary run_toy(const Context& ctx) {
  const ScenarioConfig& cfg = ctx.cfg;
  SweepSummary sum{cfg, {}, Json::object(), {}};
  const std::string base = cfg.label();
  for (std::size_t n : cfg.grid_sizes()) {
    const std::string stem = cfg.grid_sizes().size() == 1 ? base : base + "_" + tag_n(n);
    ctx.say("running " + stem);
    Json stats = Json::object();
    const std::string path = ctx.path(stem + ".csv");
    const ToyRunReport rep = run_toy_member(cfg, initial_toy_state(cfg, n), path, stats);
    MemberSummary m;
    m.label = stem;
    m.parameter = static_cast<double>(n);
    m.n_points = n;
    m.status = rep.status;
    m.t_end = rep.t_end;
    m.reason = rep.reason;
    m.steps = rep.steps_taken;
    m.max_mean_drift = stats["max_mean_drift"].is_null() ? 0.0 : stats["max_mean_drift"].get<double>();
    m.max_envelope_violation = std::numeric_limits<double>::quiet_NaN();
    m.extra = stats;
    if (!path.empty()) m.files.push_back(path);
    sum.members.push_back(std::move(m));
  }
  // Uniform toy data at the means of the configured data is a steady state.
  {
    const std::size_t n = cfg.grid_sizes().front();
    const Grid g(n);
    const double uc = quadrature(cfg.initial.u0.sample(g)) / two_pi;
    const double gc = std::max(0.0, quadrature(cfg.initial.gamma0.sample(g)) / two_pi);
    ToyState s0(0.0, Field(g, uc), Field(g, gc));
    Json stats = Json::object();
    const ToyRunReport rep = run_toy_member(cfg, s0, std::string(), stats);
    double dev = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      dev = std::max({dev, std::abs(rep.final_state.u[j] - uc), std::abs(rep.final_state.gamma[j] - gc)});
    }
    sum.analysis["uniform_steady_state"] = {{"u", uc}, {"gamma", gc}, {"max_deviation", num(dev)},
                                            {"status", to_string(rep.status)}};
  }
  return sum;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Oracle self-check

struct OracleCheck {
  std::string name;
  double expected = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Evaluates the closed-form oracles on their reference examples.
inline std::vector<OracleCheck> check_oracles() {
  std::vector<OracleCheck> out;
  auto add = [&](std::string name, double expected, double computed, double tol, bool relative) {
    const double err = relative ? std::abs(computed - expected) / std::abs(expected) : std::abs(computed - expected);
    out.push_back({std::move(name), expected, computed, tol, err <= tol});
  };
  add("lambda(lambda0=2, alpha2=1, t=1)", 2.0 / 3.0, lambda_exact({2.0, 0.0, 1.0}, 1.0), 1e-15, true);
  add("lambda(t=0) = lambda0", 3.5, lambda_exact({3.5, 0.0, 1.0}, 0.0), 0.0, false);
  add("lambda(t=1e6) ~ 1/(alpha2 t)", 1.0 / (2.0 * 1e6), lambda_exact({1.0, 0.0, 2.0}, 1e6), 1e-4, true);
  add("mu(mu0=1, lambda0=1, alpha2=2, t=3)", 1.0 / std::sqrt(7.0), mu_exact({1.0, 1.0, 2.0}, 3.0), 1e-15, true);
  add("mu(mu0=0) = 0", 0.0, mu_exact({1.0, 0.0, 1.5}, 2.0), 0.0, false);
  {
    Params p;
    p.alpha2 = 1.0;
    const UniformSolution s = uniform_exact(0.0, 1.0, 3.0, p, 1.0);
    add("uniform omega(omega0=1, alpha2=1, t=1)", 0.5, s.omega, 1e-15, true);
    add("uniform k(k0=3, omega0=1, alpha2=1, t=1)", 1.5, s.k, 1e-15, true);
    p.alpha2 = 2.0;
    const UniformSolution s2 = uniform_exact(0.0, 1.0, 1.0, p, 1.0);
    add("uniform omega(alpha2=2, t=1)", 1.0 / 3.0, s2.omega, 1e-15, true);
    add("uniform k(alpha2=2, t=1)", 1.0 / std::sqrt(3.0), s2.k, 1e-15, true);
  }
  add("riccati_bound(-1, 0.5)", -2.0, riccati_bound(-1.0, 0.5), 1e-15, true);
  add("riccati_bound(-1, 0)", -1.0, riccati_bound(-1.0, 0.0), 0.0, false);
  add("riccati_bound(-2, 0.49)", -100.0, riccati_bound(-2.0, 0.49), 1e-12, true);
  {
    const TimeSeries a = constant_series(0.0, 0.999, 99900);
    const TimeSeries xi = riccati_solve(-1.0, a);
    double worst = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i) {
      if (std::abs(xi.value[i]) > 1e3) break;
      worst = std::max(worst, std::abs(xi.value[i] - riccati_bound(-1.0, xi.t[i])));
    }
    add("riccati_solve(a=0) vs bound, |xi| <= 1e3", 0.0, worst, 1e-6, false);
  }
  {
    const TimeSeries xi = riccati_solve(0.0, constant_series(1.0, 2.0, 200));
    double worst = 0.0;
    for (double v : xi.value) worst = std::max(worst, std::abs(v));
    add("riccati_solve(xi0=0) stays 0", 0.0, worst, 0.0, false);
  }
  return out;
}

// ---------------------------------------------------------------------------

/// Executes a validated scenario and writes its files.
inline SweepSummary run_scenario(const ScenarioConfig& cfg_in, const RunOptions& opt = {}) {
  ScenarioConfig cfg = cfg_in;
  if (!opt.output_dir.empty()) cfg.output_dir = opt.output_dir;
  if (opt.workers > 0) cfg.workers = opt.workers;
  validate(cfg);

  detail::Context ctx{cfg, std::filesystem::path(cfg.output_dir), opt.write_files, cfg.workers, opt.log};
  if (ctx.write) std::filesystem::create_directories(ctx.dir);

  SweepSummary sum;
  switch (cfg.scenario) {
    case Scenario::generic:
    case Scenario::uniform:
    case Scenario::blowup:
      sum = detail::run_ladder(ctx);
      break;
    case Scenario::epsilon_sweep:
      sum = detail::run_epsilon_sweep(ctx);
      break;
    case Scenario::stability:
      sum = detail::run_stability(ctx);
      break;
    case Scenario::convergence:
      sum = detail::run_convergence(ctx);
      break;
    case Scenario::toy:
      sum = detail::run_toy(ctx);
      break;
    case Scenario::oracle_check: {
      sum = SweepSummary{cfg, {}, Json::object(), {}};
      Json checks = Json::array();
      bool all = true;
      for (const auto& c : check_oracles()) {
        checks.push_back({{"name", c.name},
                          {"expected", c.expected},
                          {"computed", c.computed},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass}});
        all = all && c.pass;
      }
      sum.analysis["checks"] = checks;
      sum.analysis["all_pass"] = all;
      break;
    }
  }
  sum.config = cfg;
  std::stable_sort(sum.members.begin(), sum.members.end(),
                   [](const MemberSummary& a, const MemberSummary& b) { return a.parameter < b.parameter; });
  for (const auto& m : sum.members) sum.files.insert(sum.files.end(), m.files.begin(), m.files.end());
  if (ctx.write) {
    const std::string p = ctx.path(cfg.label() + "_summary.json");
    std::ofstream out(p, std::ios::out | std::ios::trunc | std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + p + " for writing");
    sum.files.push_back(p);
    out << sum.to_json().dump(2) << '\n';
  }
  return sum;
}

}  // namespace kolmo
