#pragma once

/// \file timestepper.hpp
/// Explicit SSP-RK3 method-of-lines integration with CFL-limited adaptive
/// steps, positivity monitoring and blow-up / scheme-failure detection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "kolmo/grid.hpp"
#include "kolmo/model.hpp"

namespace kolmo {

struct StepControl {
  double cfl_advective = 0.4;
  double cfl_diffusive = 0.4;
  double dt_min = 1e-12;
  double dt_max = 1e-2;
  double blowup_grad_threshold = 1e6;
  double omega_floor = 1e-10;
  double beta_tol = 1e-8;
  /// Replace u by its odd part and omega, beta by their even parts after
  /// every step.
  bool symmetry_projection = false;
  /// When positive, steps are shortened so that every multiple of this
  /// interval is hit exactly.
  double sample_interval = 0.0;
  /// Trailing window used to decide whether the gradient grew monotonically.
  std::size_t monotone_window = 100;

  void validate() const {
    auto in_unit = [](double v, const char* name) {
      if (!(v > 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in (0, 1]");
    };
    in_unit(cfl_advective, "cfl_advective");
    in_unit(cfl_diffusive, "cfl_diffusive");
    if (!(dt_min > 0.0)) throw std::invalid_argument("dt_min must be positive");
    if (!(dt_max > 0.0)) throw std::invalid_argument("dt_max must be positive");
    if (!(dt_min < dt_max)) throw std::invalid_argument("dt_min must be smaller than dt_max");
    if (!(blowup_grad_threshold > 0.0)) throw std::invalid_argument("blowup_grad_threshold must be positive");
    if (!(omega_floor > 0.0)) throw std::invalid_argument("omega_floor must be positive");
    if (!(beta_tol >= 0.0)) throw std::invalid_argument("beta_tol must be nonnegative");
    if (!(sample_interval >= 0.0)) throw std::invalid_argument("sample_interval must be nonnegative");
    if (monotone_window < 2) throw std::invalid_argument("monotone_window must be at least 2");
  }
};

enum class RunStatus { completed, blowup_detected, scheme_failure };

inline const char* to_string(RunStatus s) noexcept {
  switch (s) {
    case RunStatus::completed:
      return "completed";
    case RunStatus::blowup_detected:
      return "blowup_detected";
    case RunStatus::scheme_failure:
      return "scheme_failure";
  }
  return "unknown";
}

template <class S>
struct BasicRunReport {
  RunStatus status = RunStatus::completed;
  double t_end = 0.0;
  std::string reason;
  S final_state;
  std::size_t steps_taken = 0;
};

using RunReport = BasicRunReport<State>;
using ToyRunReport = BasicRunReport<ToyState>;

inline double max_abs_deriv1(const Field& f, std::size_t* where = nullptr) noexcept {
  const std::size_t n = f.size();
  const double inv2h = 1.0 / (2.0 * f.grid().spacing());
  double m = 0.0;
  std::size_t arg = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = std::abs((f[detail::wrap_next(j, n)] - f[detail::wrap_prev(j, n)]) * inv2h);
    if (d > m) {
      m = d;
      arg = j;
    }
  }
  if (where) *where = arg;
  return m;
}

/// Central difference of f at node j.
inline double deriv1_at(const Field& f, std::size_t j) noexcept {
  const std::size_t n = f.size();
  return (f[detail::wrap_next(j, n)] - f[detail::wrap_prev(j, n)]) / (2.0 * f.grid().spacing());
}

namespace detail {

inline double cfl_dt(double h, double umax, double diff_max, const StepControl& c) noexcept {
  const double adv = c.cfl_advective * h / std::max(umax, 1e-14);
  const double dif = c.cfl_diffusive * h * h / (2.0 * std::max(diff_max, 1e-14));
  return std::min({adv, dif, c.dt_max});
}

}  // namespace detail

/// Largest admissible step for the beta form.
inline double stable_dt(const State& s, const Params& p, const StepControl& c) {
  double umax = 0.0;
  double cmax = 0.0;
  for (std::size_t j = 0; j < s.u.size(); ++j) {
    umax = std::max(umax, std::abs(s.u[j]));
    cmax = std::max(cmax, s.beta[j] * s.beta[j] / s.omega[j]);
  }
  return detail::cfl_dt(s.grid().spacing(), umax, p.max_diffusion_coefficient() * cmax, c);
}

/// Largest admissible step for the toy system (unit diffusion coefficients).
inline double stable_dt(const ToyState& s, const StepControl& c) {
  double umax = 0.0;
  double gmax = 0.0;
  for (std::size_t j = 0; j < s.u.size(); ++j) {
    umax = std::max(umax, std::abs(s.u[j]));
    gmax = std::max(gmax, s.gamma[j]);
  }
  return detail::cfl_dt(s.grid().spacing(), umax, gmax, c);
}

/// Reusable SSP-RK3 workspace for the beta form.
class Stepper {
 public:
  Stepper(const Params& p, std::size_t n)
      : p_(p), coef_(n), r_(3 * n), acc_(3 * n), y1_(3 * n), y2_(3 * n), n_(n) {}

  /// Advances s by dt in place. Does not check the result.
  void step(State& s, double dt) {
    if (s.u.size() != n_) throw std::invalid_argument("Stepper: grid size mismatch");
    const double h = s.grid().spacing();
    const std::size_t n = n_;
    double* u = s.u.values().data();
    double* w = s.omega.values().data();
    double* b = s.beta.values().data();
    double* r = r_.data();
    double* y1 = y1_.data();
    double* y2 = y2_.data();
    double* acc = acc_.data();

    // Shu-Osher stages written as increments of the current state, so that
    // rounding acts on O(dt) corrections instead of on the state itself.
    eval(u, w, b, h);
    for (std::size_t j = 0; j < n; ++j) {
      acc[j] = r[j];
      acc[n + j] = r[n + j];
      acc[2 * n + j] = r[2 * n + j];
      y1[j] = u[j] + dt * r[j];
      y1[n + j] = w[j] + dt * r[n + j];
      y1[2 * n + j] = b[j] + dt * r[2 * n + j];
    }
    eval(y1, y1 + n, y1 + 2 * n, h);
    for (std::size_t j = 0; j < 3 * n; ++j) acc[j] += r[j];
    for (std::size_t j = 0; j < n; ++j) {
      y2[j] = u[j] + (0.25 * dt) * acc[j];
      y2[n + j] = w[j] + (0.25 * dt) * acc[n + j];
      y2[2 * n + j] = b[j] + (0.25 * dt) * acc[2 * n + j];
    }
    eval(y2, y2 + n, y2 + 2 * n, h);
    for (std::size_t j = 0; j < n; ++j) {
      u[j] += (dt / 6.0) * (acc[j] + 4.0 * r[j]);
      w[j] += (dt / 6.0) * (acc[n + j] + 4.0 * r[n + j]);
      b[j] += (dt / 6.0) * (acc[2 * n + j] + 4.0 * r[2 * n + j]);
    }
    s.time += dt;
  }

  const Params& params() const noexcept { return p_; }

 private:
  void eval(const double* u, const double* w, const double* b, double h) {
    const std::size_t n = n_;
    detail::rhs_beta({u, n}, {w, n}, {b, n}, p_, h, coef_, {r_.data(), n}, {r_.data() + n, n},
                     {r_.data() + 2 * n, n});
  }

  Params p_;
  std::vector<double> coef_;
  std::vector<double> r_;
  std::vector<double> acc_;
  std::vector<double> y1_;
  std::vector<double> y2_;
  std::size_t n_;
};

/// Reusable SSP-RK3 workspace for the toy system.
class ToyStepper {
 public:
  explicit ToyStepper(std::size_t n) : r_(2 * n), y1_(2 * n), y2_(2 * n), n_(n) {}

  void step(ToyState& s, double dt) {
    if (s.u.size() != n_) throw std::invalid_argument("ToyStepper: grid size mismatch");
    const double h = s.grid().spacing();
    const std::size_t n = n_;
    double* u = s.u.values().data();
    double* g = s.gamma.values().data();
    double* r = r_.data();
    double* y1 = y1_.data();
    double* y2 = y2_.data();

    eval(u, g, h);
    for (std::size_t j = 0; j < n; ++j) {
      y1[j] = u[j] + dt * r[j];
      y1[n + j] = g[j] + dt * r[n + j];
    }
    eval(y1, y1 + n, h);
    for (std::size_t j = 0; j < n; ++j) {
      y2[j] = 0.75 * u[j] + 0.25 * (y1[j] + dt * r[j]);
      y2[n + j] = 0.75 * g[j] + 0.25 * (y1[n + j] + dt * r[n + j]);
    }
    eval(y2, y2 + n, h);
    for (std::size_t j = 0; j < n; ++j) {
      u[j] = (1.0 / 3.0) * u[j] + (2.0 / 3.0) * (y2[j] + dt * r[j]);
      g[j] = (1.0 / 3.0) * g[j] + (2.0 / 3.0) * (y2[n + j] + dt * r[n + j]);
    }
    s.time += dt;
  }

 private:
  void eval(const double* u, const double* g, double h) {
    detail::rhs_toy({u, n_}, {g, n_}, h, {r_.data(), n_}, {r_.data() + n_, n_});
  }

  std::vector<double> r_;
  std::vector<double> y1_;
  std::vector<double> y2_;
  std::size_t n_;
};

/// One SSP-RK3 step of the beta form.
inline State step(const State& s, const Params& p, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  State out = s;
  Stepper(p, s.grid().size()).step(out, dt);
  return out;
}

inline ToyState step(const ToyState& s, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  ToyState out = s;
  ToyStepper(s.grid().size()).step(out, dt);
  return out;
}

inline void project_symmetry(State& s) {
  s.u = odd_part(s.u);
  s.omega = even_part(s.omega);
  s.beta = even_part(s.beta);
}

inline void project_symmetry(ToyState& s) {
  s.u = odd_part(s.u);
  s.gamma = even_part(s.gamma);
}

namespace detail {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline bool states_finite(const State& s) noexcept {
  return s.u.all_finite() && s.omega.all_finite() && s.beta.all_finite();
}
inline bool states_finite(const ToyState& s) noexcept { return s.u.all_finite() && s.gamma.all_finite(); }

/// Returns an empty string when the positivity invariants hold.
inline std::string positivity_violation(const State& s, const StepControl& c) {
  const Extrema w = extrema(s.omega);
  if (w.min < c.omega_floor) {
    return "omega below floor: min omega = " + fmt(w.min) + " at x = " + fmt(s.grid().node(w.argmin));
  }
  const Extrema b = extrema(s.beta);
  if (b.min < -c.beta_tol) {
    return "beta undershoot: min beta = " + fmt(b.min) + " at x = " + fmt(s.grid().node(b.argmin));
  }
  return {};
}

inline std::string positivity_violation(const ToyState& s, const StepControl& c) {
  const Extrema g = extrema(s.gamma);
  if (g.min < -c.beta_tol) {
    return "gamma undershoot: min gamma = " + fmt(g.min) + " at x = " + fmt(s.grid().node(g.argmin));
  }
  return {};
}

inline bool monotone_growth(const std::deque<double>& history, std::size_t window) noexcept {
  if (history.size() < window + 1) return false;
  for (std::size_t i = history.size() - window; i < history.size(); ++i) {
    if (!(history[i] >= history[i - 1])) return false;
  }
  return history.back() > history[history.size() - window - 1];
}

template <class S, class Observer>
bool notify(Observer& obs, const S* prev, const S& cur) {
  if constexpr (std::is_same_v<std::invoke_result_t<Observer&, const S*, const S&>, bool>) {
    return obs(prev, cur);
  } else {
    obs(prev, cur);
    return true;
  }
}

template <class S, class StableDt, class Advance, class Observer>
BasicRunReport<S> integrate_core(S s0, const StepControl& c, double t_final, StableDt&& stable,
                                 Advance&& advance, Observer& obs) {
  c.validate();
  if (!(t_final >= s0.time)) throw std::invalid_argument("integrate: t_final precedes the initial time");

  BasicRunReport<S> rep{RunStatus::completed, s0.time, {}, s0, 0};
  auto finish = [&](RunStatus st, std::string why, const S& last) {
    rep.status = st;
    rep.reason = std::move(why);
    rep.t_end = last.time;
    rep.final_state = last;
    return rep;
  };

  if (!states_finite(s0)) return finish(RunStatus::scheme_failure, "non-finite initial data", s0);
  if (std::string bad = positivity_violation(s0, c); !bad.empty()) {
    return finish(RunStatus::scheme_failure, "initial data: " + bad, s0);
  }

  S cur = std::move(s0);
  S prev = cur;
  if (!notify(obs, static_cast<const S*>(nullptr), cur)) {
    return finish(RunStatus::completed, "stopped by observer", cur);
  }

  std::deque<double> history;
  history.push_back(max_abs_deriv1(cur.u));
  std::size_t steps = 0;

  while (cur.time < t_final) {
    const double dt_stable = stable(cur);
    if (!(dt_stable >= c.dt_min)) {
      rep.steps_taken = steps;
      const std::string detail = "time step collapsed below dt_min (dt = " + fmt(dt_stable) + ")";
      if (monotone_growth(history, c.monotone_window)) {
        return finish(RunStatus::blowup_detected, detail + " with monotone gradient growth", cur);
      }
      return finish(RunStatus::scheme_failure, detail + " without monotone gradient growth", cur);
    }

    double target = t_final;
    if (c.sample_interval > 0.0) {
      const double mark = (std::floor(cur.time / c.sample_interval + 1e-9) + 1.0) * c.sample_interval;
      target = std::min(target, mark);
    }
    double dt = dt_stable;
    bool land = false;
    if (dt >= target - cur.time) {
      dt = target - cur.time;
      land = true;
    }

    // Snap dt so that the recorded times differ by exactly the step taken.
    const double t_next = land ? target : cur.time + dt;
    dt = t_next - cur.time;

    prev = cur;
    advance(cur, dt);
    cur.time = t_next;
    ++steps;
    rep.steps_taken = steps;

    if (!states_finite(cur)) {
      if (monotone_growth(history, c.monotone_window)) {
        return finish(RunStatus::blowup_detected, "non-finite value preceded by monotone gradient growth",
                      prev);
      }
      return finish(RunStatus::scheme_failure, "non-finite value at t = " + fmt(cur.time), prev);
    }
    if (c.symmetry_projection) project_symmetry(cur);

    std::size_t where = 0;
    const double grad = max_abs_deriv1(cur.u, &where);
    history.push_back(grad);
    if (history.size() > c.monotone_window + 1) history.pop_front();

    const bool keep_going = notify(obs, static_cast<const S*>(&prev), cur);

    if (grad > c.blowup_grad_threshold) {
      const double xi = deriv1_at(cur.u, cur.grid().zero_index());
      return finish(RunStatus::blowup_detected,
                    "gradient threshold: max|u_x| = " + fmt(grad) + " at x = " + fmt(cur.grid().node(where)) +
                        "; u_x(0) = " + fmt(xi) + (xi < 0.0 ? " (negative)" : " (nonnegative)"),
                    cur);
    }
    if (std::string bad = positivity_violation(cur, c); !bad.empty()) {
      return finish(RunStatus::scheme_failure, bad, cur);
    }
    if (!keep_going) return finish(RunStatus::completed, "stopped by observer", cur);
  }
  return finish(RunStatus::completed, "reached t_final", cur);
}

struct NullObserver {
  template <class S>
  void operator()(const S*, const S&) const noexcept {}
};

}  // namespace detail

/// Integrates the beta form from s0 to t_final. The observer is called as
/// observer(prev, cur) with prev == nullptr for the initial state and then
/// once per accepted step; it may return bool, false requesting a stop.
template <class Observer = detail::NullObserver>
RunReport integrate(State s0, const Params& p, const StepControl& c, double t_final, Observer&& observer = {}) {
  p.validate();
  Stepper stepper(p, s0.grid().size());
  auto stable = [&](const State& s) { return stable_dt(s, p, c); };
  auto advance = [&](State& s, double dt) { stepper.step(s, dt); };
  return detail::integrate_core(std::move(s0), c, t_final, stable, advance, observer);
}

template <class Observer = detail::NullObserver>
ToyRunReport integrate(ToyState s0, const StepControl& c, double t_final, Observer&& observer = {}) {
  ToyStepper stepper(s0.grid().size());
  auto stable = [&](const ToyState& s) { return stable_dt(s, c); };
  auto advance = [&](ToyState& s, double dt) { stepper.step(s, dt); };
  return detail::integrate_core(std::move(s0), c, t_final, stable, advance, observer);
}

}  // namespace kolmo
