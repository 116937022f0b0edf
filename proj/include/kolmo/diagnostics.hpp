#pragma once

/// \file diagnostics.hpp
/// Per-step trajectory audit (envelopes, energy and mass budgets, energy
/// functionals, continuation integrand, Riccati quantities at x = 0) and the
/// two-solution stability audit.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string_view>

#include "kolmo/grid.hpp"
#include "kolmo/model.hpp"

namespace kolmo {

/// Running integral of a sampled function of time. Each new interval is
/// integrated exactly for the quadratic through the last three samples (the
/// first interval uses the trapezoid), with compensated summation, so the
/// global error is third order in the step size.
class TimeIntegral {
 public:
  void add(double t, double f) {
    if (count_ == 0) {
      t1_ = t;
      f1_ = f;
      count_ = 1;
      return;
    }
    const double h2 = t - t1_;
    if (!(h2 > 0.0)) return;
    double piece;
    if (count_ == 1) {
      piece = 0.5 * h2 * (f1_ + f);
    } else {
      const double h1 = t1_ - t0_;
      const double s2 = (f - f1_) / h2;
      const double s1 = (f0_ - f1_) / h1;
      const double c = (s2 + s1) / (h1 + h2);
      const double b = s2 - c * h2;
      piece = f1_ * h2 + b * h2 * h2 / 2.0 + c * h2 * h2 * h2 / 3.0;
    }
    accumulate(piece);
    t0_ = t1_;
    f0_ = f1_;
    t1_ = t;
    f1_ = f;
    ++count_;
  }

  double value() const noexcept { return sum_ + comp_; }
  std::size_t samples() const noexcept { return count_; }

 private:
  void accumulate(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double t0_ = 0.0, f0_ = 0.0, t1_ = 0.0, f1_ = 0.0;
  double sum_ = 0.0, comp_ = 0.0;
  std::size_t count_ = 0;
};

struct DiagnosticsRow {
  double t = 0.0;
  double dt = 0.0;
  double omega_min = 0.0;
  double omega_max = 0.0;
  double k_min = 0.0;
  double k_max = 0.0;
  double beta_min = 0.0;
  double l2_u_sq = 0.0;
  double l1_k = 0.0;
  double l2_omega_sq = 0.0;
  double l2_beta_sq = 0.0;
  double e0 = 0.0;
  double e2 = 0.0;
  double e_total = 0.0;
  double a_cont = 0.0;
  double cont_integrand = 0.0;
  double xi = 0.0;
  double a_ricc = 0.0;
  double eps_diss_int = 0.0;
  double mean_u = 0.0;
  double energy_residual_u = 0.0;
  double mass_residual_k = 0.0;
  double envelope_violation = 0.0;
  double odd_even_drift = 0.0;

  static constexpr std::size_t field_count = 24;

  static constexpr std::array<std::string_view, field_count> column_names() {
    return {"t",           "dt",          "omega_min",         "omega_max",       "k_min",
            "k_max",       "beta_min",    "l2_u_sq",           "l1_k",            "l2_omega_sq",
            "l2_beta_sq",  "e0",          "e2",                "e_total",         "a_cont",
            "cont_integrand", "xi",       "a_ricc",            "eps_diss_int",    "mean_u",
            "energy_residual_u", "mass_residual_k", "envelope_violation", "odd_even_drift"};
  }

  std::array<double, field_count> values() const {
    return {t,      dt,     omega_min,      omega_max, k_min,  k_max,        beta_min, l2_u_sq,
            l1_k,   l2_omega_sq, l2_beta_sq, e0,       e2,     e_total,      a_cont,   cont_integrand,
            xi,     a_ricc, eps_diss_int,   mean_u,    energy_residual_u, mass_residual_k,
            envelope_violation, odd_even_drift};
  }
};

/// Envelope data taken from the initial state: omega_lo <= omega0 <= omega_hi
/// and k0 >= k_lo.
struct Envelope {
  double omega_lo = 0.0;
  double omega_hi = 0.0;
  double k_lo = 0.0;
  double alpha2 = 1.0;

  double omega_lower(double t) const noexcept { return omega_lo / (omega_lo * alpha2 * t + 1.0); }
  double omega_upper(double t) const noexcept { return omega_hi / (omega_hi * alpha2 * t + 1.0); }
  double k_lower(double t) const noexcept {
    return k_lo / std::pow(omega_hi * alpha2 * t + 1.0, 1.0 / alpha2);
  }
};

/// Per-run state of the audit: initial reference values and running time
/// integrals. One accumulator per trajectory.
struct AuditAccumulator {
  bool initialized = false;
  double t0 = 0.0;
  double l2_u_sq0 = 0.0;
  double l1_k0 = 0.0;
  double mean_u0 = 0.0;
  Envelope envelope;

  TimeIntegral dissipation_u;  ///< int (k/w) |u_x|^2 dx, time-integrated
  TimeIntegral mass_sources;   ///< int (k w - alpha4 (k/w) u_x^2 - k u_x) dx, time-integrated
  TimeIntegral cont;           ///< continuation integrand
  TimeIntegral a_cont;         ///< A(t)
  TimeIntegral omega_cubed;    ///< ||omega||_{L3}^3

  double max_abs_mean_drift = 0.0;
  /// Worst envelope margin over t > t0; at t0 the envelopes are tight by
  /// construction.
  double max_envelope_violation = -std::numeric_limits<double>::infinity();

  double cont_integral() const noexcept { return cont.value(); }
  double a_integral() const noexcept { return a_cont.value(); }
  double omega_l3_cubed_integral() const noexcept { return omega_cubed.value(); }
};

/// Instantaneous spatial quantities of one state, computed in a single pass.
struct StateMoments {
  double u_sq = 0.0, k_l1 = 0.0, w_sq = 0.0, b_sq = 0.0;
  double u2_sq = 0.0, w2_sq = 0.0, b2_sq = 0.0;
  double u_sum = 0.0;
  double eps = 0.0;
  double dissipation_u = 0.0;
  double k_ux = 0.0;
  double w_cubed = 0.0;
  double ux_max = 0.0, wx_max = 0.0, bx_max = 0.0;
  double b_abs_max = 0.0;
  double w_min = 0.0, w_max = 0.0, b_min = 0.0, k_min = 0.0, k_max = 0.0;
  double xi = 0.0, a_ricc = 0.0;
  double drift = 0.0;
};

inline StateMoments state_moments(const State& s) {
  const Grid& g = s.grid();
  const std::size_t n = g.size();
  const double h = g.spacing();
  const double inv2h = 1.0 / (2.0 * h);
  const double invh = 1.0 / h;
  const double invh2 = 1.0 / (h * h);
  const auto u = s.u.values();
  const auto w = s.omega.values();
  const auto b = s.beta.values();

  StateMoments m;
  m.w_min = m.w_max = w[0];
  m.b_min = b[0];
  m.k_min = m.k_max = b[0] * b[0];
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jm = detail::wrap_prev(j, n);
    const std::size_t jp = detail::wrap_next(j, n);
    const std::size_t jr = g.reflect(j);
    const double u0 = u[j], w0 = w[j], b0 = b[j];
    const double k0 = b0 * b0;
    m.u_sq += u0 * u0;
    m.k_l1 += std::abs(k0);
    m.w_sq += w0 * w0;
    m.b_sq += b0 * b0;
    const double u2 = ((u[jp] - u0) - (u0 - u[jm])) * invh2;
    const double w2 = ((w[jp] - w0) - (w0 - w[jm])) * invh2;
    const double b2 = ((b[jp] - b0) - (b0 - b[jm])) * invh2;
    m.u2_sq += u2 * u2;
    m.w2_sq += w2 * w2;
    m.b2_sq += b2 * b2;
    m.u_sum += u0;
    m.eps += k0 * w0;
    m.dissipation_u += (k0 / w0) * detail::grad_sq(u[jm], u0, u[jp], invh);
    m.k_ux += b0 * b[jp] * (u[jp] - u0);
    m.w_cubed += w0 * w0 * w0;
    m.ux_max = std::max(m.ux_max, std::abs((u[jp] - u[jm]) * inv2h));
    m.wx_max = std::max(m.wx_max, std::abs((w[jp] - w[jm]) * inv2h));
    m.bx_max = std::max(m.bx_max, std::abs((b[jp] - b[jm]) * inv2h));
    m.b_abs_max = std::max(m.b_abs_max, std::abs(b0));
    m.w_min = std::min(m.w_min, w0);
    m.w_max = std::max(m.w_max, w0);
    m.b_min = std::min(m.b_min, b0);
    m.k_min = std::min(m.k_min, k0);
    m.k_max = std::max(m.k_max, k0);
    m.drift = std::max({m.drift, 0.5 * std::abs(u0 + u[jr]), 0.5 * std::abs(w0 - w[jr]),
                        0.5 * std::abs(b0 - b[jr])});
  }
  m.u_sq *= h;
  m.k_l1 *= h;
  m.w_sq *= h;
  m.b_sq *= h;
  m.u2_sq *= h;
  m.w2_sq *= h;
  m.b2_sq *= h;
  m.eps *= h;
  m.dissipation_u *= h;
  m.w_cubed *= h;

  const std::size_t j0 = g.zero_index();
  const std::size_t jm = j0 - 1;
  const std::size_t jp = j0 + 1;
  m.xi = (u[jp] - u[jm]) * inv2h;
  const double km = b[jm] * b[jm], k0 = b[j0] * b[j0], kp = b[jp] * b[jp];
  m.a_ricc = ((kp - k0) - (k0 - km)) * invh2 / w[j0];
  return m;
}

/// A(t) = (1+t)^3 (1 + ||beta||_inf^2)(1 + G^2) with G the largest of the sup
/// norms of u_x, omega_x, beta_x.
inline double a_function(double t, double beta_sup, double grad_sup) noexcept {
  const double s = 1.0 + t;
  return s * s * s * (1.0 + beta_sup * beta_sup) * (1.0 + grad_sup * grad_sup);
}

/// (1 + ||beta||_inf^2) G^2, the integrand whose time integral stays finite
/// exactly as long as the solution can be continued.
inline double continuation_integrand(double beta_sup, double grad_sup) noexcept {
  return (1.0 + beta_sup * beta_sup) * grad_sup * grad_sup;
}

/// Audits one state. Pass prev == nullptr for the initial state, which
/// (re)initializes the accumulator.
inline DiagnosticsRow audit_step(const State* prev, const State& s, const Params& p, AuditAccumulator& acc) {
  const StateMoments m = state_moments(s);
  const double two_pi_inv = 1.0 / two_pi;

  if (prev == nullptr || !acc.initialized) {
    acc = AuditAccumulator{};
    acc.initialized = true;
    acc.t0 = s.time;
    acc.l2_u_sq0 = m.u_sq;
    acc.l1_k0 = m.k_l1;
    acc.mean_u0 = m.u_sum * s.grid().spacing() * two_pi_inv;
    acc.envelope = Envelope{m.w_min, m.w_max, m.k_min, p.alpha2};
  }

  DiagnosticsRow r;
  r.t = s.time;
  r.dt = prev ? s.time - prev->time : 0.0;
  r.omega_min = m.w_min;
  r.omega_max = m.w_max;
  r.k_min = m.k_min;
  r.k_max = m.k_max;
  r.beta_min = m.b_min;
  r.l2_u_sq = m.u_sq;
  r.l1_k = m.k_l1;
  r.l2_omega_sq = m.w_sq;
  r.l2_beta_sq = m.b_sq;
  r.e0 = m.u_sq + m.w_sq + m.b_sq;
  r.e2 = m.u2_sq + m.w2_sq + m.b2_sq;
  r.e_total = r.e0 + r.e2;
  const double grad = std::max({m.ux_max, m.wx_max, m.bx_max});
  r.a_cont = a_function(s.time, m.b_abs_max, grad);
  r.cont_integrand = continuation_integrand(m.b_abs_max, grad);
  r.xi = m.xi;
  r.a_ricc = m.a_ricc;
  r.eps_diss_int = m.eps;
  r.mean_u = m.u_sum * s.grid().spacing() * two_pi_inv;

  const double t_rel = s.time - acc.t0;
  acc.dissipation_u.add(s.time, m.dissipation_u);
  acc.mass_sources.add(s.time, m.eps - p.alpha4 * m.dissipation_u - m.k_ux);
  acc.cont.add(s.time, r.cont_integrand);
  acc.a_cont.add(s.time, r.a_cont);
  acc.omega_cubed.add(s.time, m.w_cubed);

  r.energy_residual_u = m.u_sq + 2.0 * p.nu * acc.dissipation_u.value() - acc.l2_u_sq0;
  r.mass_residual_k = m.k_l1 - acc.l1_k0 + acc.mass_sources.value();

  const Envelope& e = acc.envelope;
  r.envelope_violation = std::max({e.omega_lower(t_rel) - m.w_min, m.w_max - e.omega_upper(t_rel),
                                   e.k_lower(t_rel) - m.k_min});
  r.odd_even_drift = m.drift;

  acc.max_abs_mean_drift = std::max(acc.max_abs_mean_drift, std::abs(r.mean_u - acc.mean_u0));
  if (s.time > acc.t0) acc.max_envelope_violation = std::max(acc.max_envelope_violation, r.envelope_violation);
  return r;
}

/// min(1, c_cal / max(1, E(0))^2) with E(0) the sum of the squared H2 norms of
/// u0, omega0 and beta0.
inline double lifespan_lower_bound(const State& s0, const Params& p, double c_cal = 1e-2) {
  (void)p;
  if (!(c_cal > 0.0)) throw std::invalid_argument("lifespan_lower_bound: c_cal must be positive");
  const double e = sobolev_h2_sq(s0.u) + sobolev_h2_sq(s0.omega) + sobolev_h2_sq(s0.beta);
  const double d = std::max(1.0, e);
  return std::min(1.0, c_cal / (d * d));
}

struct StabilityRow {
  double t = 0.0;
  double e_stab = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta3 = 0.0;
  double gronwall_ratio = 0.0;
};

struct PairAccumulator {
  bool initialized = false;
  double e_stab0 = 0.0;
  TimeIntegral theta_sum;
};

struct StabilityTerms {
  double e_stab = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta3 = 0.0;
};

/// Difference energy ||U||^2 + ||Sigma||^2 + ||B||^2 and the three growth
/// rates of the two-solution estimate, all sup norms taken on the nodes and
/// vector-valued norms read as the maximum over components.
inline StabilityTerms stability_terms(const State& s1, const State& s2) {
  if (!(s1.grid() == s2.grid())) throw std::invalid_argument("audit_pair: grid mismatch");
  if (s1.time != s2.time) throw std::invalid_argument("audit_pair: states at different times");
  const Grid& g = s1.grid();
  const std::size_t n = g.size();
  const double h = g.spacing();
  const double inv2h = 1.0 / (2.0 * h);
  double e = 0.0;
  double ux = 0.0, wx = 0.0, bx = 0.0, bsup = 0.0;
  double w_a = 0.0, w_b = 0.0, inv_w2 = 0.0, inv_w12 = 0.0, b_ww = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jm = detail::wrap_prev(j, n);
    const std::size_t jp = detail::wrap_next(j, n);
    const double du = s1.u[j] - s2.u[j];
    const double dw = s1.omega[j] - s2.omega[j];
    const double db = s1.beta[j] - s2.beta[j];
    e += du * du + dw * dw + db * db;
    ux = std::max({ux, std::abs((s1.u[jp] - s1.u[jm]) * inv2h), std::abs((s2.u[jp] - s2.u[jm]) * inv2h)});
    wx = std::max({wx, std::abs((s1.omega[jp] - s1.omega[jm]) * inv2h),
                   std::abs((s2.omega[jp] - s2.omega[jm]) * inv2h)});
    bx = std::max({bx, std::abs((s1.beta[jp] - s1.beta[jm]) * inv2h),
                   std::abs((s2.beta[jp] - s2.beta[jm]) * inv2h)});
    bsup = std::max({bsup, std::abs(s1.beta[j]), std::abs(s2.beta[j])});
    const double w1 = s1.omega[j];
    const double w2 = s2.omega[j];
    const double b1 = s1.beta[j];
    w_a = std::max(w_a, std::abs(b1 / (std::sqrt(w1) * w2)));
    w_b = std::max(w_b, std::sqrt(w1) / w2);
    inv_w2 = std::max(inv_w2, 1.0 / w2);
    inv_w12 = std::max({inv_w12, 1.0 / w1, 1.0 / w2});
    b_ww = std::max(b_ww, std::abs(b1 / (w1 * w2)));
  }
  StabilityTerms r;
  r.e_stab = h * e;
  const double weight = w_a * w_a + w_b * w_b;
  const double ub = std::max(ux, bx);
  r.theta1 = ux + ux * ux * (weight + inv_w2);
  r.theta2 = ux + wx * wx * (weight + inv_w2);
  r.theta3 = ub + bsup + ub * ub * (weight + inv_w12 + b_ww);
  return r;
}

/// Stability audit of two trajectories at a common time. Pass acc in its
/// default state at the initial time.
inline StabilityRow audit_pair(const State& s1, const State& s2, const Params& p, double k_fit,
                               PairAccumulator& acc) {
  (void)p;
  const StabilityTerms terms = stability_terms(s1, s2);
  if (!acc.initialized) {
    acc = PairAccumulator{};
    acc.initialized = true;
    acc.e_stab0 = terms.e_stab;
  }
  acc.theta_sum.add(s1.time, terms.theta1 + terms.theta2 + terms.theta3);
  StabilityRow row;
  row.t = s1.time;
  row.e_stab = terms.e_stab;
  row.theta1 = terms.theta1;
  row.theta2 = terms.theta2;
  row.theta3 = terms.theta3;
  if (terms.e_stab == 0.0) {
    row.gronwall_ratio = 0.0;
  } else if (acc.e_stab0 == 0.0) {
    row.gronwall_ratio = std::numeric_limits<double>::infinity();
  } else {
    row.gronwall_ratio = terms.e_stab / (acc.e_stab0 * std::exp(k_fit * acc.theta_sum.value()));
  }
  return row;
}

/// One-shot variant for a single pair of states, no time history.
inline StabilityRow audit_pair(const State& s1, const State& s2, const Params& p, double k_fit) {
  PairAccumulator acc;
  return audit_pair(s1, s2, p, k_fit, acc);
}

}  // namespace kolmo
