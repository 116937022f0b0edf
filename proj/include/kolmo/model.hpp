#pragma once

/// \file model.hpp
/// Parameters, states and right-hand sides of the one-dimensional
/// Kolmogorov two-equation model on the torus:
///
///   u_t + u u_x       = nu      (k/w u_x)_x
///   w_t + u w_x       = alpha1  (k/w w_x)_x - alpha2 w^2
///   k_t + u k_x       = alpha3  (k/w k_x)_x - k w + alpha4 (k/w) u_x^2
///
/// The primary unknowns are (u, w, beta) with k = beta^2, for which
///
///   beta_t + u beta_x = alpha3 (beta^2/w beta_x)_x - beta w / 2
///                       + (alpha4/2)(beta/w) u_x^2 + alpha3 (beta/w) beta_x^2.
///
/// The toy system u_t + u u_x = (g u_x)_x, g_t + u g_x = (g g_x)_x + g u_x^2
/// is provided alongside.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "kolmo/grid.hpp"

namespace kolmo {

struct Params {
  double nu = 1.0;
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double alpha3 = 1.0;
  double alpha4 = 1.0;
  double ell_constant = 1.0;

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(name) + " must be strictly positive, got " +
                                    std::to_string(v));
      }
    };
    positive(nu, "nu");
    positive(alpha1, "alpha1");
    positive(alpha2, "alpha2");
    positive(alpha3, "alpha3");
    positive(alpha4, "alpha4");
    positive(ell_constant, "ell_constant");
  }

  double max_diffusion_coefficient() const noexcept {
    return std::max(nu, std::max(alpha1, alpha3));
  }
};

/// Snapshot (u, omega, beta) at one instant; k = beta^2.
struct State {
  double time = 0.0;
  Field u;
  Field omega;
  Field beta;

  State(double t, Field u_, Field omega_, Field beta_)
      : time(t), u(std::move(u_)), omega(std::move(omega_)), beta(std::move(beta_)) {
    if (!(u.grid() == omega.grid()) || !(u.grid() == beta.grid())) {
      throw std::invalid_argument("State: fields live on different grids");
    }
  }

  const Grid& grid() const noexcept { return u.grid(); }
  Field k() const { return beta * beta; }
};

struct ToyState {
  double time = 0.0;
  Field u;
  Field gamma;

  ToyState(double t, Field u_, Field gamma_) : time(t), u(std::move(u_)), gamma(std::move(gamma_)) {
    if (!(u.grid() == gamma.grid())) throw std::invalid_argument("ToyState: grid mismatch");
  }

  const Grid& grid() const noexcept { return u.grid(); }
};

struct BetaRhs {
  Field du;
  Field domega;
  Field dbeta;
};

struct KRhs {
  Field du;
  Field domega;
  Field dk;
};

struct ToyRhs {
  Field du;
  Field dgamma;
};

struct TurbulenceQuantities {
  Field epsilon;
  Field ell;
};

namespace detail {

inline std::size_t wrap_prev(std::size_t j, std::size_t n) noexcept { return j == 0 ? n - 1 : j - 1; }
inline std::size_t wrap_next(std::size_t j, std::size_t n) noexcept { return j + 1 == n ? 0 : j + 1; }

/// Skew-symmetric Burgers flux (1/3)[(u^2)_x + u u_x] with central differences.
/// Sums to zero over the torus and is orthogonal to u, so the discrete mean
/// and the discrete kinetic energy are untouched by transport.
inline double burgers(double um, double u0, double up, double inv2h) noexcept {
  return ((up * up - um * um) + u0 * (up - um)) * inv2h * (1.0 / 3.0);
}

inline double face_flux(double cm, double c0, double cp, double fm, double f0, double fp,
                        double invh2) noexcept {
  const double cfp = 0.5 * (c0 + cp);
  const double cfm = 0.5 * (cm + c0);
  return (cfp * (fp - f0) - cfm * (f0 - fm)) * invh2;
}

inline double grad_sq(double fm, double f0, double fp, double invh) noexcept {
  const double fwd = (fp - f0) * invh;
  const double bwd = (f0 - fm) * invh;
  return 0.5 * (fwd * fwd + bwd * bwd);
}

/// Beta-form right-hand side on raw spans. coef is scratch of length n and
/// receives beta^2/omega.
inline void rhs_beta(std::span<const double> u, std::span<const double> w, std::span<const double> b,
                     const Params& p, double h, std::span<double> coef, std::span<double> du,
                     std::span<double> dw, std::span<double> db) noexcept {
  const std::size_t n = u.size();
  const double inv2h = 1.0 / (2.0 * h);
  const double invh = 1.0 / h;
  const double invh2 = 1.0 / (h * h);
  for (std::size_t j = 0; j < n; ++j) coef[j] = b[j] * b[j] / w[j];
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t m = wrap_prev(j, n);
    const std::size_t q = wrap_next(j, n);
    const double cm = coef[m], c0 = coef[j], cp = coef[q];
    const double um = u[m], u0 = u[j], up = u[q];
    const double wm = w[m], w0 = w[j], wp = w[q];
    const double bm = b[m], b0 = b[j], bp = b[q];
    du[j] = -burgers(um, u0, up, inv2h) + p.nu * face_flux(cm, c0, cp, um, u0, up, invh2);
    dw[j] = -u0 * ((wp - wm) * inv2h) + p.alpha1 * face_flux(cm, c0, cp, wm, w0, wp, invh2) -
            p.alpha2 * (w0 * w0);
    const double ratio = b0 / w0;
    db[j] = -u0 * ((bp - bm) * inv2h) + p.alpha3 * face_flux(cm, c0, cp, bm, b0, bp, invh2) -
            0.5 * (b0 * w0) + (0.5 * p.alpha4) * ratio * grad_sq(um, u0, up, invh) +
            p.alpha3 * ratio * grad_sq(bm, b0, bp, invh);
  }
}

inline void rhs_toy(std::span<const double> u, std::span<const double> g, double h, std::span<double> du,
                    std::span<double> dg) noexcept {
  const std::size_t n = u.size();
  const double inv2h = 1.0 / (2.0 * h);
  const double invh = 1.0 / h;
  const double invh2 = 1.0 / (h * h);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t m = wrap_prev(j, n);
    const std::size_t q = wrap_next(j, n);
    const double um = u[m], u0 = u[j], up = u[q];
    const double gm = g[m], g0 = g[j], gp = g[q];
    du[j] = -burgers(um, u0, up, inv2h) + face_flux(gm, g0, gp, um, u0, up, invh2);
    dg[j] = -u0 * ((gp - gm) * inv2h) + face_flux(gm, g0, gp, gm, g0, gp, invh2) +
            g0 * grad_sq(um, u0, up, invh);
  }
}

inline void require_positive_omega(const Field& omega) {
  for (std::size_t j = 0; j < omega.size(); ++j) {
    if (!(omega[j] > 0.0)) {
      throw std::domain_error("omega must be strictly positive; omega[" + std::to_string(j) +
                              "] = " + std::to_string(omega[j]));
    }
  }
}

}  // namespace detail

/// Eddy viscosity k/omega = beta^2/omega.
inline Field diffusivity(const State& s) {
  detail::require_positive_omega(s.omega);
  Field c(s.grid());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = s.beta[j] * s.beta[j] / s.omega[j];
  return c;
}

/// Time derivatives of (u, omega, beta).
inline BetaRhs rhs_beta_form(const State& s, const Params& p) {
  detail::require_positive_omega(s.omega);
  const Grid& g = s.grid();
  BetaRhs r{Field(g), Field(g), Field(g)};
  Field coef(g);
  detail::rhs_beta(s.u.values(), s.omega.values(), s.beta.values(), p, g.spacing(), coef.values(),
                   r.du.values(), r.domega.values(), r.dbeta.values());
  return r;
}

/// Time derivatives of (u, omega, k) with diffusivity k/omega, built from the
/// same stencils as the beta form.
inline KRhs rhs_k_form(const Field& u, const Field& omega, const Field& k, const Params& p) {
  if (!(u.grid() == omega.grid()) || !(u.grid() == k.grid())) {
    throw std::invalid_argument("rhs_k_form: grid mismatch");
  }
  detail::require_positive_omega(omega);
  const Grid& g = u.grid();
  const std::size_t n = g.size();
  const double h = g.spacing();
  const double inv2h = 1.0 / (2.0 * h);
  const double invh = 1.0 / h;
  const double invh2 = 1.0 / (h * h);
  Field coef = k / omega;
  KRhs r{Field(g), Field(g), Field(g)};
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t m = detail::wrap_prev(j, n);
    const std::size_t q = detail::wrap_next(j, n);
    const double cm = coef[m], c0 = coef[j], cp = coef[q];
    r.du[j] = -detail::burgers(u[m], u[j], u[q], inv2h) +
              p.nu * detail::face_flux(cm, c0, cp, u[m], u[j], u[q], invh2);
    r.domega[j] = -u[j] * ((omega[q] - omega[m]) * inv2h) +
                  p.alpha1 * detail::face_flux(cm, c0, cp, omega[m], omega[j], omega[q], invh2) -
                  p.alpha2 * (omega[j] * omega[j]);
    r.dk[j] = -u[j] * ((k[q] - k[m]) * inv2h) +
              p.alpha3 * detail::face_flux(cm, c0, cp, k[m], k[j], k[q], invh2) - k[j] * omega[j] +
              p.alpha4 * c0 * detail::grad_sq(u[m], u[j], u[q], invh);
  }
  return r;
}

inline ToyRhs rhs_toy(const ToyState& s) {
  const Grid& g = s.grid();
  ToyRhs r{Field(g), Field(g)};
  detail::rhs_toy(s.u.values(), s.gamma.values(), g.spacing(), r.du.values(), r.dgamma.values());
  return r;
}

/// Dissipation rate epsilon = k omega and length scale ell = c sqrt(k)/omega.
inline TurbulenceQuantities turbulence_quantities(const State& s, const Params& p) {
  detail::require_positive_omega(s.omega);
  const Grid& g = s.grid();
  TurbulenceQuantities q{Field(g), Field(g)};
  for (std::size_t j = 0; j < g.size(); ++j) {
    q.epsilon[j] = s.beta[j] * s.beta[j] * s.omega[j];
    q.ell[j] = p.ell_constant * s.beta[j] / s.omega[j];
  }
  return q;
}

}  // namespace kolmo
