#pragma once

/// \file oracles.hpp
/// Closed-form reference solutions: the decay ODE system
///   lambda' = -alpha2 lambda^2,  mu' = -lambda mu,
/// the exact solution for spatially uniform data, and the scalar Riccati
/// dynamics xi' = -xi^2 + a(t) xi of the velocity gradient at x = 0.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "kolmo/model.hpp"

namespace kolmo {

struct OdeEnvelope {
  double lambda0 = 1.0;
  double mu0 = 0.0;
  double alpha2 = 1.0;

  void validate() const {
    if (!(lambda0 > 0.0)) throw std::invalid_argument("OdeEnvelope: lambda0 must be positive");
    if (!(mu0 >= 0.0)) throw std::invalid_argument("OdeEnvelope: mu0 must be nonnegative");
    if (!(alpha2 > 0.0)) throw std::invalid_argument("OdeEnvelope: alpha2 must be positive");
  }
};

/// lambda(t) = lambda0 / (lambda0 alpha2 t + 1).
inline double lambda_exact(const OdeEnvelope& e, double t) {
  e.validate();
  return e.lambda0 / (e.lambda0 * e.alpha2 * t + 1.0);
}

/// mu(t) = mu0 / (lambda0 alpha2 t + 1)^(1/alpha2).
inline double mu_exact(const OdeEnvelope& e, double t) {
  e.validate();
  return e.mu0 / std::pow(e.lambda0 * e.alpha2 * t + 1.0, 1.0 / e.alpha2);
}

struct UniformSolution {
  double u;
  double omega;
  double k;
};

/// Exact solution for data constant in space.
inline UniformSolution uniform_exact(double u0, double omega0, double k0, const Params& p, double t) {
  if (!(omega0 > 0.0)) throw std::invalid_argument("uniform_exact: omega0 must be positive");
  if (!(k0 >= 0.0)) throw std::invalid_argument("uniform_exact: k0 must be nonnegative");
  const OdeEnvelope e{omega0, k0, p.alpha2};
  return {u0, lambda_exact(e, t), mu_exact(e, t)};
}

/// Solution of xi' = -xi^2 with xi(0) = xi0 < 0, valid for t < 1/|xi0|.
inline double riccati_bound(double xi0, double t) {
  if (!(xi0 < 0.0)) throw std::domain_error("riccati_bound: xi0 must be negative");
  if (!(t >= 0.0)) throw std::domain_error("riccati_bound: t must be nonnegative");
  if (t >= 1.0 / -xi0) {
    throw std::domain_error("riccati_bound: t = " + std::to_string(t) + " is past the divergence time " +
                            std::to_string(1.0 / -xi0));
  }
  return xi0 / (1.0 + xi0 * t);
}

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> value;

  std::size_t size() const noexcept { return t.size(); }
  void push(double time, double v) {
    t.push_back(time);
    value.push_back(v);
  }
};

namespace detail {

inline double interp(const TimeSeries& s, std::size_t i, double t) noexcept {
  const double t0 = s.t[i];
  const double t1 = s.t[i + 1];
  if (t1 == t0) return s.value[i + 1];
  const double w = (t - t0) / (t1 - t0);
  return (1.0 - w) * s.value[i] + w * s.value[i + 1];
}

}  // namespace detail

/// Integrates xi' = -xi^2 + a(t) xi with classical RK4 on the sample times of
/// a, interpolating a linearly inside each interval. Output stops after the
/// first sample where |xi| exceeds 1e9.
inline TimeSeries riccati_solve(double xi0, const TimeSeries& a) {
  if (a.t.size() != a.value.size()) throw std::invalid_argument("riccati_solve: ragged series");
  if (a.size() == 0) throw std::invalid_argument("riccati_solve: empty coefficient series");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a.value[i] >= 0.0)) {
      throw std::domain_error("riccati_solve: a(t) must be nonnegative, got " + std::to_string(a.value[i]) +
                              " at t = " + std::to_string(a.t[i]));
    }
    if (i > 0 && !(a.t[i] >= a.t[i - 1])) throw std::invalid_argument("riccati_solve: times must increase");
  }
  auto f = [](double xi, double av) { return -xi * xi + av * xi; };
  TimeSeries out;
  double xi = xi0;
  out.push(a.t[0], xi);
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    const double h = a.t[i + 1] - a.t[i];
    const double tm = a.t[i] + 0.5 * h;
    const double a0 = a.value[i];
    const double am = detail::interp(a, i, tm);
    const double a1 = a.value[i + 1];
    const double k1 = f(xi, a0);
    const double k2 = f(xi + 0.5 * h * k1, am);
    const double k3 = f(xi + 0.5 * h * k2, am);
    const double k4 = f(xi + h * k3, a1);
    xi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.push(a.t[i + 1], xi);
    if (!(std::abs(xi) <= 1e9)) break;
  }
  return out;
}

/// Constant-coefficient series a(t) = value on a uniform grid of n+1 samples.
inline TimeSeries constant_series(double value, double t_end, std::size_t n) {
  TimeSeries s;
  for (std::size_t i = 0; i <= n; ++i) s.push(t_end * static_cast<double>(i) / static_cast<double>(n), value);
  return s;
}

}  // namespace kolmo
