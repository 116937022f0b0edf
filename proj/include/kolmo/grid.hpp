#pragma once

/// \file grid.hpp
/// Uniform periodic grid on the torus [-pi, pi) and the discrete calculus
/// used by every other module: central derivatives, conservative flux
/// divergence, rectangle-rule quadrature and discrete norms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kolmo {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Uniform periodic grid with an even number of nodes, so that x = 0 is a
/// node (index n/2) and reflection x -> -x maps nodes onto nodes.
class Grid {
 public:
  explicit Grid(std::size_t n_points) : n_(n_points) {
    if (n_points < 8 || n_points % 2 != 0) {
      throw std::invalid_argument("Grid: n_points must be even and >= 8, got " +
                                  std::to_string(n_points));
    }
    h_ = two_pi / static_cast<double>(n_points);
  }

  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  std::size_t zero_index() const noexcept { return n_ / 2; }

  /// x_j = -pi + j h, evaluated as (j - n/2) h so that x_{n/2} is exactly 0
  /// and x_{n-j} is exactly -x_j.
  double node(std::size_t j) const noexcept {
    return (static_cast<double>(j) - static_cast<double>(n_ / 2)) * h_;
  }

  std::vector<double> nodes() const {
    std::vector<double> x(n_);
    for (std::size_t j = 0; j < n_; ++j) x[j] = node(j);
    return x;
  }

  /// Index of the node at -x_j.
  std::size_t reflect(std::size_t j) const noexcept { return j == 0 ? 0 : n_ - j; }

  bool operator==(const Grid& other) const noexcept { return n_ == other.n_; }

 private:
  std::size_t n_;
  double h_;
};

/// Samples of a real function on a Grid.
class Field {
 public:
  explicit Field(Grid grid, double value = 0.0) : grid_(grid), values_(grid.size(), value) {}

  Field(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw std::invalid_argument("Field: value count does not match grid size");
    }
  }

  template <class Fn>
  static Field sample(const Grid& grid, Fn&& fn) {
    Field f(grid);
    for (std::size_t j = 0; j < grid.size(); ++j) f.values_[j] = fn(grid.node(j));
    return f;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator[](std::size_t j) const noexcept { return values_[j]; }
  double& operator[](std::size_t j) noexcept { return values_[j]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  bool all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
  }

  Field& operator+=(const Field& o) { return zip(o, [](double a, double b) { return a + b; }); }
  Field& operator-=(const Field& o) { return zip(o, [](double a, double b) { return a - b; }); }
  Field& operator*=(const Field& o) { return zip(o, [](double a, double b) { return a * b; }); }
  Field& operator/=(const Field& o) { return zip(o, [](double a, double b) { return a / b; }); }
  Field& operator+=(double s) noexcept {
    for (double& v : values_) v += s;
    return *this;
  }
  Field& operator*=(double s) noexcept {
    for (double& v : values_) v *= s;
    return *this;
  }

  template <class Fn>
  Field map(Fn&& fn) const {
    Field out(grid_);
    for (std::size_t j = 0; j < size(); ++j) out.values_[j] = fn(values_[j]);
    return out;
  }

 private:
  template <class Op>
  Field& zip(const Field& o, Op op) {
    if (!(o.grid_ == grid_)) throw std::invalid_argument("Field: grid mismatch");
    for (std::size_t j = 0; j < size(); ++j) values_[j] = op(values_[j], o.values_[j]);
    return *this;
  }

  Grid grid_;
  std::vector<double> values_;
};

inline Field operator+(Field a, const Field& b) { return a += b; }
inline Field operator-(Field a, const Field& b) { return a -= b; }
inline Field operator*(Field a, const Field& b) { return a *= b; }
inline Field operator/(Field a, const Field& b) { return a /= b; }
inline Field operator*(double s, Field a) { return a *= s; }
inline Field operator*(Field a, double s) { return a *= s; }
inline Field operator+(Field a, double s) { return a += s; }
inline Field operator-(Field a) { return a *= -1.0; }

namespace detail {

// Raw stencil kernels shared by the Field API and the time stepper. All take
// periodic data of length n and write into an output span of the same length.

inline void deriv1(std::span<const double> f, double h, std::span<double> out) noexcept {
  const std::size_t n = f.size();
  const double inv = 1.0 / (2.0 * h);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jm = j == 0 ? n - 1 : j - 1;
    const std::size_t jp = j + 1 == n ? 0 : j + 1;
    out[j] = (f[jp] - f[jm]) * inv;
  }
}

inline void deriv2(std::span<const double> f, double h, std::span<double> out) noexcept {
  const std::size_t n = f.size();
  const double inv = 1.0 / (h * h);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jm = j == 0 ? n - 1 : j - 1;
    const std::size_t jp = j + 1 == n ? 0 : j + 1;
    out[j] = ((f[jp] - f[j]) - (f[j] - f[jm])) * inv;
  }
}

inline void flux_div(std::span<const double> c, std::span<const double> f, double h,
                     std::span<double> out) noexcept {
  const std::size_t n = f.size();
  const double inv = 1.0 / (h * h);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jm = j == 0 ? n - 1 : j - 1;
    const std::size_t jp = j + 1 == n ? 0 : j + 1;
    const double cp = 0.5 * (c[j] + c[jp]);
    const double cm = 0.5 * (c[jm] + c[j]);
    out[j] = (cp * (f[jp] - f[j]) - cm * (f[j] - f[jm])) * inv;
  }
}

inline void grad_sq(std::span<const double> f, double h, std::span<double> out) noexcept {
  const std::size_t n = f.size();
  const double inv = 1.0 / h;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jm = j == 0 ? n - 1 : j - 1;
    const std::size_t jp = j + 1 == n ? 0 : j + 1;
    const double fwd = (f[jp] - f[j]) * inv;
    const double bwd = (f[j] - f[jm]) * inv;
    out[j] = 0.5 * (fwd * fwd + bwd * bwd);
  }
}

inline double sum(std::span<const double> f) noexcept {
  double s = 0.0;
  for (double v : f) s += v;
  return s;
}

}  // namespace detail

/// Second-order central first derivative, periodic.
inline Field deriv1(const Field& f) {
  Field out(f.grid());
  detail::deriv1(f.values(), f.grid().spacing(), out.values());
  return out;
}

/// Three-point second derivative, periodic.
inline Field deriv2(const Field& f) {
  Field out(f.grid());
  detail::deriv2(f.values(), f.grid().spacing(), out.values());
  return out;
}

/// Conservative discretization of d/dx(coef df/dx) with arithmetic-mean face
/// coefficients. Its quadrature telescopes to zero.
inline Field flux_div(const Field& coef, const Field& f) {
  if (!(coef.grid() == f.grid())) throw std::invalid_argument("flux_div: grid mismatch");
  Field out(f.grid());
  detail::flux_div(coef.values(), f.values(), f.grid().spacing(), out.values());
  return out;
}

/// Face-averaged squared gradient: mean of the squared forward and backward
/// differences. Second-order approximation of (df/dx)^2 that satisfies
/// quadrature(c * grad_sq(f)) == -quadrature(f * flux_div(c, f)) exactly
/// in exact arithmetic.
inline Field grad_sq(const Field& f) {
  Field out(f.grid());
  detail::grad_sq(f.values(), f.grid().spacing(), out.values());
  return out;
}

/// Periodic rectangle rule h * sum_j f_j, summed left to right.
inline double quadrature(const Field& f) noexcept {
  return f.grid().spacing() * detail::sum(f.values());
}

enum class Norm { L1, L2, L3, L4, Linf };

inline double norm(const Field& f, Norm p) {
  const auto v = f.values();
  if (p == Norm::Linf) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  double s = 0.0;
  switch (p) {
    case Norm::L1:
      for (double x : v) s += std::abs(x);
      return f.grid().spacing() * s;
    case Norm::L2:
      for (double x : v) s += x * x;
      return std::sqrt(f.grid().spacing() * s);
    case Norm::L3:
      for (double x : v) s += std::abs(x) * x * x;
      return std::cbrt(f.grid().spacing() * s);
    case Norm::L4:
      for (double x : v) s += (x * x) * (x * x);
      return std::sqrt(std::sqrt(f.grid().spacing() * s));
    case Norm::Linf:
      break;
  }
  return 0.0;
}

/// Squared discrete L2 norm, without the square-root round trip.
inline double l2_sq(const Field& f) noexcept {
  double s = 0.0;
  for (double x : f.values()) s += x * x;
  return f.grid().spacing() * s;
}

inline double sup_norm(const Field& f) { return norm(f, Norm::Linf); }

/// ||f||_{L2}^2 + ||d2f||_{L2}^2, the equivalent H2 norm used for energies.
inline double sobolev_h2_sq(const Field& f) { return l2_sq(f) + l2_sq(deriv2(f)); }

struct Extrema {
  double min;
  std::size_t argmin;
  double max;
  std::size_t argmax;
};

/// Node-wise extrema; ties resolve to the smallest index.
inline Extrema extrema(const Field& f) noexcept {
  Extrema e{f[0], 0, f[0], 0};
  for (std::size_t j = 1; j < f.size(); ++j) {
    if (f[j] < e.min) {
      e.min = f[j];
      e.argmin = j;
    }
    if (f[j] > e.max) {
      e.max = f[j];
      e.argmax = j;
    }
  }
  return e;
}

/// Odd part about x = 0: (f(x) - f(-x)) / 2.
inline Field odd_part(const Field& f) {
  const Grid& g = f.grid();
  Field out(g);
  for (std::size_t j = 0; j < g.size(); ++j) out[j] = 0.5 * (f[j] - f[g.reflect(j)]);
  return out;
}

/// Even part about x = 0: (f(x) + f(-x)) / 2.
inline Field even_part(const Field& f) {
  const Grid& g = f.grid();
  Field out(g);
  for (std::size_t j = 0; j < g.size(); ++j) out[j] = 0.5 * (f[j] + f[g.reflect(j)]);
  return out;
}

/// max_j |f_j + f_{-j}| / 2, i.e. the sup norm of the even part.
inline double odd_defect(const Field& f) noexcept {
  const Grid& g = f.grid();
  double m = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) m = std::max(m, 0.5 * std::abs(f[j] + f[g.reflect(j)]));
  return m;
}

/// max_j |f_j - f_{-j}| / 2, i.e. the sup norm of the odd part.
inline double even_defect(const Field& f) noexcept {
  const Grid& g = f.grid();
  double m = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) m = std::max(m, 0.5 * std::abs(f[j] - f[g.reflect(j)]));
  return m;
}

}  // namespace kolmo
