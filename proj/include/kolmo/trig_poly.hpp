#pragma once

/// \file trig_poly.hpp
/// Real trigonometric polynomials c0 + sum_k (a_k cos kx + b_k sin kx), used
/// for initial data and as exact references in convergence studies.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kolmo/grid.hpp"

namespace kolmo {

class TrigPoly {
 public:
  TrigPoly() = default;

  /// cos_coef[0] is the constant term; cos_coef[k], sin_coef[k] multiply
  /// cos(kx), sin(kx). sin_coef[0] is ignored.
  TrigPoly(std::vector<double> cos_coef, std::vector<double> sin_coef)
      : a_(std::move(cos_coef)), b_(std::move(sin_coef)) {
    const std::size_t n = std::max(a_.size(), b_.size());
    a_.resize(n, 0.0);
    b_.resize(n, 0.0);
    if (!b_.empty()) b_[0] = 0.0;
  }

  static TrigPoly constant(double c) { return TrigPoly({c}, {0.0}); }

  std::size_t degree() const noexcept { return a_.empty() ? 0 : a_.size() - 1; }
  const std::vector<double>& cos_coefficients() const noexcept { return a_; }
  const std::vector<double>& sin_coefficients() const noexcept { return b_; }

  double operator()(double x) const noexcept {
    double s = a_.empty() ? 0.0 : a_[0];
    for (std::size_t k = 1; k < a_.size(); ++k) {
      const double kx = static_cast<double>(k) * x;
      s += a_[k] * std::cos(kx) + b_[k] * std::sin(kx);
    }
    return s;
  }

  /// Exact m-th derivative.
  TrigPoly derivative(int order = 1) const {
    if (order < 0) throw std::invalid_argument("TrigPoly::derivative: negative order");
    TrigPoly d = *this;
    for (int m = 0; m < order; ++m) {
      if (!d.a_.empty()) d.a_[0] = 0.0;
      for (std::size_t k = 1; k < d.a_.size(); ++k) {
        const double kk = static_cast<double>(k);
        const double a = d.a_[k];
        const double b = d.b_[k];
        d.a_[k] = kk * b;
        d.b_[k] = -kk * a;
      }
    }
    return d;
  }

  TrigPoly& operator+=(double c) {
    if (a_.empty()) {
      a_.push_back(0.0);
      b_.push_back(0.0);
    }
    a_[0] += c;
    return *this;
  }

  Field sample(const Grid& grid) const {
    return Field::sample(grid, [this](double x) { return (*this)(x); });
  }

  /// Odd about x = 0: every cosine coefficient vanishes.
  bool is_odd() const noexcept {
    for (double a : a_)
      if (a != 0.0) return false;
    return true;
  }

  /// Even about x = 0: every sine coefficient vanishes.
  bool is_even() const noexcept {
    for (double b : b_)
      if (b != 0.0) return false;
    return true;
  }

  /// Textual form "c0; a1, b1; a2, b2", the same grammar parse() accepts.
  std::string to_string() const {
    std::ostringstream os;
    os.precision(17);
    os << (a_.empty() ? 0.0 : a_[0]);
    for (std::size_t k = 1; k < a_.size(); ++k) os << "; " << a_[k] << ", " << b_[k];
    return os.str();
  }

  static TrigPoly parse(const std::string& text) {
    std::vector<double> a;
    std::vector<double> b;
    std::stringstream groups(text);
    std::string group;
    std::size_t index = 0;
    while (std::getline(groups, group, ';')) {
      std::vector<double> nums;
      std::stringstream items(group);
      std::string item;
      while (std::getline(items, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        if (first == std::string::npos) throw std::invalid_argument("empty coefficient in '" + text + "'");
        const auto last = item.find_last_not_of(" \t");
        const std::string token = item.substr(first, last - first + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(token, &used);
        } catch (const std::exception&) {
          throw std::invalid_argument("bad number '" + token + "'");
        }
        if (used != token.size()) throw std::invalid_argument("bad number '" + token + "'");
        nums.push_back(v);
      }
      if (index == 0) {
        if (nums.size() != 1) throw std::invalid_argument("constant term must be a single number");
        a.push_back(nums[0]);
        b.push_back(0.0);
      } else {
        if (nums.size() != 2) {
          throw std::invalid_argument("harmonic " + std::to_string(index) + " needs 'cos, sin' pair");
        }
        a.push_back(nums[0]);
        b.push_back(nums[1]);
      }
      ++index;
    }
    if (index == 0) throw std::invalid_argument("empty trigonometric polynomial");
    return TrigPoly(a, b);
  }

 private:
  std::vector<double> a_;
  std::vector<double> b_;
};

}  // namespace kolmo
