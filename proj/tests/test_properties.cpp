// Randomized checks of structural invariants over seeded families of
// trigonometric data.

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "kolmo/model.hpp"
#include "kolmo/oracles.hpp"
#include "kolmo/trig_poly.hpp"

using namespace kolmo;

namespace {

TrigPoly random_poly(std::mt19937& rng, int degree, double constant, double scale, bool odd = false,
                     bool even = false) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> a(degree + 1, 0.0), b(degree + 1, 0.0);
  a[0] = odd ? 0.0 : constant;
  for (int k = 1; k <= degree; ++k) {
    const double s = scale / (k * k);
    if (!odd) a[k] = s * d(rng);
    if (!even) b[k] = s * d(rng);
  }
  return TrigPoly(a, b);
}

// Positive data: constant large enough to dominate the harmonics.
TrigPoly positive_poly(std::mt19937& rng, int degree) { return random_poly(rng, degree, 2.5, 1.0); }

constexpr int kCases = 25;

}  // namespace

TEST(Property, FluxDivergenceIsConservative) {
  std::mt19937 rng(1234);
  for (int i = 0; i < kCases; ++i) {
    const Grid g(64 + 32 * (i % 4));
    const Field c = positive_poly(rng, 5).sample(g);
    const Field f = random_poly(rng, 6, 0.3, 2.0).sample(g);
    EXPECT_LE(std::abs(quadrature(flux_div(c, f))), 1e-12 * sup_norm(c) * sup_norm(f) * g.size());
  }
}

TEST(Property, MeanVelocityIsConservedByTheRhs) {
  std::mt19937 rng(99);
  for (int i = 0; i < kCases; ++i) {
    const Grid g(128);
    const State s(0.0, random_poly(rng, 4, 0.7, 1.0).sample(g), positive_poly(rng, 3).sample(g),
                  positive_poly(rng, 3).sample(g));
    const BetaRhs r = rhs_beta_form(s, Params{});
    EXPECT_LE(std::abs(quadrature(r.du)), 1e-12 * (1.0 + sup_norm(r.du)));
  }
}

TEST(Property, DegenerateBetaIsAFixedPoint) {
  std::mt19937 rng(5);
  for (int i = 0; i < kCases; ++i) {
    const Grid g(64);
    const State s(0.0, random_poly(rng, 4, 0.1, 1.0).sample(g), positive_poly(rng, 3).sample(g), Field(g, 0.0));
    EXPECT_EQ(sup_norm(rhs_beta_form(s, Params{}).dbeta), 0.0);
  }
}

TEST(Property, SymmetryIsPreservedExactly) {
  std::mt19937 rng(77);
  for (int i = 0; i < kCases; ++i) {
    const Grid g(96);
    const State s(0.0, odd_part(random_poly(rng, 5, 0.0, 1.0, true).sample(g)),
                  even_part(random_poly(rng, 4, 2.5, 1.0, false, true).sample(g)),
                  even_part(random_poly(rng, 4, 2.5, 1.0, false, true).sample(g)));
    ASSERT_EQ(odd_defect(s.u), 0.0);
    const BetaRhs r = rhs_beta_form(s, Params{});
    EXPECT_EQ(odd_defect(r.du), 0.0);
    EXPECT_EQ(even_defect(r.domega), 0.0);
    EXPECT_EQ(even_defect(r.dbeta), 0.0);
  }
}

TEST(Property, KFormAndBetaFormAgreeAtSecondOrder) {
  std::mt19937 rng(2024);
  for (int i = 0; i < 10; ++i) {
    const TrigPoly u = random_poly(rng, 3, 0.2, 1.0);
    const TrigPoly w = positive_poly(rng, 3);
    const TrigPoly b = positive_poly(rng, 3);
    std::vector<double> err;
    for (std::size_t n : {128u, 256u}) {
      const Grid g(n);
      const State s(0.0, u.sample(g), w.sample(g), b.sample(g));
      const BetaRhs rb = rhs_beta_form(s, Params{});
      const KRhs rk = rhs_k_form(s.u, s.omega, s.k(), Params{});
      double e = 0.0;
      for (std::size_t j = 0; j < n; ++j) e = std::max(e, std::abs(rk.dk[j] - 2.0 * s.beta[j] * rb.dbeta[j]));
      err.push_back(e);
    }
    EXPECT_GT(std::log2(err[0] / err[1]), 1.8);
  }
}

TEST(Property, IntegrationByPartsIdentityConvergesAtSecondOrder) {
  std::mt19937 rng(11);
  for (int i = 0; i < 10; ++i) {
    const TrigPoly f = random_poly(rng, 4, 0.0, 1.0);
    std::vector<double> defect;
    for (std::size_t n : {128u, 256u, 512u}) {
      const Grid g(n);
      const Field s = f.sample(g);
      const Field d1 = deriv1(s);
      const double lhs = std::pow(norm(d1, Norm::L4), 4);
      const double rhs = quadrature(s * deriv2(s) * d1 * d1);
      defect.push_back(std::abs(lhs + 3.0 * rhs));
    }
    EXPECT_NEAR(std::log2(defect[0] / defect[1]), 2.0, 0.2);
    EXPECT_NEAR(std::log2(defect[1] / defect[2]), 2.0, 0.2);
  }
}

TEST(Property, InterpolationInequalityOnZeroMeanCorpus) {
  std::mt19937 rng(31415);
  const Grid g(256);
  for (int i = 0; i < 50; ++i) {
    const Field f = random_poly(rng, 1 + i % 8, 0.0, 1.0).sample(g);
    const double rhs = 3.0 * std::sqrt(norm(f, Norm::L2)) * std::sqrt(norm(deriv1(f), Norm::L2));
    EXPECT_LE(sup_norm(f), rhs);
  }
}

TEST(Property, EnvelopeSolutionsAreMonotone) {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> d(0.1, 3.0);
  for (int i = 0; i < kCases; ++i) {
    const OdeEnvelope e{d(rng), d(rng), d(rng)};
    double lp = lambda_exact(e, 0.0), mp = mu_exact(e, 0.0);
    for (double t = 0.1; t < 5.0; t += 0.1) {
      const double l = lambda_exact(e, t), m = mu_exact(e, t);
      EXPECT_LT(l, lp);
      EXPECT_LT(m, mp);
      EXPECT_GT(l, 0.0);
      lp = l;
      mp = m;
    }
  }
}

TEST(Property, TrigPolyTextRoundTrip) {
  std::mt19937 rng(4);
  for (int i = 0; i < kCases; ++i) {
    const TrigPoly p = random_poly(rng, 1 + i % 6, 0.5, 3.0);
    const TrigPoly q = TrigPoly::parse(p.to_string());
    for (double x : {-3.0, -0.4, 0.0, 1.1, 2.9}) EXPECT_EQ(p(x), q(x));
  }
}
