#include <gtest/gtest.h>

#include <cmath>

#include "kolmo/model.hpp"

using namespace kolmo;

namespace {

Params odd_params() {
  Params p;
  p.nu = 0.7;
  p.alpha1 = 1.3;
  p.alpha2 = 0.9;
  p.alpha3 = 1.1;
  p.alpha4 = 0.8;
  return p;
}

State trig_state(std::size_t n) {
  const Grid g(n);
  return State(0.0, Field::sample(g, [](double x) { return std::sin(x); }),
               Field::sample(g, [](double x) { return 2.0 + std::cos(x); }),
               Field::sample(g, [](double x) { return 1.0 - std::cos(x); }));
}

// Hand-differentiated right-hand side for u = sin x, omega = 2 + cos x,
// beta = 1 - cos x.
struct Exact {
  double du, dw, db, dk;
};

Exact exact_rhs(double x, const Params& p) {
  const double u = std::sin(x), ux = std::cos(x), uxx = -std::sin(x);
  const double w = 2.0 + std::cos(x), wx = -std::sin(x), wxx = -std::cos(x);
  const double b = 1.0 - std::cos(x), bx = std::sin(x), bxx = std::cos(x);
  const double c = b * b / w;
  const double cx = 2.0 * b * bx / w - b * b * wx / (w * w);
  Exact e;
  e.du = -u * ux + p.nu * (cx * ux + c * uxx);
  e.dw = -u * wx + p.alpha1 * (cx * wx + c * wxx) - p.alpha2 * w * w;
  e.db = -u * bx + p.alpha3 * (cx * bx + c * bxx) - 0.5 * b * w + 0.5 * p.alpha4 * (b / w) * ux * ux +
         p.alpha3 * (b / w) * bx * bx;
  e.dk = 2.0 * b * e.db;
  return e;
}

}  // namespace

TEST(Params, RejectsNonPositive) {
  Params p;
  EXPECT_NO_THROW(p.validate());
  p.alpha2 = -1.0;
  try {
    p.validate();
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("alpha2"), std::string::npos);
  }
  p = Params{};
  p.nu = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = Params{};
  p.ell_constant = std::nan("");
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(State, RejectsMixedGrids) {
  EXPECT_THROW(State(0.0, Field(Grid(8)), Field(Grid(8), 1.0), Field(Grid(10))), std::invalid_argument);
}

TEST(Diffusivity, Examples) {
  const Grid g(16);
  EXPECT_EQ(sup_norm(diffusivity(State(0, Field(g), Field(g, 1.0), Field(g, 0.0)))), 0.0);
  const Field d = diffusivity(State(0, Field(g), Field(g, 2.0), Field(g, 1.0)));
  for (double v : d) EXPECT_EQ(v, 0.5);
  const State s(0, Field(g), Field(g, 1.0), Field::sample(g, [](double x) { return 1 - std::cos(x); }));
  const Field c = diffusivity(s);
  EXPECT_EQ(c[g.zero_index()], 0.0);
  EXPECT_THROW(diffusivity(State(0, Field(g), Field(g, 0.0), Field(g, 1.0))), std::domain_error);
}

TEST(RhsBeta, UniformState) {
  const Grid g(32);
  Params p;
  p.alpha2 = 2.0;
  const BetaRhs r = rhs_beta_form(State(0, Field(g, 0.4), Field(g, 3.0), Field(g, 1.5)), p);
  for (std::size_t j = 0; j < 32; ++j) {
    EXPECT_EQ(r.du[j], 0.0);
    EXPECT_EQ(r.domega[j], -2.0 * 9.0);
    EXPECT_EQ(r.dbeta[j], -0.5 * 1.5 * 3.0);
  }
}

TEST(RhsBeta, DegenerateBetaIsPureBurgers) {
  const Grid g(64);
  const State s(0, Field::sample(g, [](double x) { return std::sin(x); }), Field(g, 1.0), Field(g, 0.0));
  const BetaRhs r = rhs_beta_form(s, Params{});
  EXPECT_EQ(sup_norm(r.dbeta), 0.0);
  // u u_x = sin x cos x to second order
  double e = 0.0;
  for (std::size_t j = 0; j < 64; ++j) {
    const double x = g.node(j);
    e = std::max(e, std::abs(r.du[j] + std::sin(x) * std::cos(x)));
  }
  EXPECT_LT(e, 5e-3);
}

TEST(RhsBeta, MatchesSymbolicOracleAtSecondOrder) {
  const Params p = odd_params();
  double prev = 0.0;
  for (std::size_t n : {64u, 128u, 256u}) {
    const State s = trig_state(n);
    const BetaRhs r = rhs_beta_form(s, p);
    double e = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const Exact ex = exact_rhs(s.grid().node(j), p);
      e = std::max({e, std::abs(r.du[j] - ex.du), std::abs(r.domega[j] - ex.dw), std::abs(r.dbeta[j] - ex.db)});
    }
    const double h = s.grid().spacing();
    EXPECT_LT(e, 5.0 * h * h);
    if (prev > 0.0) EXPECT_NEAR(std::log2(prev / e), 2.0, 0.2);
    prev = e;
  }
}

TEST(RhsK, UniformAndDegenerate) {
  const Grid g(16);
  const KRhs r = rhs_k_form(Field(g, 0.1), Field(g, 2.0), Field(g, 3.0), Params{});
  for (std::size_t j = 0; j < 16; ++j) {
    EXPECT_EQ(r.dk[j], -6.0);
    EXPECT_EQ(r.du[j], 0.0);
  }
  const KRhs z = rhs_k_form(Field::sample(g, [](double x) { return std::sin(x); }), Field(g, 1.0), Field(g, 0.0),
                            Params{});
  EXPECT_EQ(sup_norm(z.dk), 0.0);
}

TEST(RhsK, MatchesSymbolicOracleAtSecondOrder) {
  const Params p = odd_params();
  double prev = 0.0;
  for (std::size_t n : {64u, 128u, 256u}) {
    const State s = trig_state(n);
    const KRhs r = rhs_k_form(s.u, s.omega, s.k(), p);
    double e = 0.0;
    for (std::size_t j = 0; j < n; ++j) e = std::max(e, std::abs(r.dk[j] - exact_rhs(s.grid().node(j), p).dk));
    if (prev > 0.0) EXPECT_NEAR(std::log2(prev / e), 2.0, 0.25);
    prev = e;
  }
}

TEST(RhsToy, ExamplesAndOracle) {
  const Grid g0(16);
  const ToyRhs z = rhs_toy(ToyState(0, Field::sample(g0, [](double x) { return std::sin(x); }), Field(g0, 0.0)));
  EXPECT_EQ(sup_norm(z.dgamma), 0.0);
  const ToyRhs u = rhs_toy(ToyState(0, Field(g0, 0.3), Field(g0, 2.0)));
  EXPECT_EQ(sup_norm(u.du), 0.0);
  EXPECT_EQ(sup_norm(u.dgamma), 0.0);

  double prev = 0.0;
  for (std::size_t n : {64u, 128u, 256u}) {
    const Grid g(n);
    const ToyState s(0, Field::sample(g, [](double x) { return std::sin(x); }),
                     Field::sample(g, [](double x) { return 2.0 + std::cos(x); }));
    const ToyRhs r = rhs_toy(s);
    double e = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double x = g.node(j);
      const double uu = std::sin(x), ux = std::cos(x), uxx = -std::sin(x);
      const double gg = 2.0 + std::cos(x), gx = -std::sin(x), gxx = -std::cos(x);
      const double du = -uu * ux + gx * ux + gg * uxx;
      const double dg = -uu * gx + gx * gx + gg * gxx + gg * ux * ux;
      e = std::max({e, std::abs(r.du[j] - du), std::abs(r.dgamma[j] - dg)});
    }
    if (prev > 0.0) EXPECT_NEAR(std::log2(prev / e), 2.0, 0.2);
    prev = e;
  }
}

TEST(TurbulenceQuantities, Examples) {
  const Grid g(8);
  Params p;
  const TurbulenceQuantities z = turbulence_quantities(State(0, Field(g), Field(g, 1.0), Field(g, 0.0)), p);
  EXPECT_EQ(sup_norm(z.epsilon), 0.0);
  EXPECT_EQ(sup_norm(z.ell), 0.0);
  const TurbulenceQuantities q = turbulence_quantities(State(0, Field(g), Field(g, 2.0), Field(g, 1.0)), p);
  for (std::size_t j = 0; j < 8; ++j) {
    EXPECT_EQ(q.epsilon[j], 2.0);
    EXPECT_EQ(q.ell[j], 0.5);
  }
  p.ell_constant = 3.0;
  EXPECT_EQ(turbulence_quantities(State(0, Field(g), Field(g, 2.0), Field(g, 1.0)), p).ell[0], 1.5);
}
