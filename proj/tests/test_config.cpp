#include <gtest/gtest.h>

#include <string>

#include "kolmo/config.hpp"

using namespace kolmo;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::size_t line_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(Config, EmptyDocumentGivesDefaults) {
  const ScenarioConfig c = parse_config("");
  EXPECT_EQ(c.scenario, Scenario::generic);
  EXPECT_EQ(c.n_points, 256u);
  EXPECT_EQ(c.t_final, 1.0);
  EXPECT_EQ(c.params.nu, 1.0);
  EXPECT_EQ(c.params.alpha2, 1.0);
  EXPECT_EQ(c.step_control.blowup_grad_threshold, 1e6);
  EXPECT_EQ(c.step_control.dt_min, 1e-12);
  EXPECT_EQ(c.step_control.omega_floor, 1e-10);
  EXPECT_EQ(c.step_control.beta_tol, 1e-8);
  EXPECT_EQ(c.output_dir, "out");
  EXPECT_EQ(c.label(), "generic");
}

TEST(Config, CommentsAndWhitespace) {
  const ScenarioConfig c = parse_config("# a comment\n\n  n_points = 128   # trailing\nt_final=0.25\n");
  EXPECT_EQ(c.n_points, 128u);
  EXPECT_EQ(c.t_final, 0.25);
}

TEST(Config, NegativeAlpha2IsRejected) {
  const std::string e = error_of("alpha2 = -1\n");
  EXPECT_NE(e.find("alpha2"), std::string::npos);
  EXPECT_NE(e.find("positive"), std::string::npos);
  EXPECT_EQ(line_of("alpha2 = -1\n"), 1u);
}

TEST(Config, SyntaxErrorsCarryLineNumbers) {
  EXPECT_EQ(line_of("n_points = 64\nthis is not valid\n"), 2u);
  EXPECT_EQ(line_of("\n\nbogus_key = 3\n"), 3u);
  EXPECT_NE(error_of("bogus_key = 3\n").find("unknown key"), std::string::npos);
  EXPECT_EQ(line_of("nu = 1\nnu = 2\n"), 2u);
  EXPECT_EQ(line_of("nu =\n"), 1u);
  EXPECT_EQ(line_of("t_final = 1\nn_points = abc\n"), 2u);
  EXPECT_EQ(line_of("scenario = nonsense\n"), 1u);
}

TEST(Config, BlowupPresetSatisfiesHypotheses) {
  const ScenarioConfig c = parse_config("scenario = blowup\n");
  EXPECT_EQ(c.scenario, Scenario::blowup);
  EXPECT_EQ(c.n_points_list, (std::vector<std::size_t>{256, 512, 1024}));
  EXPECT_TRUE(c.initial.u0.is_odd());
  EXPECT_EQ(c.initial.beta0(0.0), 0.0);
  EXPECT_EQ(c.initial.u0.derivative(1)(0.0), -1.0);
}

TEST(Config, BlowupWithPositiveSlopeNamesHypothesis) {
  const std::string text = "scenario = blowup\nu0 = 0; 0, 1\n";
  const std::string e = error_of(text);
  EXPECT_NE(e.find("u0'(0) must be negative"), std::string::npos);
  EXPECT_EQ(line_of(text), 2u);
}

TEST(Config, BlowupSymmetryAndZeroHypotheses) {
  EXPECT_NE(error_of("scenario = blowup\nu0 = 0; 1, -1\n").find("odd"), std::string::npos);
  EXPECT_NE(error_of("scenario = blowup\nomega0 = 2; 0, 1\n").find("omega0 must be even"), std::string::npos);
  EXPECT_NE(error_of("scenario = blowup\nbeta0 = 1; -0.5, 0\n").find("k0(0) must vanish"), std::string::npos);
}

TEST(Config, PositivityOfInitialData) {
  EXPECT_NE(error_of("omega0 = 0.5; 1, 0\n").find("omega0"), std::string::npos);
  EXPECT_NE(error_of("beta0 = 0; 1, 0\n").find("beta0"), std::string::npos);
  EXPECT_NE(error_of("k0 = 0; 1, 0\n").find("k0"), std::string::npos);
  EXPECT_NE(error_of("scenario = toy\ngamma0 = -1\n").find("gamma0"), std::string::npos);
}

TEST(Config, BetaAndKAreExclusive) {
  EXPECT_NE(error_of("beta0 = 1\nk0 = 1\n").find("either"), std::string::npos);
  const ScenarioConfig c = parse_config("k0 = 4\n");
  ASSERT_TRUE(c.initial.k0.has_value());
  const Field b = initial_beta(c.initial, Grid(8));
  EXPECT_EQ(b[3], 2.0);
}

TEST(Config, SweepListsRequired) {
  EXPECT_NE(error_of("scenario = stability\ndelta_list = \n").find("delta_list"), std::string::npos);
  const ScenarioConfig c = parse_config("scenario = epsilon_sweep\nepsilon_list = 0.5, 0.05\n");
  EXPECT_EQ(c.epsilon_list, (std::vector<double>{0.5, 0.05}));
  EXPECT_NE(error_of("scenario = epsilon_sweep\nepsilon_list = 0.5, -1\n").find("positive"), std::string::npos);
}

TEST(Config, GridSizeValidation) {
  EXPECT_NE(error_of("n_points = 31\n").find("even"), std::string::npos);
  EXPECT_NE(error_of("n_points_list = 64, 6\n").find("even"), std::string::npos);
}

TEST(Config, RoundTripThroughText) {
  for (const char* text : {"", "scenario = blowup\nname = b\nworkers = 3\n",
                           "scenario = stability\nk_fit = 2.5\nsymmetry_projection = true\n",
                           "scenario = uniform\nk0 = 1\n", "scenario = toy\n"}) {
    const ScenarioConfig a = parse_config(text);
    const ScenarioConfig b = parse_config(to_text(a));
    EXPECT_EQ(to_text(a), to_text(b));
  }
}

TEST(Config, PresetOverrides) {
  const ScenarioConfig c = parse_config("scenario = blowup\npreset = blowup\nn_points_list = 128\nt_final = 0.2\n");
  EXPECT_EQ(c.n_points_list, (std::vector<std::size_t>{128}));
  EXPECT_EQ(c.t_final, 0.2);
  EXPECT_NE(error_of("preset = nonexistent\n").find("preset"), std::string::npos);
}

TEST(Config, KeysAreDocumentedOnce) {
  const auto& keys = config_keys();
  std::set<std::string> unique(keys.begin(), keys.end());
  EXPECT_EQ(unique.size(), keys.size());
  for (const char* k : {"scenario", "n_points", "t_final", "epsilon_list", "delta_list", "symmetry_projection",
                        "output_dir", "k_fit", "c_cal"}) {
    EXPECT_TRUE(unique.count(k)) << k;
  }
}
