#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "kolmo/experiments.hpp"

using namespace kolmo;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("kolmo_test_" + name);
  fs::remove_all(d);
  return d;
}

ScenarioConfig small_generic() {
  ScenarioConfig c = parse_config("scenario = generic\nn_points = 32\nt_final = 0.1\n");
  return c;
}

}  // namespace

TEST(Csv, HeaderAndRoundTrip) {
  const std::string h = csv_header();
  EXPECT_EQ(h.rfind("t,dt,omega_min,", 0), 0u);
  EXPECT_EQ(std::count(h.begin(), h.end(), ','), static_cast<long>(DiagnosticsRow::field_count - 1));
  DiagnosticsRow r;
  r.t = 0.1;
  r.xi = -1.0 / 3.0;
  const std::string line = csv_line(r);
  std::stringstream ss(line);
  std::string item;
  std::vector<double> v;
  while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  ASSERT_EQ(v.size(), DiagnosticsRow::field_count);
  EXPECT_EQ(v[0], 0.1);
  EXPECT_EQ(v[16], -1.0 / 3.0);
}

TEST(Numerics, RichardsonOnSyntheticLadder) {
  std::vector<double> v;
  for (int k = 0; k < 3; ++k) v.push_back(0.9 + 0.2 * std::pow(0.5, 2.0 * k));
  const Richardson r = richardson(v);
  ASSERT_TRUE(r.valid);
  EXPECT_NEAR(r.order, 2.0, 1e-12);
  EXPECT_NEAR(r.limit, 0.9, 1e-12);
  EXPECT_FALSE(richardson({1.0, 1.0, 1.0}).valid);
  EXPECT_FALSE(richardson({1.0, 2.0}).valid);
}

TEST(Numerics, LeastSquaresAndDerivative) {
  const LinearFit f = least_squares({0, 1, 2, 3}, {1, 3, 5, 7});
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.residual, 0.0, 1e-14);
  EXPECT_THROW(least_squares({1}, {1}), std::invalid_argument);
  const std::vector<double> t = {0.0, 0.1, 0.35};
  const std::vector<double> y = {0.0, 0.01, 0.1225};
  EXPECT_NEAR(centered_derivative(t, y, 1), 0.2, 1e-14);
  EXPECT_NEAR(observed_order(4e-4, 1e-4), 2.0, 1e-14);
}

TEST(Numerics, ExactRhsAgreesWithDiscreteAtSecondOrder) {
  const TrigPoly u = TrigPoly::parse("0; 0, 1"), w = TrigPoly::parse("2; 1, 0"), b = TrigPoly::parse("1; 0.5, 0");
  double prev = 0.0;
  for (std::size_t n : {64u, 128u, 256u}) {
    const Grid g(n);
    const State s(0.0, u.sample(g), w.sample(g), b.sample(g));
    const double e = max_node_error(rhs_beta_form(s, Params{}), exact_rhs_beta(u, w, b, Params{}, g));
    if (prev > 0.0) EXPECT_NEAR(observed_order(prev, e), 2.0, 0.2);
    prev = e;
  }
}

TEST(Pool, FailuresAreIsolated) {
  const auto out = run_pool<int>(
      6, 3,
      [](std::size_t i) {
        if (i == 2) throw std::runtime_error("boom");
        return static_cast<int>(i * i);
      },
      [](std::size_t, const std::string& why) { return why == "boom" ? -1 : -2; });
  ASSERT_EQ(out.size(), 6u);
  EXPECT_EQ(out[0], 0);
  EXPECT_EQ(out[1], 1);
  EXPECT_EQ(out[2], -1);
  EXPECT_EQ(out[5], 25);
}

TEST(RunScenario, UniformWritesFilesAndMatchesClosedForm) {
  ScenarioConfig c = parse_config("scenario = uniform\n");
  const fs::path dir = scratch_dir("uniform");
  RunOptions opt;
  opt.output_dir = dir.string();
  const SweepSummary s = run_scenario(c, opt);
  ASSERT_EQ(s.members.size(), 1u);
  EXPECT_EQ(s.members[0].status, RunStatus::completed);
  EXPECT_TRUE(fs::exists(dir / "uniform.csv"));
  EXPECT_TRUE(fs::exists(dir / "uniform_xi.dat"));
  EXPECT_TRUE(fs::exists(dir / "uniform_envelopes.dat"));
  const Json j = Json::parse(slurp(dir / "uniform_summary.json"));
  EXPECT_EQ(j["status"], "completed");
  EXPECT_EQ(j["version"], version);
  EXPECT_EQ(j["t_end"], 1.0);
  EXPECT_TRUE(j.contains("config"));
  EXPECT_TRUE(j.contains("terminal"));
  EXPECT_TRUE(j.contains("reason"));
  EXPECT_TRUE(j.contains("steps"));
  const Json& cmp = j["analysis"]["uniform_exact_comparison"][0];
  EXPECT_LT(cmp["omega_rel_error"].get<double>(), 1e-6);
  EXPECT_LT(cmp["k_rel_error"].get<double>(), 1e-6);
  const std::string csv = slurp(dir / "uniform.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), csv_header());
  fs::remove_all(dir);
}

TEST(RunScenario, OutputIsReproducible) {
  const ScenarioConfig c = small_generic();
  const fs::path a = scratch_dir("repro_a"), b = scratch_dir("repro_b");
  RunOptions oa, ob;
  oa.output_dir = a.string();
  ob.output_dir = b.string();
  run_scenario(c, oa);
  run_scenario(c, ob);
  for (const char* f : {"generic.csv", "generic_xi.dat", "generic_envelopes.dat"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  // the summary differs only in the echoed output paths
  std::string ja = slurp(a / "generic_summary.json"), jb = slurp(b / "generic_summary.json");
  for (std::string* s : {&ja, &jb}) {
    for (const auto& [from, to] : {std::pair{a.string(), std::string("DIR")}, {b.string(), std::string("DIR")}}) {
      for (auto p = s->find(from); p != std::string::npos; p = s->find(from)) s->replace(p, from.size(), to);
    }
  }
  EXPECT_EQ(ja, jb);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(RunScenario, OutputStrideKeepsFirstAndLastRows) {
  ScenarioConfig c = small_generic();
  c.output_stride = 7;
  const fs::path dir = scratch_dir("stride");
  RunOptions opt;
  opt.output_dir = dir.string();
  const SweepSummary s = run_scenario(c, opt);
  std::ifstream in(dir / "generic.csv");
  std::string line, last;
  std::size_t rows = 0;
  std::getline(in, line);
  while (std::getline(in, line)) {
    ++rows;
    last = line;
  }
  const std::size_t accepted = s.members[0].steps + 1;
  EXPECT_EQ(rows, (accepted + 6) / 7 + ((accepted - 1) % 7 != 0 ? 1 : 0));
  EXPECT_EQ(std::stod(last.substr(0, last.find(','))), 0.1);
  fs::remove_all(dir);
}

TEST(RunScenario, InvalidConfigIsRejectedBeforeRunning) {
  ScenarioConfig c = small_generic();
  c.params.alpha3 = -2.0;
  const fs::path dir = scratch_dir("invalid");
  RunOptions opt;
  opt.output_dir = dir.string();
  EXPECT_THROW(run_scenario(c, opt), ConfigError);
  EXPECT_FALSE(fs::exists(dir));
}

TEST(RunScenario, EpsilonSweepMembersSortedAndGapsShrink) {
  ScenarioConfig c = parse_config(
      "scenario = epsilon_sweep\nn_points = 64\nt_final = 0.1\nsample_interval = 0.01\nepsilon_list = 0.1, 0.01\n");
  RunOptions opt;
  opt.write_files = false;
  opt.workers = 2;
  const SweepSummary s = run_scenario(c, opt);
  ASSERT_EQ(s.members.size(), 3u);
  EXPECT_EQ(s.members[0].parameter, 0.0);
  EXPECT_EQ(s.members[1].parameter, 0.01);
  EXPECT_EQ(s.members[2].parameter, 0.1);
  EXPECT_TRUE(s.analysis["strictly_decreasing"].get<bool>());
  EXPECT_TRUE(s.files.empty());
}

TEST(RunScenario, StabilityReportsGronwallRatio) {
  ScenarioConfig c = parse_config(
      "scenario = stability\nn_points = 64\nt_final = 0.1\nsample_interval = 0.01\ndelta_list = 0.01, 0.001\n");
  RunOptions opt;
  opt.write_files = false;
  const SweepSummary s = run_scenario(c, opt);
  ASSERT_EQ(s.members.size(), 3u);
  for (const auto& d : s.analysis["per_delta"]) {
    EXPECT_LE(d["max_gronwall_ratio"].get<double>(), 1.0);
    EXPECT_EQ(d["samples"].get<std::size_t>(), 11u);
  }
}

TEST(RunScenario, ToyAndOracleCheck) {
  RunOptions opt;
  opt.write_files = false;
  ScenarioConfig toy = parse_config("scenario = toy\nn_points = 64\nt_final = 0.2\n");
  const SweepSummary t = run_scenario(toy, opt);
  EXPECT_EQ(t.members[0].status, RunStatus::completed);
  EXPECT_LE(t.analysis["uniform_steady_state"]["max_deviation"].get<double>(), 1e-15);
  const SweepSummary o = run_scenario(parse_config("scenario = oracle_check\n"), opt);
  EXPECT_TRUE(o.analysis["all_pass"].get<bool>());
}

TEST(OracleCheck, AllReferenceExamplesPass) {
  for (const auto& c : check_oracles()) EXPECT_TRUE(c.pass) << c.name << " computed " << c.computed;
}
