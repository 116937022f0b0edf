// Command-line front end: runs scenarios from configuration files.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "kolmo/kolmo.hpp"

namespace {

struct Flags {
  std::string output_dir;
  std::size_t workers = 0;
  unsigned long long seed = 0;
  bool quiet = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void print_summary(const kolmo::SweepSummary& s, bool quiet) {
  if (quiet) return;
  for (const auto& m : s.members) {
    std::printf("%-32s %-16s t_end=%-12.6g steps=%-8zu %s\n", m.label.c_str(), kolmo::to_string(m.status), m.t_end,
                m.steps, m.reason.c_str());
  }
  if (!s.analysis.empty()) std::printf("%s\n", s.analysis.dump(2).c_str());
  for (const auto& f : s.files) std::printf("wrote %s\n", f.c_str());
}

int execute(const std::string& path, const Flags& flags, bool single) {
  kolmo::ScenarioConfig cfg;
  try {
    cfg = kolmo::parse_config(read_file(path));
  } catch (const kolmo::ConfigError& e) {
    std::fprintf(stderr, "%s: %s\n", path.c_str(), e.what());
    return 2;
  }
  if (single) cfg.n_points_list.clear();
  kolmo::RunOptions opt;
  opt.output_dir = flags.output_dir;
  opt.workers = flags.workers;
  if (!flags.quiet) opt.log = [](const std::string& s) { std::fprintf(stderr, "%s\n", s.c_str()); };
  try {
    const kolmo::SweepSummary s = kolmo::run_scenario(cfg, opt);
    print_summary(s, flags.quiet);
  } catch (const kolmo::ConfigError& e) {
    std::fprintf(stderr, "%s: %s\n", path.c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

void print_schema() {
  std::printf("CSV (one row per accepted step, %%.17g):\n%s\n\n", kolmo::csv_header().c_str());
  std::printf("toy CSV:\nt,dt,u_min,u_max,gamma_min,gamma_max,l2_u_sq,l1_gamma,mean_u,xi\n\n");
  std::printf("stability CSV:\nt,e_stab,theta1,theta2,theta3,gronwall_ratio\n\n");
  std::printf("plot columns:\n  <stem>_xi.dat: t xi riccati_bound riccati_solve\n");
  std::printf("  <stem>_envelopes.dat: t omega_min omega_max omega_lower omega_upper k_min k_lower\n\n");
  nlohmann::ordered_json j;
  j["artifact"] = "string";
  j["version"] = "string";
  j["scenario"] = "string";
  j["label"] = "string";
  j["status"] = "completed | blowup_detected | scheme_failure (single-member scenarios)";
  j["t_end"] = "number";
  j["reason"] = "string";
  j["steps"] = "integer";
  j["terminal"] = "object: final CSV row";
  j["config"] = "object: configuration echo";
  j["members"] = "array: label, parameter, n_points, status, t_end, reason, steps, terminal, "
                 "lifespan_lower_bound, lifespan_bound_contradicted, max_mean_drift, max_envelope_violation, "
                 "integrals, extra, files";
  j["analysis"] = "object: scenario-specific cross-member results";
  j["files"] = "array of paths";
  std::printf("JSON summary (<label>_summary.json):\n%s\n\nconfiguration keys:\n", j.dump(2).c_str());
  for (const auto& k : kolmo::config_keys()) std::printf("  %s\n", k.c_str());
}

int check_oracles(bool quiet) {
  bool all = true;
  for (const auto& c : kolmo::check_oracles()) {
    all = all && c.pass;
    if (!quiet) {
      std::printf("[%s] %-48s expected %.17g computed %.17g tol %.3g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                  c.expected, c.computed, c.tolerance);
    }
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for the one-dimensional k-omega model on the torus"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  app.add_option("--output-dir", flags.output_dir, "Override the configured output directory");
  app.add_option("--workers", flags.workers, "Override the configured worker count")->check(CLI::PositiveNumber);
  app.add_option("--seed", flags.seed, "Reserved; the lab uses no randomness");
  app.add_flag("--quiet", flags.quiet, "Suppress progress and summary output");

  std::string run_path, sweep_path;
  auto* run = app.add_subcommand("run", "Run a scenario at its n_points");
  run->add_option("config", run_path, "Configuration file")->required()->check(CLI::ExistingFile);
  auto* sweep = app.add_subcommand("sweep", "Run every member of a scenario");
  sweep->add_option("config", sweep_path, "Configuration file")->required()->check(CLI::ExistingFile);
  auto* oracles = app.add_subcommand("check-oracles", "Evaluate the closed-form oracles on reference examples");
  auto* schema = app.add_subcommand("schema", "Print output schemas and configuration keys");
  auto* ver = app.add_subcommand("version", "Print the version");

  CLI11_PARSE(app, argc, argv);

  if (*run) return execute(run_path, flags, true);
  if (*sweep) return execute(sweep_path, flags, false);
  if (*oracles) return check_oracles(flags.quiet);
  if (*schema) {
    print_schema();
    return 0;
  }
  if (*ver) {
    std::printf("kolmo_lab %s\n", kolmo::version);
    return 0;
  }
  return 0;
}
