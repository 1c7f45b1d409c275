// lowmach: command-line front end for runs, sweeps, thermodynamic checks,
// MMS studies and trajectory post-processing.

#include "lowmach/errors.hpp"
#include "lowmach/mms.hpp"
#include "lowmach/report.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace lowmach;

namespace {

struct Globals {
  std::string out = ".";
  int workers = 0;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
};

ParsedConfig load(const std::string& path, const Globals& g) {
  ParsedConfig cfg = load_config_file(path);
  if (g.seed) cfg.run.init.seed = *g.seed;
  return cfg;
}

void print_record(const SweepRecord& r) {
  std::printf("eps=%s mu=%s kappa=%s lambda=%s  %s  T=%s  theorem_norm_sup=%s  x_norm=%s",
              format_double(r.params.eps).c_str(), format_double(r.params.mu).c_str(),
              format_double(r.params.kappa).c_str(), format_double(r.params.lambda).c_str(),
              r.skipped ? "skipped" : to_string(r.termination).c_str(), format_double(r.realized_T).c_str(),
              format_double(r.norms.theorem_norm_sup).c_str(), format_double(r.norms.x_norm).c_str());
  if (!r.message.empty()) std::printf("  (%s)", r.message.c_str());
  std::printf("\n");
}

int cmd_simulate(const std::string& path, const Globals& g) {
  ParsedConfig cfg = load(path, g);
  cfg.sweep.reset();
  Trajectory traj;
  ReportTable table;
  table.config = canonical_config(cfg);
  table.records.push_back(run_single(cfg.run, &traj));
  print_record(table.records.front());
  std::cout << "report: " << write_report(table, g.out, g.format) << "\n";
  if (!traj.states.empty()) {
    const std::string tpath = (std::filesystem::path(g.out) / "trajectory.json").string();
    save_trajectory(traj, tpath);
    std::cout << "trajectory: " << tpath << "\n";
  }
  return sweep_exit_code(table);
}

int cmd_sweep(const std::string& path, const Globals& g) {
  const ParsedConfig cfg = load(path, g);
  const ReportTable table = run_sweep(cfg, g.workers);
  for (const auto& r : table.records) print_record(r);
  if (table.boundedness_ratio) std::cout << "boundedness_ratio: " << format_double(*table.boundedness_ratio) << "\n";
  std::cout << "report: " << write_report(table, g.out, g.format) << "\n";
  return sweep_exit_code(table);
}

int cmd_thermo_check(const std::string& path, const Globals& g) {
  const ParsedConfig cfg = load(path, g);
  const GasModel gas = build_gas(cfg.run.gas);
  const double P0 = gas.P_ref(), T0 = gas.T_ref();
  const ThermoCoefficients tc = thermo_coefficients(gas, P0, T0);
  const CoefficientSet cs = coefficient_set(gas, 0.0, 0.0);
  // One e-fold around the reference, clipped to the model's box.
  StateBox box{std::max(P0 / M_E, gas.box().P_lo), std::min(P0 * M_E, gas.box().P_hi),
               std::max(T0 / M_E, gas.box().T_lo), std::min(T0 * M_E, gas.box().T_hi)};
  const ValidationReport vr = validate_gas_model(gas, box, 9);
  const DiffeoReport dr = check_slow_variable_jacobian(gas, -0.5, 0.5, -0.5, 0.5, 9);

  nlohmann::json j{{"schema_version", 1},
                   {"gas", gas.name()},
                   {"reference", {{"P", P0}, {"T", T0}}},
                   {"Rcal", tc.Rcal},
                   {"C_P", tc.C_P},
                   {"C_V", tc.C_V},
                   {"chi1", cs.chi1},
                   {"chi3", cs.chi3},
                   {"maxwell_residual", maxwell_residual(gas, P0, T0)},
                   {"validation",
                    {{"passed", vr.passed},
                     {"points", vr.points},
                     {"failed_points", vr.failed_points},
                     {"max_identity_residual", vr.max_identity_residual},
                     {"max_maxwell_residual", vr.max_maxwell_residual}}},
                   {"slow_variable_jacobian", {{"passed", dr.passed}, {"min_det", dr.min_det}}}};
  for (const auto& f : vr.failures) {
    j["validation"]["failures"].push_back({{"P", f.P}, {"T", f.T}, {"reason", f.reason}});
  }
  std::cout << j.dump(2) << "\n";
  std::filesystem::create_directories(g.out);
  const std::string out = (std::filesystem::path(g.out) / "thermo_check.json").string();
  std::ofstream(out) << j.dump(2) << "\n";
  return vr.passed && dr.passed ? 0 : 2;
}

int cmd_mms(const std::string& name, const Globals& g) {
  const MmsCase c = mms_case_from_string(name);
  const MmsResult r = mms_convergence(c);
  nlohmann::json j{{"schema_version", 1}, {"case", to_string(c)}, {"temporal_order", r.temporal_order}};
  std::printf("%s\n  spatial (n, max error)\n", to_string(c).c_str());
  for (const auto& p : r.spatial) {
    std::printf("    %4d  %.3e\n", static_cast<int>(p.h), p.error);
    j["spatial"].push_back({{"n", static_cast<int>(p.h)}, {"error", p.error}});
  }
  std::printf("  temporal (dt, max error)\n");
  for (const auto& p : r.temporal) {
    std::printf("    %-8g  %.3e\n", p.h, p.error);
    j["temporal"].push_back({{"dt", p.h}, {"error", p.error}});
  }
  std::printf("  temporal order %.4f\n", r.temporal_order);

  std::filesystem::create_directories(g.out);
  const std::string base = (std::filesystem::path(g.out) / ("mms_" + to_string(c))).string();
  if (g.format == "json") {
    std::ofstream(base + ".json") << j.dump(2) << "\n";
  } else {
    std::ofstream out(base + ".csv");
    out << "study,h,error\n";
    for (const auto& p : r.spatial) out << "spatial," << format_double(p.h) << "," << format_double(p.error) << "\n";
    for (const auto& p : r.temporal) out << "temporal," << format_double(p.h) << "," << format_double(p.error) << "\n";
  }
  return 0;
}

int cmd_norms(const std::string& cfg_path, const std::string& traj_path, const Globals& g) {
  ParsedConfig cfg = load(cfg_path, g);
  cfg.sweep.reset();
  const Trajectory traj = load_trajectory(traj_path);
  RunConfig rc = cfg.run;
  rc.params = traj.params;
  SimulationSetup su = build_setup(rc);
  DiagnosticsSpec spec;
  spec.s = rc.s;
  spec.gamma_mode = rc.gamma_mode;
  spec.energy = rc.energy;

  SweepRecord rec;
  rec.params = traj.params;
  rec.termination = traj.termination;
  rec.message = traj.message;
  rec.realized_T = traj.t_final;
  rec.norms = make_norm_report(traj, su, spec);
  ReportTable table;
  table.config = canonical_config(cfg);
  table.records.push_back(rec);
  print_record(rec);
  std::cout << "report: " << write_report(table, g.out, g.format) << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-Mach-number compressible flow solver and diagnostics"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--workers", g.workers, "Sweep worker threads (default: sweep.workers)")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Override init.seed");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  std::string config, trajectory, mms_case;
  auto* sim = app.add_subcommand("simulate", "Run one configuration");
  sim->add_option("config", config, "Config file")->required();
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("config", config, "Config file")->required();
  auto* thermo = app.add_subcommand("thermo-check", "Validate the configured gas model");
  thermo->add_option("config", config, "Config file")->required();
  auto* mms = app.add_subcommand("mms", "Manufactured-solution convergence study");
  mms->add_option("case", mms_case, "primal-1d | primal-2d | combustion-1d")->required();
  auto* norms = app.add_subcommand("norms", "Diagnostics for a saved trajectory");
  norms->add_option("config", config, "Config file")->required();
  norms->add_option("trajectory", trajectory, "Trajectory JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (*seed_opt) g.seed = seed;

  try {
    if (*sim) return cmd_simulate(config, g);
    if (*sweep) return cmd_sweep(config, g);
    if (*thermo) return cmd_thermo_check(config, g);
    if (*mms) return cmd_mms(mms_case, g);
    if (*norms) return cmd_norms(config, trajectory, g);
  } catch (const ConfigError& e) {
    std::cerr << "config error:\n" << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
