#pragma once

// Line-based `section.key = value` run and sweep configuration.

#include "lowmach/diagnostics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lowmach {

struct GasConfig {
  std::string kind = "ideal"; // ideal | virial | table
  double R = 1.0;
  std::vector<double> cv{1.5}; // C_V(T) polynomial coefficients
  double a0 = 0.5, b0 = 0.1;   // virial gas
  std::string table;           // path, for kind = table
  double P_ref = 1.0, T_ref = 1.0;
};

struct SourceConfig {
  std::string kind = "none"; // none | prescribed | linear
  /// prescribed: Q(t,x) = amplitude * cos(wavenumber * x_1 + omega * t).
  double amplitude = 0.0;
  int wavenumber = 1;
  double omega = 0.0;
  /// linear (combustion): Q1 = q1 * sum_l y_l, Q3 = q3 * sum_l y_l.
  double q1 = 0.0, q3 = 0.0;
};

struct RunConfig {
  GridSpec grid;
  GasConfig gas;
  TransportLaws transport;
  Formulation formulation = Formulation::primal;
  SpeciesClosure species_closure = SpeciesClosure::density_ratio;
  ParamPoint params;
  InitSpec init;
  SourceConfig source;
  IntegratorConfig integrator;
  int s = 2;
  GammaMode gamma_mode = GammaMode::entropy;
  bool energy = true;
  /// Include wall-clock timings in reports (off for bitwise-reproducible output).
  bool wall_time = true;
};

struct SweepAxes {
  std::vector<double> eps, mu, kappa, lambda;
  int workers = 1;
};

struct ParsedConfig {
  RunConfig run;
  /// Present when the text has a [sweep] section (`sweep.*` keys).
  std::optional<SweepAxes> sweep;
};

/// Parses and validates. Every problem is collected; a ConfigError carries
/// them one per line.
ParsedConfig parse_config(const std::string& text);
ParsedConfig load_config_file(const std::string& path);

/// Canonical text form: every key, fixed order, round-trip number format.
/// parse_config(canonical_config(c)) reproduces c.
std::string canonical_config(const ParsedConfig& cfg);

GasModel build_gas(const GasConfig& g);
SourceSpec build_source(const SourceConfig& s);
SimulationSetup build_setup(const RunConfig& rc);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

} // namespace lowmach
