#pragma once

// Parameter sweeps: one simulation plus diagnostics per (eps, mu, kappa, lambda).

#include "lowmach/config.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lowmach {

struct SweepRecord {
  ParamPoint params;
  /// Not run (combustion point with lambda < nu); `message` says why.
  bool skipped = false;
  Termination termination = Termination::completed;
  std::string message;
  double realized_T = 0.0;
  NormReport norms;
  double wall_ms = 0.0;
};

struct ReportTable {
  static constexpr int schema_version = 1;
  std::string config; // canonical config text
  std::vector<SweepRecord> records;
  /// max/min over the eps axis of sup_t theorem_norm, worst over the other
  /// axes. Empty when fewer than two completed points share (mu,kappa,lambda).
  std::optional<double> boundedness_ratio;
};

/// Runs one point from given initial data. Errors never escape: they become
/// a `failed` record.
SweepRecord run_point(const RunConfig& rc, const ParamPoint& params, const FluidState& initial,
                      Trajectory* keep = nullptr);

/// Simulates `rc` at its own parameters with freshly generated initial data.
SweepRecord run_single(const RunConfig& rc, Trajectory* keep = nullptr);

/// Cartesian product of the axes, sorted by (eps, mu, kappa, lambda).
std::vector<ParamPoint> sweep_points(const SweepAxes& axes);

/// `workers` <= 0 uses the config value.
ReportTable run_sweep(const ParsedConfig& cfg, int workers = 0);

std::optional<double> boundedness_ratio(const std::vector<SweepRecord>& records);

/// 0 all completed (or skipped), 2 every run point failed, 3 some failed.
int sweep_exit_code(const ReportTable& table);

} // namespace lowmach
