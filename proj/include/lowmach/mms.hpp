#pragma once

// Manufactured-solution convergence studies for the primal and combustion
// solvers.

#include "lowmach/timeloop.hpp"

#include <string>
#include <vector>

namespace lowmach {

enum class MmsCase { primal_1d, primal_2d, combustion_1d };
std::string to_string(MmsCase c);
/// Accepts "primal-1d", "primal-2d", "combustion-1d".
MmsCase mms_case_from_string(const std::string& s);

struct MmsOptions {
  std::vector<int> spatial_n{8, 16, 32, 64};
  double spatial_dt = 1e-3;
  double spatial_T = 0.1;
  int temporal_n = 32;
  std::vector<double> temporal_dt{0.05, 0.025, 0.0125, 0.00625};
  double temporal_T = 0.5;
};

struct MmsPoint {
  double h = 0.0; // n for the spatial study, dt for the temporal one
  double error = 0.0;
};

struct MmsResult {
  MmsCase which = MmsCase::primal_1d;
  std::vector<MmsPoint> spatial;
  std::vector<MmsPoint> temporal;
  /// Least-squares slope of log(error) against log(dt).
  double temporal_order = 0.0;
};

/// Max-norm error at time T of the forced run against the exact solution.
double mms_error(MmsCase c, int n, double dt, double T);

MmsResult mms_convergence(MmsCase c, const MmsOptions& opts = {});

} // namespace lowmach
