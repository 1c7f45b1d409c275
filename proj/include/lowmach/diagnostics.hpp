#pragma once

// Norms and structural diagnostics on states and trajectories.

#include "lowmach/timeloop.hpp"

#include <array>
#include <functional>
#include <string>

namespace lowmach {

/// ||grad p||_{H^{s-1}} + sum_j ||grad v_j||_{H^{s-1}} + ||theta||_{H^s}
/// + eps ||p||_{H^s} + eps sum_j ||v_j||_{H^s}. Gradients count as the sum of
/// their component norms.
double theorem_norm(const FluidState& state, double eps, int s);

struct XNormComponents {
  double grad_sup = 0;    // sup_t ||(grad p, grad v)||_{H^{s-1}}
  double hybrid_sup = 0;  // sup_t ||(theta, eps p, eps v)||_{H^{s+1}_nu}
  double viscous_l2 = 0;  // sqrt(mu) ||grad v||_{L^2_T(H^{s+1}_{eps nu})}
  double heat_l2 = 0;     // sqrt(kappa) ||grad theta||_{L^2_T(H^{s+1}_nu)}
  double pressure_l2 = 0; // sqrt(mu + kappa) ||grad p||_{L^2_T(H^s)}
  double div_l2 = 0;      // sqrt(kappa) ||div v||_{L^2_T(H^s)}

  double total() const;
  std::array<double, 6> as_array() const;
  static const std::array<const char*, 6>& names();
};

/// X-norm from per-step records (trapezoid rule in time).
XNormComponents x_norm(const std::vector<StepRecord>& records, const ParamPoint& params, bool high = false);

/// Uses the trajectory's step records when they were taken at index s,
/// otherwise rebuilds records from the sampled states.
XNormComponents x_norm(const Trajectory& traj, int s, const ParamPoint& params);

struct ZNorm {
  XNormComponents x;
  double species_sup = 0; // sup_t ||y||_{H^{s+1}_nu}
  double species_l2 = 0;  // sqrt(lambda) ||y||_{L^2_T(H^{s+2}_nu)}
  double total() const { return x.total() + species_sup + species_l2; }
};

ZNorm z_norm(const Trajectory& traj, int s, const ParamPoint& params);

struct HfLf {
  double hf = 0;
  double lf = 0;
};

/// hf: X-norm of the (Id - J_{eps nu}) filtered trajectory. lf: sup-in-time
/// H^{s-1} and nu-weighted L^2_T(H^s) norms of div J v and grad J p.
HfLf hf_lf_norms(const Trajectory& traj, int s, const ParamPoint& params);

enum class GammaMode { entropy, density, custom };
std::string to_string(GammaMode m);
GammaMode gamma_mode_from_string(const std::string& s);

struct LimitOptions {
  int s = 2;
  GammaMode gamma_mode = GammaMode::entropy;
  /// gamma(theta, wp) for GammaMode::custom.
  std::function<double(double theta, double wp)> custom_gamma;
  /// Use chi1(phi) pointwise instead of chi1(0,0) in v_e.
  bool weighted_ve = false;
};

struct LimitDiagnostics {
  double div_ve_norm = 0;
  double curl_gamma_v_norm = 0;
};

/// ||div(v - kappa chi1(0,0) k(theta) grad theta)||_{H^{s-1}} and
/// ||curl(gamma v)||_{H^{s-1}} (0 when d = 1).
LimitDiagnostics limit_diagnostics(const FluidState& state, const ParamPoint& params, const GasModel& model,
                                   const TransportLaws& transport, const LimitOptions& opts);

struct SymmetrizerFrame {
  ScalarField F_field;
  double P_mean = 0;
  VectorField V;
  /// Scalar part of U. This is p itself: subtracting eps^{-1} times the
  /// running time integral of P_mean is left to the caller.
  ScalarField U_q;
  VectorField U_v; // v - V
  ScalarField E_p; // g1
  ScalarField E_v; // g2 (times the identity)
};

/// F = kappa chi1 div(k grad theta) + (pressure source), P = <F>/<g1>,
/// V = grad Delta^{-1}(F - g1 P).
SymmetrizerFrame periodic_ansatz(const FluidState& state, const ParamPoint& params, const GasModel& model,
                                 const TransportLaws& transport, const SourceSpec& source, double t,
                                 Formulation formulation = Formulation::primal);

/// |<S(d_x)U, U>| with S U = (div U_v, grad U_q).
double skew_energy_residual(const ScalarField& q, const VectorField& w);

/// Max over interior samples of the defect in
///   d/dt <EU,U> = <((d_t + v.grad) E) U,U> + <E div v U,U> + 2<F,U>,
/// divided by the largest magnitude among those terms. Time derivatives use
/// three-point differences on the sample times.
double energy_balance_residual(const Trajectory& traj, const SimulationSetup& setup);

struct DiagnosticsSpec {
  int s = 2;
  GammaMode gamma_mode = GammaMode::entropy;
  std::function<double(double theta, double wp)> custom_gamma;
  bool energy = true;
};

struct NormReport {
  int s = 2;
  ParamPoint params;
  double theorem_norm_sup = 0;
  double x_norm = 0;
  XNormComponents x_components;
  double hf_norm = 0, lf_norm = 0;
  LimitDiagnostics limit; // sup over samples
  double skew_residual = 0;
  double balance_residual = 0;
  /// Combustion runs only.
  std::optional<double> z_norm;
};

NormReport make_norm_report(const Trajectory& traj, const SimulationSetup& setup, const DiagnosticsSpec& spec);

} // namespace lowmach
