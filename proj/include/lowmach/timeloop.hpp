#pragma once

// Explicit RK4 time stepping with an eps-aware step bound, blow-up
// monitoring, state sampling and per-step norm records.

#include "lowmach/model.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace lowmach {

struct IntegratorConfig {
  double t_end = 1.0;
  double cfl = 0.4;
  int sample_every = 10;
  long max_steps = 1000000;
  double blowup_threshold = 1e4;
  /// Use this step instead of stable_dt (the last step is shortened to hit t_end).
  std::optional<double> fixed_dt;
  bool freeze_velocity = false;
  /// Sobolev index of the per-step norm records; negative disables them.
  int record_s = 2;

  void validate() const;
};

enum class Termination { completed, blowup, max_steps, failed };
std::string to_string(Termination t);
Termination termination_from_string(const std::string& s);

/// Sobolev quantities of one state used by the trajectory norms. Sums over
/// components are used for vector-valued pieces.
struct SobolevRecord {
  double grad_p_sm1 = 0, grad_v_sm1 = 0;
  double theta_s = 0, theta_s1 = 0;
  double p_s = 0, p_s1 = 0;
  double v_s = 0, v_s1 = 0;
  double grad_v_s = 0, grad_v_s1 = 0;
  double grad_theta_s = 0, grad_theta_s1 = 0;
  double grad_p_s = 0;
  double div_v_s = 0;
  double y_s = 0, y_s1 = 0, y_s2 = 0;
};

struct StepRecord {
  double t = 0.0;
  SobolevRecord raw;
  /// Same quantities for the (Id - J_{eps nu}) filtered state.
  SobolevRecord high;
  /// Low-frequency fast pieces: div J v and grad J p in H^{s-1} and H^s.
  double lf_div_sm1 = 0, lf_div_s = 0, lf_grad_sm1 = 0, lf_grad_s = 0;
};

SobolevRecord sobolev_record(const FluidState& state, int s);
StepRecord step_record(const FluidState& state, double t, int s, const ParamPoint& params);

struct Trajectory {
  std::vector<double> times;
  std::vector<FluidState> states;
  std::vector<double> dt_history;
  Termination termination = Termination::completed;
  std::string message;
  double t_final = 0.0;

  ParamPoint params;
  int record_s = -1;
  std::vector<StepRecord> records;
};

/// Largest step allowed by the acoustic, advective and diffusive bounds.
double stable_dt(const FluidState& state, const ParamPoint& params, const GasModel& model,
                 const TransportLaws& transport, double cfl, bool combustion = false,
                 SpeciesClosure species = SpeciesClosure::density_ratio);

/// Classical four-stage Runge-Kutta step for any state type with axpy().
template <class State, class Rhs>
State rk4_step(const State& u, double t, double dt, Rhs&& rhs) {
  const State k1 = rhs(u, t);
  State u2 = u;
  axpy(u2, 0.5 * dt, k1);
  const State k2 = rhs(u2, t + 0.5 * dt);
  State u3 = u;
  axpy(u3, 0.5 * dt, k2);
  const State k3 = rhs(u3, t + 0.5 * dt);
  State u4 = u;
  axpy(u4, dt, k3);
  const State k4 = rhs(u4, t + dt);
  State out = u;
  axpy(out, dt / 6.0, k1);
  axpy(out, dt / 3.0, k2);
  axpy(out, dt / 3.0, k3);
  axpy(out, dt / 6.0, k4);
  return out;
}

/// max over fields of ||f||_inf + ||grad f||_inf.
double w1inf_norm(const FluidState& state);

struct SimulationSetup {
  ParamPoint params;
  GasModel gas;
  TransportLaws transport;
  SourceSpec source;
  Formulation formulation = Formulation::primal;
  SpeciesClosure species = SpeciesClosure::density_ratio;
};

Trajectory simulate(const FluidState& initial, const SimulationSetup& setup,
                    const IntegratorConfig& config);

struct InitSpec {
  std::string generator = "general"; // general | well-prepared | theta-small | zero
  std::uint64_t seed = 1;
  double amplitude = 0.05;
  int band = 3;
  int species = 0;
};

/// Random band-limited profile: zero mean, modes with |k_j| <= band,
/// max |f| = 1. Deterministic in the generator state.
ScalarField random_profile(const GridSpec& grid, std::mt19937_64& rng, int band);

FluidState make_initial_data(const InitSpec& spec, const GridSpec& grid, const SimulationSetup& setup);

} // namespace lowmach
