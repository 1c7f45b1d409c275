#include "lowmach/timeloop.hpp"

#include "lowmach/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lowmach {

void IntegratorConfig::validate() const {
  std::vector<std::string> errs;
  if (!(t_end > 0.0)) errs.push_back("integrator.t_end must be > 0");
  if (!(cfl > 0.0 && cfl <= 1.0)) errs.push_back("integrator.cfl must be in (0,1]");
  if (sample_every < 1) errs.push_back("integrator.sample_every must be >= 1");
  if (max_steps < 1) errs.push_back("integrator.max_steps must be >= 1");
  if (!(blowup_threshold > 0.0)) errs.push_back("integrator.blowup_threshold must be > 0");
  if (fixed_dt && !(*fixed_dt > 0.0)) errs.push_back("integrator.dt must be > 0");
  if (!errs.empty()) {
    std::string msg;
    for (const auto& e : errs) msg += (msg.empty() ? "" : "; ") + e;
    throw ConfigError(msg);
  }
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::blowup: return "blowup";
    case Termination::max_steps: return "max_steps";
    case Termination::failed: return "failed";
  }
  return "failed";
}

Termination termination_from_string(const std::string& s) {
  if (s == "completed") return Termination::completed;
  if (s == "blowup") return Termination::blowup;
  if (s == "max_steps") return Termination::max_steps;
  if (s == "failed") return Termination::failed;
  throw std::invalid_argument("unknown termination reason '" + s + "'");
}

// --- norm records ---------------------------------------------------------

namespace {

struct FieldSpectra {
  Spectrum p;
  std::vector<Spectrum> v;
  Spectrum theta;
  std::vector<Spectrum> y;
};

FieldSpectra spectra_of(const FluidState& s) {
  FieldSpectra f{forward(s.p), {}, forward(s.theta), {}};
  for (const auto& c : s.v.components) f.v.push_back(forward(c));
  for (const auto& c : s.y) f.y.push_back(forward(c));
  return f;
}

Spectrum scaled(const Spectrum& s, const std::vector<double>& factor) {
  Spectrum out = s;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] *= factor[i];
  return out;
}

FieldSpectra filtered(const FieldSpectra& f, const std::vector<double>& factor) {
  FieldSpectra out{scaled(f.p, factor), {}, scaled(f.theta, factor), {}};
  for (const auto& c : f.v) out.v.push_back(scaled(c, factor));
  for (const auto& c : f.y) out.y.push_back(scaled(c, factor));
  return out;
}

double grad_norm(const Spectrum& f, double sigma) {
  double acc = 0.0;
  for (int a = 0; a < f.grid.dim; ++a) acc += sobolev_norm(derivative(f, a), sigma);
  return acc;
}

Spectrum div_spectrum(const std::vector<Spectrum>& v) {
  Spectrum acc(v.front().grid);
  for (int a = 0; a < static_cast<int>(v.size()); ++a) {
    const Spectrum d = derivative(v[a], a);
    for (std::size_t i = 0; i < acc.coeffs.size(); ++i) acc.coeffs[i] += d.coeffs[i];
  }
  return acc;
}

SobolevRecord record_of(const FieldSpectra& f, int s) {
  SobolevRecord r;
  const double sm1 = std::max(0, s - 1);
  r.grad_p_sm1 = grad_norm(f.p, sm1);
  r.grad_p_s = grad_norm(f.p, s);
  r.theta_s = sobolev_norm(f.theta, s);
  r.theta_s1 = sobolev_norm(f.theta, s + 1);
  r.p_s = sobolev_norm(f.p, s);
  r.p_s1 = sobolev_norm(f.p, s + 1);
  r.grad_theta_s = grad_norm(f.theta, s);
  r.grad_theta_s1 = grad_norm(f.theta, s + 1);
  for (const auto& c : f.v) {
    r.grad_v_sm1 += grad_norm(c, sm1);
    r.v_s += sobolev_norm(c, s);
    r.v_s1 += sobolev_norm(c, s + 1);
    r.grad_v_s += grad_norm(c, s);
    r.grad_v_s1 += grad_norm(c, s + 1);
  }
  r.div_v_s = sobolev_norm(div_spectrum(f.v), s);
  for (const auto& c : f.y) {
    r.y_s += sobolev_norm(c, s);
    r.y_s1 += sobolev_norm(c, s + 1);
    r.y_s2 += sobolev_norm(c, s + 2);
  }
  return r;
}

std::vector<double> cutoff_factors(const GridSpec& g, double h, bool high) {
  const auto& t = wave_tables(g);
  std::vector<double> f(t.ksq.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double j = h == 0.0 ? 1.0 : cutoff(h * std::sqrt(t.ksq[i]));
    f[i] = high ? 1.0 - j : j;
  }
  return f;
}

} // namespace

SobolevRecord sobolev_record(const FluidState& state, int s) {
  if (s < 1) throw std::invalid_argument("norm records need s >= 1");
  return record_of(spectra_of(state), s);
}

StepRecord step_record(const FluidState& state, double t, int s, const ParamPoint& params) {
  if (s < 1) throw std::invalid_argument("norm records need s >= 1");
  const GridSpec& g = state.grid();
  const double h = params.eps * params.nu();
  const FieldSpectra f = spectra_of(state);
  StepRecord r;
  r.t = t;
  r.raw = record_of(f, s);
  if (h > 0.0) r.high = record_of(filtered(f, cutoff_factors(g, h, true)), s);
  const FieldSpectra low = h > 0.0 ? filtered(f, cutoff_factors(g, h, false)) : f;
  const Spectrum dj = div_spectrum(low.v);
  r.lf_div_sm1 = sobolev_norm(dj, s - 1);
  r.lf_div_s = sobolev_norm(dj, s);
  r.lf_grad_sm1 = grad_norm(low.p, s - 1);
  r.lf_grad_s = grad_norm(low.p, s);
  return r;
}

// --- step control ---------------------------------------------------------

double stable_dt(const FluidState& state, const ParamPoint& params, const GasModel& model,
                 const TransportLaws& transport, double cfl, bool combustion, SpeciesClosure species) {
  const GridSpec& g = state.grid();
  const double dx = g.dx();
  const double delta = 1e-12;
  const std::optional<SpeciesClosure> sp = combustion ? std::optional(species) : std::nullopt;
  const CoefficientFields cf = coefficient_fields(model, state.theta, params.eps * state.p, sp);
  double c0 = 0.0, visc = 0.0, heat = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < g.points(); ++i) {
    const double th = state.theta[i];
    c0 = std::max(c0, 1.0 / std::sqrt(cf.g1[i] * cf.g2[i]));
    visc = std::max(visc, cf.chi2[i] * (std::abs(transport.zeta(th)) + std::abs(transport.eta(th))) / cf.g2[i]);
    heat = std::max(heat, std::abs(transport.k(th)) * cf.chi3[i] / cf.g3[i]);
    if (combustion) diff = std::max(diff, std::abs(transport.D(th)) * (*cf.chi4)[i] / (*cf.g4)[i]);
  }
  const double acoustic = params.eps * dx / c0;
  const double advective = dx / (state.v.max_abs() + delta);
  const double rate = params.mu * visc + params.kappa * heat + (combustion ? params.lambda * diff : 0.0);
  const double diffusive = dx * dx / (2.0 * g.dim * rate + delta);
  return cfl * std::min({acoustic, advective, diffusive});
}

double w1inf_norm(const FluidState& state) {
  auto one = [](const ScalarField& f) {
    const VectorField gf = grad(f);
    double gmax = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      double acc = 0.0;
      for (const auto& c : gf.components) acc += c[i] * c[i];
      gmax = std::max(gmax, std::sqrt(acc));
    }
    return f.max_abs() + gmax;
  };
  double m = std::max(one(state.p), one(state.theta));
  for (const auto& c : state.v.components) m = std::max(m, one(c));
  for (const auto& c : state.y) m = std::max(m, one(c));
  return std::isfinite(m) ? m : std::numeric_limits<double>::infinity();
}

// --- driver ---------------------------------------------------------------

namespace {

// Integrates either FluidState (primal, combustion) or SymState
// (symmetrized) and reports everything in terms of FluidState.
class Driver {
public:
  Driver(const SimulationSetup& setup, const IntegratorConfig& cfg) : su_(setup), cfg_(cfg) {
    opts_.freeze_velocity = cfg.freeze_velocity;
    opts_.species = setup.species;
  }

  Trajectory run(const FluidState& initial) {
    Trajectory tr;
    tr.params = su_.params;
    tr.record_s = cfg_.record_s;
    FluidState u = initial;
    SymState w;
    const bool sym = su_.formulation == Formulation::symmetrized;
    double t = 0.0;
    try {
      if (sym) w = to_symmetrized(u, su_.params, su_.gas);
    } catch (const Error& ex) {
      tr.termination = Termination::failed;
      tr.message = ex.what();
      tr.times.push_back(0.0);
      tr.states.push_back(u);
      return tr;
    }
    sample(tr, u, t);
    if (cfg_.record_s >= 1) tr.records.push_back(step_record(u, t, cfg_.record_s, su_.params));

    long steps = 0;
    const double tol = 1e-12 * cfg_.t_end;
    try {
      if (!u.all_finite()) throw NumericalBlowup("initial data are not finite");
      while (t < cfg_.t_end - tol) {
        if (steps >= cfg_.max_steps) {
          tr.termination = Termination::max_steps;
          tr.message = "step limit reached at t = " + std::to_string(t);
          break;
        }
        double dt = cfg_.fixed_dt ? *cfg_.fixed_dt
                                  : stable_dt(u, su_.params, su_.gas, su_.transport, cfg_.cfl,
                                              su_.formulation == Formulation::combustion, su_.species);
        if (!(dt > 0.0) || !std::isfinite(dt)) throw NumericalBlowup("step size collapsed");
        if (t + dt > cfg_.t_end) dt = cfg_.t_end - t;

        if (sym) {
          const ScalarField guess = u.p;
          w = rk4_step(w, t, dt, [&](const SymState& x, double) {
            return rhs_symmetrized(x, su_.params, su_.gas, su_.transport, opts_, &guess);
          });
          if (!w.all_finite()) throw NumericalBlowup("non-finite state");
          u = from_symmetrized(w, su_.params, su_.gas, &guess);
        } else {
          u = rk4_step(u, t, dt, [&](const FluidState& x, double tt) { return rhs(x, tt); });
        }
        t = (t + dt > cfg_.t_end - tol) ? cfg_.t_end : t + dt;
        ++steps;
        tr.dt_history.push_back(dt);
        if (!u.all_finite()) throw NumericalBlowup("non-finite state");

        const double w1 = w1inf_norm(u);
        if (!(w1 <= cfg_.blowup_threshold)) {
          sample(tr, u, t);
          tr.termination = Termination::blowup;
          std::ostringstream os;
          os << "W^{1,inf} norm " << w1 << " exceeded threshold " << cfg_.blowup_threshold << " at t = " << t;
          tr.message = os.str();
          break;
        }
        if (cfg_.record_s >= 1) tr.records.push_back(step_record(u, t, cfg_.record_s, su_.params));
        if (steps % cfg_.sample_every == 0) sample(tr, u, t);
      }
    } catch (const NumericalBlowup& ex) {
      tr.termination = Termination::blowup;
      tr.message = ex.what();
    } catch (const Error& ex) {
      tr.termination = Termination::failed;
      tr.message = ex.what();
    }
    if (tr.times.back() < t && u.all_finite()) sample(tr, u, t);
    tr.t_final = t;
    return tr;
  }

private:
  Tendency rhs(const FluidState& x, double t) const {
    if (su_.formulation == Formulation::combustion) {
      return rhs_combustion(x, su_.params, su_.gas, su_.transport, su_.source, t, opts_);
    }
    return rhs_primal(x, su_.params, su_.gas, su_.transport, su_.source, t, opts_);
  }

  static void sample(Trajectory& tr, const FluidState& u, double t) {
    tr.times.push_back(t);
    tr.states.push_back(u);
  }

  const SimulationSetup& su_;
  const IntegratorConfig& cfg_;
  RhsOptions opts_;
};

} // namespace

Trajectory simulate(const FluidState& initial, const SimulationSetup& setup, const IntegratorConfig& config) {
  config.validate();
  if (setup.formulation == Formulation::combustion) {
    setup.params.validate(true);
    if (initial.y.empty()) throw ConfigError("combustion runs need at least one species field");
  } else {
    setup.params.validate(false);
  }
  if (setup.formulation == Formulation::symmetrized && setup.source.mode != SourceSpec::Mode::none) {
    throw ConfigError("the symmetrized formulation requires Q = 0");
  }
  return Driver(setup, config).run(initial);
}

} // namespace lowmach
