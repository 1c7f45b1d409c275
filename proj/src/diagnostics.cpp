#include "lowmach/diagnostics.hpp"

#include "lowmach/errors.hpp"

#include <algorithm>
#include <cmath>

namespace lowmach {

double theorem_norm(const FluidState& state, double eps, int s) {
  if (s < 1) throw std::invalid_argument("theorem_norm needs s >= 1");
  const SobolevRecord r = sobolev_record(state, s);
  return r.grad_p_sm1 + r.grad_v_sm1 + r.theta_s + eps * r.p_s + eps * r.v_s;
}

// --- X, Z norms -----------------------------------------------------------

double XNormComponents::total() const {
  return grad_sup + hybrid_sup + viscous_l2 + heat_l2 + pressure_l2 + div_l2;
}

std::array<double, 6> XNormComponents::as_array() const {
  return {grad_sup, hybrid_sup, viscous_l2, heat_l2, pressure_l2, div_l2};
}

const std::array<const char*, 6>& XNormComponents::names() {
  static const std::array<const char*, 6> n{"grad_sup", "hybrid_sup", "viscous_l2",
                                            "heat_l2",  "pressure_l2", "div_l2"};
  return n;
}

namespace {

// sqrt of the trapezoid integral of f(record)^2.
template <class Fn>
double l2_time(const std::vector<StepRecord>& recs, Fn&& f) {
  double acc = 0.0;
  for (std::size_t i = 1; i < recs.size(); ++i) {
    const double a = f(recs[i - 1]), b = f(recs[i]);
    acc += 0.5 * (recs[i].t - recs[i - 1].t) * (a * a + b * b);
  }
  return std::sqrt(acc);
}

template <class Fn>
double sup_time(const std::vector<StepRecord>& recs, Fn&& f) {
  double m = 0.0;
  for (const auto& r : recs) m = std::max(m, f(r));
  return m;
}

std::vector<StepRecord> records_for(const Trajectory& traj, int s, const ParamPoint& params) {
  if (traj.record_s == s && traj.records.size() >= 2) return traj.records;
  if (traj.states.size() < 2) throw std::invalid_argument("trajectory norms need at least two samples");
  std::vector<StepRecord> recs;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    recs.push_back(step_record(traj.states[i], traj.times[i], s, params));
  }
  return recs;
}

} // namespace

XNormComponents x_norm(const std::vector<StepRecord>& records, const ParamPoint& params, bool high) {
  const double eps = params.eps, nu = params.nu();
  auto pick = [high](const StepRecord& r) -> const SobolevRecord& { return high ? r.high : r.raw; };
  XNormComponents x;
  x.grad_sup = sup_time(records, [&](const StepRecord& r) { return pick(r).grad_p_sm1 + pick(r).grad_v_sm1; });
  x.hybrid_sup = sup_time(records, [&](const StepRecord& r) {
    const SobolevRecord& q = pick(r);
    return q.theta_s + nu * q.theta_s1 + eps * (q.p_s + nu * q.p_s1) + eps * (q.v_s + nu * q.v_s1);
  });
  if (params.mu > 0.0) {
    x.viscous_l2 = std::sqrt(params.mu) *
                   l2_time(records, [&](const StepRecord& r) { return pick(r).grad_v_s + eps * nu * pick(r).grad_v_s1; });
  }
  if (params.kappa > 0.0) {
    x.heat_l2 = std::sqrt(params.kappa) *
                l2_time(records, [&](const StepRecord& r) { return pick(r).grad_theta_s + nu * pick(r).grad_theta_s1; });
    x.div_l2 = std::sqrt(params.kappa) * l2_time(records, [&](const StepRecord& r) { return pick(r).div_v_s; });
  }
  if (nu > 0.0) x.pressure_l2 = nu * l2_time(records, [&](const StepRecord& r) { return pick(r).grad_p_s; });
  return x;
}

XNormComponents x_norm(const Trajectory& traj, int s, const ParamPoint& params) {
  return x_norm(records_for(traj, s, params), params);
}

ZNorm z_norm(const Trajectory& traj, int s, const ParamPoint& params) {
  const auto recs = records_for(traj, s, params);
  const double nu = params.nu();
  ZNorm z;
  z.x = x_norm(recs, params);
  z.species_sup = sup_time(recs, [&](const StepRecord& r) { return r.raw.y_s + nu * r.raw.y_s1; });
  if (params.lambda > 0.0) {
    z.species_l2 = std::sqrt(params.lambda) *
                   l2_time(recs, [&](const StepRecord& r) { return r.raw.y_s1 + nu * r.raw.y_s2; });
  }
  return z;
}

HfLf hf_lf_norms(const Trajectory& traj, int s, const ParamPoint& params) {
  const auto recs = records_for(traj, s, params);
  const double nu = params.nu();
  HfLf out;
  out.hf = params.eps * nu > 0.0 ? x_norm(recs, params, true).total() : 0.0;
  out.lf = sup_time(recs, [](const StepRecord& r) { return r.lf_div_sm1; }) +
           sup_time(recs, [](const StepRecord& r) { return r.lf_grad_sm1; });
  if (nu > 0.0) {
    out.lf += nu * l2_time(recs, [](const StepRecord& r) { return r.lf_div_s; }) +
              nu * l2_time(recs, [](const StepRecord& r) { return r.lf_grad_s; });
  }
  return out;
}

// --- low Mach limit -------------------------------------------------------

std::string to_string(GammaMode m) {
  switch (m) {
    case GammaMode::entropy: return "entropy";
    case GammaMode::density: return "density";
    case GammaMode::custom: return "custom";
  }
  return "entropy";
}

GammaMode gamma_mode_from_string(const std::string& s) {
  if (s == "entropy") return GammaMode::entropy;
  if (s == "density") return GammaMode::density;
  if (s == "custom") return GammaMode::custom;
  throw ConfigError("unknown gamma_mode '" + s + "' (expected entropy, density or custom)");
}

LimitDiagnostics limit_diagnostics(const FluidState& state, const ParamPoint& params, const GasModel& model,
                                   const TransportLaws& transport, const LimitOptions& opts) {
  if (opts.s < 1) throw std::invalid_argument("limit diagnostics need s >= 1");
  const GridSpec& g = state.grid();
  const int dim = g.dim;
  const double sm1 = opts.s - 1;
  LimitDiagnostics out;

  VectorField ve = state.v;
  if (params.kappa != 0.0) {
    const VectorField gt = grad(state.theta);
    const double chi1_0 = coefficient_set(model, 0.0, 0.0).chi1;
    for (std::size_t i = 0; i < g.points(); ++i) {
      const double th = state.theta[i];
      const double chi1 = opts.weighted_ve ? coefficient_set(model, th, params.eps * state.p[i]).chi1 : chi1_0;
      const double w = params.kappa * chi1 * transport.k(th);
      for (int j = 0; j < dim; ++j) ve[j][i] -= w * gt[j][i];
    }
  }
  out.div_ve_norm = sobolev_norm(div(ve), sm1);

  if (dim == 1) return out;
  if (opts.gamma_mode == GammaMode::custom && !opts.custom_gamma) {
    throw ConfigError("gamma_mode = custom needs a gamma function");
  }
  const double rho0 = model.eval(model.P_ref(), model.T_ref()).rho;
  VectorField gv = state.v;
  for (std::size_t i = 0; i < g.points(); ++i) {
    const double th = state.theta[i], wp = params.eps * state.p[i];
    double gamma = 1.0;
    switch (opts.gamma_mode) {
      case GammaMode::entropy: gamma = std::exp(slow_variables(model, th, wp).F); break;
      case GammaMode::density:
        gamma = model.eval(model.P_ref() * std::exp(wp), model.T_ref() * std::exp(th)).rho / rho0;
        break;
      case GammaMode::custom: gamma = opts.custom_gamma(th, wp); break;
    }
    for (int j = 0; j < dim; ++j) gv[j][i] *= gamma;
  }
  for (const auto& c : curl(gv).components) out.curl_gamma_v_norm += sobolev_norm(c, sm1);
  return out;
}

// --- periodic energy structure --------------------------------------------

namespace {

ScalarField pressure_source(const FluidState& u, const ParamPoint& params, const SourceSpec& src,
                            const CoefficientFields& cf, double t, Formulation f) {
  const GridSpec& g = u.grid();
  ScalarField s(g);
  if (src.mode == SourceSpec::Mode::prescribed && src.Q) {
    s = product(cf.chi1, ScalarField::sample(g, [&](const Point& x) { return src.Q(t, x); }));
  } else if (src.mode == SourceSpec::Mode::state && src.Q1 && f == Formulation::combustion) {
    std::vector<double> yv(u.y.size());
    for (std::size_t i = 0; i < g.points(); ++i) {
      for (std::size_t l = 0; l < yv.size(); ++l) yv[l] = u.y[l][i];
      s[i] = src.Q1(yv, u.theta[i], params.eps * u.p[i]);
    }
    s = truncate(s);
  }
  return s;
}

double inner(const ScalarField& a, const ScalarField& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc * std::pow(2.0 * M_PI, a.grid().dim) / static_cast<double>(a.size());
}

double inner(const VectorField& a, const VectorField& b) {
  double acc = 0.0;
  for (int j = 0; j < a.dim(); ++j) acc += inner(a[j], b[j]);
  return acc;
}

} // namespace

SymmetrizerFrame periodic_ansatz(const FluidState& state, const ParamPoint& params, const GasModel& model,
                                 const TransportLaws& transport, const SourceSpec& source, double t,
                                 Formulation formulation) {
  const GridSpec& g = state.grid();
  const CoefficientFields cf = coefficient_fields(model, state.theta, params.eps * state.p);
  SymmetrizerFrame fr;
  fr.F_field = pressure_source(state, params, source, cf, t, formulation);
  if (params.kappa != 0.0) {
    fr.F_field += params.kappa * product(cf.chi1, diffusion_term(state.theta, state.theta, transport.k));
  }
  const double g1_mean = cf.g1.mean();
  if (!(g1_mean > 0.0)) throw DegenerateState("mean of g1 is not positive");
  fr.P_mean = fr.F_field.mean() / g1_mean;
  ScalarField arg = fr.F_field - fr.P_mean * cf.g1;
  // Remove the rounding-level mean left by the subtraction.
  const double m = arg.mean();
  for (std::size_t i = 0; i < arg.size(); ++i) arg[i] -= m;
  fr.V = inv_grad_laplace(arg);
  fr.U_q = state.p;
  std::vector<ScalarField> w;
  for (int j = 0; j < g.dim; ++j) w.push_back(state.v[j] - fr.V[j]);
  fr.U_v = VectorField(std::move(w));
  fr.E_p = cf.g1;
  fr.E_v = cf.g2;
  return fr;
}

double skew_energy_residual(const ScalarField& q, const VectorField& w) {
  return std::abs(inner(div(w), q) + inner(grad(q), w));
}

double energy_balance_residual(const Trajectory& traj, const SimulationSetup& setup) {
  const std::size_t n = traj.states.size();
  if (n < 3) return 0.0;
  const ParamPoint& prm = setup.params;
  std::vector<SymmetrizerFrame> fr;
  for (std::size_t k = 0; k < n; ++k) {
    fr.push_back(periodic_ansatz(traj.states[k], prm, setup.gas, setup.transport, setup.source, traj.times[k],
                                 setup.formulation));
  }
  const double inv_eps = 1.0 / prm.eps;
  auto energy = [&](std::size_t k, double shift) {
    ScalarField q = fr[k].U_q;
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= shift;
    double acc = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      double vv = 0.0;
      for (int j = 0; j < fr[k].U_v.dim(); ++j) vv += fr[k].U_v[j][i] * fr[k].U_v[j][i];
      acc += fr[k].E_p[i] * q[i] * q[i] + fr[k].E_v[i] * vv;
    }
    return acc * std::pow(2.0 * M_PI, q.grid().dim) / static_cast<double>(q.size());
  };

  double worst = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < n; ++k) scale = std::max(scale, energy(k, 0.0));
  const double span = traj.times.back() - traj.times.front();
  if (span > 0.0) scale /= span;

  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double h1 = traj.times[k] - traj.times[k - 1], h2 = traj.times[k + 1] - traj.times[k];
    if (!(h1 > 0.0 && h2 > 0.0)) continue;
    const double wm = -h2 / (h1 * (h1 + h2)), w0 = (h2 - h1) / (h1 * h2), wp = h1 / (h2 * (h1 + h2));
    auto ddt = [&](const ScalarField& a, const ScalarField& b, const ScalarField& c) {
      ScalarField out(a.grid());
      for (std::size_t i = 0; i < a.size(); ++i) out[i] = wm * a[i] + w0 * b[i] + wp * c[i];
      return out;
    };
    // q = p - eps^{-1} int P_mean dt, pinned to p at t_k.
    const double cm = -0.5 * h1 * inv_eps * (fr[k - 1].P_mean + fr[k].P_mean);
    const double cp = 0.5 * h2 * inv_eps * (fr[k].P_mean + fr[k + 1].P_mean);
    const double de = wm * energy(k - 1, cm) + w0 * energy(k, 0.0) + wp * energy(k + 1, cp);

    const FluidState& u = traj.states[k];
    const SymmetrizerFrame& f = fr[k];
    const ScalarField divv = div(u.v);
    auto material = [&](const ScalarField& dt_part, const ScalarField& field) {
      ScalarField out = dt_part;
      const VectorField gf = grad(field);
      for (std::size_t i = 0; i < out.size(); ++i) {
        for (int j = 0; j < u.v.dim(); ++j) out[i] += u.v[j][i] * gf[j][i];
      }
      return out;
    };
    const ScalarField DE_p = material(ddt(fr[k - 1].E_p, f.E_p, fr[k + 1].E_p), f.E_p);
    const ScalarField DE_v = material(ddt(fr[k - 1].E_v, f.E_v, fr[k + 1].E_v), f.E_v);
    const ScalarField qq = pointwise_product(f.U_q, f.U_q);
    ScalarField ww(qq.grid());
    for (int j = 0; j < f.U_v.dim(); ++j) ww += pointwise_product(f.U_v[j], f.U_v[j]);
    const ScalarField one = ScalarField::constant(qq.grid(), 1.0);
    const double t1 = inner(pointwise_product(DE_p, qq), one) + inner(pointwise_product(DE_v, ww), one);
    const double t2 = inner(pointwise_product(pointwise_product(f.E_p, divv), qq), one) +
                      inner(pointwise_product(pointwise_product(f.E_v, divv), ww), one);

    // F = (0, mu B2 v - g2 (d_t + v.grad) V).
    VectorField Fv = VectorField::zeros(u.grid());
    if (prm.mu != 0.0) {
      const VectorField b2 = viscous_term(u.v, u.theta, coefficient_fields(setup.gas, u.theta, prm.eps * u.p).chi2,
                                          setup.transport);
      for (int j = 0; j < Fv.dim(); ++j) Fv[j] = prm.mu * b2[j];
    }
    for (int j = 0; j < Fv.dim(); ++j) {
      const ScalarField DV = material(ddt(fr[k - 1].V[j], f.V[j], fr[k + 1].V[j]), f.V[j]);
      Fv[j] -= pointwise_product(f.E_v, DV);
    }
    const double t3 = 2.0 * inner(Fv, f.U_v);

    worst = std::max(worst, std::abs(de - (t1 + t2 + t3)));
    scale = std::max({scale, std::abs(de), std::abs(t1), std::abs(t2), std::abs(t3)});
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

// --- report ---------------------------------------------------------------

NormReport make_norm_report(const Trajectory& traj, const SimulationSetup& setup, const DiagnosticsSpec& spec) {
  const ParamPoint& prm = setup.params;
  NormReport rep;
  rep.s = spec.s;
  rep.params = prm;
  for (const auto& st : traj.states) rep.theorem_norm_sup = std::max(rep.theorem_norm_sup, theorem_norm(st, prm.eps, spec.s));
  if (traj.states.size() >= 2 || traj.records.size() >= 2) {
    rep.x_components = x_norm(traj, spec.s, prm);
    rep.x_norm = rep.x_components.total();
    const HfLf hl = hf_lf_norms(traj, spec.s, prm);
    rep.hf_norm = hl.hf;
    rep.lf_norm = hl.lf;
    if (setup.formulation == Formulation::combustion) rep.z_norm = z_norm(traj, spec.s, prm).total();
  }
  LimitOptions lo;
  lo.s = spec.s;
  lo.gamma_mode = spec.gamma_mode;
  lo.custom_gamma = spec.custom_gamma;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const FluidState& st = traj.states[k];
    const LimitDiagnostics ld = limit_diagnostics(st, prm, setup.gas, setup.transport, lo);
    rep.limit.div_ve_norm = std::max(rep.limit.div_ve_norm, ld.div_ve_norm);
    rep.limit.curl_gamma_v_norm = std::max(rep.limit.curl_gamma_v_norm, ld.curl_gamma_v_norm);
    if (spec.energy) {
      const SymmetrizerFrame fr =
          periodic_ansatz(st, prm, setup.gas, setup.transport, setup.source, traj.times[k], setup.formulation);
      rep.skew_residual = std::max(rep.skew_residual, skew_energy_residual(fr.U_q, fr.U_v));
    }
  }
  if (spec.energy) rep.balance_residual = energy_balance_residual(traj, setup);
  return rep;
}

} // namespace lowmach
