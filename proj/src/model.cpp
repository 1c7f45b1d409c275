#include "lowmach/model.hpp"

#include "lowmach/errors.hpp"

#include <cmath>
#include <sstream>

namespace lowmach {

// --- parameters and transport --------------------------------------------

double ParamPoint::nu() const { return std::sqrt(mu + kappa); }

void ParamPoint::validate(bool combustion) const {
  std::vector<std::string> errs;
  if (!(eps > 0.0 && eps <= 1.0)) errs.push_back("eps must be in (0,1]");
  if (!(mu >= 0.0 && mu <= 1.0)) errs.push_back("mu must be in [0,1]");
  if (!(kappa >= 0.0 && kappa <= 1.0)) errs.push_back("kappa must be in [0,1]");
  if (!(lambda >= 0.0 && lambda <= 2.0)) errs.push_back("lambda must be in [0,2]");
  if (combustion && errs.empty() && lambda < nu()) {
    std::ostringstream os;
    os << "combustion requires lambda >= sqrt(mu+kappa) (parameter set B): lambda = " << lambda
       << " < nu = " << nu();
    errs.push_back(os.str());
  }
  if (!errs.empty()) {
    std::string msg;
    for (const auto& e : errs) msg += (msg.empty() ? "" : "; ") + e;
    throw ConfigError(msg);
  }
}

double ExpLaw::operator()(double theta) const { return c1 == 0.0 ? c0 : c0 * std::exp(c1 * theta); }

double ExpLaw::derivative(double theta) const { return c1 == 0.0 ? 0.0 : c0 * c1 * std::exp(c1 * theta); }

std::vector<std::string> TransportLaws::validate(double theta_lo, double theta_hi, bool combustion) const {
  std::vector<std::string> errs;
  const int n = 33;
  bool bad_k = false, bad_zeta = false, bad_eta = false, bad_D = false;
  for (int i = 0; i < n; ++i) {
    const double th = theta_lo + (theta_hi - theta_lo) * i / (n - 1);
    bad_k |= !(k(th) > 0.0);
    bad_zeta |= !(zeta(th) > 0.0);
    bad_eta |= !(eta(th) + 2.0 * zeta(th) > 0.0);
    bad_D |= combustion && !(D(th) > 0.0);
  }
  if (bad_k) errs.push_back("heat conductivity k must be positive");
  if (bad_zeta) errs.push_back("viscosity zeta must be positive");
  if (bad_eta) errs.push_back("eta + 2 zeta must be positive");
  if (bad_D) errs.push_back("species diffusivity D must be positive");
  return errs;
}

// --- states ---------------------------------------------------------------

FluidState FluidState::zeros(const GridSpec& grid, int species) {
  FluidState s;
  s.p = ScalarField(grid);
  s.v = VectorField::zeros(grid);
  s.theta = ScalarField(grid);
  s.y.assign(species, ScalarField(grid));
  return s;
}

bool FluidState::all_finite() const {
  if (!p.all_finite() || !theta.all_finite()) return false;
  for (const auto& c : v.components) if (!c.all_finite()) return false;
  for (const auto& c : y) if (!c.all_finite()) return false;
  return true;
}

namespace {

void add_scaled(ScalarField& out, double a, const ScalarField& x) {
  auto o = out.values();
  auto xv = x.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += a * xv[i];
}

} // namespace

void axpy(FluidState& out, double a, const FluidState& x) {
  add_scaled(out.p, a, x.p);
  for (int j = 0; j < out.v.dim(); ++j) add_scaled(out.v[j], a, x.v[j]);
  add_scaled(out.theta, a, x.theta);
  for (std::size_t l = 0; l < out.y.size(); ++l) add_scaled(out.y[l], a, x.y[l]);
}

SymState SymState::zeros(const GridSpec& grid) {
  return {ScalarField(grid), VectorField::zeros(grid), ScalarField(grid)};
}

bool SymState::all_finite() const {
  if (!rho_t.all_finite() || !theta_t.all_finite()) return false;
  for (const auto& c : v.components) if (!c.all_finite()) return false;
  return true;
}

void axpy(SymState& out, double a, const SymState& x) {
  add_scaled(out.rho_t, a, x.rho_t);
  for (int j = 0; j < out.v.dim(); ++j) add_scaled(out.v[j], a, x.v[j]);
  add_scaled(out.theta_t, a, x.theta_t);
}

std::string to_string(Formulation f) {
  switch (f) {
    case Formulation::primal: return "primal";
    case Formulation::combustion: return "combustion";
    case Formulation::symmetrized: return "symmetrized";
  }
  return "primal";
}

Formulation formulation_from_string(const std::string& s) {
  if (s == "primal") return Formulation::primal;
  if (s == "combustion") return Formulation::combustion;
  if (s == "symmetrized") return Formulation::symmetrized;
  throw ConfigError("unknown formulation '" + s + "' (expected primal, combustion or symmetrized)");
}

// --- coefficients ---------------------------------------------------------

CoefficientFields coefficient_fields(const GasModel& model, const ScalarField& theta,
                                     const ScalarField& wp, std::optional<SpeciesClosure> species) {
  const GridSpec& g = theta.grid();
  CoefficientFields cf{ScalarField(g), ScalarField(g), ScalarField(g),
                       ScalarField(g), ScalarField(g), ScalarField(g), {}, {}};
  ScalarField g4(g), chi4(g);
  const double rho0 = species ? model.eval(model.P_ref(), model.T_ref()).rho : 1.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const CoefficientSet cs = coefficient_set(model, theta[i], wp[i]);
    cf.g1[i] = cs.g1;
    cf.g2[i] = cs.g2;
    cf.g3[i] = cs.g3;
    cf.chi1[i] = cs.chi1;
    cf.chi2[i] = cs.chi2;
    cf.chi3[i] = cs.chi3;
    if (species) {
      if (*species == SpeciesClosure::unit) {
        g4[i] = 1.0;
      } else {
        const double P = model.P_ref() * std::exp(wp[i]);
        const double T = model.T_ref() * std::exp(theta[i]);
        g4[i] = model.eval(P, T).rho / rho0;
      }
      chi4[i] = 1.0;
    }
  }
  if (species) {
    cf.g4 = std::move(g4);
    cf.chi4 = std::move(chi4);
  }
  return cf;
}

SymCoefficients sym_coefficients(const CoefficientSet& cs) {
  return {cs.chi1 * cs.g3 / (cs.chi3 * cs.g1), 1.0 / cs.g1};
}

// --- assembly helpers -----------------------------------------------------

namespace {

ScalarField reciprocal(const ScalarField& f) {
  return map(f, [](double x) { return 1.0 / x; });
}

// v . grad f, each product dealiased.
ScalarField advection(const VectorField& v, const ScalarField& f) {
  const VectorField gf = grad(f);
  ScalarField out(f.grid());
  for (int j = 0; j < v.dim(); ++j) out += product(v[j], gf[j]);
  return out;
}

ScalarField law_field(const ScalarField& theta, const ExpLaw& law) {
  return map(theta, [&law](double th) { return law(th); });
}

void check_finite(const FluidState& d, const char* what) {
  if (!d.all_finite()) throw NumericalBlowup(std::string("non-finite values in ") + what + " tendency");
}

ScalarField source_field(const SourceSpec& source, const GridSpec& g, double t) {
  if (source.mode != SourceSpec::Mode::prescribed || !source.Q) return ScalarField(g);
  return ScalarField::sample(g, [&](const Point& x) { return source.Q(t, x); });
}

// Shared p, v, theta assembly. `p_extra` and `theta_extra` are added inside
// the brackets divided by g1 and g3 (after the 1/eps scaling for p).
Tendency assemble(const FluidState& s, const ParamPoint& prm, const CoefficientFields& cf,
                  const TransportLaws& tr, const ScalarField& p_src, const ScalarField& theta_src,
                  const RhsOptions& opts) {
  const GridSpec& g = s.grid();
  const int dim = g.dim;
  const double inv_eps = 1.0 / prm.eps;
  Tendency d = FluidState::zeros(g, static_cast<int>(s.y.size()));

  const ScalarField divv = div(s.v);
  const ScalarField inv_g1 = reciprocal(cf.g1);
  const ScalarField inv_g2 = reciprocal(cf.g2);
  const ScalarField inv_g3 = reciprocal(cf.g3);

  ScalarField heat(g);
  if (prm.kappa != 0.0) heat = diffusion_term(s.theta, s.theta, tr.k);

  // pressure
  ScalarField bp = -1.0 * divv;
  if (prm.kappa != 0.0) bp += prm.kappa * product(cf.chi1, heat);
  bp += p_src;
  d.p = inv_eps * product(bp, inv_g1);
  d.p -= advection(s.v, s.p);

  // velocity
  if (!opts.freeze_velocity) {
    const VectorField gp = grad(s.p);
    VectorField visc;
    if (prm.mu != 0.0) visc = viscous_term(s.v, s.theta, cf.chi2, tr);
    for (int k = 0; k < dim; ++k) {
      ScalarField bv = -inv_eps * gp[k];
      if (prm.mu != 0.0) bv += prm.mu * visc[k];
      d.v[k] = product(bv, inv_g2);
      d.v[k] -= advection(s.v, s.v[k]);
    }
  }

  // temperature
  ScalarField bt = -1.0 * divv;
  if (prm.kappa != 0.0) bt += prm.kappa * product(cf.chi3, heat);
  bt += theta_src;
  d.theta = product(bt, inv_g3);
  d.theta -= advection(s.v, s.theta);
  return d;
}

} // namespace

ScalarField diffusion_term(const ScalarField& f, const ScalarField& theta, const ExpLaw& law) {
  const VectorField gf = grad(f);
  if (law.c1 == 0.0) return law.c0 * div(gf);
  const ScalarField kf = law_field(theta, law);
  std::vector<ScalarField> flux;
  for (int j = 0; j < gf.dim(); ++j) flux.push_back(product(kf, gf[j]));
  return div(VectorField(std::move(flux)));
}

VectorField viscous_term(const VectorField& v, const ScalarField& theta, const ScalarField& chi2,
                         const TransportLaws& transport) {
  const GridSpec& g = v.grid();
  const int dim = g.dim;
  std::vector<VectorField> dv; // dv[k][j] = d_j v_k
  for (int k = 0; k < dim; ++k) dv.push_back(grad(v[k]));
  const ScalarField zeta = law_field(theta, transport.zeta);
  const ScalarField eta = law_field(theta, transport.eta);
  ScalarField divv(g);
  for (int k = 0; k < dim; ++k) divv += dv[k][k];
  const VectorField geta = grad(product(eta, divv));

  std::vector<ScalarField> out;
  for (int k = 0; k < dim; ++k) {
    std::vector<ScalarField> flux;
    for (int j = 0; j < dim; ++j) flux.push_back(product(zeta, 0.5 * (dv[k][j] + dv[j][k])));
    ScalarField bk = div(VectorField(std::move(flux)));
    bk += geta[k];
    out.push_back(product(chi2, bk));
  }
  return VectorField(std::move(out));
}

Tendency rhs_primal(const FluidState& state, const ParamPoint& params, const GasModel& model,
                    const TransportLaws& transport, const SourceSpec& source, double t,
                    const RhsOptions& opts) {
  const GridSpec& g = state.grid();
  CoefficientFields owned;
  const CoefficientFields* cf = opts.frozen;
  if (!cf) {
    owned = coefficient_fields(model, state.theta, params.eps * state.p);
    cf = &owned;
  }
  const ScalarField Q = source_field(source, g, t);
  ScalarField p_src(g), theta_src(g);
  if (source.mode == SourceSpec::Mode::prescribed) {
    p_src = product(cf->chi1, Q);
    theta_src = product(cf->chi3, Q);
  }
  Tendency d = assemble(state, params, *cf, transport, p_src, theta_src, opts);
  for (std::size_t l = 0; l < state.y.size(); ++l) d.y[l] = -1.0 * advection(state.v, state.y[l]);
  if (source.forcing) source.forcing(t, d);
  check_finite(d, "primal");
  return d;
}

Tendency rhs_combustion(const FluidState& state, const ParamPoint& params, const GasModel& model,
                        const TransportLaws& transport, const SourceSpec& source, double t,
                        const RhsOptions& opts) {
  if (state.y.empty()) throw std::invalid_argument("combustion RHS needs at least one species field");
  const GridSpec& g = state.grid();
  CoefficientFields owned;
  const CoefficientFields* cf = opts.frozen;
  if (!cf || !cf->g4) {
    owned = coefficient_fields(model, state.theta, params.eps * state.p, opts.species);
    cf = &owned;
  }
  ScalarField p_src(g), theta_src(g);
  if (source.mode == SourceSpec::Mode::prescribed) {
    const ScalarField Q = source_field(source, g, t);
    p_src = product(cf->chi1, Q);
    theta_src = product(cf->chi3, Q);
  } else if (source.mode == SourceSpec::Mode::state) {
    std::vector<double> yv(state.y.size());
    for (std::size_t i = 0; i < g.points(); ++i) {
      for (std::size_t l = 0; l < yv.size(); ++l) yv[l] = state.y[l][i];
      const double th = state.theta[i], wp = params.eps * state.p[i];
      if (source.Q1) p_src[i] = source.Q1(yv, th, wp);
      if (source.Q3) theta_src[i] = source.Q3(yv, th, wp);
    }
    p_src = truncate(p_src);
    theta_src = truncate(theta_src);
  }
  Tendency d = assemble(state, params, *cf, transport, p_src, theta_src, opts);
  const ScalarField inv_g4 = reciprocal(*cf->g4);
  for (std::size_t l = 0; l < state.y.size(); ++l) {
    ScalarField dy = -1.0 * advection(state.v, state.y[l]);
    if (params.lambda != 0.0) {
      const ScalarField diff = diffusion_term(state.y[l], state.theta, transport.D);
      dy += params.lambda * product(product(*cf->chi4, diff), inv_g4);
    }
    d.y[l] = std::move(dy);
  }
  if (source.forcing) source.forcing(t, d);
  check_finite(d, "combustion");
  return d;
}

// --- symmetrized formulation ----------------------------------------------

SymState to_symmetrized(const FluidState& state, const ParamPoint& params, const GasModel& model) {
  const GridSpec& g = state.grid();
  const double eps = params.eps;
  SymState s = SymState::zeros(g);
  for (std::size_t i = 0; i < g.points(); ++i) {
    s.rho_t[i] = density_variable(model, state.theta[i], eps * state.p[i]).G / eps;
    s.theta_t[i] = state.theta[i] / eps;
  }
  s.v = state.v;
  return s;
}

FluidState from_symmetrized(const SymState& sym, const ParamPoint& params, const GasModel& model,
                            const ScalarField* p_guess) {
  const GridSpec& g = sym.grid();
  const double eps = params.eps;
  FluidState out = FluidState::zeros(g);
  out.v = sym.v;
  for (std::size_t i = 0; i < g.points(); ++i) {
    const double th = eps * sym.theta_t[i];
    const double target = eps * sym.rho_t[i];
    double w = p_guess ? eps * (*p_guess)[i] : 0.0;
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
      const DensityVariable dv = density_variable(model, th, w);
      if (!(dv.G_wp > 0.0)) break;
      const double step = (dv.G - target) / dv.G_wp;
      w -= step;
      if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(w))) {
        converged = true;
        break;
      }
    }
    if (!converged || !std::isfinite(w)) {
      std::ostringstream os;
      os << "pressure inversion did not converge at grid point " << i << " (theta=" << th
         << ", eps*rho~=" << target << ")";
      throw InversionFailure(os.str());
    }
    out.theta[i] = th;
    out.p[i] = w / eps;
  }
  return out;
}

SymTendency map_tendency(const FluidState& state, const Tendency& d, const ParamPoint& params,
                         const GasModel& model) {
  const GridSpec& g = state.grid();
  const double eps = params.eps;
  SymTendency out = SymState::zeros(g);
  for (std::size_t i = 0; i < g.points(); ++i) {
    const DensityVariable dv = density_variable(model, state.theta[i], eps * state.p[i]);
    out.rho_t[i] = (dv.G_theta * d.theta[i] + dv.G_wp * eps * d.p[i]) / eps;
    out.theta_t[i] = d.theta[i] / eps;
  }
  out.v = d.v;
  return out;
}

SymTendency rhs_symmetrized(const SymState& sym, const ParamPoint& params, const GasModel& model,
                            const TransportLaws& transport, const RhsOptions& opts,
                            const ScalarField* p_guess) {
  const GridSpec& g = sym.grid();
  const int dim = g.dim;
  const double inv_eps = 1.0 / params.eps;
  const FluidState st = from_symmetrized(sym, params, model, p_guess);
  const ScalarField wp = params.eps * st.p;
  const CoefficientFields cf = coefficient_fields(model, st.theta, wp);

  // sigma = G_wp / g1; the printed density equation assumes sigma = 1.
  ScalarField rho_coef(g), gamma1(g), inv_Gwp(g);
  for (std::size_t i = 0; i < g.points(); ++i) {
    const double G_wp = density_variable(model, st.theta[i], wp[i]).G_wp;
    const double sigma = G_wp / cf.g1[i];
    rho_coef[i] = (cf.chi3[i] - cf.chi1[i]) / cf.chi3[i] * sigma;
    gamma1[i] = cf.chi1[i] * cf.g3[i] / (cf.chi3[i] * cf.g1[i]);
    inv_Gwp[i] = 1.0 / G_wp;
  }
  const ScalarField inv_g2 = reciprocal(cf.g2);
  const ScalarField inv_g3 = reciprocal(cf.g3);
  const ScalarField divv = div(sym.v);

  SymTendency d = SymState::zeros(g);
  d.rho_t = -inv_eps * product(rho_coef, divv);
  d.rho_t -= advection(sym.v, sym.rho_t);

  if (!opts.freeze_velocity) {
    const VectorField gth = grad(sym.theta_t);
    const VectorField grh = grad(sym.rho_t);
    VectorField visc;
    if (params.mu != 0.0) visc = viscous_term(sym.v, st.theta, cf.chi2, transport);
    for (int k = 0; k < dim; ++k) {
      ScalarField bv = -inv_eps * (product(gamma1, gth[k]) + product(inv_Gwp, grh[k]));
      if (params.mu != 0.0) bv += params.mu * visc[k];
      d.v[k] = product(bv, inv_g2);
      d.v[k] -= advection(sym.v, sym.v[k]);
    }
  }

  ScalarField bt = -inv_eps * divv;
  if (params.kappa != 0.0) {
    bt += (params.kappa * inv_eps) * product(cf.chi3, diffusion_term(st.theta, st.theta, transport.k));
  }
  d.theta_t = product(bt, inv_g3);
  d.theta_t -= advection(sym.v, sym.theta_t);
  if (!d.all_finite()) throw NumericalBlowup("non-finite values in symmetrized tendency");
  return d;
}

} // namespace lowmach
