#include "lowmach/mms.hpp"

#include "lowmach/errors.hpp"

#include <algorithm>
#include <cmath>

namespace lowmach {

std::string to_string(MmsCase c) {
  switch (c) {
  case MmsCase::primal_1d: return "primal-1d";
  case MmsCase::primal_2d: return "primal-2d";
  case MmsCase::combustion_1d: return "combustion-1d";
  }
  return "?";
}

MmsCase mms_case_from_string(const std::string& s) {
  if (s == "primal-1d") return MmsCase::primal_1d;
  if (s == "primal-2d") return MmsCase::primal_2d;
  if (s == "combustion-1d") return MmsCase::combustion_1d;
  throw ConfigError("unknown MMS case '" + s + "' (expected primal-1d, primal-2d or combustion-1d)");
}

namespace {

// A m(t) cos(k.x + phase), m(t) = 1 + 0.5 sin(w t + phase).
struct Mode {
  double A = 0.0;
  std::array<double, 3> k{0, 0, 0};
  double phase = 0.0;
  double w = 1.0;

  double m(double t) const { return 1.0 + 0.5 * std::sin(w * t + phase); }
  double dm(double t) const { return 0.5 * w * std::cos(w * t + phase); }
  double arg(const Point& x) const { return k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + phase; }
};

// Value, gradient and Hessian of one mode at (t, x).
struct Jet {
  double f = 0, ft = 0;
  std::array<double, 3> g{0, 0, 0};
  std::array<std::array<double, 3>, 3> H{};
};

Jet jet(const Mode& mo, double t, const Point& x) {
  Jet j;
  const double c = std::cos(mo.arg(x)), s = std::sin(mo.arg(x));
  const double am = mo.A * mo.m(t);
  j.f = am * c;
  j.ft = mo.A * mo.dm(t) * c;
  for (int a = 0; a < 3; ++a) {
    j.g[a] = -am * mo.k[a] * s;
    for (int b = 0; b < 3; ++b) j.H[a][b] = -am * mo.k[a] * mo.k[b] * c;
  }
  return j;
}

struct Problem {
  int dim = 1;
  bool combustion = false;
  ParamPoint params;
  TransportLaws transport;
  GasModel gas;
  double q1 = 0.0, q3 = 0.0;
  Mode p, theta, y;
  std::vector<Mode> v;
};

Problem make_problem(MmsCase c) {
  Problem pb;
  pb.gas = ideal_gas(1.0, {1.5});
  pb.transport.k = {1.0, 0.3};
  pb.transport.zeta = {1.0, 0.2};
  pb.transport.eta = {0.5, 0.1};
  pb.transport.D = {1.0, 0.2};
  pb.params = {0.5, 0.1, 0.1, 0.0};
  if (c == MmsCase::primal_2d) {
    pb.dim = 2;
    pb.p = {0.1, {1, 0, 0}, 0.3, 2.0};
    pb.v = {{0.1, {0, 1, 0}, 1.1, 1.5}, {0.08, {1, 1, 0}, 0.7, 2.5}};
    pb.theta = {0.05, {1, -1, 0}, 0.2, 1.0};
  } else {
    pb.p = {0.1, {1, 0, 0}, 0.3, 2.0};
    pb.v = {{0.1, {2, 0, 0}, 1.1, 1.5}};
    pb.theta = {0.05, {1, 0, 0}, 0.2, 1.0};
  }
  if (c == MmsCase::combustion_1d) {
    pb.combustion = true;
    pb.params.lambda = 0.5;
    pb.y = {0.1, {1, 0, 0}, 0.5, 1.2};
    pb.q1 = 0.3;
    pb.q3 = 0.2;
  }
  return pb;
}

FluidState exact_state(const Problem& pb, const GridSpec& g, double t) {
  FluidState s = FluidState::zeros(g, pb.combustion ? 1 : 0);
  s.p = ScalarField::sample(g, [&](const Point& x) { return jet(pb.p, t, x).f; });
  for (int k = 0; k < pb.dim; ++k) {
    s.v[k] = ScalarField::sample(g, [&](const Point& x) { return jet(pb.v[k], t, x).f; });
  }
  s.theta = ScalarField::sample(g, [&](const Point& x) { return jet(pb.theta, t, x).f; });
  if (pb.combustion) s.y[0] = ScalarField::sample(g, [&](const Point& x) { return jet(pb.y, t, x).f; });
  return s;
}

// Time derivative minus the unforced right-hand side, evaluated from the
// exact fields at one point. Order: p, v_0..v_{d-1}, theta, y.
std::vector<double> residual(const Problem& pb, double t, const Point& x, double rho0) {
  const int d = pb.dim;
  const ParamPoint& prm = pb.params;
  const Jet P = jet(pb.p, t, x), TH = jet(pb.theta, t, x);
  std::vector<Jet> V;
  for (int k = 0; k < d; ++k) V.push_back(jet(pb.v[k], t, x));

  const double th = TH.f, wp = prm.eps * P.f;
  const CoefficientSet cs = coefficient_set(pb.gas, th, wp);

  auto adv = [&](const Jet& f) {
    double a = 0.0;
    for (int j = 0; j < d; ++j) a += V[j].f * f.g[j];
    return a;
  };
  auto lap = [&](const Jet& f) {
    double a = 0.0;
    for (int j = 0; j < d; ++j) a += f.H[j][j];
    return a;
  };
  auto dot_grad = [&](const Jet& a, const Jet& b) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += a.g[j] * b.g[j];
    return s;
  };

  double divv = 0.0;
  for (int k = 0; k < d; ++k) divv += V[k].g[k];

  const ExpLaw& kl = pb.transport.k;
  const double heat = kl.derivative(th) * dot_grad(TH, TH) + kl(th) * lap(TH);

  double p_src = 0.0, t_src = 0.0;
  Jet Y;
  if (pb.combustion) {
    Y = jet(pb.y, t, x);
    p_src = pb.q1 * Y.f;
    t_src = pb.q3 * Y.f;
  }

  std::vector<double> out;
  const double rhs_p = (1.0 / prm.eps) * (-divv + prm.kappa * cs.chi1 * heat + p_src) / cs.g1 - adv(P);
  out.push_back(P.ft - rhs_p);

  const double zeta = pb.transport.zeta(th), dzeta = pb.transport.zeta.derivative(th);
  const double eta = pb.transport.eta(th), deta = pb.transport.eta.derivative(th);
  for (int k = 0; k < d; ++k) {
    double visc = 0.0;
    for (int j = 0; j < d; ++j) {
      const double S = 0.5 * (V[k].g[j] + V[j].g[k]);
      const double dS = 0.5 * (V[k].H[j][j] + V[j].H[k][j]);
      visc += dzeta * TH.g[j] * S + zeta * dS;
    }
    double ddiv = 0.0; // d_k div v
    for (int j = 0; j < d; ++j) ddiv += V[j].H[k][j];
    visc += deta * TH.g[k] * divv + eta * ddiv;
    visc *= cs.chi2;
    const double rhs_v = (-(1.0 / prm.eps) * P.g[k] + prm.mu * visc) / cs.g2 - adv(V[k]);
    out.push_back(V[k].ft - rhs_v);
  }

  const double rhs_t = (-divv + prm.kappa * cs.chi3 * heat + t_src) / cs.g3 - adv(TH);
  out.push_back(TH.ft - rhs_t);

  if (pb.combustion) {
    const double T = pb.gas.T_ref() * std::exp(th), Pp = pb.gas.P_ref() * std::exp(wp);
    const double g4 = pb.gas.eval(Pp, T).rho / rho0;
    const ExpLaw& D = pb.transport.D;
    const double diff = D.derivative(th) * dot_grad(TH, Y) + D(th) * lap(Y);
    const double rhs_y = -adv(Y) + prm.lambda * diff / g4;
    out.push_back(Y.ft - rhs_y);
  }
  return out;
}

double max_error(const FluidState& a, const FluidState& b) {
  double e = (a.p - b.p).max_abs();
  for (int k = 0; k < a.v.dim(); ++k) e = std::max(e, (a.v[k] - b.v[k]).max_abs());
  e = std::max(e, (a.theta - b.theta).max_abs());
  for (std::size_t l = 0; l < a.y.size(); ++l) e = std::max(e, (a.y[l] - b.y[l]).max_abs());
  return e;
}

} // namespace

double mms_error(MmsCase c, int n, double dt, double T) {
  const Problem pb = make_problem(c);
  GridSpec g;
  g.dim = pb.dim;
  g.n = n;
  g.validate();
  const double rho0 = pb.gas.eval(pb.gas.P_ref(), pb.gas.T_ref()).rho;

  // Grid coordinates, shared by every forcing evaluation.
  std::vector<Point> pts(g.points());
  std::size_t next = 0;
  (void)ScalarField::sample(g, [&](const Point& x) {
    pts[next++] = x;
    return 0.0;
  });

  SimulationSetup su;
  su.params = pb.params;
  su.gas = pb.gas;
  su.transport = pb.transport;
  su.formulation = pb.combustion ? Formulation::combustion : Formulation::primal;
  if (pb.combustion) {
    su.source.mode = SourceSpec::Mode::state;
    const double q1 = pb.q1, q3 = pb.q3;
    su.source.Q1 = [q1](std::span<const double> y, double, double) { return q1 * y[0]; };
    su.source.Q3 = [q3](std::span<const double> y, double, double) { return q3 * y[0]; };
  }
  su.source.forcing = [&pb, &pts, rho0](double t, Tendency& out) {
    const int d = pb.dim;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto r = residual(pb, t, pts[i], rho0);
      out.p[i] += r[0];
      for (int k = 0; k < d; ++k) out.v[k][i] += r[1 + k];
      out.theta[i] += r[1 + d];
      if (pb.combustion) out.y[0][i] += r[2 + d];
    }
  };

  IntegratorConfig ic;
  ic.t_end = T;
  ic.fixed_dt = dt;
  ic.sample_every = 1 << 30;
  ic.record_s = -1;
  ic.max_steps = static_cast<long>(std::ceil(T / dt)) + 10;
  const Trajectory traj = simulate(exact_state(pb, g, 0.0), su, ic);
  if (traj.termination != Termination::completed) {
    throw NumericalBlowup("MMS run did not complete: " + traj.message);
  }
  return max_error(traj.states.back(), exact_state(pb, g, traj.t_final));
}

MmsResult mms_convergence(MmsCase c, const MmsOptions& opts) {
  MmsResult res;
  res.which = c;
  for (int n : opts.spatial_n) res.spatial.push_back({double(n), mms_error(c, n, opts.spatial_dt, opts.spatial_T)});
  for (double dt : opts.temporal_dt) {
    res.temporal.push_back({dt, mms_error(c, opts.temporal_n, dt, opts.temporal_T)});
  }
  if (res.temporal.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(res.temporal.size());
    for (const auto& pt : res.temporal) {
      const double lx = std::log(pt.h), ly = std::log(pt.error);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    res.temporal_order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  return res;
}

} // namespace lowmach
