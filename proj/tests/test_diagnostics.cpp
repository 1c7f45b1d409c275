#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lowmach/diagnostics.hpp"
#include "lowmach/errors.hpp"

#include <cmath>
#include <random>

using namespace lowmach;

namespace {

const double SQPI = std::sqrt(M_PI); // ||cos(kx)||_{L^2(T)}

ScalarField wave(const GridSpec& g, std::function<double(const Point&)> f) { return ScalarField::sample(g, f); }

SimulationSetup ideal_setup(ParamPoint p) {
  SimulationSetup su;
  su.params = p;
  su.gas = ideal_gas(1.0, {1.5});
  return su;
}

Trajectory held_fixed(const FluidState& u, const ParamPoint& pp, int s, double T, int steps) {
  Trajectory tr;
  tr.params = pp;
  tr.record_s = s;
  for (int i = 0; i <= steps; ++i) {
    const double t = T * i / steps;
    tr.times.push_back(t);
    tr.states.push_back(u);
    tr.records.push_back(step_record(u, t, s, pp));
  }
  return tr;
}

ScalarField random_field(const GridSpec& g, std::mt19937_64& rng, double amp) {
  return amp * random_profile(g, rng, 3);
}

} // namespace

TEST_CASE("theorem_norm") {
  const GridSpec g{1, 32};
  FluidState u = FluidState::zeros(g);
  CHECK(theorem_norm(u, 0.5, 2) == 0.0);
  u.p = wave(g, [](const Point& x) { return std::sin(x[0]); });
  const double expect = std::sqrt(2 * M_PI) + 0.5 * 2 * SQPI;
  CHECK(theorem_norm(u, 0.5, 2) == doctest::Approx(expect).epsilon(1e-13));
  // sqrt(2 pi) + sqrt(pi) = 4.279082...
  CHECK(theorem_norm(u, 0.5, 2) == doctest::Approx(4.279082).epsilon(1e-6));
  CHECK_THROWS(theorem_norm(u, 0.5, 0));

  SUBCASE("doubling eps doubles only the eps-weighted pieces") {
    std::mt19937_64 rng(1);
    const GridSpec g2{2, 16};
    FluidState w = FluidState::zeros(g2);
    w.p = random_field(g2, rng, 0.3);
    w.theta = random_field(g2, rng, 0.2);
    for (int j = 0; j < 2; ++j) w.v[j] = random_field(g2, rng, 0.1);
    const SobolevRecord r = sobolev_record(w, 3);
    const double base = r.grad_p_sm1 + r.grad_v_sm1 + r.theta_s;
    const double weighted = r.p_s + r.v_s;
    CHECK(theorem_norm(w, 0.25, 3) == doctest::Approx(base + 0.25 * weighted).epsilon(1e-14));
    CHECK(theorem_norm(w, 0.5, 3) - base == doctest::Approx(2 * (theorem_norm(w, 0.25, 3) - base)).epsilon(1e-12));
  }
  SUBCASE("absolute homogeneity") {
    std::mt19937_64 rng(2);
    const GridSpec g3{3, 16};
    FluidState w = FluidState::zeros(g3);
    w.p = random_field(g3, rng, 1.0);
    w.theta = random_field(g3, rng, 1.0);
    for (int j = 0; j < 3; ++j) w.v[j] = random_field(g3, rng, 1.0);
    FluidState c = w;
    c.p *= -3.0;
    c.theta *= -3.0;
    for (int j = 0; j < 3; ++j) c.v[j] *= -3.0;
    CHECK(theorem_norm(c, 0.7, 2) == doctest::Approx(3.0 * theorem_norm(w, 0.7, 2)).epsilon(1e-13));
  }
}

TEST_CASE("x_norm") {
  const GridSpec g{1, 32};
  SUBCASE("zero trajectory") {
    const ParamPoint pp{0.5, 1.0, 1.0, 0.0};
    const XNormComponents x = x_norm(held_fixed(FluidState::zeros(g), pp, 2, 1.0, 4), 2, pp);
    for (double c : x.as_array()) CHECK(c == 0.0);
  }
  SUBCASE("mu = kappa = 0 keeps only the sup components") {
    std::mt19937_64 rng(3);
    FluidState u = FluidState::zeros(g);
    u.p = random_field(g, rng, 0.4);
    u.v[0] = random_field(g, rng, 0.4);
    u.theta = random_field(g, rng, 0.4);
    const ParamPoint pp{0.5, 0.0, 0.0, 0.0};
    const XNormComponents x = x_norm(held_fixed(u, pp, 2, 1.0, 5), 2, pp);
    CHECK(x.viscous_l2 == 0.0);
    CHECK(x.heat_l2 == 0.0);
    CHECK(x.pressure_l2 == 0.0);
    CHECK(x.div_l2 == 0.0);
    CHECK(x.total() == x.grad_sup + x.hybrid_sup);
    CHECK(x.grad_sup > 0.0);
  }
  SUBCASE("steady single mode, mu = 1, kappa = 0") {
    FluidState u = FluidState::zeros(g);
    u.v[0] = wave(g, [](const Point& x) { return std::sin(2 * x[0]); });
    const ParamPoint pp{0.5, 1.0, 0.0, 0.0};
    const double T = 1.0;
    const XNormComponents x = x_norm(held_fixed(u, pp, 2, T, 7), 2, pp);
    // grad v = 2 cos 2x; H^2 weight 5, H^3 weight 5^1.5; eps nu = 0.5.
    const double hybrid = 2 * 5 * SQPI + 0.5 * 2 * std::pow(5.0, 1.5) * SQPI;
    CHECK(x.viscous_l2 == doctest::Approx(hybrid * std::sqrt(T)).epsilon(1e-12));
    CHECK(x.pressure_l2 == 0.0);
    // sup components: ||grad v||_{H^1} and eps (||v||_{H^2} + nu ||v||_{H^3}).
    CHECK(x.grad_sup == doctest::Approx(2 * std::sqrt(5.0) * SQPI).epsilon(1e-12));
    CHECK(x.hybrid_sup == doctest::Approx(0.5 * (5 * SQPI + std::pow(5.0, 1.5) * SQPI)).epsilon(1e-12));
  }
  SUBCASE("records and sampled states agree for a steady state") {
    std::mt19937_64 rng(4);
    FluidState u = FluidState::zeros(g);
    u.p = random_field(g, rng, 0.4);
    u.v[0] = random_field(g, rng, 0.4);
    u.theta = random_field(g, rng, 0.4);
    const ParamPoint pp{0.3, 0.2, 0.6, 0.0};
    Trajectory tr = held_fixed(u, pp, 2, 0.5, 6);
    const XNormComponents a = x_norm(tr, 2, pp);
    tr.records.clear();
    tr.record_s = -1;
    const XNormComponents b = x_norm(tr, 2, pp);
    for (int i = 0; i < 6; ++i) CHECK(a.as_array()[i] == doctest::Approx(b.as_array()[i]).epsilon(1e-14));
    Trajectory one;
    one.states.push_back(u);
    one.times.push_back(0.0);
    CHECK_THROWS_AS(x_norm(one, 2, pp), std::invalid_argument);
  }
  SUBCASE("z-norm adds the species pieces") {
    FluidState u = FluidState::zeros(g, 1);
    u.y[0] = wave(g, [](const Point& x) { return std::cos(x[0]); });
    const ParamPoint pp{0.5, 0.5, 0.5, 1.0};
    const ZNorm z = z_norm(held_fixed(u, pp, 2, 4.0, 3), 2, pp);
    // ||cos x||_{H^m} = 2^{m/2} sqrt(pi), nu = 1.
    CHECK(z.species_sup == doctest::Approx((2 + std::pow(2.0, 1.5)) * SQPI).epsilon(1e-12));
    CHECK(z.species_l2 == doctest::Approx((std::pow(2.0, 1.5) + 4) * SQPI * 2.0).epsilon(1e-12));
    CHECK(z.x.total() == 0.0);
  }
}

TEST_CASE("hf_lf_norms") {
  const GridSpec g{1, 64};
  SUBCASE("all modes inside the passband give hf = 0") {
    FluidState u = FluidState::zeros(g);
    u.p = wave(g, [](const Point& x) { return std::sin(3 * x[0]); });
    u.v[0] = wave(g, [](const Point& x) { return std::cos(2 * x[0]); });
    u.theta = wave(g, [](const Point& x) { return std::sin(x[0]); });
    const ParamPoint pp{0.5, 0.36, 0.0, 0.0}; // eps nu = 0.3, 3 * 0.3 <= 1
    const Trajectory tr = held_fixed(u, pp, 2, 1.0, 3);
    const HfLf r = hf_lf_norms(tr, 2, pp);
    // Only FFT rounding in the empty modes survives the filter.
    CHECK(r.hf <= 1e-12 * x_norm(tr, 2, pp).total());
    CHECK(r.lf > 0.0);
  }
  SUBCASE("pressure mode beyond the cutoff has no LF part") {
    FluidState u = FluidState::zeros(g);
    u.p = wave(g, [](const Point& x) { return std::cos(8 * x[0]); });
    const ParamPoint pp{0.5, 0.36, 0.0, 0.0}; // 8 * 0.3 >= 2
    const HfLf r = hf_lf_norms(held_fixed(u, pp, 2, 1.0, 3), 2, pp);
    CHECK(r.lf <= 1e-14 * r.hf);
    CHECK(r.hf > 0.0);
  }
  SUBCASE("eps nu = 0: hf = 0 and lf is the unfiltered fast norm") {
    FluidState u = FluidState::zeros(g);
    u.p = wave(g, [](const Point& x) { return std::cos(2 * x[0]); });
    u.v[0] = wave(g, [](const Point& x) { return std::sin(x[0]); });
    const ParamPoint pp{0.5, 0.0, 0.0, 0.0};
    const HfLf r = hf_lf_norms(held_fixed(u, pp, 2, 1.0, 3), 2, pp);
    CHECK(r.hf == 0.0);
    CHECK(r.lf == doctest::Approx(std::sqrt(2.0) * SQPI + 2 * std::sqrt(5.0) * SQPI).epsilon(1e-13));
  }
  SUBCASE("transition band: low and high parts add up for a single mode") {
    FluidState u = FluidState::zeros(g);
    u.p = wave(g, [](const Point& x) { return std::cos(5 * x[0]); });
    const ParamPoint pp{0.5, 0.36, 0.0, 0.0}; // r = 1.5
    const StepRecord r = step_record(u, 0.0, 2, pp);
    CHECK(r.lf_grad_sm1 + r.high.grad_p_sm1 == doctest::Approx(r.raw.grad_p_sm1).epsilon(1e-15));
    CHECK(r.lf_grad_sm1 == doctest::Approx(0.5 * r.raw.grad_p_sm1).epsilon(1e-15));
  }
  SUBCASE("LF weight is nu") {
    FluidState u = FluidState::zeros(g);
    u.p = wave(g, [](const Point& x) { return std::cos(x[0]); });
    const ParamPoint pp{0.25, 0.16, 0.0, 0.0}; // nu = 0.4, eps nu = 0.1
    const HfLf r = hf_lf_norms(held_fixed(u, pp, 2, 4.0, 8), 2, pp);
    // sup ||sin x||_{H^1} + nu ||sin x||_{H^2} sqrt(T)
    CHECK(r.lf == doctest::Approx(std::sqrt(2.0) * SQPI + 0.4 * 2 * SQPI * 2.0).epsilon(1e-13));
  }
}

TEST_CASE("limit_diagnostics") {
  const GasModel gas = ideal_gas(1.0, {1.5});
  const GridSpec g{2, 32};
  SUBCASE("solenoidal v, kappa = 0") {
    FluidState u = FluidState::zeros(g);
    u.v[0] = wave(g, [](const Point& x) { return std::cos(x[1]) * std::sin(2 * x[0]); });
    u.v[1] = wave(g, [](const Point& x) { return -2 * std::sin(x[1]) * std::cos(2 * x[0]); });
    CHECK(div(u.v).max_abs() < 1e-13);
    const LimitDiagnostics d = limit_diagnostics(u, {0.5, 0, 0, 0}, gas, {}, {});
    CHECK(d.div_ve_norm < 1e-12);
    CHECK(d.curl_gamma_v_norm > 0.1);
  }
  SUBCASE("gradient field with gamma = 1") {
    FluidState u = FluidState::zeros(g);
    u.v = grad(wave(g, [](const Point& x) { return std::sin(x[0] + 2 * x[1]) + std::cos(3 * x[1]); }));
    LimitOptions lo;
    lo.gamma_mode = GammaMode::custom;
    lo.custom_gamma = [](double, double) { return 1.0; };
    CHECK(limit_diagnostics(u, {0.5, 0, 0, 0}, gas, {}, lo).curl_gamma_v_norm < 1e-12);
    lo.custom_gamma = nullptr;
    CHECK_THROWS_AS(limit_diagnostics(u, {0.5, 0, 0, 0}, gas, {}, lo), ConfigError);
  }
  SUBCASE("perfect gas: v = chi1(0) k(theta) grad theta cancels") {
    FluidState u = FluidState::zeros(g);
    u.theta = wave(g, [](const Point& x) { return 0.2 * std::sin(x[0]) * std::cos(x[1]); });
    TransportLaws tl;
    tl.k = {1.3, 0.8};
    const VectorField gt = grad(u.theta);
    for (int j = 0; j < 2; ++j) {
      for (std::size_t i = 0; i < g.points(); ++i) u.v[j][i] = 0.4 * tl.k(u.theta[i]) * gt[j][i];
    }
    const LimitDiagnostics d = limit_diagnostics(u, {0.5, 0, 1.0, 0}, gas, tl, {});
    CHECK(d.div_ve_norm < 1e-12);
  }
  SUBCASE("entropy and density weights match closed forms") {
    std::mt19937_64 rng(8);
    FluidState u = FluidState::zeros(g);
    u.p = random_field(g, rng, 0.3);
    u.theta = random_field(g, rng, 0.3);
    for (int j = 0; j < 2; ++j) u.v[j] = random_field(g, rng, 0.5);
    const ParamPoint pp{0.5, 0, 0, 0};
    // Ideal gas with S(1,1) = 0: exp(S) = T^{5/2}/P, rho/rho0 = P/T.
    LimitOptions lo;
    lo.gamma_mode = GammaMode::custom;
    lo.custom_gamma = [](double th, double wp) { return std::exp(2.5 * th - wp); };
    const double ent = limit_diagnostics(u, pp, gas, {}, lo).curl_gamma_v_norm;
    lo.custom_gamma = [](double th, double wp) { return std::exp(wp - th); };
    const double den = limit_diagnostics(u, pp, gas, {}, lo).curl_gamma_v_norm;
    lo.gamma_mode = GammaMode::entropy;
    CHECK(limit_diagnostics(u, pp, gas, {}, lo).curl_gamma_v_norm == doctest::Approx(ent).epsilon(1e-9));
    lo.gamma_mode = GammaMode::density;
    CHECK(limit_diagnostics(u, pp, gas, {}, lo).curl_gamma_v_norm == doctest::Approx(den).epsilon(1e-13));
  }
  SUBCASE("d = 1 reports no curl") {
    const GridSpec g1{1, 32};
    FluidState u = FluidState::zeros(g1);
    u.v[0] = wave(g1, [](const Point& x) { return std::sin(x[0]); });
    const LimitDiagnostics d = limit_diagnostics(u, {0.5, 0, 0, 0}, gas, {}, {});
    CHECK(d.curl_gamma_v_norm == 0.0);
    CHECK(d.div_ve_norm == doctest::Approx(std::sqrt(2.0) * SQPI).epsilon(1e-13));
  }
  SUBCASE("gamma modes parse") {
    for (auto m : {GammaMode::entropy, GammaMode::density, GammaMode::custom})
      CHECK(gamma_mode_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(gamma_mode_from_string("pressure"), ConfigError);
  }
}

TEST_CASE("periodic_ansatz") {
  const GasModel gas = ideal_gas(1.0, {1.5});
  const GridSpec g{2, 16};
  std::mt19937_64 rng(12);
  SUBCASE("no heat, no source") {
    FluidState u = FluidState::zeros(g);
    u.p = random_field(g, rng, 0.3);
    u.theta = random_field(g, rng, 0.3);
    for (int j = 0; j < 2; ++j) u.v[j] = random_field(g, rng, 0.3);
    const SymmetrizerFrame f = periodic_ansatz(u, {0.5, 0, 0, 0}, gas, {}, {}, 0.0);
    CHECK(f.F_field.max_abs() == 0.0);
    CHECK(f.P_mean == 0.0);
    CHECK(f.V.max_abs() == 0.0);
    CHECK(f.U_q.max_abs() == u.p.max_abs());
    for (int j = 0; j < 2; ++j) CHECK((f.U_v[j] - u.v[j]).max_abs() == 0.0);
  }
  SUBCASE("heat-driven F: div V recovers F - g1 P") {
    FluidState u = FluidState::zeros(g);
    u.p = random_field(g, rng, 0.3);
    u.theta = random_field(g, rng, 0.3);
    TransportLaws tl;
    tl.k = {1.0, 0.5};
    const SymmetrizerFrame f = periodic_ansatz(u, {0.5, 0, 1.0, 0}, gas, tl, {}, 0.0);
    ScalarField target = f.F_field - f.P_mean * f.E_p;
    const ScalarField dv = div(f.V);
    CHECK((dv - target).max_abs() <= 1e-12 * target.max_abs());
    CHECK(std::abs(f.F_field.mean() - f.P_mean * f.E_p.mean()) < 1e-15);
    double gmin = INFINITY;
    for (std::size_t i = 0; i < g.points(); ++i) gmin = std::min({gmin, f.E_p[i], f.E_v[i]});
    CHECK(gmin > 0.0);
  }
  SUBCASE("constant source at the reference state") {
    const FluidState u = FluidState::zeros(g);
    SourceSpec src;
    src.mode = SourceSpec::Mode::prescribed;
    src.Q = [](double, const Point&) { return 0.3 / 0.4; }; // chi1(0,0) = 0.4
    const SymmetrizerFrame f = periodic_ansatz(u, {0.5, 0, 0, 0}, gas, {}, src, 0.0);
    CHECK(f.P_mean == doctest::Approx(0.3 / 0.6).epsilon(1e-14));
    CHECK(f.V.max_abs() < 1e-15);
  }
}

TEST_CASE("skew_energy_residual") {
  std::mt19937_64 rng(99);
  CHECK(skew_energy_residual(ScalarField({3, 8}), VectorField::zeros({3, 8})) == 0.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const GridSpec g{1 + trial % 3, trial % 3 == 2 ? 12 : 24};
    const ScalarField q = random_field(g, rng, 1.0);
    VectorField w = VectorField::zeros(g);
    for (int j = 0; j < g.dim; ++j) w[j] = random_field(g, rng, 1.0);
    worst = std::max(worst, skew_energy_residual(q, w));
  }
  CHECK(worst < 1e-11);
}

TEST_CASE("energy_balance_residual") {
  const GridSpec g{1, 32};
  SUBCASE("zero trajectory") {
    const SimulationSetup su = ideal_setup({0.5, 0.5, 0.5, 0});
    CHECK(energy_balance_residual(held_fixed(FluidState::zeros(g), su.params, 2, 1.0, 5), su) == 0.0);
  }
  SUBCASE("centered-difference convergence on a viscous acoustic run") {
    for (double kappa : {0.0, 0.4}) {
      const SimulationSetup su = ideal_setup({0.5, 0.5, kappa, 0});
      FluidState u = FluidState::zeros(g);
      const double a = 1e-3;
      u.p = wave(g, [&](const Point& x) { return a * std::cos(x[0]); });
      u.v[0] = wave(g, [&](const Point& x) { return a * std::sin(2 * x[0]); });
      u.theta = wave(g, [&](const Point& x) { return a * std::cos(3 * x[0]); });
      std::vector<double> res;
      for (double dt : {0.02, 0.01}) {
        IntegratorConfig cfg;
        cfg.t_end = 0.4;
        cfg.fixed_dt = dt;
        cfg.sample_every = 1;
        cfg.record_s = -1;
        const Trajectory tr = simulate(u, su, cfg);
        REQUIRE(tr.termination == Termination::completed);
        res.push_back(energy_balance_residual(tr, su));
      }
      MESSAGE("kappa " << kappa << ": residuals " << res[0] << " " << res[1]);
      CHECK(res[0] < 1e-2);
      CHECK(res[0] / res[1] == doctest::Approx(4.0).epsilon(0.15));
    }
  }
}

TEST_CASE("make_norm_report") {
  const GridSpec g{2, 16};
  SimulationSetup su = ideal_setup({0.5, 0.2, 0.2, 0});
  InitSpec is;
  is.generator = "well-prepared";
  is.amplitude = 0.05;
  const FluidState u0 = make_initial_data(is, g, su);
  IntegratorConfig cfg;
  cfg.t_end = 0.05;
  cfg.sample_every = 1;
  const Trajectory tr = simulate(u0, su, cfg);
  REQUIRE(tr.termination == Termination::completed);
  const NormReport rep = make_norm_report(tr, su, {});
  for (double v : {rep.theorem_norm_sup, rep.x_norm, rep.hf_norm, rep.lf_norm, rep.limit.div_ve_norm,
                   rep.limit.curl_gamma_v_norm, rep.skew_residual, rep.balance_residual}) {
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
  }
  CHECK(rep.theorem_norm_sup >= theorem_norm(u0, 0.5, 2));
  CHECK(rep.x_norm == doctest::Approx(x_norm(tr, 2, su.params).total()));
  CHECK(rep.skew_residual < 1e-11);
  CHECK_FALSE(rep.z_norm.has_value());
}
