#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lowmach/errors.hpp"
#include "lowmach/timeloop.hpp"

#include <cmath>
#include <cstring>

using namespace lowmach;

namespace {

SimulationSetup base_setup(double eps, double mu = 0.0, double kappa = 0.0) {
  SimulationSetup su;
  su.params = {eps, mu, kappa, 0.0};
  su.gas = ideal_gas(1.0, {1.5});
  return su;
}

double l2_diff(const FluidState& a, const FluidState& b) {
  double acc = 0.0;
  auto add = [&](const ScalarField& x, const ScalarField& y) {
    for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - y[i]) * (x[i] - y[i]);
  };
  add(a.p, b.p);
  add(a.theta, b.theta);
  for (int j = 0; j < a.v.dim(); ++j) add(a.v[j], b.v[j]);
  for (std::size_t l = 0; l < a.y.size(); ++l) add(a.y[l], b.y[l]);
  return std::sqrt(acc / a.p.size());
}

bool bit_equal(const ScalarField& a, const ScalarField& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(double)) == 0;
}

bool bit_equal(const FluidState& a, const FluidState& b) {
  if (!bit_equal(a.p, b.p) || !bit_equal(a.theta, b.theta)) return false;
  for (int j = 0; j < a.v.dim(); ++j)
    if (!bit_equal(a.v[j], b.v[j])) return false;
  for (std::size_t l = 0; l < a.y.size(); ++l)
    if (!bit_equal(a.y[l], b.y[l])) return false;
  return true;
}

FluidState run_fixed(const FluidState& u0, const SimulationSetup& su, double t_end, double dt) {
  IntegratorConfig cfg;
  cfg.t_end = t_end;
  cfg.fixed_dt = dt;
  cfg.record_s = -1;
  cfg.sample_every = 1 << 30;
  const Trajectory tr = simulate(u0, su, cfg);
  REQUIRE(tr.termination == Termination::completed);
  return tr.states.back();
}

} // namespace

TEST_CASE("rk4_step on scalar-like states") {
  const GridSpec g{1, 16};
  FluidState u = FluidState::zeros(g);
  u.theta = ScalarField::constant(g, 1.0);
  SUBCASE("zero rhs leaves the state unchanged") {
    const FluidState out = rk4_step(u, 0.0, 0.1, [&](const FluidState&, double) { return FluidState::zeros(g); });
    CHECK(bit_equal(out, u));
  }
  SUBCASE("decay mode has local error O(dt^5)") {
    auto rhs = [&](const FluidState& x, double) {
      Tendency d = FluidState::zeros(g);
      d.theta = -1.0 * x.theta;
      return d;
    };
    double prev = 0.0;
    for (double dt : {0.2, 0.1, 0.05}) {
      const double err = std::abs(rk4_step(u, 0.0, dt, rhs).theta[0] - std::exp(-dt));
      if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(5.0).epsilon(0.05));
      prev = err;
    }
  }
}

TEST_CASE("stable_dt") {
  const GridSpec g{1, 64};
  const FluidState zero = FluidState::zeros(g);
  const TransportLaws tl;

  SUBCASE("reference state, eps = 1, cfl = 0.5") {
    const double dt = stable_dt(zero, {1.0, 0, 0, 0}, ideal_gas(1.0, {1.5}), tl, 0.5);
    // c0 = 1/sqrt(g1 g2) with g1 = 0.6, g2 = 1.
    CHECK(dt == doctest::Approx(0.5 * (2 * M_PI / 64) * std::sqrt(0.6)).epsilon(1e-14));
  }
  SUBCASE("acoustic regime is linear in eps") {
    const GasModel gas = ideal_gas(1.0, {1.5});
    const double a = stable_dt(zero, {0.5, 0, 0, 0}, gas, tl, 0.4);
    const double b = stable_dt(zero, {0.25, 0, 0, 0}, gas, tl, 0.4);
    CHECK(b == doctest::Approx(0.5 * a).epsilon(1e-14));
  }
  SUBCASE("diffusive limit scales as dx^2") {
    const GasModel gas = ideal_gas(1.0, {1.5});
    const double a = stable_dt(FluidState::zeros({1, 512}), {1.0, 1.0, 0, 0}, gas, tl, 0.4);
    const double b = stable_dt(FluidState::zeros({1, 1024}), {1.0, 1.0, 0, 0}, gas, tl, 0.4);
    CHECK(a / b == doctest::Approx(4.0).epsilon(1e-10));
  }
  SUBCASE("non-trivial state against a pointwise recomputation") {
    const GridSpec g2{2, 16};
    const SimulationSetup su = base_setup(0.3, 0.7, 0.2);
    InitSpec is;
    is.amplitude = 0.3;
    is.seed = 11;
    const FluidState u = make_initial_data(is, g2, su);
    TransportLaws tr;
    tr.k = {1.2, 0.5};
    tr.zeta = {0.8, -0.3};
    tr.eta = {0.4, 0.2};
    const double dt = stable_dt(u, su.params, su.gas, tr, 0.4);

    double c0 = 0, visc = 0, heat = 0, vmax = 0;
    for (std::size_t i = 0; i < g2.points(); ++i) {
      const double th = u.theta[i];
      const CoefficientSet cs = coefficient_set(su.gas, th, 0.3 * u.p[i]);
      c0 = std::max(c0, std::sqrt(1.0 / (cs.g1 * cs.g2)));
      visc = std::max(visc, cs.chi2 * (0.8 * std::exp(-0.3 * th) + 0.4 * std::exp(0.2 * th)) / cs.g2);
      heat = std::max(heat, 1.2 * std::exp(0.5 * th) * cs.chi3 / cs.g3);
      for (int j = 0; j < 2; ++j) vmax = std::max(vmax, std::abs(u.v[j][i]));
    }
    const double dx = 2 * M_PI / 16;
    const double expect = 0.4 * std::min({0.3 * dx / c0, dx / (vmax + 1e-12),
                                          dx * dx / (4.0 * (0.7 * visc + 0.2 * heat) + 1e-12)});
    CHECK(dt == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("monotone in 1/eps, mu, kappa, lambda") {
    const GridSpec g1{1, 32};
    SimulationSetup su = base_setup(1.0);
    InitSpec is;
    is.amplitude = 0.2;
    is.species = 1;
    const FluidState u = make_initial_data(is, g1, su);
    // Coefficients depend on eps p, so the eps axis uses p = 0.
    FluidState u_p0 = u;
    u_p0.p = ScalarField(g1);
    const double eps_list[] = {1.0, 0.5, 0.25, 0.125, 0.0625};
    double prev = INFINITY;
    for (double e : eps_list) {
      const double dt = stable_dt(u_p0, {e, 0.5, 0.5, 1.0}, su.gas, tl, 0.4, true);
      CHECK(dt <= prev);
      prev = dt;
    }
    for (int axis = 0; axis < 4; ++axis) {
      prev = INFINITY;
      for (double x : {0.0, 0.1, 0.5, 1.0}) {
        ParamPoint pp{0.5, 0.3, 0.3, 1.0};
        (axis == 0 ? pp.eps : axis == 1 ? pp.mu : axis == 2 ? pp.kappa : pp.lambda) =
            axis == 0 ? 1.0 - 0.9 * x : (axis == 3 ? 1.0 + x : x);
        const double dt = stable_dt(axis == 0 ? u_p0 : u, pp, su.gas, tl, 0.4, true);
        CHECK(dt <= prev);
        prev = dt;
      }
    }
  }
}

TEST_CASE("make_initial_data") {
  const GridSpec g{2, 16};
  const SimulationSetup su = base_setup(0.1, 0.0, 1.0);

  SUBCASE("amplitude 0 gives the zero state") {
    InitSpec is;
    is.amplitude = 0.0;
    const FluidState u = make_initial_data(is, g, su);
    CHECK(bit_equal(u, FluidState::zeros(g)));
  }
  SUBCASE("unknown generator") {
    InitSpec is;
    is.generator = "acoustic";
    CHECK_THROWS_AS(make_initial_data(is, g, su), ConfigError);
  }
  SUBCASE("fixed seed is bit-reproducible, other seeds differ") {
    InitSpec is;
    is.seed = 42;
    is.species = 2;
    for (const char* gen : {"general", "well-prepared", "theta-small"}) {
      is.generator = gen;
      CHECK(bit_equal(make_initial_data(is, g, su), make_initial_data(is, g, su)));
    }
    InitSpec other = is;
    other.seed = 43;
    CHECK_FALSE(bit_equal(make_initial_data(is, g, su), make_initial_data(other, g, su)));
  }
  SUBCASE("profiles are band-limited, mean free, unit max") {
    std::mt19937_64 rng(5);
    const ScalarField f = random_profile(g, rng, 3);
    CHECK(f.max_abs() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(f.mean()) < 1e-15);
    const Spectrum s = forward(f);
    const auto& t = wave_tables(g);
    for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
      const bool inside = std::abs(t.k[0][i]) <= 3 && std::abs(t.k[1][i]) <= 3;
      if (!inside) CHECK(std::abs(s.coeffs[i]) < 1e-15);
    }
    CHECK_THROWS_AS(random_profile(g, rng, 6), ConfigError);
  }
  SUBCASE("theta-small scales theta by eps") {
    InitSpec is;
    is.generator = "theta-small";
    is.amplitude = 1.0;
    const FluidState u = make_initial_data(is, g, su);
    std::mt19937_64 rng(is.seed);
    const ScalarField unit = random_profile(g, rng, is.band);
    CHECK(sobolev_norm(u.theta, 2) / 0.1 <= 1.0 * sobolev_norm(unit, 2) * (1 + 1e-14));
    CHECK(u.theta.max_abs() == doctest::Approx(0.1));
  }
  SUBCASE("well-prepared data have no O(1/eps) pressure tendency") {
    for (int dim : {1, 2, 3}) {
      const GridSpec gd{dim, 16};
      for (double kappa : {0.0, 1.0}) {
        SimulationSetup s2 = base_setup(1.0 / 64, 0.0, kappa);
        s2.transport.k = {1.0, 0.7};
        InitSpec is;
        is.generator = "well-prepared";
        is.amplitude = 0.5;
        const FluidState u = make_initial_data(is, gd, s2);
        CHECK(u.p.max_abs() == 0.0);
        CHECK(u.theta.max_abs() == doctest::Approx(0.5));
        const Tendency d = rhs_primal(u, s2.params, s2.gas, s2.transport, s2.source, 0.0);
        CHECK(s2.params.eps * d.p.max_abs() < 1e-13);
        if (dim == 1 && kappa == 0.0) CHECK(u.v.max_abs() == 0.0);
        if (dim >= 2) CHECK(u.v.max_abs() > 0.1);
      }
    }
  }
}

TEST_CASE("simulate: trivial and conservation properties") {
  SUBCASE("zero data stay zero") {
    const GridSpec g{2, 16};
    const SimulationSetup su = base_setup(0.5, 1.0, 1.0);
    IntegratorConfig cfg;
    cfg.t_end = 0.2;
    cfg.sample_every = 5;
    const Trajectory tr = simulate(FluidState::zeros(g), su, cfg);
    CHECK(tr.termination == Termination::completed);
    CHECK(tr.t_final == 0.2);
    CHECK(tr.times.front() == 0.0);
    CHECK(tr.times.back() == 0.2);
    for (const auto& s : tr.states) CHECK(bit_equal(s, FluidState::zeros(g)));
    CHECK(tr.records.size() == tr.dt_history.size() + 1);
  }
  SUBCASE("frozen-velocity heat mode decays monotonically") {
    const GridSpec g{1, 32};
    const SimulationSetup su = base_setup(1.0, 0.0, 1.0);
    FluidState u = FluidState::zeros(g);
    u.theta = ScalarField::sample(g, [](const Point& x) { return 0.1 * std::cos(x[0]) + 0.05 * std::sin(3 * x[0]); });
    IntegratorConfig cfg;
    cfg.t_end = 1.0;
    cfg.sample_every = 1;
    cfg.freeze_velocity = true;
    const Trajectory tr = simulate(u, su, cfg);
    REQUIRE(tr.termination == Termination::completed);
    double prev = INFINITY;
    for (const auto& s : tr.states) {
      CHECK(s.v.max_abs() == 0.0);
      const double n = s.theta.l2_norm();
      CHECK(n < prev);
      prev = n;
    }
    CHECK(prev < 0.5 * tr.states.front().theta.l2_norm());
  }
  SUBCASE("acoustic energy is conserved at small amplitude") {
    const GridSpec g{1, 32};
    const SimulationSetup su = base_setup(0.5);
    FluidState u = FluidState::zeros(g);
    const double a = 1e-4;
    u.p = ScalarField::sample(g, [&](const Point& x) { return a * std::cos(x[0]); });
    auto energy = [&](const FluidState& s) {
      const CoefficientFields cf = coefficient_fields(su.gas, s.theta, su.params.eps * s.p);
      double acc = 0.0;
      for (std::size_t i = 0; i < g.points(); ++i) acc += cf.g1[i] * s.p[i] * s.p[i] + cf.g2[i] * s.v[0][i] * s.v[0][i];
      return acc / g.points();
    };
    IntegratorConfig cfg;
    cfg.t_end = 1.0;
    cfg.sample_every = 1;
    const Trajectory tr = simulate(u, su, cfg);
    REQUIRE(tr.termination == Termination::completed);
    const double e0 = energy(tr.states.front());
    double worst = 0.0;
    for (const auto& s : tr.states) worst = std::max(worst, std::abs(energy(s) - e0) / e0);
    CHECK(worst <= 1e-6);
    // The mode actually oscillates: v picks up O(a) amplitude.
    double vmax = 0.0;
    for (const auto& s : tr.states) vmax = std::max(vmax, s.v.max_abs());
    CHECK(vmax > 0.5 * a * std::sqrt(0.6));
  }
}

TEST_CASE("simulate: temporal order of RK4 on the 1D primal system") {
  const GridSpec g{1, 32};
  const SimulationSetup su = base_setup(0.5, 0.05, 0.05);
  InitSpec is;
  is.amplitude = 0.05;
  is.seed = 3;
  const FluidState u0 = make_initial_data(is, g, su);
  const double t_end = 0.5, dt = 0.05;
  const FluidState ref = run_fixed(u0, su, t_end, dt / 16);
  std::vector<double> err;
  for (double h : {dt, dt / 2, dt / 4}) err.push_back(l2_diff(run_fixed(u0, su, t_end, h), ref));
  const double order = std::log2(err[1] / err[2]);
  MESSAGE("errors " << err[0] << " " << err[1] << " " << err[2] << ", order " << order);
  CHECK(order == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("simulate: determinism, termination reasons, formulations") {
  const GridSpec g{2, 16};
  SimulationSetup su = base_setup(0.25, 0.1, 0.1);
  InitSpec is;
  is.seed = 9;
  const FluidState u0 = make_initial_data(is, g, su);
  IntegratorConfig cfg;
  cfg.t_end = 0.05;
  cfg.sample_every = 3;

  SUBCASE("bit-identical repeated runs") {
    const Trajectory a = simulate(u0, su, cfg);
    const Trajectory b = simulate(u0, su, cfg);
    REQUIRE(a.states.size() == b.states.size());
    CHECK(a.dt_history == b.dt_history);
    for (std::size_t i = 0; i < a.states.size(); ++i) CHECK(bit_equal(a.states[i], b.states[i]));
  }
  SUBCASE("sampling includes t = 0 and the final state") {
    const Trajectory a = simulate(u0, su, cfg);
    CHECK(a.times.front() == 0.0);
    CHECK(a.times.back() == doctest::Approx(0.05).epsilon(1e-14));
    const std::size_t steps = a.dt_history.size();
    CHECK(a.times.size() == 1 + steps / 3 + (steps % 3 ? 1 : 0));
  }
  SUBCASE("step limit") {
    IntegratorConfig c = cfg;
    c.max_steps = 2;
    c.t_end = 1.0;
    const Trajectory a = simulate(u0, su, c);
    CHECK(a.termination == Termination::max_steps);
    CHECK_FALSE(a.message.empty());
    CHECK(a.dt_history.size() == 2);
  }
  SUBCASE("blow-up threshold") {
    IntegratorConfig c = cfg;
    c.blowup_threshold = 1e-3;
    const Trajectory a = simulate(u0, su, c);
    CHECK(a.termination == Termination::blowup);
    CHECK(a.message.find("threshold") != std::string::npos);
    CHECK(a.dt_history.size() == 1);
  }
  SUBCASE("non-finite initial data") {
    FluidState bad = u0;
    bad.p[3] = NAN;
    const Trajectory a = simulate(bad, su, cfg);
    CHECK(a.termination == Termination::blowup);
    CHECK_FALSE(a.message.empty());
  }
  SUBCASE("invalid configurations") {
    IntegratorConfig c = cfg;
    c.cfl = 0.0;
    CHECK_THROWS_AS(simulate(u0, su, c), ConfigError);
    SimulationSetup s2 = su;
    s2.formulation = Formulation::combustion;
    CHECK_THROWS_AS(simulate(u0, s2, cfg), ConfigError); // lambda < nu
    s2.params.lambda = 1.0;
    CHECK_THROWS_AS(simulate(u0, s2, cfg), ConfigError); // no species
  }
  SUBCASE("termination names round-trip") {
    for (auto t : {Termination::completed, Termination::blowup, Termination::max_steps, Termination::failed})
      CHECK(termination_from_string(to_string(t)) == t);
  }
  SUBCASE("symmetrized run agrees with primal in the Euler case") {
    SimulationSetup e = base_setup(0.25);
    const FluidState v0 = make_initial_data(is, {1, 64}, e);
    IntegratorConfig c;
    c.t_end = 0.05;
    c.fixed_dt = 1e-3;
    const Trajectory a = simulate(v0, e, c);
    e.formulation = Formulation::symmetrized;
    const Trajectory b = simulate(v0, e, c);
    REQUIRE(b.termination == Termination::completed);
    CHECK(l2_diff(a.states.back(), b.states.back()) < 1e-8);
  }
  SUBCASE("combustion run carries species") {
    SimulationSetup c2 = base_setup(0.5, 0.1, 0.1);
    c2.params.lambda = 0.5;
    c2.formulation = Formulation::combustion;
    InitSpec ic = is;
    ic.species = 1;
    const FluidState v0 = make_initial_data(ic, g, c2);
    const Trajectory a = simulate(v0, c2, cfg);
    CHECK(a.termination == Termination::completed);
    CHECK(a.states.back().y.size() == 1);
    CHECK(a.records.back().raw.y_s2 > 0.0);
  }
}

TEST_CASE("step records") {
  const GridSpec g{1, 32};
  FluidState u = FluidState::zeros(g);
  u.p = ScalarField::sample(g, [](const Point& x) { return std::cos(2 * x[0]); });
  u.v[0] = ScalarField::sample(g, [](const Point& x) { return std::sin(x[0]); });
  u.theta = ScalarField::sample(g, [](const Point& x) { return std::sin(3 * x[0]); });
  const ParamPoint pp{0.5, 0.1, 0.3, 0.0};
  const StepRecord r = step_record(u, 0.0, 2, pp);
  const double norm_cos = std::sqrt(M_PI); // ||cos(kx)||_{L2(T)}
  // grad p = -2 sin 2x: H^1 norm sqrt(1+4) * 2 * norm_cos.
  CHECK(r.raw.grad_p_sm1 == doctest::Approx(2 * std::sqrt(5.0) * norm_cos));
  CHECK(r.raw.theta_s == doctest::Approx(10 * norm_cos));
  CHECK(r.raw.div_v_s == doctest::Approx(2 * norm_cos));
  // Filtered pieces: J at h = eps nu = 0.5 * sqrt(0.4).
  const double h = 0.5 * std::sqrt(0.4);
  CHECK(r.lf_div_s == doctest::Approx(cutoff(h) * 2 * norm_cos));
  CHECK(r.high.theta_s == doctest::Approx((1 - cutoff(3 * h)) * 10 * norm_cos));
  CHECK(r.lf_grad_sm1 == doctest::Approx(cutoff(2 * h) * 2 * std::sqrt(5.0) * norm_cos));
}
