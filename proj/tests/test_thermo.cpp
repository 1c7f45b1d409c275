#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lowmach/errors.hpp"
#include "lowmach/thermo.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace lowmach;

namespace {

// Closed-form ideal gas (R, C_V constant) oracles.
struct IdealOracle {
  double R = 1.0, Cv = 1.5;
  double S(double P, double T) const { return (Cv + R) * std::log(T) - R * std::log(P); }
  double chi1(double P) const { return R / ((Cv + R) * P); }
};

// Virial gas entropy up to the constant fixed by S(1,1) = 0.
double virial_entropy(double R, double Cv, double a0, double P, double T) {
  auto s = [&](double p, double t) { return (Cv + R) * std::log(t) - R * std::log(p) - a0 * p / (t * t); };
  return s(P, T) - s(1.0, 1.0);
}

GasModel planted_bad() {
  GasModel::Definition d;
  d.name = "bad";
  d.rho = [](double P, double T) { return P + T; };
  d.e = [](double, double T) { return T; };
  d.rho_P = [](double, double) { return 1.0; };
  d.rho_T = [](double, double) { return 1.0; };
  d.e_P = [](double, double) { return 0.0; };
  d.e_T = [](double, double) { return 1.0; };
  d.box = {0.1, 10, 0.1, 10};
  return GasModel(d);
}

} // namespace

TEST_CASE("ideal gas coefficients at the reference state") {
  auto gas = ideal_gas(1.0, {1.5});
  auto tc = thermo_coefficients(gas, 1.0, 1.0);
  CHECK(tc.K_T == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(tc.K_P == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(tc.C_P == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(tc.C_V == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(tc.Rcal == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(tc.C_P - tc.C_V == doctest::Approx(1.0).epsilon(1e-14));

  auto cs = coefficient_set(gas, 0.0, 0.0);
  CHECK(cs.chi1 == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(cs.chi3 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cs.g1 == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(cs.g2 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cs.g3 == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(cs.chi2 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Rcal equals R and chi1 matches the closed form everywhere") {
  auto gas = ideal_gas(2.0, {3.0});
  IdealOracle o{2.0, 3.0};
  for (double P : {0.3, 1.0, 4.0})
    for (double T : {0.5, 1.0, 3.0}) {
      CHECK(thermo_coefficients(gas, P, T).Rcal == doctest::Approx(2.0).epsilon(1e-13));
      auto cs = coefficient_set(gas, std::log(T), std::log(P));
      CHECK(cs.chi1 == doctest::Approx(o.chi1(P)).epsilon(1e-13));
    }
}

TEST_CASE("printed C_V formula does not reproduce the input") {
  auto gas = ideal_gas(1.0, {1.5});
  auto q = gas.eval(1.0, 1.0);
  auto s = entropy_partials(q, 1.0, 1.0);
  const double printed = 1.0 * (s.S_T * q.rho_P - s.S_P * s.S_T) / q.rho_P;
  CHECK(std::abs(printed - 1.5) > 1.0);
  CHECK(thermo_coefficients(gas, 1.0, 1.0).C_V == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("abcd") {
  auto gas = ideal_gas(1.0, {1.5});
  auto r = abcd(gas, 1.0, 1.0);
  CHECK(r.a == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
  CHECK(r.b == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(r.c == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(r.d == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(abcd(gas, 2.0, 1.0).a == doctest::Approx(10.0 / 3.0).epsilon(1e-14));

  // g1 = P/a, g3 = T/c, chi1 = b/a, chi3 = d/c from the (P,T) system.
  auto vg = virial_gas(1.0, 1.5, 0.1, 0.05);
  for (const GasModel* m : std::vector<const GasModel*>{&gas, &vg}) {
    for (double P : {0.7, 1.3})
      for (double T : {0.8, 1.6}) {
        auto x = abcd(*m, P, T);
        auto cs = coefficient_set(*m, std::log(T), std::log(P));
        CHECK(cs.g1 == doctest::Approx(P / x.a).epsilon(1e-10));
        CHECK(cs.g3 == doctest::Approx(T / x.c).epsilon(1e-10));
        CHECK(cs.chi1 == doctest::Approx(x.b / x.a).epsilon(1e-10));
        CHECK(cs.chi3 == doctest::Approx(x.d / x.c).epsilon(1e-10));
      }
  }
}

TEST_CASE("singular and degenerate states") {
  GasModel::Definition d;
  d.name = "flat";
  d.rho = [](double, double) { return 1.0; };
  d.e = [](double, double T) { return T; };
  d.rho_P = [](double, double) { return 0.0; };
  d.rho_T = [](double, double) { return 0.0; };
  d.e_P = [](double, double) { return 0.0; };
  d.e_T = [](double, double) { return 1.0; };
  d.box = {0.1, 10, 0.1, 10};
  GasModel flat(d);
  CHECK_THROWS_AS(thermo_coefficients(flat, 1, 1), DegenerateState);
  CHECK_THROWS_AS(abcd(flat, 1, 1), SingularJacobian);
  auto gas = ideal_gas(1.0, {1.5});
  CHECK_THROWS_AS(gas.eval(1e4, 1.0), OutOfDomain);
}

TEST_CASE("maxwell residual") {
  auto gas = ideal_gas(1.0, {1.5});
  CHECK(maxwell_residual(gas, 1.0, 1.0) < 1e-12);
  auto vg = virial_gas(1.0, 1.5, 0.1, 0.05);
  for (double P : {0.5, 1.0, 2.0}) CHECK(maxwell_residual(vg, P, 1.2) < 1e-8);
  CHECK(maxwell_residual(planted_bad(), 1.0, 1.0) > 0.1);
}

TEST_CASE("gamma residuals") {
  auto gas = ideal_gas(1.0, {1.5});
  auto g0 = gamma_residuals(gas, 0.0, 0.0);
  CHECK(std::abs(g0.gamma1_S) < 1e-14);
  CHECK(std::abs(g0.gamma2_rho) < 1e-14);
  auto vg = virial_gas(1.0, 1.5, 0.1, 0.05);
  for (const GasModel* m : std::vector<const GasModel*>{&gas, &vg}) {
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        const double th = -0.5 + 0.25 * i, wp = -0.5 + 0.25 * j;
        auto g = gamma_residuals(*m, th, wp);
        CHECK(std::abs(g.gamma1_S) < 1e-8 * g.scale);
        CHECK(std::abs(g.gamma2_rho) < 1e-8 * g.scale);
        CHECK(g.gamma2_S > 0.0);
        CHECK(g.gamma1_rho > 0.0);
      }
  }
}

TEST_CASE("entropy") {
  auto gas = ideal_gas(1.0, {1.5});
  IdealOracle o;
  CHECK(entropy(gas, 1.0, 1.0) == 0.0);
  CHECK(entropy(gas, 1.0, std::exp(1.0)) == doctest::Approx(2.5).epsilon(1e-10));
  CHECK(entropy(gas, 3.0, 0.4) == doctest::Approx(o.S(3.0, 0.4)).epsilon(1e-9));
  CHECK_THROWS_AS(entropy(gas, 1e5, 1.0), PathOutOfDomain);

  auto vg = virial_gas(1.0, 1.5, 0.1, 0.05);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.6, 3.0);
  for (int i = 0; i < 50; ++i) {
    const double P = u(rng), T = u(rng);
    const double a = entropy(vg, P, T);
    const double b = entropy(vg, P, T, {1e-10, true});
    CHECK(std::abs(a - b) < 1e-8);
    CHECK(a == doctest::Approx(virial_entropy(1.0, 1.5, 0.1, P, T)).epsilon(1e-8));
  }
}

TEST_CASE("entropy path must stay in the box") {
  auto gas = ideal_gas(1.0, {1.5}, 1.0, 1.0, {0.5, 2.0, 0.5, 2.0});
  CHECK_NOTHROW(entropy(gas, 1.9, 1.9));
  CHECK_THROWS_AS(entropy(gas, 2.5, 1.0), PathOutOfDomain);
}

TEST_CASE("chi1 is theta-independent for constant C_V only") {
  auto gas = ideal_gas(1.0, {1.5});
  const double h = 1e-4;
  for (double wp : {-0.3, 0.0, 0.4}) {
    const double d = (coefficient_set(gas, h, wp).chi1 - coefficient_set(gas, -h, wp).chi1) / (2 * h);
    CHECK(std::abs(d) < 1e-10);
  }
  auto poly = ideal_gas(1.0, {1.5, 0.2});
  const double d = (coefficient_set(poly, h, 0).chi1 - coefficient_set(poly, -h, 0).chi1) / (2 * h);
  CHECK(std::abs(d) > 1e-3);
  // Polynomial C_V is reproduced as well.
  CHECK(thermo_coefficients(poly, 1.0, 2.0).C_V == doctest::Approx(1.9).epsilon(1e-12));
}

TEST_CASE("slow variables") {
  auto gas = ideal_gas(1.0, {1.5});
  auto z = slow_variables(gas, 0.0, 0.0);
  CHECK(z.F == 0.0);
  CHECK(z.G == 0.0);
  CHECK(slow_variables(gas, 0.0, std::log(2.0)).G == doctest::Approx(1.0).epsilon(1e-14));
  for (double th : {-0.5, 0.0, 0.5})
    for (double wp : {-0.5, 0.0, 0.5}) {
      auto s = slow_variables(gas, th, wp);
      CHECK(s.G == doctest::Approx(std::exp(wp - th) - 1.0).epsilon(1e-13));
      CHECK(s.G_wp > 0.0);
    }
  auto rep = check_slow_variable_jacobian(gas, -1, 1, -1, 1, 6);
  CHECK(rep.passed);
}

TEST_CASE("validation") {
  auto gas = ideal_gas(1.0, {1.5});
  auto rep = validate_gas_model(gas, {0.5, 2.0, 0.5, 2.0}, 8);
  CHECK(rep.passed);
  CHECK(rep.max_identity_residual < 1e-10);

  auto bad = validate_gas_model(planted_bad(), {0.5, 2.0, 0.5, 2.0}, 5);
  CHECK_FALSE(bad.passed);
  CHECK(bad.failed_points == bad.points);
  for (const auto& f : bad.failures) CHECK(f.reason.find("d rho/dT >= 0") != std::string::npos);

  // Out-of-box samples are reported, not thrown.
  auto outside = validate_gas_model(ideal_gas(1, {1.5}, 1, 1, {0.5, 2, 0.5, 2}), {0.5, 4, 0.5, 2}, 4);
  CHECK_FALSE(outside.passed);

  // Virial gas: e_T rho_P > e_P rho_T iff C_V R T^4 > a0^2 P^2.
  const double Cv = 1.5, R = 1.0, a0 = 1.0;
  auto vg = virial_gas(R, Cv, a0, 5.0, 1.0, 1.0, {0.05, 20, 0.05, 20});
  for (double P : {0.5, 2.0, 8.0})
    for (double T : {0.3, 0.9, 2.0}) {
      const bool expect = Cv * R * std::pow(T, 4) > a0 * a0 * P * P;
      auto q = vg.eval(P, T);
      CHECK((q.e_T * q.rho_P > q.e_P * q.rho_T) == expect);
      auto pt = validate_gas_model(vg, {P, P, T, T}, 4);
      if (!expect) CHECK_FALSE(pt.passed);
    }

  // Scaling rho by 2 breaks the closedness identity for a non-ideal gas.
  GasModel::Definition d;
  d.name = "scaled";
  d.all = [vg](double P, double T) {
    auto q = vg.eval_unchecked(P, T);
    q.rho *= 2;
    q.rho_P *= 2;
    q.rho_T *= 2;
    return q;
  };
  d.box = {0.5, 2, 0.5, 2};
  auto scaled = validate_gas_model(GasModel(d), {0.5, 2, 0.5, 2}, 4);
  CHECK_FALSE(scaled.passed);
  CHECK(scaled.max_identity_residual > 1e-3);
}

TEST_CASE("finite-difference partials converge") {
  auto vg = virial_gas(1.0, 1.5, 0.2, 0.05);
  auto fd = vg.without_partials();
  CHECK_FALSE(fd.has_analytic_partials());
  CHECK(vg.has_analytic_partials());
  auto a = vg.eval(1.3, 0.9);
  auto b = fd.eval(1.3, 0.9);
  CHECK(std::abs(a.rho_P - b.rho_P) < 1e-8);
  CHECK(std::abs(a.rho_T - b.rho_T) < 1e-8);
  CHECK(std::abs(a.e_P - b.e_P) < 1e-8);
  CHECK(std::abs(a.e_T - b.e_T) < 1e-8);
  CHECK(maxwell_residual(fd, 1.3, 0.9) < 1e-8);
}

TEST_CASE("tabulated gas") {
  auto gas = ideal_gas(1.0, {1.5});
  std::vector<double> P, T, rho, e;
  for (int i = 0; i < 41; ++i) P.push_back(0.5 + 0.05 * i);
  for (int j = 0; j < 41; ++j) T.push_back(0.5 + 0.05 * j);
  for (double p : P) for (double t : T) rho.push_back(gas.eval(p, t).rho);
  for (double p : P) for (double t : T) e.push_back(gas.eval(p, t).e);

  std::ostringstream os;
  os << P.size() << " " << T.size() << "\n";
  for (auto* v : {&P, &T, &rho, &e}) {
    for (double x : *v) os.precision(17), os << x << " ";
    os << "\n";
  }
  std::istringstream is(os.str());
  auto tab = load_table(is, 1.0, 1.0);
  CHECK(tab.box().P_lo == 0.5);
  CHECK(tab.box().T_hi == doctest::Approx(2.5));
  // Nodes are reproduced exactly and interior states closely.
  CHECK(tab.eval(1.0, 1.0).rho == doctest::Approx(1.0).epsilon(1e-14));
  auto q = tab.eval(1.23, 0.87);
  auto r = gas.eval(1.23, 0.87);
  CHECK(q.rho == doctest::Approx(r.rho).epsilon(1e-5));
  CHECK(q.rho_T == doctest::Approx(r.rho_T).epsilon(1e-3));
  CHECK(q.e_T == doctest::Approx(r.e_T).epsilon(1e-6));
  auto cs = coefficient_set(tab, 0.0, 0.0);
  CHECK(cs.chi1 == doctest::Approx(0.4).epsilon(2e-3));
  CHECK_THROWS_AS(tab.eval(3.0, 1.0), OutOfDomain);

  std::istringstream truncated("3 3\n1 2 3\n1 2 3\n1 1 1\n");
  CHECK_THROWS(load_table(truncated, 1, 1));
}
