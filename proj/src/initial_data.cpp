#include "lowmach/errors.hpp"
#include "lowmach/timeloop.hpp"

#include <cmath>

namespace lowmach {

namespace {

double uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

// Wave vectors with entries in [-band, band], one from each +-k pair.
std::vector<std::array<int, 3>> half_lattice(int dim, int band) {
  std::vector<std::array<int, 3>> out;
  const int b2 = dim >= 2 ? band : 0, b3 = dim >= 3 ? band : 0;
  for (int a = -band; a <= band; ++a) {
    for (int b = -b2; b <= b2; ++b) {
      for (int c = -b3; c <= b3; ++c) {
        const std::array<int, 3> k{a, b, c};
        if (k > std::array<int, 3>{0, 0, 0}) out.push_back(k);
      }
    }
  }
  return out;
}

ScalarField second_source(const SimulationSetup& su, const FluidState& u, const CoefficientFields& cf) {
  const GridSpec& g = u.grid();
  ScalarField s(g);
  const SourceSpec& src = su.source;
  if (src.mode == SourceSpec::Mode::prescribed && src.Q) {
    s = product(cf.chi1, ScalarField::sample(g, [&](const Point& x) { return src.Q(0.0, x); }));
  } else if (src.mode == SourceSpec::Mode::state && src.Q1 && su.formulation == Formulation::combustion) {
    std::vector<double> yv(u.y.size());
    for (std::size_t i = 0; i < g.points(); ++i) {
      for (std::size_t l = 0; l < yv.size(); ++l) yv[l] = u.y[l][i];
      s[i] = src.Q1(yv, u.theta[i], su.params.eps * u.p[i]);
    }
    s = truncate(s);
  }
  return s;
}

} // namespace

ScalarField random_profile(const GridSpec& grid, std::mt19937_64& rng, int band) {
  if (band < 1 || 3 * band >= grid.n) {
    throw ConfigError("initial_data.band must be in [1, n/3)");
  }
  const auto ks = half_lattice(grid.dim, band);
  std::vector<double> amp_c(ks.size()), amp_s(ks.size());
  for (std::size_t m = 0; m < ks.size(); ++m) {
    amp_c[m] = uniform(rng);
    amp_s[m] = uniform(rng);
  }
  ScalarField f = ScalarField::sample(grid, [&](const Point& x) {
    double acc = 0.0;
    for (std::size_t m = 0; m < ks.size(); ++m) {
      const double ph = ks[m][0] * x[0] + ks[m][1] * x[1] + ks[m][2] * x[2];
      acc += amp_c[m] * std::cos(ph) + amp_s[m] * std::sin(ph);
    }
    return acc;
  });
  const double m = f.max_abs();
  if (m > 0.0) f *= 1.0 / m;
  return f;
}

FluidState make_initial_data(const InitSpec& spec, const GridSpec& grid, const SimulationSetup& setup) {
  grid.validate();
  if (spec.species < 0) throw ConfigError("initial_data.species must be >= 0");
  if (!(spec.amplitude >= 0.0) || !std::isfinite(spec.amplitude)) {
    throw ConfigError("initial_data.amplitude must be finite and >= 0");
  }
  const std::string& gen = spec.generator;
  if (gen != "general" && gen != "well-prepared" && gen != "theta-small" && gen != "zero") {
    throw ConfigError("unknown initial-data generator '" + gen + "'");
  }
  FluidState u = FluidState::zeros(grid, spec.species);
  if (gen == "zero" || spec.amplitude == 0.0) return u;

  std::mt19937_64 rng(spec.seed);
  const double a = spec.amplitude;
  auto profile = [&] { return random_profile(grid, rng, spec.band); };
  auto vector_profile = [&] {
    VectorField v = VectorField::zeros(grid);
    for (auto& c : v.components) c = a * profile();
    return v;
  };

  // Fixed draw order: theta, p, v, then species.
  if (gen == "general" || gen == "theta-small") {
    u.theta = (gen == "theta-small" ? setup.params.eps * a : a) * profile();
    u.p = a * profile();
    u.v = vector_profile();
    for (auto& y : u.y) y = a * profile();
    return u;
  }

  // well-prepared: p0 = 0 and div v0 balances the heat and source terms of
  // the pressure equation, so the 1/eps tendency of p starts at zero.
  u.theta = a * profile();
  VectorField sol = VectorField::zeros(grid);
  if (grid.dim == 2) {
    const ScalarField psi = profile();
    sol = VectorField({a * derivative(psi, 1), -a * derivative(psi, 0)});
  } else if (grid.dim == 3) {
    const VectorField A = vector_profile();
    CurlField c = curl(A);
    sol = VectorField(std::move(c.components));
  }
  for (auto& y : u.y) y = a * profile();

  const std::optional<SpeciesClosure> sp =
      setup.formulation == Formulation::combustion && spec.species > 0 ? std::optional(setup.species)
                                                                         : std::nullopt;
  const CoefficientFields cf = coefficient_fields(setup.gas, u.theta, ScalarField(grid), sp);
  ScalarField rhs = second_source(setup, u, cf);
  if (setup.params.kappa != 0.0) {
    rhs += setup.params.kappa * product(cf.chi1, diffusion_term(u.theta, u.theta, setup.transport.k));
  }
  const double mean = rhs.mean();
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= mean;
  const VectorField irr = inv_grad_laplace(rhs);
  std::vector<ScalarField> comps;
  for (int j = 0; j < grid.dim; ++j) comps.push_back(irr[j] + sol[j]);
  u.v = VectorField(std::move(comps));
  return u;
}

} // namespace lowmach
