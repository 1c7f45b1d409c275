#pragma once

// Right-hand sides of the primal, combustion and symmetrized systems.

#include "lowmach/spectral.hpp"
#include "lowmach/thermo.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lowmach {

struct ParamPoint {
  double eps = 1.0;
  double mu = 0.0;
  double kappa = 0.0;
  double lambda = 0.0;

  double nu() const;
  /// Throws ConfigError when outside (0,1]x[0,1]x[0,1]x[0,2], or when
  /// `combustion` and lambda < nu.
  void validate(bool combustion) const;
};

/// c0 * exp(c1 * theta).
struct ExpLaw {
  double c0 = 1.0;
  double c1 = 0.0;
  double operator()(double theta) const;
  double derivative(double theta) const;
};

struct TransportLaws {
  ExpLaw k{1.0, 0.0};
  ExpLaw zeta{1.0, 0.0};
  ExpLaw eta{0.0, 0.0};
  ExpLaw D{1.0, 0.0};

  /// Checks k > 0, zeta > 0, eta + 2 zeta > 0 (and D > 0 when combustion is
  /// on) on a theta lattice. Returns a list of violations.
  std::vector<std::string> validate(double theta_lo, double theta_hi, bool combustion) const;
};

struct FluidState {
  ScalarField p;
  VectorField v;
  ScalarField theta;
  std::vector<ScalarField> y;

  static FluidState zeros(const GridSpec& grid, int species = 0);
  const GridSpec& grid() const { return p.grid(); }
  bool all_finite() const;
};

using Tendency = FluidState;

/// out += a * x, field by field.
void axpy(FluidState& out, double a, const FluidState& x);

/// Scaled unknowns of the symmetrized system.
struct SymState {
  ScalarField rho_t;   // G(theta, eps p) / eps
  VectorField v;
  ScalarField theta_t; // theta / eps

  static SymState zeros(const GridSpec& grid);
  const GridSpec& grid() const { return rho_t.grid(); }
  bool all_finite() const;
};

using SymTendency = SymState;

void axpy(SymState& out, double a, const SymState& x);

struct SourceSpec {
  enum class Mode { none, prescribed, state };
  Mode mode = Mode::none;
  /// Prescribed Q(t, x).
  std::function<double(double t, const Point& x)> Q;
  /// State-dependent Q1(Phi), Q3(Phi) with Phi = (y, theta, eps p). Must vanish
  /// at the origin.
  std::function<double(std::span<const double> y, double theta, double wp)> Q1, Q3;
  /// Extra tendency added after assembly (manufactured solutions).
  std::function<void(double t, Tendency& out)> forcing;
};

/// Closure for the species coefficients g4, chi4.
enum class SpeciesClosure { density_ratio, unit };

enum class Formulation { primal, combustion, symmetrized };

std::string to_string(Formulation f);
Formulation formulation_from_string(const std::string& s);

/// PDE coefficients evaluated pointwise on the grid.
struct CoefficientFields {
  ScalarField g1, g2, g3, chi1, chi2, chi3;
  std::optional<ScalarField> g4, chi4;
};

/// Evaluates coefficient_set at (theta, wp) pointwise. With `species`,
/// also fills g4 and chi4.
CoefficientFields coefficient_fields(const GasModel& model, const ScalarField& theta,
                                     const ScalarField& wp,
                                     std::optional<SpeciesClosure> species = std::nullopt);

struct RhsOptions {
  /// Use these coefficients instead of evaluating them from the state.
  const CoefficientFields* frozen = nullptr;
  /// Drop the velocity tendency (heat-mode tests).
  bool freeze_velocity = false;
  SpeciesClosure species = SpeciesClosure::density_ratio;
};

/// mu * B2 v (without the 1/g2 factor).
VectorField viscous_term(const VectorField& v, const ScalarField& theta, const ScalarField& chi2,
                         const TransportLaws& transport);

/// div(law(theta) grad f), with dealiased products.
ScalarField diffusion_term(const ScalarField& f, const ScalarField& theta, const ExpLaw& law);

Tendency rhs_primal(const FluidState& state, const ParamPoint& params, const GasModel& model,
                    const TransportLaws& transport, const SourceSpec& source, double t,
                    const RhsOptions& opts = {});

Tendency rhs_combustion(const FluidState& state, const ParamPoint& params, const GasModel& model,
                        const TransportLaws& transport, const SourceSpec& source, double t,
                        const RhsOptions& opts = {});

SymState to_symmetrized(const FluidState& state, const ParamPoint& params, const GasModel& model);

/// Recovers p by Newton on w = eps p at every point (<= 50 steps).
/// `guess` supplies starting values for p when available.
FluidState from_symmetrized(const SymState& sym, const ParamPoint& params, const GasModel& model,
                            const ScalarField* p_guess = nullptr);

/// Chain-rule image of a primal tendency in symmetrized variables.
SymTendency map_tendency(const FluidState& state, const Tendency& d, const ParamPoint& params,
                         const GasModel& model);

SymTendency rhs_symmetrized(const SymState& sym, const ParamPoint& params, const GasModel& model,
                            const TransportLaws& transport, const RhsOptions& opts = {},
                            const ScalarField* p_guess = nullptr);

/// gamma1 = chi1 g3 / (chi3 g1), gamma2 = 1/g1.
struct SymCoefficients {
  double gamma1 = 0.0, gamma2 = 0.0;
};
SymCoefficients sym_coefficients(const CoefficientSet& cs);

} // namespace lowmach
