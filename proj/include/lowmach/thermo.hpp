#pragma once

// Equations of state and the PDE coefficients derived from them.
//
// A GasModel supplies rho(P,T) and e(P,T). Partials are analytic when the
// model provides them and central differences otherwise. Everything else in
// this header is computed from those six numbers at a state.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lowmach {

struct StateBox {
  double P_lo = 0.0, P_hi = 0.0;
  double T_lo = 0.0, T_hi = 0.0;

  bool contains(double P, double T) const {
    return P >= P_lo && P <= P_hi && T >= T_lo && T <= T_hi;
  }
};

/// rho, e and their first partials at one state.
struct EosPoint {
  double rho = 0.0, rho_P = 0.0, rho_T = 0.0;
  double e = 0.0, e_P = 0.0, e_T = 0.0;
};

class GasModel {
public:
  using Fn = std::function<double(double P, double T)>;

  struct Definition {
    std::string name;
    Fn rho;
    Fn e;
    // Optional analytic partials; missing ones fall back to central differences.
    Fn rho_P, rho_T, e_P, e_T;
    /// Evaluates everything at once; overrides the individual callables.
    std::function<EosPoint(double P, double T)> all;
    double P_ref = 1.0;
    double T_ref = 1.0;
    StateBox box;
  };

  GasModel() = default;
  explicit GasModel(Definition def);

  const std::string& name() const { return def_.name; }
  double P_ref() const { return def_.P_ref; }
  double T_ref() const { return def_.T_ref; }
  const StateBox& box() const { return def_.box; }
  bool has_analytic_partials() const;

  /// Throws OutOfDomain outside the validity box.
  EosPoint eval(double P, double T) const;
  /// Same as eval() but skips the box check (used by validation, which
  /// reports rather than throws).
  EosPoint eval_unchecked(double P, double T) const;
  /// Partials by central differences regardless of analytic availability.
  EosPoint eval_fd(double P, double T) const;

  /// Returns a copy whose partials are always finite differences.
  GasModel without_partials() const;

private:
  Definition def_;
  bool analytic_ = false;
};

/// Ideal gas rho = P/(R T), e = int C_V dT with C_V(T) = sum_i cv[i] T^i.
/// A single coefficient gives constant C_V and e = C_V T.
GasModel ideal_gas(double R, std::vector<double> cv, double P_ref = 1.0, double T_ref = 1.0,
                   StateBox box = {1e-3, 1e3, 1e-3, 1e3});

/// Closed-form non-ideal test gas: 1/rho = R T/P + b0 - a0/T,
/// e = C_V T - a0 P/T. Satisfies the closedness identity; the inequality
/// e_T rho_P > e_P rho_T fails where C_V R T^4 <= a0^2 P^2.
GasModel virial_gas(double R, double C_V, double a0, double b0, double P_ref = 1.0,
                    double T_ref = 1.0, StateBox box = {0.05, 20.0, 0.05, 20.0});

/// Tabulated rho, e on a rectangular (P,T) grid with bicubic Hermite
/// interpolation. The validity box is the table extent.
GasModel tabulated_gas(const std::vector<double>& P_grid, const std::vector<double>& T_grid,
                       const std::vector<double>& rho, const std::vector<double>& e,
                       double P_ref, double T_ref, std::string name = "tabulated");
/// Reads "P_count T_count", P grid, T grid, rho (row-major, P-major), e.
GasModel load_table(std::istream& in, double P_ref, double T_ref, std::string name = "tabulated");
GasModel load_table_file(const std::string& path, double P_ref, double T_ref);

/// S_T and S_P from T dS = de + P d(1/rho).
struct EntropyPartials {
  double S_T = 0.0, S_P = 0.0;
};
EntropyPartials entropy_partials(const EosPoint& q, double P, double T);

struct ThermoCoefficients {
  double K_T = 0.0, K_P = 0.0, C_P = 0.0, C_V = 0.0, Rcal = 0.0;
};

ThermoCoefficients thermo_coefficients(const GasModel& model, double P, double T);

struct Abcd {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  double det = 0.0;
};
Abcd abcd(const GasModel& model, double P, double T);

struct CoefficientSet {
  double g1 = 0.0, g2 = 0.0, g3 = 0.0;
  double chi1 = 0.0, chi2 = 0.0, chi3 = 0.0;
  std::optional<double> g4, chi4;
};

/// Coefficients at P = P_ref e^wp, T = T_ref e^theta.
CoefficientSet coefficient_set(const GasModel& model, double theta, double wp);

double maxwell_residual(const GasModel& model, double P, double T);

struct GammaResiduals {
  double gamma1_S = 0.0;   // Gamma_1(S*), vanishes
  double gamma2_rho = 0.0; // Gamma_2(rho*), vanishes
  double gamma2_S = 0.0;   // Gamma_2(S*), positive
  double gamma1_rho = 0.0; // Gamma_1(rho*), positive
  double scale = 0.0;      // magnitude of the summed terms
};
GammaResiduals gamma_residuals(const GasModel& model, double theta, double wp);

struct EntropyOptions {
  double tol = 1e-10;
  bool reversed_path = false; // isobaric leg first
};
/// S(P,T) - S(P_ref, T_ref) by quadrature along an L-shaped path.
double entropy(const GasModel& model, double P, double T, EntropyOptions opts = {});

struct SlowVariables {
  double F = 0.0, F_theta = 0.0, F_wp = 0.0; // entropy-type
  double G = 0.0, G_theta = 0.0, G_wp = 0.0; // density-type
};
SlowVariables slow_variables(const GasModel& model, double theta, double wp);

/// Density part only (no entropy quadrature).
struct DensityVariable {
  double G = 0.0, G_theta = 0.0, G_wp = 0.0;
};
DensityVariable density_variable(const GasModel& model, double theta, double wp);

struct ValidationFailure {
  double P = 0.0, T = 0.0;
  std::string reason;
};

struct ValidationReport {
  bool passed = true;
  int points = 0;
  int failed_points = 0;
  double max_identity_residual = 0.0;
  double max_maxwell_residual = 0.0;
  std::vector<ValidationFailure> failures;
};

struct ValidationOptions {
  double identity_tol = 1e-8;
};

/// Checks closedness, sign conditions and chi1 < chi3 on a samples x samples
/// lattice over `box`. Evaluation errors at a point are recorded, not thrown.
ValidationReport validate_gas_model(const GasModel& model, const StateBox& box, int samples,
                                    ValidationOptions opts = {});

/// Jacobian sign check of the slow-variable map over a (theta, wp) box.
/// Local invertibility only.
struct DiffeoReport {
  bool passed = true;
  double min_det = 0.0;
  double min_G_wp = 0.0;
};
DiffeoReport check_slow_variable_jacobian(const GasModel& model, double theta_lo, double theta_hi,
                                          double wp_lo, double wp_hi, int samples);

} // namespace lowmach
