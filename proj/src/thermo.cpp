#include "lowmach/thermo.hpp"

#include "lowmach/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace lowmach {

EntropyPartials entropy_partials(const EosPoint& q, double P, double T) {
  const double inv_rho2 = 1.0 / (q.rho * q.rho);
  return {(q.e_T - P * q.rho_T * inv_rho2) / T, (q.e_P - P * q.rho_P * inv_rho2) / T};
}

ThermoCoefficients thermo_coefficients(const GasModel& model, double P, double T) {
  const EosPoint q = model.eval(P, T);
  if (q.rho_P == 0.0 || !std::isfinite(q.rho_P)) {
    throw DegenerateState("d rho / dP vanishes; thermodynamic coefficients undefined");
  }
  const EntropyPartials s = entropy_partials(q, P, T);
  ThermoCoefficients c;
  c.K_T = q.rho_P / q.rho;
  c.K_P = -q.rho_T / q.rho;
  c.C_P = T * s.S_T;
  c.Rcal = -q.rho * s.S_P / q.rho_P;
  c.C_V = T * (s.S_T * q.rho_P - s.S_P * q.rho_T) / q.rho_P;
  return c;
}

Abcd abcd(const GasModel& model, double P, double T) {
  const EosPoint q = model.eval(P, T);
  const EntropyPartials s = entropy_partials(q, P, T);
  const double det = q.rho_P * s.S_T - q.rho_T * s.S_P;
  const double scale = std::abs(q.rho_P * s.S_T) + std::abs(q.rho_T * s.S_P);
  if (!(std::abs(det) > 1e-14 * scale)) {
    throw SingularJacobian("thermodynamic Jacobian is singular at the requested state");
  }
  Abcd r;
  r.det = det;
  r.a = q.rho * s.S_T / det;
  r.b = -q.rho_T / (q.rho * T * det);
  r.c = -q.rho * s.S_P / det;
  r.d = q.rho_P / (q.rho * T * det);
  return r;
}

CoefficientSet coefficient_set(const GasModel& model, double theta, double wp) {
  const double P = model.P_ref() * std::exp(wp);
  const double T = model.T_ref() * std::exp(theta);
  const EosPoint q = model.eval(P, T);
  const ThermoCoefficients tc = thermo_coefficients(model, P, T);
  CoefficientSet cs;
  cs.g1 = tc.K_T * tc.C_V * P / tc.C_P;
  cs.g2 = q.rho / P;
  cs.g3 = tc.C_V / tc.Rcal;
  cs.chi1 = tc.K_P / (q.rho * tc.C_P);
  cs.chi2 = 1.0 / P;
  cs.chi3 = 1.0 / (tc.Rcal * q.rho * T);
  return cs;
}

double maxwell_residual(const GasModel& model, double P, double T) {
  const EosPoint q = model.eval(P, T);
  const EntropyPartials s = entropy_partials(q, P, T);
  return std::abs(s.S_P - q.rho_T / (q.rho * q.rho)) / std::max(1.0, std::abs(s.S_P));
}

GammaResiduals gamma_residuals(const GasModel& model, double theta, double wp) {
  const double P = model.P_ref() * std::exp(wp);
  const double T = model.T_ref() * std::exp(theta);
  const EosPoint q = model.eval(P, T);
  const EntropyPartials s = entropy_partials(q, P, T);
  const CoefficientSet cs = coefficient_set(model, theta, wp);
  const double S_th = T * s.S_T, S_wp = P * s.S_P;
  const double r_th = T * q.rho_T, r_wp = P * q.rho_P;

  GammaResiduals g;
  g.gamma1_S = cs.g1 * S_th + cs.g3 * S_wp;
  g.gamma2_rho = cs.g1 * cs.chi3 * r_th + cs.g3 * cs.chi1 * r_wp;
  g.gamma2_S = cs.g1 * cs.chi3 * S_th + cs.g3 * cs.chi1 * S_wp;
  g.gamma1_rho = cs.g1 * r_th + cs.g3 * r_wp;
  g.scale = std::max({std::abs(cs.g1 * S_th), std::abs(cs.g3 * S_wp),
                      std::abs(cs.g1 * cs.chi3 * r_th), std::abs(cs.g3 * cs.chi1 * r_wp)});
  return g;
}

// --- entropy --------------------------------------------------------------

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 40);
}

} // namespace

double entropy(const GasModel& model, double P, double T, EntropyOptions opts) {
  const double P0 = model.P_ref(), T0 = model.T_ref();
  const StateBox& box = model.box();
  // Both legs stay inside a rectangle iff their corner does.
  const double cornerP = opts.reversed_path ? P0 : P;
  const double cornerT = opts.reversed_path ? T : T0;
  if (!box.contains(P, T) || !box.contains(cornerP, cornerT)) {
    std::ostringstream os;
    os << "entropy path to (P=" << P << ", T=" << T << ") leaves the validity box of '"
       << model.name() << "'";
    throw PathOutOfDomain(os.str());
  }
  auto dS_dP = [&](double T_fixed) {
    return [&model, T_fixed](double p) {
      return entropy_partials(model.eval(p, T_fixed), p, T_fixed).S_P;
    };
  };
  auto dS_dT = [&](double P_fixed) {
    return [&model, P_fixed](double t) {
      return entropy_partials(model.eval(P_fixed, t), P_fixed, t).S_T;
    };
  };
  if (!opts.reversed_path) {
    return adaptive_simpson(dS_dP(T0), P0, P, opts.tol) + adaptive_simpson(dS_dT(P), T0, T, opts.tol);
  }
  return adaptive_simpson(dS_dT(P0), T0, T, opts.tol) + adaptive_simpson(dS_dP(T), P0, P, opts.tol);
}

DensityVariable density_variable(const GasModel& model, double theta, double wp) {
  const double P = model.P_ref() * std::exp(wp);
  const double T = model.T_ref() * std::exp(theta);
  const EosPoint q = model.eval(P, T);
  const double rho0 = model.eval(model.P_ref(), model.T_ref()).rho;
  return {q.rho - rho0, T * q.rho_T, P * q.rho_P};
}

SlowVariables slow_variables(const GasModel& model, double theta, double wp) {
  const double P = model.P_ref() * std::exp(wp);
  const double T = model.T_ref() * std::exp(theta);
  const EosPoint q = model.eval(P, T);
  const EntropyPartials s = entropy_partials(q, P, T);
  const DensityVariable g = density_variable(model, theta, wp);
  SlowVariables r;
  r.F = entropy(model, P, T);
  r.F_theta = T * s.S_T;
  r.F_wp = P * s.S_P;
  r.G = g.G;
  r.G_theta = g.G_theta;
  r.G_wp = g.G_wp;
  return r;
}

// --- validation -----------------------------------------------------------

ValidationReport validate_gas_model(const GasModel& model, const StateBox& box, int samples,
                                    ValidationOptions opts) {
  if (samples < 4) throw std::invalid_argument("validation needs at least 4 samples per axis");
  ValidationReport rep;
  for (int i = 0; i < samples; ++i) {
    for (int j = 0; j < samples; ++j) {
      const double P = box.P_lo + (box.P_hi - box.P_lo) * i / (samples - 1);
      const double T = box.T_lo + (box.T_hi - box.T_lo) * j / (samples - 1);
      ++rep.points;
      std::vector<std::string> reasons;
      try {
        const EosPoint q = model.eval(P, T);
        const double lhs = P * q.rho_P + T * q.rho_T;
        const double rhs = q.rho * q.rho * q.e_P;
        const double scale = std::max({1.0, std::abs(P * q.rho_P), std::abs(T * q.rho_T), std::abs(rhs)});
        const double resid = std::abs(lhs - rhs) / scale;
        rep.max_identity_residual = std::max(rep.max_identity_residual, resid);
        if (!(resid <= opts.identity_tol)) reasons.push_back("closedness identity violated");
        if (!(q.rho_P > 0.0)) reasons.push_back("d rho/dP <= 0");
        if (!(q.rho_T < 0.0)) reasons.push_back("d rho/dT >= 0");
        if (!(q.e_T * q.rho_P > q.e_P * q.rho_T)) reasons.push_back("e_T rho_P <= e_P rho_T");
        rep.max_maxwell_residual = std::max(rep.max_maxwell_residual, maxwell_residual(model, P, T));
        if (reasons.empty()) {
          const CoefficientSet cs = coefficient_set(model, std::log(T / model.T_ref()),
                                                    std::log(P / model.P_ref()));
          if (!(cs.chi1 < cs.chi3)) reasons.push_back("chi1 >= chi3");
          for (double c : {cs.g1, cs.g2, cs.g3, cs.chi1, cs.chi2, cs.chi3}) {
            if (!(c > 0.0)) {
              reasons.push_back("non-positive PDE coefficient");
              break;
            }
          }
        }
      } catch (const std::exception& ex) {
        reasons.push_back(std::string("evaluation failed: ") + ex.what());
      }
      if (!reasons.empty()) {
        ++rep.failed_points;
        rep.passed = false;
        std::string joined;
        for (const auto& r : reasons) joined += (joined.empty() ? "" : "; ") + r;
        rep.failures.push_back({P, T, joined});
      }
    }
  }
  return rep;
}

DiffeoReport check_slow_variable_jacobian(const GasModel& model, double theta_lo, double theta_hi,
                                          double wp_lo, double wp_hi, int samples) {
  DiffeoReport rep;
  rep.min_det = std::numeric_limits<double>::infinity();
  rep.min_G_wp = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    for (int j = 0; j < samples; ++j) {
      const double th = theta_lo + (theta_hi - theta_lo) * i / std::max(1, samples - 1);
      const double wp = wp_lo + (wp_hi - wp_lo) * j / std::max(1, samples - 1);
      const double P = model.P_ref() * std::exp(wp);
      const double T = model.T_ref() * std::exp(th);
      const EosPoint q = model.eval(P, T);
      const EntropyPartials s = entropy_partials(q, P, T);
      // Jacobian of (F, G) in (theta, wp).
      const double det = (T * s.S_T) * (P * q.rho_P) - (P * s.S_P) * (T * q.rho_T);
      rep.min_det = std::min(rep.min_det, det);
      rep.min_G_wp = std::min(rep.min_G_wp, P * q.rho_P);
    }
  }
  rep.passed = rep.min_det > 0.0 && rep.min_G_wp > 0.0;
  return rep;
}

} // namespace lowmach
