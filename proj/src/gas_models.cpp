#include "lowmach/errors.hpp"
#include "lowmach/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace lowmach {

namespace {

double fd_step(double x) { return 1e-6 * std::max(1.0, std::abs(x)); }

std::string state_str(double P, double T) {
  std::ostringstream os;
  os << "(P=" << P << ", T=" << T << ")";
  return os.str();
}

} // namespace

GasModel::GasModel(Definition def) : def_(std::move(def)) {
  if (!def_.all && (!def_.rho || !def_.e)) throw std::invalid_argument("gas model needs rho and e");
  if (!(def_.P_ref > 0.0) || !(def_.T_ref > 0.0)) {
    throw std::invalid_argument("gas reference state must be positive");
  }
  if (!(def_.box.P_lo > 0.0) || !(def_.box.T_lo > 0.0) || def_.box.P_hi < def_.box.P_lo ||
      def_.box.T_hi < def_.box.T_lo) {
    throw std::invalid_argument("gas validity box must be a positive rectangle");
  }
  if (!def_.box.contains(def_.P_ref, def_.T_ref)) {
    throw std::invalid_argument("reference state lies outside the validity box");
  }
  analytic_ = static_cast<bool>(def_.all) ||
              (def_.rho_P && def_.rho_T && def_.e_P && def_.e_T);
}

bool GasModel::has_analytic_partials() const { return analytic_; }

EosPoint GasModel::eval(double P, double T) const {
  if (!def_.box.contains(P, T)) {
    throw OutOfDomain("state " + state_str(P, T) + " outside the validity box of gas model '" +
                      def_.name + "'");
  }
  EosPoint q = eval_unchecked(P, T);
  if (!(q.rho > 0.0)) throw DegenerateState("non-positive density at " + state_str(P, T));
  return q;
}

EosPoint GasModel::eval_unchecked(double P, double T) const {
  if (def_.all) return def_.all(P, T);
  EosPoint q;
  q.rho = def_.rho(P, T);
  q.e = def_.e(P, T);
  const double hP = fd_step(P);
  const double hT = fd_step(T);
  auto dP = [&](const Fn& f) { return (f(P + hP, T) - f(P - hP, T)) / (2 * hP); };
  auto dT = [&](const Fn& f) { return (f(P, T + hT) - f(P, T - hT)) / (2 * hT); };
  q.rho_P = def_.rho_P ? def_.rho_P(P, T) : dP(def_.rho);
  q.rho_T = def_.rho_T ? def_.rho_T(P, T) : dT(def_.rho);
  q.e_P = def_.e_P ? def_.e_P(P, T) : dP(def_.e);
  q.e_T = def_.e_T ? def_.e_T(P, T) : dT(def_.e);
  return q;
}

EosPoint GasModel::eval_fd(double P, double T) const {
  return without_partials().eval_unchecked(P, T);
}

GasModel GasModel::without_partials() const {
  Definition d = def_;
  if (d.all) {
    auto all = d.all;
    d.rho = [all](double P, double T) { return all(P, T).rho; };
    d.e = [all](double P, double T) { return all(P, T).e; };
    d.all = nullptr;
  }
  d.rho_P = d.rho_T = d.e_P = d.e_T = nullptr;
  d.name += " (fd)";
  return GasModel(std::move(d));
}

// --- builtin models -------------------------------------------------------

GasModel ideal_gas(double R, std::vector<double> cv, double P_ref, double T_ref, StateBox box) {
  if (!(R > 0.0)) throw std::invalid_argument("ideal gas needs R > 0");
  if (cv.empty()) throw std::invalid_argument("ideal gas needs at least one C_V coefficient");
  auto coeffs = std::make_shared<const std::vector<double>>(std::move(cv));
  auto cv_at = [coeffs](double T) {
    double acc = 0.0;
    for (std::size_t i = coeffs->size(); i-- > 0;) acc = acc * T + (*coeffs)[i];
    return acc;
  };
  auto e_at = [coeffs](double T) {
    double acc = 0.0;
    for (std::size_t i = coeffs->size(); i-- > 0;) acc = acc * T + (*coeffs)[i] / (i + 1.0);
    return acc * T;
  };
  for (double T : {box.T_lo, box.T_hi, T_ref}) {
    if (!(cv_at(T) > 0.0)) throw std::invalid_argument("ideal gas needs C_V > 0 on the box");
  }
  GasModel::Definition d;
  d.name = coeffs->size() == 1 ? "ideal" : "ideal-poly";
  d.all = [R, cv_at, e_at](double P, double T) {
    EosPoint q;
    q.rho = P / (R * T);
    q.rho_P = 1.0 / (R * T);
    q.rho_T = -P / (R * T * T);
    q.e = e_at(T);
    q.e_P = 0.0;
    q.e_T = cv_at(T);
    return q;
  };
  d.P_ref = P_ref;
  d.T_ref = T_ref;
  d.box = box;
  return GasModel(std::move(d));
}

GasModel virial_gas(double R, double C_V, double a0, double b0, double P_ref, double T_ref,
                    StateBox box) {
  if (!(R > 0.0) || !(C_V > 0.0)) throw std::invalid_argument("virial gas needs R, C_V > 0");
  GasModel::Definition d;
  d.name = "virial";
  d.all = [=](double P, double T) {
    const double v = R * T / P + b0 - a0 / T;
    const double v_P = -R * T / (P * P);
    const double v_T = R / P + a0 / (T * T);
    EosPoint q;
    q.rho = 1.0 / v;
    q.rho_P = -v_P / (v * v);
    q.rho_T = -v_T / (v * v);
    q.e = C_V * T - a0 * P / T;
    q.e_P = -a0 / T;
    q.e_T = C_V + a0 * P / (T * T);
    return q;
  };
  d.P_ref = P_ref;
  d.T_ref = T_ref;
  d.box = box;
  return GasModel(std::move(d));
}

// --- tabulated model ------------------------------------------------------

namespace {

// Bicubic Hermite patch data for one tabulated quantity.
class HermiteTable {
public:
  HermiteTable(std::vector<double> x, std::vector<double> y, std::vector<double> f)
      : x_(std::move(x)), y_(std::move(y)), f_(std::move(f)) {
    const std::size_t nx = x_.size(), ny = y_.size();
    fx_.resize(nx * ny);
    fy_.resize(nx * ny);
    fxy_.resize(nx * ny);
    for (std::size_t i = 0; i < nx; ++i) {
      for (std::size_t j = 0; j < ny; ++j) {
        fx_[i * ny + j] = diff_x(f_, i, j);
        fy_[i * ny + j] = diff_y(f_, i, j);
      }
    }
    for (std::size_t i = 0; i < nx; ++i) {
      for (std::size_t j = 0; j < ny; ++j) fxy_[i * ny + j] = diff_y(fx_, i, j);
    }
  }

  // Value and first partials at (px, py).
  void eval(double px, double py, double& f, double& fdx, double& fdy) const {
    const std::size_t i = cell(x_, px);
    const std::size_t j = cell(y_, py);
    const std::size_t ny = y_.size();
    const double hx = x_[i + 1] - x_[i];
    const double hy = y_[j + 1] - y_[j];
    const double u = (px - x_[i]) / hx;
    const double w = (py - y_[j]) / hy;

    // Corner values and scaled derivatives, corners ordered (0,0),(1,0),(0,1),(1,1).
    const std::size_t c[4] = {i * ny + j, (i + 1) * ny + j, i * ny + j + 1, (i + 1) * ny + j + 1};
    const int cu[4] = {0, 1, 0, 1};
    const int cw[4] = {0, 0, 1, 1};

    f = fdx = fdy = 0.0;
    for (int k = 0; k < 4; ++k) {
      double hu[2], dhu[2], hw[2], dhw[2];
      basis(u, cu[k], hu, dhu);
      basis(w, cw[k], hw, dhw);
      const double val = f_[c[k]];
      const double dx = fx_[c[k]] * hx;
      const double dy = fy_[c[k]] * hy;
      const double dxy = fxy_[c[k]] * hx * hy;
      // Tensor Hermite: value, d/du, d/dw, d2/dudw blocks.
      const double terms[4] = {val, dx, dy, dxy};
      const int ou[4] = {0, 1, 0, 1};
      const int ow[4] = {0, 0, 1, 1};
      for (int m = 0; m < 4; ++m) {
        f += terms[m] * hu[ou[m]] * hw[ow[m]];
        fdx += terms[m] * dhu[ou[m]] * hw[ow[m]] / hx;
        fdy += terms[m] * hu[ou[m]] * dhw[ow[m]] / hy;
      }
    }
  }

private:
  // Hermite basis at t for the corner `side` (0 or 1): h[0] value weight,
  // h[1] slope weight; dh are their t-derivatives.
  static void basis(double t, int side, double h[2], double dh[2]) {
    const double t2 = t * t, t3 = t2 * t;
    if (side == 0) {
      h[0] = 2 * t3 - 3 * t2 + 1;
      dh[0] = 6 * t2 - 6 * t;
      h[1] = t3 - 2 * t2 + t;
      dh[1] = 3 * t2 - 4 * t + 1;
    } else {
      h[0] = -2 * t3 + 3 * t2;
      dh[0] = -6 * t2 + 6 * t;
      h[1] = t3 - t2;
      dh[1] = 3 * t2 - 2 * t;
    }
  }

  static std::size_t cell(const std::vector<double>& g, double p) {
    auto it = std::upper_bound(g.begin(), g.end(), p);
    std::size_t idx = it == g.begin() ? 0 : static_cast<std::size_t>(it - g.begin()) - 1;
    return std::min(idx, g.size() - 2);
  }

  // Three-point derivative on a non-uniform grid (one-sided at the ends).
  static double deriv3(const std::vector<double>& g, std::size_t i, const auto& val) {
    const std::size_t n = g.size();
    std::size_t a, b, c;
    if (n == 2) return (val(1) - val(0)) / (g[1] - g[0]);
    if (i == 0) { a = 0; b = 1; c = 2; }
    else if (i == n - 1) { a = n - 3; b = n - 2; c = n - 1; }
    else { a = i - 1; b = i; c = i + 1; }
    // Derivative of the quadratic through (a,b,c) evaluated at g[i].
    const double x = g[i];
    const double xa = g[a], xb = g[b], xc = g[c];
    const double la = ((x - xb) + (x - xc)) / ((xa - xb) * (xa - xc));
    const double lb = ((x - xa) + (x - xc)) / ((xb - xa) * (xb - xc));
    const double lc = ((x - xa) + (x - xb)) / ((xc - xa) * (xc - xb));
    return la * val(a) + lb * val(b) + lc * val(c);
  }

  double diff_x(const std::vector<double>& f, std::size_t i, std::size_t j) const {
    const std::size_t ny = y_.size();
    return deriv3(x_, i, [&](std::size_t k) { return f[k * ny + j]; });
  }
  double diff_y(const std::vector<double>& f, std::size_t i, std::size_t j) const {
    const std::size_t ny = y_.size();
    return deriv3(y_, j, [&](std::size_t k) { return f[i * ny + k]; });
  }

  std::vector<double> x_, y_, f_, fx_, fy_, fxy_;
};

} // namespace

GasModel tabulated_gas(const std::vector<double>& P_grid, const std::vector<double>& T_grid,
                       const std::vector<double>& rho, const std::vector<double>& e, double P_ref,
                       double T_ref, std::string name) {
  const std::size_t np = P_grid.size(), nt = T_grid.size();
  if (np < 2 || nt < 2) throw std::invalid_argument("table needs at least 2 points per axis");
  if (rho.size() != np * nt || e.size() != np * nt) {
    throw std::invalid_argument("table value count does not match grid");
  }
  auto increasing = [](const std::vector<double>& g) {
    return std::adjacent_find(g.begin(), g.end(), std::greater_equal<>()) == g.end();
  };
  if (!increasing(P_grid) || !increasing(T_grid)) {
    throw std::invalid_argument("table grids must be strictly increasing");
  }
  auto rt = std::make_shared<const HermiteTable>(P_grid, T_grid, rho);
  auto et = std::make_shared<const HermiteTable>(P_grid, T_grid, e);
  GasModel::Definition d;
  d.name = std::move(name);
  d.all = [rt, et](double P, double T) {
    EosPoint q;
    rt->eval(P, T, q.rho, q.rho_P, q.rho_T);
    et->eval(P, T, q.e, q.e_P, q.e_T);
    return q;
  };
  d.P_ref = P_ref;
  d.T_ref = T_ref;
  d.box = {P_grid.front(), P_grid.back(), T_grid.front(), T_grid.back()};
  return GasModel(std::move(d));
}

GasModel load_table(std::istream& in, double P_ref, double T_ref, std::string name) {
  long np = 0, nt = 0;
  if (!(in >> np >> nt) || np < 2 || nt < 2) {
    throw std::invalid_argument("table header must be 'P_count T_count' with counts >= 2");
  }
  auto read = [&](std::size_t count, const char* what) {
    std::vector<double> out(count);
    for (auto& v : out) {
      if (!(in >> v)) throw std::invalid_argument(std::string("table truncated while reading ") + what);
    }
    return out;
  };
  auto P = read(np, "P grid");
  auto T = read(nt, "T grid");
  auto rho = read(np * nt, "rho values");
  auto e = read(np * nt, "e values");
  return tabulated_gas(P, T, rho, e, P_ref, T_ref, std::move(name));
}

GasModel load_table_file(const std::string& path, double P_ref, double T_ref) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open table file " + path);
  return load_table(in, P_ref, T_ref, "table:" + path);
}

} // namespace lowmach
