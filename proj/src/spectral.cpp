#include "lowmach/spectral.hpp"

#include "lowmach/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>

namespace lowmach {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t ipow(int base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

struct GridCache {
  WaveTables tables;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  GridCache() = default;
  GridCache(const GridCache&) = delete;
  GridCache& operator=(const GridCache&) = delete;
  ~GridCache() {
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }
};

void build_tables(WaveTables& t) {
  const GridSpec& g = t.grid;
  const int n = g.n;
  const int half = n / 2 + 1;
  const std::size_t m = g.modes();
  for (int a = 0; a < 3; ++a) {
    t.k[a].assign(a < g.dim ? m : 0, 0.0);
    t.kd[a].assign(a < g.dim ? m : 0, 0.0);
  }
  t.ksq.assign(m, 0.0);
  t.kdsq.assign(m, 0.0);
  t.weight.assign(m, 1.0);
  t.keep_dealiased.assign(m, 1);

  // Shape of the half-complex array: n x ... x (n/2+1).
  std::array<int, 3> shape{1, 1, 1};
  for (int a = 0; a < g.dim - 1; ++a) shape[a] = n;
  shape[g.dim - 1] = half;

  std::array<int, 3> idx{0, 0, 0};
  for (std::size_t lin = 0; lin < m; ++lin) {
    std::size_t rem = lin;
    for (int a = g.dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % shape[a]);
      rem /= shape[a];
    }
    double ksq = 0.0;
    double kdsq = 0.0;
    bool keep = true;
    for (int a = 0; a < g.dim; ++a) {
      int kk;
      if (a == g.dim - 1) {
        kk = idx[a];
      } else {
        kk = idx[a] < n / 2 ? idx[a] : idx[a] - n;
      }
      const double kv = static_cast<double>(kk);
      const double kdv = (std::abs(kk) == n / 2) ? 0.0 : kv;
      t.k[a][lin] = kv;
      t.kd[a][lin] = kdv;
      ksq += kv * kv;
      kdsq += kdv * kdv;
      if (3 * std::abs(kk) > n) keep = false;
    }
    t.ksq[lin] = ksq;
    t.kdsq[lin] = kdsq;
    t.keep_dealiased[lin] = keep ? 1 : 0;
    const int last = idx[g.dim - 1];
    t.weight[lin] = (last == 0 || last == n / 2) ? 1.0 : 2.0;
  }
}

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

const GridCache& grid_cache(const GridSpec& grid) {
  static std::map<std::tuple<int, int, bool>, std::unique_ptr<GridCache>> cache;
  std::lock_guard lock(cache_mutex());
  auto key = std::make_tuple(grid.dim, grid.n, grid.dealias);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  grid.validate();
  auto entry = std::make_unique<GridCache>();
  entry->tables.grid = grid;
  build_tables(entry->tables);

  std::array<int, 3> dims{grid.n, grid.n, grid.n};
  double* in = fftw_alloc_real(grid.points());
  fftw_complex* out = fftw_alloc_complex(grid.modes());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  entry->r2c = fftw_plan_dft_r2c(grid.dim, dims.data(), in, out, flags);
  entry->c2r = fftw_plan_dft_c2r(grid.dim, dims.data(), out, in, flags);
  fftw_free(in);
  fftw_free(out);
  if (!entry->r2c || !entry->c2r) throw Error("FFTW planning failed");

  const GridCache& ref = *entry;
  cache.emplace(key, std::move(entry));
  return ref;
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw std::invalid_argument("fields live on different grids");
}

Spectrum multiply(const Spectrum& s, const std::vector<double>& factor) {
  Spectrum out = s;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] *= factor[i];
  return out;
}

Spectrum derivative_spectrum(const Spectrum& s, int axis) {
  const auto& kd = wave_tables(s.grid).kd[axis];
  Spectrum out = s;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    out.coeffs[i] *= std::complex<double>(0.0, kd[i]);
  }
  return out;
}

double weighted_sum(const Spectrum& s, const std::vector<double>& mult) {
  const auto& t = wave_tables(s.grid);
  double acc = 0.0;
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
    acc += t.weight[i] * mult[i] * std::norm(s.coeffs[i]);
  }
  return acc * std::pow(kTwoPi, s.grid.dim);
}

} // namespace

// --- GridSpec -------------------------------------------------------------

void GridSpec::validate() const {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dim must be 1, 2 or 3");
  if (n < 8 || n % 2 != 0) {
    throw std::invalid_argument("grid n must be even and >= 8, got " + std::to_string(n));
  }
}

std::size_t GridSpec::points() const { return ipow(n, dim); }

std::size_t GridSpec::modes() const { return ipow(n, dim - 1) * static_cast<std::size_t>(n / 2 + 1); }

double GridSpec::dx() const { return kTwoPi / n; }

double GridSpec::coordinate(int i) const { return kTwoPi * i / n; }

// --- ScalarField ----------------------------------------------------------

ScalarField::ScalarField(const GridSpec& grid) : grid_(grid), values_(grid.points(), 0.0) {
  grid.validate();
}

ScalarField::ScalarField(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  grid.validate();
  if (values_.size() != grid.points()) {
    throw std::invalid_argument("value count does not match grid");
  }
}

ScalarField ScalarField::constant(const GridSpec& grid, double value) {
  ScalarField f(grid);
  std::fill(f.values_.begin(), f.values_.end(), value);
  return f;
}

ScalarField ScalarField::sample(const GridSpec& grid,
                                const std::function<double(const Point&)>& fn) {
  ScalarField f(grid);
  const std::size_t n = grid.n;
  for (std::size_t lin = 0; lin < f.size(); ++lin) {
    Point x{0.0, 0.0, 0.0};
    std::size_t rem = lin;
    for (int a = grid.dim - 1; a >= 0; --a) {
      x[a] = grid.coordinate(static_cast<int>(rem % n));
      rem /= n;
    }
    f.values_[lin] = fn(x);
  }
  return f;
}

double ScalarField::mean() const {
  double acc = 0.0;
  for (double v : values_) acc += v;
  return acc / static_cast<double>(values_.size());
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::l2_norm() const {
  double acc = 0.0;
  for (double v : values_) acc += v * v;
  return std::sqrt(acc * std::pow(kTwoPi, grid_.dim) / static_cast<double>(values_.size()));
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField pointwise_product(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  ScalarField out(a.grid());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

ScalarField map(const ScalarField& f, const std::function<double(double)>& fn) {
  ScalarField out(f.grid());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(f[i]);
  return out;
}

// --- VectorField ----------------------------------------------------------

VectorField::VectorField(std::vector<ScalarField> comps) : components(std::move(comps)) {
  for (const auto& c : components) require_same_grid(c.grid(), components.front().grid());
}

VectorField VectorField::zeros(const GridSpec& grid) {
  return VectorField(std::vector<ScalarField>(grid.dim, ScalarField(grid)));
}

double VectorField::max_abs() const {
  double m = 0.0;
  for (const auto& c : components) m = std::max(m, c.max_abs());
  return m;
}

double VectorField::l2_norm() const {
  double acc = 0.0;
  for (const auto& c : components) {
    const double n = c.l2_norm();
    acc += n * n;
  }
  return std::sqrt(acc);
}

// --- transforms -----------------------------------------------------------

Spectrum::Spectrum(const GridSpec& g) : grid(g), coeffs(g.modes(), {0.0, 0.0}) {}

Spectrum::Spectrum(const GridSpec& g, std::vector<std::complex<double>> c)
    : grid(g), coeffs(std::move(c)) {
  if (coeffs.size() != g.modes()) throw std::invalid_argument("coefficient count does not match grid");
}

const WaveTables& wave_tables(const GridSpec& grid) { return grid_cache(grid).tables; }

Spectrum forward(const ScalarField& f) {
  const GridCache& gc = grid_cache(f.grid());
  Spectrum s(f.grid());
  // r2c never touches its input, but the FFTW signature is non-const.
  std::vector<double> in(f.values().begin(), f.values().end());
  fftw_execute_dft_r2c(gc.r2c, in.data(), reinterpret_cast<fftw_complex*>(s.coeffs.data()));
  const double scale = 1.0 / static_cast<double>(f.size());
  for (auto& c : s.coeffs) c *= scale;
  return s;
}

ScalarField inverse(const Spectrum& s) {
  const GridCache& gc = grid_cache(s.grid);
  // c2r destroys its input.
  std::vector<std::complex<double>> work = s.coeffs;
  ScalarField f(s.grid);
  fftw_execute_dft_c2r(gc.c2r, reinterpret_cast<fftw_complex*>(work.data()), f.values().data());
  return f;
}

// --- differential operators -----------------------------------------------

ScalarField derivative(const ScalarField& f, int axis) {
  if (axis < 0 || axis >= f.grid().dim) throw std::invalid_argument("derivative axis out of range");
  return inverse(derivative_spectrum(forward(f), axis));
}

Spectrum derivative(const Spectrum& s, int axis) {
  if (axis < 0 || axis >= s.grid.dim) throw std::invalid_argument("derivative axis out of range");
  return derivative_spectrum(s, axis);
}

VectorField grad(const ScalarField& f) {
  const Spectrum s = forward(f);
  std::vector<ScalarField> comps;
  comps.reserve(f.grid().dim);
  for (int a = 0; a < f.grid().dim; ++a) comps.push_back(inverse(derivative_spectrum(s, a)));
  return VectorField(std::move(comps));
}

ScalarField div(const VectorField& v) {
  const GridSpec& g = v.grid();
  if (v.dim() != g.dim) throw std::invalid_argument("vector field dimension does not match grid");
  Spectrum acc(g);
  const auto& t = wave_tables(g);
  for (int a = 0; a < g.dim; ++a) {
    const Spectrum s = forward(v[a]);
    for (std::size_t i = 0; i < acc.coeffs.size(); ++i) {
      acc.coeffs[i] += std::complex<double>(0.0, t.kd[a][i]) * s.coeffs[i];
    }
  }
  return inverse(acc);
}

CurlField curl(const VectorField& v) {
  const GridSpec& g = v.grid();
  CurlField out;
  if (g.dim == 1) return out;
  auto d = [&](int comp, int axis) { return derivative(v[comp], axis); };
  if (g.dim == 2) {
    out.components.push_back(d(1, 0) - d(0, 1));
  } else {
    out.components.push_back(d(2, 1) - d(1, 2));
    out.components.push_back(d(0, 2) - d(2, 0));
    out.components.push_back(d(1, 0) - d(0, 1));
  }
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  const auto& t = wave_tables(f.grid());
  std::vector<double> factor(t.kdsq.size());
  for (std::size_t i = 0; i < factor.size(); ++i) factor[i] = -t.kdsq[i];
  return inverse(multiply(forward(f), factor));
}

// --- norms ----------------------------------------------------------------

double sobolev_norm_sq(const ScalarField& f, double sigma) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("sobolev order must be >= 0");
  const auto& t = wave_tables(f.grid());
  std::vector<double> mult(t.ksq.size());
  for (std::size_t i = 0; i < mult.size(); ++i) mult[i] = std::pow(1.0 + t.ksq[i], sigma);
  return weighted_sum(forward(f), mult);
}

double sobolev_norm(const ScalarField& f, double sigma) { return std::sqrt(sobolev_norm_sq(f, sigma)); }

double sobolev_norm(const Spectrum& s, double sigma) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("sobolev order must be >= 0");
  const auto& t = wave_tables(s.grid);
  std::vector<double> mult(t.ksq.size());
  for (std::size_t i = 0; i < mult.size(); ++i) mult[i] = std::pow(1.0 + t.ksq[i], sigma);
  return std::sqrt(weighted_sum(s, mult));
}

double hybrid_norm(const ScalarField& f, int m, double alpha) {
  if (m < 1) throw std::invalid_argument("hybrid norm needs m >= 1");
  double lower = sobolev_norm(f, m - 1);
  if (alpha == 0.0) return lower;
  return lower + alpha * sobolev_norm(f, m);
}

// --- mollifier ------------------------------------------------------------

double cutoff(double r) {
  r = std::abs(r);
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  auto w = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
  const double t = 2.0 - r;
  return w(t) / (w(t) + w(1.0 - t));
}

Spectrum mollify(const Spectrum& s, double h) {
  if (h < 0.0 || h > 1.0) throw std::invalid_argument("mollifier scale must lie in [0,1]");
  if (h == 0.0) return s;
  const auto& t = wave_tables(s.grid);
  std::vector<double> factor(t.ksq.size());
  for (std::size_t i = 0; i < factor.size(); ++i) factor[i] = cutoff(h * std::sqrt(t.ksq[i]));
  return multiply(s, factor);
}

ScalarField mollify(const ScalarField& f, double h) {
  if (h == 0.0) return f;
  return inverse(mollify(forward(f), h));
}

VectorField mollify(const VectorField& v, double h) {
  std::vector<ScalarField> comps;
  for (const auto& c : v.components) comps.push_back(mollify(c, h));
  return VectorField(std::move(comps));
}

// --- inverse divergence ---------------------------------------------------

VectorField inv_grad_laplace(const ScalarField& f) {
  const double l2 = f.l2_norm();
  if (std::abs(f.mean()) > 1e-10 * std::max(l2, 1e-300) && std::abs(f.mean()) > 0.0) {
    throw MeanNotZero("inv_grad_laplace needs a zero-mean argument (mean = " +
                      std::to_string(f.mean()) + ")");
  }
  const GridSpec& g = f.grid();
  const auto& t = wave_tables(g);
  const Spectrum s = forward(f);
  std::vector<ScalarField> comps;
  for (int a = 0; a < g.dim; ++a) {
    Spectrum c(g);
    for (std::size_t i = 0; i < c.coeffs.size(); ++i) {
      if (t.kdsq[i] == 0.0) continue;
      c.coeffs[i] = std::complex<double>(0.0, t.kd[a][i] / -t.kdsq[i]) * s.coeffs[i];
    }
    comps.push_back(inverse(c));
  }
  return VectorField(std::move(comps));
}

// --- div-curl identity ----------------------------------------------------

double div_curl_residual(const VectorField& v, int s) {
  const GridSpec& g = v.grid();
  if (g.dim < 2) throw std::invalid_argument("div_curl_residual needs d in {2,3}");
  const auto& t = wave_tables(g);
  std::vector<double> mult(t.ksq.size());
  for (std::size_t i = 0; i < mult.size(); ++i) mult[i] = std::pow(1.0 + t.ksq[i], s);

  std::vector<Spectrum> vs;
  for (int a = 0; a < g.dim; ++a) vs.push_back(forward(v[a]));

  double grad_sq = 0.0;
  for (int c = 0; c < g.dim; ++c) {
    for (int a = 0; a < g.dim; ++a) grad_sq += weighted_sum(derivative_spectrum(vs[c], a), mult);
  }
  Spectrum dv(g);
  for (int a = 0; a < g.dim; ++a) {
    const Spectrum d = derivative_spectrum(vs[a], a);
    for (std::size_t i = 0; i < dv.coeffs.size(); ++i) dv.coeffs[i] += d.coeffs[i];
  }
  const double div_sq = weighted_sum(dv, mult);

  auto curl_component = [&](int i, int j) {
    // d_i v_j - d_j v_i
    Spectrum a = derivative_spectrum(vs[j], i);
    const Spectrum b = derivative_spectrum(vs[i], j);
    for (std::size_t m = 0; m < a.coeffs.size(); ++m) a.coeffs[m] -= b.coeffs[m];
    return weighted_sum(a, mult);
  };
  double curl_sq = curl_component(0, 1);
  if (g.dim == 3) curl_sq += curl_component(1, 2) + curl_component(2, 0);

  return std::abs(grad_sq - div_sq - curl_sq) / std::max(1.0, grad_sq);
}

// --- dealiasing -----------------------------------------------------------

Spectrum dealias(const Spectrum& s) {
  if (!s.grid.dealias) throw std::invalid_argument("dealias requested on a grid without dealiasing");
  const auto& t = wave_tables(s.grid);
  Spectrum out = s;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    if (!t.keep_dealiased[i]) out.coeffs[i] = 0.0;
  }
  return out;
}

ScalarField dealias(const ScalarField& f) { return inverse(dealias(forward(f))); }

ScalarField truncate(const ScalarField& f) { return f.grid().dealias ? dealias(f) : f; }

ScalarField product(const ScalarField& a, const ScalarField& b) { return truncate(pointwise_product(a, b)); }

} // namespace lowmach
