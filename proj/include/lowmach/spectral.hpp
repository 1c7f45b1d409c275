#pragma once

// Fourier-spectral fields and operators on the periodic torus [0, 2*pi)^d.
//
// Physical values are stored row-major with the last dimension fastest.
// Spectra use the real-to-complex half layout (last dimension 0..n/2) and are
// normalized by 1/N, so that f(x) = sum_k c_k exp(i k.x) and the L2 norm
// obeys ||f||^2 = (2*pi)^d * sum_k |c_k|^2 over the full spectrum.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace lowmach {

struct GridSpec {
  int dim = 1;
  int n = 64;
  bool dealias = true;

  /// Throws std::invalid_argument unless dim in {1,2,3} and n is even, >= 8.
  void validate() const;

  std::size_t points() const;
  std::size_t modes() const;
  double dx() const;
  /// Coordinate of grid index `i` along any axis.
  double coordinate(int i) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

using Point = std::array<double, 3>;

class ScalarField {
public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec& grid);
  ScalarField(const GridSpec& grid, std::vector<double> values);

  static ScalarField constant(const GridSpec& grid, double value);
  /// Samples fn at every grid point; unused coordinates are zero.
  static ScalarField sample(const GridSpec& grid,
                            const std::function<double(const Point&)>& fn);

  const GridSpec& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  double mean() const;
  double max_abs() const;
  /// Physical-space integral norm on the torus.
  double l2_norm() const;
  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s);

private:
  GridSpec grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
/// Pointwise product (no dealiasing; see `product`).
ScalarField pointwise_product(const ScalarField& a, const ScalarField& b);
/// Applies fn pointwise.
ScalarField map(const ScalarField& f, const std::function<double(double)>& fn);

struct VectorField {
  std::vector<ScalarField> components;

  VectorField() = default;
  explicit VectorField(std::vector<ScalarField> comps);
  static VectorField zeros(const GridSpec& grid);

  const GridSpec& grid() const { return components.at(0).grid(); }
  int dim() const { return static_cast<int>(components.size()); }
  ScalarField& operator[](int j) { return components[j]; }
  const ScalarField& operator[](int j) const { return components[j]; }
  double max_abs() const;
  double l2_norm() const;
};

/// Curl of a vector field: three components for d=3, the scalar
/// d1 v2 - d2 v1 for d=2, and no components for d=1.
struct CurlField {
  std::vector<ScalarField> components;
};

struct Spectrum {
  GridSpec grid;
  std::vector<std::complex<double>> coeffs;

  explicit Spectrum(const GridSpec& g);
  Spectrum(const GridSpec& g, std::vector<std::complex<double>> c);
};

/// Wavenumber tables shared by all fields on one grid. Built once per grid
/// and cached; the cache is safe for concurrent readers.
struct WaveTables {
  GridSpec grid;
  /// True integer wavenumbers per axis (Nyquist kept as -n/2, or n/2 on the
  /// half axis).
  std::array<std::vector<double>, 3> k;
  /// Wavenumbers used for first derivatives: Nyquist entries are zero.
  std::array<std::vector<double>, 3> kd;
  std::vector<double> ksq;
  std::vector<double> kdsq;
  /// Multiplicity of each stored mode in the full spectrum (1 or 2).
  std::vector<double> weight;
  std::vector<unsigned char> keep_dealiased;
};

const WaveTables& wave_tables(const GridSpec& grid);

Spectrum forward(const ScalarField& f);
ScalarField inverse(const Spectrum& s);

ScalarField derivative(const ScalarField& f, int axis);
Spectrum derivative(const Spectrum& s, int axis);
VectorField grad(const ScalarField& f);
ScalarField div(const VectorField& v);
CurlField curl(const VectorField& v);
ScalarField laplacian(const ScalarField& f);

/// (2*pi)^d * sum (1+|k|^2)^sigma |c_k|^2, square-rooted. sigma < 0 throws.
double sobolev_norm(const ScalarField& f, double sigma);
double sobolev_norm_sq(const ScalarField& f, double sigma);
double sobolev_norm(const Spectrum& s, double sigma);
/// ||f||_{H^{m-1}} + alpha ||f||_{H^m}.
double hybrid_norm(const ScalarField& f, int m, double alpha);

/// Friedrichs cutoff: 1 on r <= 1, 0 on r >= 2, smooth in between.
double cutoff(double r);
/// Fourier multiplier cutoff(h |k|). h = 0 is the identity.
ScalarField mollify(const ScalarField& f, double h);
Spectrum mollify(const Spectrum& s, double h);
VectorField mollify(const VectorField& v, double h);

/// grad(Laplacian^{-1} f) with the zero mode set to zero. Throws MeanNotZero
/// when |mean f| exceeds 1e-10 relative to ||f||_{L2}.
VectorField inv_grad_laplace(const ScalarField& f);

/// | ||grad v||^2 - ||div v||^2 - ||curl v||^2 | / max(1, ||grad v||^2), all
/// in H^s. Requires d in {2,3}.
double div_curl_residual(const VectorField& v, int s);

/// Zeroes every mode with some |k_j| > n/3. Requires grid.dealias.
ScalarField dealias(const ScalarField& f);
Spectrum dealias(const Spectrum& s);
/// dealias() when the grid has dealiasing enabled, identity otherwise.
ScalarField truncate(const ScalarField& f);
/// Pointwise product followed by truncate().
ScalarField product(const ScalarField& a, const ScalarField& b);

} // namespace lowmach
