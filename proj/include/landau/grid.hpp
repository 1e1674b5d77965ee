// Periodic box [-L,L]^2 sampled on an N x N lattice (N a power of two),
// x_i = -L + i*dx, dx = 2L/N, with the Fourier series convention
//
//     u(x) = sum_k  u_hat(k) e^{i xi_k . x},   xi_k = pi k / L,
//     k in [-N/2, N/2)^2  (FFTW wrap order).
//
// spectrum() returns u_hat in that normalization; because x_0 = -L rather
// than 0, the DFT picks up a (-1)^{k1+k2} phase which is folded in here, so
// u_hat of a smooth rapidly decaying function equals its continuous Fourier
// transform divided by (2L)^2 (Poisson summation), which is what the
// free-transport and kernel formulas assume.
//
// Fields are value types: spectral operations return new fields; the spectrum
// of an unchanged field is cached.  The velocity lattice below is the plain
// rectangle rule on [-vmax, vmax)^2, spectrally accurate for smooth decaying
// integrands.
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "landau/core.hpp"

namespace landau {

struct PeriodicGrid {
  int N = 0;       // points per axis, power of two
  double L = 0.0;  // half period

  PeriodicGrid() = default;
  PeriodicGrid(int N_, double L_);

  double dx() const { return 2.0 * L / N; }
  double node(int i) const { return -L + i * dx(); }
  // wrapped integer frequency for storage index i
  int kindex(int i) const { return i < N / 2 ? i : i - N; }
  double freq(int i) const { return M_PI * kindex(i) / L; }
  double freq_max() const { return M_PI * (N / 2) / L; }
  int dealias_limit() const { return N / 3; }  // keep |k| <= N/3
  std::size_t size() const { return static_cast<std::size_t>(N) * N; }
  bool operator==(const PeriodicGrid& o) const { return N == o.N && L == o.L; }

  // wrap x into [-L, L)
  double wrap(double x) const;
};

// Dispersive-window condition: frequency spacing pi/L resolves phases e^{i t xi.v}
// up to |v| <= vmax over [0, T].  Required for grids used in decay measurements.
bool dispersive_window_ok(const PeriodicGrid& g, double vmax, double T);

class ScalarField2D {
 public:
  ScalarField2D() = default;
  ScalarField2D(const PeriodicGrid& g, std::vector<double> values);
  explicit ScalarField2D(const PeriodicGrid& g);  // zeros

  static ScalarField2D from_spectrum(const PeriodicGrid& g, const std::vector<cplx>& hat);
  static ScalarField2D from_function(const PeriodicGrid& g,
                                     const std::function<double(double, double)>& f);

  const PeriodicGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return v_; }
  double operator()(int i, int j) const { return v_[static_cast<std::size_t>(i) * grid_.N + j]; }

  // Fourier coefficients in the series normalization above (cached).
  const std::vector<cplx>& spectrum() const;

  ScalarField2D deriv(int axis) const;            // spectral d/dx_axis
  ScalarField2D dealias() const;                  // zero |k| > N/3 (2/3 rule)
  ScalarField2D shifted(const Vec2& alpha) const; // u(. - alpha), trig-exact
  ScalarField2D apply_multiplier(const std::vector<double>& m_of_mode) const;

  // exact trigonometric interpolation at an arbitrary point (O(N^2))
  double eval_trig(const Vec2& x) const;

  double integral() const;  // dx^2 sum
  double norm_l1() const;   // dx^2 sum |.|
  double norm_sup() const;

  ScalarField2D operator+(const ScalarField2D& o) const;
  ScalarField2D operator-(const ScalarField2D& o) const;
  ScalarField2D operator*(double s) const;

 private:
  PeriodicGrid grid_;
  std::vector<double> v_;
  mutable std::optional<std::vector<cplx>> hat_;
};

struct VectorField2D {
  ScalarField2D x, y;
  const PeriodicGrid& grid() const { return x.grid(); }
};

// Uniform velocity lattice on [-vmax, vmax)^2; quadrature weight dv^2 per node.
struct VelocityGrid {
  int Nv = 0;
  double vmax = 0.0;
  VelocityGrid() = default;
  VelocityGrid(int Nv_, double vmax_);
  double dv() const { return 2.0 * vmax / Nv; }
  double node(int i) const { return -vmax + i * dv(); }
  double weight() const { return dv() * dv(); }
  std::size_t size() const { return static_cast<std::size_t>(Nv) * Nv; }
  bool operator==(const VelocityGrid& o) const { return Nv == o.Nv && vmax == o.vmax; }
};

}  // namespace landau
