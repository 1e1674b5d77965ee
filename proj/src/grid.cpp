#include "landau/grid.hpp"

#include <algorithm>
#include <cmath>

#include "landau/fft.hpp"

namespace landau {

namespace {
bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}

PeriodicGrid::PeriodicGrid(int N_, double L_) : N(N_), L(L_) {
  if (!power_of_two(N) || N < 4)
    throw Error("grid-mismatch", "grid.N must be a power of two >= 4, got " + std::to_string(N));
  if (!(L > 0.0)) throw Error("grid-mismatch", "grid.L must be positive");
}

double PeriodicGrid::wrap(double x) const {
  const double p = 2.0 * L;
  double y = std::fmod(x + L, p);
  if (y < 0.0) y += p;
  return y - L;
}

bool dispersive_window_ok(const PeriodicGrid& g, double vmax, double T) {
  // dxi = pi/L <= pi/(vmax T)  <=>  L >= vmax*T (tolerate roundoff at equality)
  return g.L * (1.0 + 1e-12) >= vmax * T;
}

ScalarField2D::ScalarField2D(const PeriodicGrid& g, std::vector<double> values)
    : grid_(g), v_(std::move(values)) {
  if (v_.size() != grid_.size())
    throw Error("grid-mismatch", "field size does not match grid");
}

ScalarField2D::ScalarField2D(const PeriodicGrid& g) : grid_(g), v_(g.size(), 0.0) {}

const std::vector<cplx>& ScalarField2D::spectrum() const {
  if (!hat_) {
    const int N = grid_.N;
    std::vector<cplx> h(grid_.size());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = v_[i];
    fft2d(N, h.data(), -1);
    const double inv = 1.0 / static_cast<double>(grid_.size());
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const double ph = ((i + j) & 1) ? -inv : inv;  // (-1)^{k1+k2}/N^2
        h[static_cast<std::size_t>(i) * N + j] *= ph;
      }
    hat_ = std::move(h);
  }
  return *hat_;
}

ScalarField2D ScalarField2D::from_spectrum(const PeriodicGrid& g, const std::vector<cplx>& hat) {
  if (hat.size() != g.size()) throw Error("grid-mismatch", "spectrum size does not match grid");
  const int N = g.N;
  std::vector<cplx> h(hat);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if ((i + j) & 1) h[static_cast<std::size_t>(i) * N + j] *= -1.0;
  fft2d(N, h.data(), +1);
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = h[i].real();
  ScalarField2D f(g, std::move(out));
  f.hat_ = hat;
  return f;
}

ScalarField2D ScalarField2D::from_function(const PeriodicGrid& g,
                                           const std::function<double(double, double)>& f) {
  std::vector<double> out(g.size());
  for (int i = 0; i < g.N; ++i)
    for (int j = 0; j < g.N; ++j)
      out[static_cast<std::size_t>(i) * g.N + j] = f(g.node(i), g.node(j));
  return ScalarField2D(g, std::move(out));
}

ScalarField2D ScalarField2D::deriv(int axis) const {
  const auto& h = spectrum();
  const int N = grid_.N;
  std::vector<cplx> dh(h.size());
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const std::size_t id = static_cast<std::size_t>(i) * N + j;
      const int k = grid_.kindex(axis == 0 ? i : j);
      // the unmatched Nyquist mode has no well-defined derivative; drop it
      const double xi = (k == -N / 2) ? 0.0 : M_PI * k / grid_.L;
      dh[id] = cplx(0.0, xi) * h[id];
    }
  return from_spectrum(grid_, dh);
}

ScalarField2D ScalarField2D::dealias() const {
  const auto& h = spectrum();
  const int N = grid_.N, kc = grid_.dealias_limit();
  std::vector<cplx> dh(h.size());
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const std::size_t id = static_cast<std::size_t>(i) * N + j;
      const bool keep = std::abs(grid_.kindex(i)) <= kc && std::abs(grid_.kindex(j)) <= kc;
      dh[id] = keep ? h[id] : cplx(0.0);
    }
  return from_spectrum(grid_, dh);
}

ScalarField2D ScalarField2D::shifted(const Vec2& alpha) const {
  const double dx = grid_.dx();
  const double si = alpha.x / dx, sj = alpha.y / dx;
  const double ri = std::round(si), rj = std::round(sj);
  if (std::abs(si - ri) < 1e-9 && std::abs(sj - rj) < 1e-9) {
    // on-lattice shift: exact integer roll, no transform needed
    const int N = grid_.N;
    const int oi = ((static_cast<int>(ri) % N) + N) % N;
    const int oj = ((static_cast<int>(rj) % N) + N) % N;
    std::vector<double> out(grid_.size());
    for (int i = 0; i < N; ++i) {
      const int ii = (i - oi + N) % N;
      for (int j = 0; j < N; ++j) out[static_cast<std::size_t>(i) * N + j] = (*this)(ii, (j - oj + N) % N);
    }
    return ScalarField2D(grid_, std::move(out));
  }
  const auto& h = spectrum();
  const int N = grid_.N;
  std::vector<cplx> sh(h.size());
  for (int i = 0; i < N; ++i) {
    const cplx pi_ = std::polar(1.0, -grid_.freq(i) * alpha.x);
    for (int j = 0; j < N; ++j) {
      const std::size_t id = static_cast<std::size_t>(i) * N + j;
      sh[id] = h[id] * pi_ * std::polar(1.0, -grid_.freq(j) * alpha.y);
    }
  }
  return from_spectrum(grid_, sh);
}

ScalarField2D ScalarField2D::apply_multiplier(const std::vector<double>& m) const {
  if (m.size() != grid_.size()) throw Error("grid-mismatch", "multiplier size does not match grid");
  const auto& h = spectrum();
  std::vector<cplx> out(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) out[i] = h[i] * m[i];
  return from_spectrum(grid_, out);
}

double ScalarField2D::eval_trig(const Vec2& x) const {
  const auto& h = spectrum();
  const int N = grid_.N;
  // per-axis phase tables e^{i xi_k x} built by recurrence
  std::vector<cplx> px(N), py(N);
  const cplx sx = std::polar(1.0, M_PI * x.x / grid_.L);
  const cplx sy = std::polar(1.0, M_PI * x.y / grid_.L);
  px[0] = py[0] = 1.0;
  cplx cx = 1.0, cy = 1.0;
  for (int i = 1; i < N / 2; ++i) {  // k = i
    cx *= sx; cy *= sy;
    px[i] = cx; py[i] = cy;
  }
  cx = 1.0; cy = 1.0;
  for (int i = N - 1; i >= N / 2; --i) {  // k = i - N < 0
    cx *= std::conj(sx); cy *= std::conj(sy);
    px[i] = cx; py[i] = cy;
  }
  cplx acc = 0.0;
  for (int i = 0; i < N; ++i) {
    cplx row = 0.0;
    const std::size_t base = static_cast<std::size_t>(i) * N;
    for (int j = 0; j < N; ++j) row += h[base + j] * py[j];
    acc += row * px[i];
  }
  return acc.real();
}

double ScalarField2D::integral() const {
  double s = 0.0;
  for (double u : v_) s += u;
  return s * grid_.dx() * grid_.dx();
}

double ScalarField2D::norm_l1() const {
  double s = 0.0;
  for (double u : v_) s += std::abs(u);
  return s * grid_.dx() * grid_.dx();
}

double ScalarField2D::norm_sup() const {
  double s = 0.0;
  for (double u : v_) s = std::max(s, std::abs(u));
  return s;
}

ScalarField2D ScalarField2D::operator+(const ScalarField2D& o) const {
  if (!(grid_ == o.grid_)) throw Error("grid-mismatch", "adding fields on different grids");
  std::vector<double> out(v_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += o.v_[i];
  return ScalarField2D(grid_, std::move(out));
}

ScalarField2D ScalarField2D::operator-(const ScalarField2D& o) const {
  if (!(grid_ == o.grid_)) throw Error("grid-mismatch", "subtracting fields on different grids");
  std::vector<double> out(v_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= o.v_[i];
  return ScalarField2D(grid_, std::move(out));
}

ScalarField2D ScalarField2D::operator*(double s) const {
  std::vector<double> out(v_);
  for (double& u : out) u *= s;
  return ScalarField2D(grid_, std::move(out));
}

VelocityGrid::VelocityGrid(int Nv_, double vmax_) : Nv(Nv_), vmax(vmax_) {
  if (Nv < 2) throw Error("grid-mismatch", "velocity grid needs Nv >= 2");
  if (!(vmax > 0.0)) throw Error("grid-mismatch", "vmax must be positive");
}

}  // namespace landau
