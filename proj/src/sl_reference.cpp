// Strang split-step advance of the perturbation on the tensor lattice.
//
// Storage is velocity-major: one contiguous N x N spatial slice per velocity
// node, so the spectral x-shift works on whole slices and the v-shift gathers
// strided columns per spatial node.  The interval between trajectory nodes is
// cut into `substeps` split steps x(h/2) F v(h) x(h/2) with adjacent x halves
// merged; the field is frozen at the half point of each step.
//
// The cubic shift kernel below is deliberately a local copy rather than a use
// of the flow samplers: the reference must not share interpolation code with
// the solver it checks.

#include "landau/sl_reference.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include "landau/core.hpp"
#include "landau/fft.hpp"

namespace landau {

namespace {

void cubic_weights(double u, double w[4]) {
  const double u2 = u * u, u3 = u2 * u;
  w[0] = -0.5 * u3 + u2 - 0.5 * u;
  w[1] = 1.5 * u3 - 2.5 * u2 + 1.0;
  w[2] = -1.5 * u3 + 2.0 * u2 + 0.5 * u;
  w[3] = 0.5 * u3 - 0.5 * u2;
}

// f(v) <- f(v - delta) along one velocity axis, zero beyond the lattice rim.
// The source position j - s sits at offset theta = 1 - frac(s) above index
// j - floor(s) - 2, which keeps one formula for every sign of the shift.
void shift_axis(const std::vector<double>& in, std::vector<double>& out, int Nv, int axis,
                double shift_nodes) {
  const int b = static_cast<int>(std::floor(shift_nodes));
  const double theta = 1.0 - (shift_nodes - b);
  double w[4];
  cubic_weights(theta, w);
  for (int j = 0; j < Nv; ++j) {
    const int left = j - b - 2;
    for (int k = 0; k < Nv; ++k) {
      double acc = 0.0;
      for (int r = 0; r < 4; ++r) {
        const int src = left + r;
        if (src < 0 || src >= Nv) continue;
        const double val = axis == 0 ? in[static_cast<std::size_t>(src) * Nv + k]
                                     : in[static_cast<std::size_t>(k) * Nv + src];
        acc += w[r] * val;
      }
      if (axis == 0)
        out[static_cast<std::size_t>(j) * Nv + k] = acc;
      else
        out[static_cast<std::size_t>(k) * Nv + j] = acc;
    }
  }
}

}  // namespace

DensityTrajectory sl_reference_solve(const InitialData& f0, const PeriodicGrid& grid,
                                     const TimeGrid& tg, const SLParams& prm) {
  if (prm.substeps < 1) throw Error("grid-mismatch", "substeps must be positive");
  const int N = grid.N;
  const VelocityGrid& vg = prm.vg;
  const int Nv = vg.Nv;
  const std::size_t nx = static_cast<std::size_t>(N) * N;
  const std::size_t nv = static_cast<std::size_t>(Nv) * Nv;

  // f[v-slice][x], plus the fixed equilibrium table on the velocity lattice
  std::vector<std::vector<double>> f(nv, std::vector<double>(nx, 0.0));
  std::vector<Vec2> vnode(nv);
  std::vector<double> mu0(nv);
  for (int a = 0; a < Nv; ++a)
    for (int b = 0; b < Nv; ++b) {
      const std::size_t j = static_cast<std::size_t>(a) * Nv + b;
      vnode[j] = {vg.node(a), vg.node(b)};
      mu0[j] = prm.mu.eval_mu(vnode[j]);
    }
  for (std::size_t j = 0; j < nv; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const Vec2 x{grid.node(static_cast<int>(i) / N), grid.node(static_cast<int>(i) % N)};
      f[j][i] = f0(x, vnode[j]);
    }

  const double wv = vg.dv() * vg.dv();
  auto density = [&] {
    std::vector<double> rho(nx, 0.0);
    for (std::size_t j = 0; j < nv; ++j)
      for (std::size_t i = 0; i < nx; ++i) rho[i] += f[j][i];
    for (double& r : rho) r *= wv;
    return ScalarField2D(grid, std::move(rho));
  };

  // spectral x-advection of every v-slice by v tau, exact on the lattice
  auto advect_x = [&](double tau) {
    parallel_for_chunks(nv, [&](std::size_t jb, std::size_t je) {
      std::vector<std::complex<double>> lbuf(nx), lpx(static_cast<std::size_t>(N)),
          lpy(static_cast<std::size_t>(N));
      for (std::size_t j = jb; j < je; ++j) {
        for (int i = 0; i < N; ++i) {
          const int k = i <= N / 2 - 1 ? i : i - N;
          const double xi = M_PI * k / grid.L;
          lpx[static_cast<std::size_t>(i)] =
              std::exp(std::complex<double>(0.0, -xi * vnode[j].x * tau));
          lpy[static_cast<std::size_t>(i)] =
              std::exp(std::complex<double>(0.0, -xi * vnode[j].y * tau));
        }
        for (std::size_t i = 0; i < nx; ++i) lbuf[i] = f[j][i];
        fft2d(N, lbuf.data(), -1);
        for (int a = 0; a < N; ++a)
          for (int b = 0; b < N; ++b)
            lbuf[static_cast<std::size_t>(a) * N + b] *=
                lpx[static_cast<std::size_t>(a)] * lpy[static_cast<std::size_t>(b)];
        fft2d(N, lbuf.data(), +1);
        const double inv = 1.0 / static_cast<double>(nx);
        for (std::size_t i = 0; i < nx; ++i) f[j][i] = lbuf[i].real() * inv;
      }
    });
  };

  // field solve + v-advection by E(x) tau at frozen x, equilibrium analytic
  std::vector<double> g0(nv), g1(nv), g2(nv);
  auto kick_v = [&](double tau) {
    const ScalarField2D u = solve_semilinear(density(), prm.A, 1e-12, 64, prm.eps0_field);
    const VectorField2D E = electric_field(u);
    const double dv = vg.dv();
    for (std::size_t i = 0; i < nx; ++i) {
      const Vec2 delta{E.x.values()[i] * tau, E.y.values()[i] * tau};
      for (std::size_t j = 0; j < nv; ++j) g0[j] = f[j][i];
      shift_axis(g0, g1, Nv, 0, delta.x / dv);
      shift_axis(g1, g2, Nv, 1, delta.y / dv);
      for (std::size_t j = 0; j < nv; ++j)
        f[j][i] = g2[j] + prm.mu.eval_mu(vnode[j] - Vec2{delta.x, delta.y}) - mu0[j];
    }
  };

  DensityTrajectory out(tg, grid, 1);
  out.push(0, density());
  const double h = tg.dt() / prm.substeps;
  for (int m = 1; m <= tg.M; ++m) {
    advect_x(0.5 * h);
    for (int s = 0; s < prm.substeps; ++s) {
      kick_v(h);
      advect_x(s + 1 < prm.substeps ? h : 0.5 * h);
    }
    out.push(m, density());
  }
  return out;
}

}  // namespace landau
