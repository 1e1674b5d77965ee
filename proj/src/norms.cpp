#include "landau/norms.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace landau {

namespace {

void check_index(double a) {
  if (!(a > 0.0) || !(a < 1.0))
    throw Error("assumption-window-exceeded", "Holder index must lie in (0,1)");
}

}  // namespace

ShiftSet ShiftSet::dyadic(double h0, int J, bool diagonals) {
  if (!(h0 > 0.0) || J < 0) throw Error("grid-mismatch", "shift ladder needs h0 > 0, J >= 0");
  ShiftSet s;
  s.magnitudes.resize(static_cast<std::size_t>(J) + 1);
  double h = h0;
  for (auto& m : s.magnitudes) {
    m = h;
    h *= 0.5;
  }
  const double r = 1.0 / std::sqrt(2.0);
  s.directions = {Vec2{1.0, 0.0}, Vec2{0.0, 1.0}};
  if (diagonals) {
    s.directions.push_back(Vec2{r, r});
    s.directions.push_back(Vec2{r, -r});
  }
  return s;
}

double besov_seminorm(const ScalarField2D& g, double a, Lp p, const ShiftSet& shifts) {
  check_index(a);
  if (shifts.empty()) throw Error("grid-mismatch", "empty shift set");
  if (shifts.h0() > g.grid().L)
    throw Error("grid-mismatch", "shift magnitude exceeds the box half-width");
  double best = 0.0;
  for (const double h : shifts.magnitudes) {
    const double scale = std::pow(h, -a);
    for (const auto& d : shifts.directions) {
      const ScalarField2D diff = g - g.shifted(Vec2{h * d.x, h * d.y});
      best = std::max(best, scale * lp_norm(diff, p));
    }
  }
  return best;
}

void NormReport::add(const std::string& label, double value) {
  components.push_back({label, value});
  total += value;
}

NormReport trajectory_norm(const SpaceTimeField& g, int m, double gamma, double T,
                           const ShiftSet& shifts) {
  check_index(gamma);
  if (m < 0 || m > 1) throw Error("grid-mismatch", "trajectory norm supports m in {0,1}");
  if (!(T > 0.0) || T > g.time().T * (1.0 + 1e-12))
    throw Error("grid-mismatch", "norm horizon outside the sampled interval");

  NormReport rep;
  rep.gamma = gamma;
  rep.m = m;
  rep.T = T;
  rep.h0 = shifts.h0();
  rep.shift_count = static_cast<int>(shifts.magnitudes.size() * shifts.directions.size());

  int last = 0;
  while (last < g.time().M && g.time().node(last + 1) <= T * (1.0 + 1e-12)) ++last;

  // per node: L^p norms, Besov of g and of its gradient components
  const int nn = last + 1;
  std::vector<double> l1(nn), lsup(nn), b0_1(nn), b0_s(nn), b1_1(nn), b1_s(nn);
  for (int n = 0; n < nn; ++n) {
    const ScalarField2D& s = g.slice(n);
    l1[n] = s.norm_l1();
    lsup[n] = s.norm_sup();
    b0_1[n] = besov_seminorm(s, gamma, Lp::one, shifts);
    b0_s[n] = besov_seminorm(s, gamma, Lp::inf, shifts);
    if (m >= 1) {
      const ScalarField2D dx = s.deriv(0), dy = s.deriv(1);
      b1_1[n] = besov_seminorm(dx, gamma, Lp::one, shifts) +
                besov_seminorm(dy, gamma, Lp::one, shifts);
      b1_s[n] = besov_seminorm(dx, gamma, Lp::inf, shifts) +
                besov_seminorm(dy, gamma, Lp::inf, shifts);
    }
  }

  for (int j = 0; j <= m; ++j)
    for (Lp p : {Lp::one, Lp::inf}) {
      const double wp = lp_weight_power(p);
      double comp = 0.0;
      for (int n = 0; n < nn; ++n) {
        const double s = g.time().node(n);
        const double lp = (p == Lp::one) ? l1[n] : lsup[n];
        const double bs = (j == 0) ? ((p == Lp::one) ? b0_1[n] : b0_s[n])
                                   : ((p == Lp::one) ? b1_1[n] : b1_s[n]);
        comp = std::max(comp, std::pow(bracket(s), wp) * lp +
                                  std::pow(bracket(s), j + gamma + wp) * bs);
      }
      rep.add("j" + std::to_string(j) + (p == Lp::one ? ".L1" : ".Linf"), comp);
    }
  return rep;
}

namespace {

// pointwise D^a field of a scalar phase-space evaluator on the lattice;
// x shifts wrap the box, v shifts evaluate off-lattice
struct HolderFieldResult {
  std::vector<double> D;      // (x-major) Nx^2 x Nv^2
  double base_max = 0.0;      // sup |h| over the lattice
  double boundary_max = 0.0;  // sup |h| on the outermost v ring
};

HolderFieldResult holder_field(const std::function<double(const Vec2&, const Vec2&)>& h,
                               double a, const ShiftSet& shifts, const PeriodicGrid& xg,
                               const VelocityGrid& vg) {
  const int Nx = xg.N, Nv = vg.Nv;
  const std::size_t nvv = static_cast<std::size_t>(Nv) * Nv;
  HolderFieldResult out;
  out.D.resize(static_cast<std::size_t>(Nx) * Nx * nvv);

  std::mutex mx;
  parallel_for_chunks(static_cast<std::size_t>(Nx), [&](std::size_t i0, std::size_t i1) {
    double bmax = 0.0, rmax = 0.0;
    for (std::size_t ix = i0; ix < i1; ++ix)
      for (int jx = 0; jx < Nx; ++jx) {
        const Vec2 x{xg.node(static_cast<int>(ix)), xg.node(jx)};
        double* row = out.D.data() + (ix * Nx + jx) * nvv;
        for (int iv = 0; iv < Nv; ++iv)
          for (int jv = 0; jv < Nv; ++jv) {
            const Vec2 v{vg.node(iv), vg.node(jv)};
            const double base = h(x, v);
            double qx = 0.0, qv = 0.0;
            for (const double mag : shifts.magnitudes) {
              const double sc = std::pow(mag, -a);
              for (const auto& d : shifts.directions) {
                const Vec2 z{mag * d.x, mag * d.y};
                const Vec2 xs{xg.wrap(x.x - z.x), xg.wrap(x.y - z.y)};
                qx = std::max(qx, sc * std::abs(base - h(xs, v)));
                qv = std::max(qv, sc * std::abs(base - h(x, Vec2{v.x - z.x, v.y - z.y})));
              }
            }
            row[static_cast<std::size_t>(iv) * Nv + jv] = std::abs(base) + qx + qv;
            bmax = std::max(bmax, std::abs(base));
            if (iv == 0 || iv == Nv - 1 || jv == 0 || jv == Nv - 1)
              rmax = std::max(rmax, std::abs(base));
          }
      }
    std::lock_guard<std::mutex> lk(mx);
    out.base_max = std::max(out.base_max, bmax);
    out.boundary_max = std::max(out.boundary_max, rmax);
  });
  return out;
}

// || D ||_{L1_x Lp_v cap L1_v Lp_x} for a nonnegative lattice function
double mixed_norm(const std::vector<double>& D, const PeriodicGrid& xg, const VelocityGrid& vg,
                  Lp p) {
  const int Nx = xg.N, Nv = vg.Nv;
  const std::size_t nvv = static_cast<std::size_t>(Nv) * Nv;
  const double wx = xg.dx() * xg.dx(), wv = vg.weight();
  if (p == Lp::one) {
    double acc = 0.0;
    for (const double d : D) acc += d;
    return acc * wx * wv;  // both orderings coincide
  }
  double a1 = 0.0;  // L1_x of sup_v
  std::vector<double> supx(nvv, 0.0);
  for (std::size_t xi = 0; xi < static_cast<std::size_t>(Nx) * Nx; ++xi) {
    const double* row = D.data() + xi * nvv;
    double sv = 0.0;
    for (std::size_t k = 0; k < nvv; ++k) {
      sv = std::max(sv, row[k]);
      supx[k] = std::max(supx[k], row[k]);
    }
    a1 += sv;
  }
  double a2 = 0.0;  // L1_v of sup_x
  for (const double s : supx) a2 += s;
  return std::max(a1 * wx, a2 * wv);
}

}  // namespace

double triple_norm_initial(const InitialData& f0, double a, const ShiftSet& shifts,
                           const PeriodicGrid& xg, const VelocityGrid& vg) {
  check_index(a);
  if (shifts.empty()) throw Error("grid-mismatch", "empty shift set");
  if (shifts.h0() > xg.L || shifts.h0() > vg.vmax)
    throw Error("grid-mismatch", "shift magnitude exceeds the quadrature domain");
  if (f0.is_zero()) return 0.0;

  using F = std::function<double(const Vec2&, const Vec2&)>;
  const F fields[5] = {
      [&](const Vec2& x, const Vec2& v) { return f0(x, v); },
      [&](const Vec2& x, const Vec2& v) { return f0.grad_x(x, v).x; },
      [&](const Vec2& x, const Vec2& v) { return f0.grad_x(x, v).y; },
      [&](const Vec2& x, const Vec2& v) { return f0.grad_v(x, v).x; },
      [&](const Vec2& x, const Vec2& v) { return f0.grad_v(x, v).y; },
  };

  double total = 0.0;
  for (const auto& h : fields) {
    const auto hf = holder_field(h, a, shifts, xg, vg);
    if (hf.base_max > 0.0 && hf.boundary_max > 1e-8 * hf.base_max)
      throw Error("norm-truncation-breach", "data does not decay inside the velocity box");
    total += mixed_norm(hf.D, xg, vg, Lp::one) + mixed_norm(hf.D, xg, vg, Lp::inf);
  }
  if (!std::isfinite(total))
    throw Error("norm-truncation-breach", "triple norm quadrature did not converge");
  return total;
}

double dispersive_average_check(const std::function<double(const Vec2&)>& H,
                                const std::function<Vec2(const Vec2&, const Vec2&)>& phi,
                                double s, double t, Lp p, const DispersiveCheckParams& prm) {
  if (!(t > 0.0) || s < 0.0 || s > 0.5 * t)
    throw Error("assumption-window-exceeded", "dispersive average needs 0 <= s <= t/2");
  const double tau = t - s;

  // Lipschitz gate, sampled: Frobenius norm of the (x,v) Jacobian of phi
  double grad_sup = 0.0, phi_sup = 0.0;
  {
    const double fd = prm.fd_step;
    const int nx = 9, nv = 9;
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nx; ++j)
        for (int k = 0; k < nv; ++k)
          for (int l = 0; l < nv; ++l) {
            const Vec2 x{-prm.x_grid.L + 2.0 * prm.x_grid.L * (i + 0.5) / nx,
                         -prm.x_grid.L + 2.0 * prm.x_grid.L * (j + 0.5) / nx};
            const Vec2 v{-6.0 + 12.0 * (k + 0.5) / nv, -6.0 + 12.0 * (l + 0.5) / nv};
            const Vec2 p0 = phi(x, v);
            phi_sup = std::max(phi_sup, std::sqrt(p0.x * p0.x + p0.y * p0.y));
            double fr = 0.0;
            for (int w = 0; w < 4; ++w) {
              Vec2 xp = x, xm = x, vp = v, vm = v;
              double* comp[4] = {&xp.x, &xp.y, &vp.x, &vp.y};
              double* comm[4] = {&xm.x, &xm.y, &vm.x, &vm.y};
              *comp[w] += fd;
              *comm[w] -= fd;
              const Vec2 d = Vec2{(phi(xp, vp).x - phi(xm, vm).x) / (2 * fd),
                                  (phi(xp, vp).y - phi(xm, vm).y) / (2 * fd)};
              fr += d.x * d.x + d.y * d.y;
            }
            grad_sup = std::max(grad_sup, std::sqrt(fr));
          }
  }
  if (grad_sup > 0.5 + 1e-9)
    throw Error("lipschitz-gate", "perturbation gradient exceeds 1/2");

  // ||H||_L1, midpoint rule
  double hl1 = 0.0;
  {
    const int n = prm.n_h_l1;
    const double R = prm.h_radius, du = 2.0 * R / n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        hl1 += std::abs(H(Vec2{-R + (i + 0.5) * du, -R + (j + 0.5) * du}));
    hl1 *= du * du;
  }
  if (hl1 == 0.0) return 0.0;

  // the integrand lives where |phi + x - tau v| <= h_radius: a velocity patch
  // of radius (h_radius + phi_sup + margin)/tau around x/tau
  const PeriodicGrid& g = prm.x_grid;
  const double w_v = (prm.h_radius + phi_sup + 2.0) / tau;
  const int nv = prm.nv;
  const double dv = 2.0 * w_v / nv;

  std::vector<double> avg(g.size(), 0.0);
  parallel_for(static_cast<std::size_t>(g.N), [&](std::size_t i) {
    for (int j = 0; j < g.N; ++j) {
      const Vec2 x{g.node(static_cast<int>(i)), g.node(j)};
      const Vec2 c{x.x / tau, x.y / tau};
      double acc = 0.0;
      for (int k = 0; k < nv; ++k)
        for (int l = 0; l < nv; ++l) {
          const Vec2 v{c.x - w_v + (k + 0.5) * dv, c.y - w_v + (l + 0.5) * dv};
          const Vec2 ph = phi(x, v);
          const Vec2 u{ph.x + x.x - tau * v.x, ph.y + x.y - tau * v.y};
          const double vv = v.x * v.x + v.y * v.y;
          acc += H(u) * std::pow(1.0 + vv, -1.5);
        }
      avg[i * g.N + j] = acc * dv * dv;
    }
  });

  double lhs = 0.0;
  if (p == Lp::inf) {
    for (const double av : avg) lhs = std::max(lhs, std::abs(av));
  } else {
    for (const double av : avg) lhs += std::abs(av);
    lhs *= g.dx() * g.dx();
  }
  return lhs / (std::pow(t, -lp_weight_power(p)) * hl1);
}

}  // namespace landau
