// Characteristic-trajectory sources and the density fixed point.
//
// Every source here is a velocity average along the perturbed backward flow.
// The flow enters through the sheared labels: with x~ = x - t v the physical
// trajectory through (x, v) at time t is
//
//     X_{s,t} = x~ + s v + Y_{s,t}(x~, v),   V_{s,t} = v + W_{s,t}(x~, v),
//
// and (Y, W) solve the Volterra suffix equations
//
//     Y_s = int_s^t (tau - s) E(tau, x~ + tau v + Y_tau) dtau,
//     W_s = -int_s^t       E(tau, x~ + tau v + Y_tau) dtau.
//
// A trapezoidal march in descending tau realizes both with one field fetch
// per retained node: carrying the partial sums U0 = sum w E and
// U1 = sum w tau E gives Y_s = h (U1 - s U0) exactly in the discrete algebra,
// for any uniform node stride h that divides the target node.  All consumers
// (transported data, reaction, the pointwise-difference operator, phase-space
// reconstruction, scattering maps) are closures over this one march.
//
// Quadratures pair the flowed integrand with its free-flight partner at the
// same lattice point, so every source vanishes identically on a zero field
// regardless of resolution.  The strides in SourceQuad therefore only touch
// contributions that are quadratic in the data size.

#include "landau/density_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "landau/linear_response.hpp"
#include "landau/norms.hpp"

namespace landau {

namespace {

Vec2 wrap2(const PeriodicGrid& g, const Vec2& p) { return {g.wrap(p.x), g.wrap(p.y)}; }

PeriodicGrid strided_grid(const PeriodicGrid& g, int stride) {
  if (stride <= 1) return g;
  if (g.N % stride != 0)
    throw Error("grid-mismatch", "x stride must divide the spatial lattice");
  return PeriodicGrid{g.N / stride, g.L};
}

VelocityGrid strided_vgrid(const VelocityGrid& vg, int stride) {
  if (stride <= 1) return vg;
  if (vg.Nv % stride != 0)
    throw Error("grid-mismatch", "v stride must divide the velocity lattice");
  return VelocityGrid{vg.Nv / stride, vg.vmax};
}

// Zero-padded spectral embedding of a coarse sample onto the full grid.  The
// coarse field is band-limited by construction, so this is the unique trig
// interpolant; content beyond the coarse Nyquist has already aliased and is
// part of the stride error budget.
ScalarField2D lift_to(const PeriodicGrid& full, const ScalarField2D& coarse) {
  const PeriodicGrid& cg = coarse.grid();
  if (cg.N == full.N) return coarse;
  const auto& hat = coarse.spectrum();
  std::vector<cplx> big(static_cast<std::size_t>(full.N) * full.N, cplx{0.0, 0.0});
  for (int i = 0; i < cg.N; ++i) {
    const int ki = i <= cg.N / 2 - 1 ? i : i - cg.N;  // wrapped frequency
    const int fi = ki >= 0 ? ki : ki + full.N;
    for (int j = 0; j < cg.N; ++j) {
      const int kj = j <= cg.N / 2 - 1 ? j : j - cg.N;
      const int fj = kj >= 0 ? kj : kj + full.N;
      big[static_cast<std::size_t>(fi) * full.N + fj] =
          hat[static_cast<std::size_t>(i) * cg.N + j];
    }
  }
  return ScalarField2D::from_spectrum(full, big);
}

// Backward suffix march shared by every flow consumer.  consume(m, s, p, Y, W,
// Ev) fires at each retained node below the target, with (Y, W) the maps from
// s up to the target time and Ev the field at the flowed point.  Nodes whose
// stored field sup falls below skip_sup are passed over (their fetch would add
// nothing at the consumer's tolerance); node 0 always fires so endpoint
// consumers see the full maps.
template <class Consume>
void label_march(const FieldSampler& field, int mt, int stride, const SourceQuad& q,
                 const std::vector<Vec2>& xt, const std::vector<Vec2>& v, Consume&& consume) {
  const TimeGrid& tg = field.time();
  if (mt <= 0 || mt > tg.M) throw Error("grid-mismatch", "march target outside the horizon");
  if (stride < 1 || mt % stride != 0)
    throw Error("grid-mismatch", "march stride must divide the target node");
  const double h = stride * tg.dt();
  const double t = tg.node(mt);
  const std::size_t n = xt.size();
  std::vector<Vec2> U0(n), U1(n);

  auto quiet = [&](int m) { return field.node_sup(m) < q.skip_sup; };

  if (!quiet(mt)) {
    parallel_for_chunks(n, [&](std::size_t b, std::size_t e) {
      for (std::size_t p = b; p < e; ++p) {
        const Vec2 Ev = field.value_node(mt, xt[p] + t * v[p]);
        U0[p] = 0.5 * Ev;
        U1[p] = (0.5 * t) * Ev;
      }
    });
  }
  std::mutex merge;
  for (int m = mt - stride; m >= 0; m -= stride) {
    if (m != 0 && quiet(m)) continue;
    const bool live = !quiet(m);
    const double s = tg.node(m);
    bool bad = false;
    parallel_for_chunks(n, [&](std::size_t b, std::size_t e) {
      bool mine = false;
      for (std::size_t p = b; p < e; ++p) {
        const Vec2 Y = h * (U1[p] - s * U0[p]);
        if (!(std::isfinite(Y.x) && std::isfinite(Y.y)) || Y.norm() > q.blowup_guard) {
          mine = true;
          continue;
        }
        Vec2 Ev;
        if (live) Ev = field.value_node(m, xt[p] + s * v[p] + Y);
        const Vec2 W = (-h) * (U0[p] + 0.5 * Ev);
        consume(m, s, p, Y, W, Ev);
        if (m > 0) {
          U0[p] += Ev;
          U1[p] += s * Ev;
        }
      }
      if (mine) {
        std::lock_guard<std::mutex> lk(merge);
        bad = true;
      }
    });
    if (bad) throw Error("picard-divergence", "flow march left the perturbative regime");
  }
}

int node_stride(int mt, int want) { return (want > 1 && mt % want == 0) ? want : 1; }

// delta-I and R contributions at one target node, quadrated on the strided
// lattices and lifted back to the full grid.  Both integrands are exact
// pointwise differences against the free flight, so the slice vanishes
// identically when the field does.
ScalarField2D flow_source_slice(const InitialData& f0, const EquilibriumProfile& mu,
                                const FieldSampler& field, int mt, const VelocityGrid& vg,
                                const SourceQuad& q, bool endpoint, bool with_reaction) {
  const PeriodicGrid full = field.grid();
  const PeriodicGrid xs = strided_grid(full, q.x_stride);
  const VelocityGrid vs = strided_vgrid(vg, q.v_stride);
  const int stride = node_stride(mt, q.s_stride);
  const double h = stride * field.time().dt();
  const double t = field.time().node(mt);

  const std::size_t nv = static_cast<std::size_t>(vs.Nv) * vs.Nv;
  const std::size_t nx = static_cast<std::size_t>(xs.N) * xs.N;
  std::vector<Vec2> vnode(nv), gmu(nv);
  for (int a = 0; a < vs.Nv; ++a)
    for (int b = 0; b < vs.Nv; ++b) {
      const std::size_t j = static_cast<std::size_t>(a) * vs.Nv + b;
      vnode[j] = {vs.node(a), vs.node(b)};
      gmu[j] = mu.grad_mu(vnode[j]);
    }
  std::vector<Vec2> xt(nx * nv), vv(nx * nv);
  for (std::size_t i = 0; i < nx; ++i) {
    const Vec2 x{xs.node(static_cast<int>(i) / xs.N), xs.node(static_cast<int>(i) % xs.N)};
    for (std::size_t j = 0; j < nv; ++j) {
      xt[i * nv + j] = x - t * vnode[j];
      vv[i * nv + j] = vnode[j];
    }
  }

  std::vector<double> acc(nx * nv, 0.0);
  label_march(field, mt, stride, q, xt, vv,
              [&](int m, double s, std::size_t p, const Vec2& Y, const Vec2& W, const Vec2& Ev) {
                const std::size_t j = p % nv;
                if (with_reaction) {
                  const Vec2 Ef = field.value_node(m, xt[p] + s * vv[p]);
                  const double w = (m == 0) ? 0.5 * h : h;
                  acc[p] += w * (Ef.dot(gmu[j]) - Ev.dot(mu.grad_mu(vnode[j] + W)));
                }
                if (endpoint && m == 0)
                  acc[p] += f0(wrap2(full, xt[p] + Y), vnode[j] + W) -
                            f0(wrap2(full, xt[p]), vnode[j]);
              });

  const double wv = vs.dv() * vs.dv();
  std::vector<double> out(nx, 0.0);
  for (std::size_t i = 0; i < nx; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < nv; ++j) sum += acc[i * nv + j];
    out[i] = wv * sum;
  }
  return lift_to(full, ScalarField2D(xs, std::move(out)));
}

}  // namespace

// ---------------------------------------------------------------------------
// velocity weights

VelocityWeight VelocityWeight::measure(std::function<double(const Vec2&)> eta, double vmax) {
  // Finite-difference sup of <v>^3 sum_{j<=3} |grad^j eta| over a radial
  // lattice; |grad^j| is the max derivative component of order j.
  const double h = 0.02;
  auto d1 = [&](const Vec2& v, int ax) {
    const Vec2 e = ax == 0 ? Vec2{h, 0.0} : Vec2{0.0, h};
    return (eta(v + e) - eta(v - Vec2{e.x, e.y})) / (2.0 * h);
  };
  auto d2 = [&](const Vec2& v, int ax) {
    const Vec2 e = ax == 0 ? Vec2{h, 0.0} : Vec2{0.0, h};
    return (eta(v + e) - 2.0 * eta(v) + eta(v - Vec2{e.x, e.y})) / (h * h);
  };
  auto d11 = [&](const Vec2& v) {
    return (eta({v.x + h, v.y + h}) - eta({v.x + h, v.y - h}) - eta({v.x - h, v.y + h}) +
            eta({v.x - h, v.y - h})) /
           (4.0 * h * h);
  };
  auto d3 = [&](const Vec2& v, int ax) {
    const Vec2 e = ax == 0 ? Vec2{h, 0.0} : Vec2{0.0, h};
    const Vec2 e2 = 2.0 * e;
    return (eta(v + e2) - 2.0 * eta(v + e) + 2.0 * eta(v - Vec2{e.x, e.y}) -
            eta(v - Vec2{e2.x, e2.y})) /
           (2.0 * h * h * h);
  };
  auto mixed3 = [&](const Vec2& v, int ax2, int ax1) {
    // d^2/d(ax2)^2 d/d(ax1), nested central stencils
    const Vec2 e = ax1 == 0 ? Vec2{h, 0.0} : Vec2{0.0, h};
    return (d2(v + e, ax2) - d2(v - Vec2{e.x, e.y}, ax2)) / (2.0 * h);
  };

  double best = 0.0;
  const int nr = 96, na = 24;
  const double rmax = 1.5 * vmax;
  for (int ir = 0; ir <= nr; ++ir) {
    const double r = rmax * ir / nr;
    for (int ia = 0; ia < na; ++ia) {
      const double th = 2.0 * M_PI * ia / na;
      const Vec2 v{r * std::cos(th), r * std::sin(th)};
      const double g0 = std::abs(eta(v));
      const double g1 = std::max(std::abs(d1(v, 0)), std::abs(d1(v, 1)));
      const double g2 =
          std::max({std::abs(d2(v, 0)), std::abs(d2(v, 1)), std::abs(d11(v))});
      const double g3 = std::max({std::abs(d3(v, 0)), std::abs(d3(v, 1)),
                                  std::abs(mixed3(v, 1, 0)), std::abs(mixed3(v, 0, 1))});
      const double val = std::pow(bracket(r), 3) * (g0 + g1 + g2 + g3);
      if (!std::isfinite(val)) throw Error("eta-weight-violation", "weight is not finite");
      best = std::max(best, val);
    }
  }
  VelocityWeight w;
  w.eta = std::move(eta);
  w.constant = best;
  return w;
}

// ---------------------------------------------------------------------------
// transported data

ScalarField2D free_transport_density(const InitialData& f0, double t, const PeriodicGrid& xg,
                                     const VelocityGrid& vg, const SourceQuad& q) {
  std::vector<double> out(static_cast<std::size_t>(xg.N) * xg.N, 0.0);
  if (f0.is_zero()) return ScalarField2D(xg, std::move(out));

  // Beyond the declared decay radius the data is numerically invisible, so an
  // x-row only needs the v-nodes whose transported image lands within that
  // radius.  The test is per axis (a box superset of the ball), shared by both
  // axes; boxes smaller than the radius keep every node and this is the dense
  // double sum.  The pruning keeps the cost of large decay-study grids
  // proportional to the occupied window instead of the full lattice.
  const double r = f0.radius();
  std::vector<std::vector<int>> ok(static_cast<std::size_t>(xg.N));
  for (int i = 0; i < xg.N; ++i)
    for (int a = 0; a < vg.Nv; ++a) {
      double d = xg.node(i) - t * vg.node(a);
      d -= 2.0 * xg.L * std::floor((d + xg.L) / (2.0 * xg.L));
      if (std::abs(d) <= r) ok[static_cast<std::size_t>(i)].push_back(a);
    }

  const double wv = vg.dv() * vg.dv();
  std::vector<double> ring(static_cast<std::size_t>(xg.N), 0.0), peak(ring);
  parallel_for_chunks(static_cast<std::size_t>(xg.N), [&](std::size_t rb, std::size_t re) {
    for (std::size_t i = rb; i < re; ++i) {
      for (int j = 0; j < xg.N; ++j) {
        const Vec2 x{xg.node(static_cast<int>(i)), xg.node(j)};
        double sum = 0.0;
        for (int a : ok[i])
          for (int b : ok[static_cast<std::size_t>(j)]) {
            const Vec2 v{vg.node(a), vg.node(b)};
            const double val = f0(wrap2(xg, x - t * v), v);
            sum += val;
            const double av = std::abs(val);
            peak[i] = std::max(peak[i], av);
            if (a == 0 || b == 0 || a == vg.Nv - 1 || b == vg.Nv - 1)
              ring[i] = std::max(ring[i], av);
          }
        out[i * xg.N + j] = wv * sum;
      }
    }
  });
  const double rim = *std::max_element(ring.begin(), ring.end());
  const double top = *std::max_element(peak.begin(), peak.end());
  if (rim > q.breach_tol * top)
    throw Error("velocity-truncation-breach",
                "initial data does not vanish at the velocity lattice rim");
  return ScalarField2D(xg, std::move(out));
}

ScalarField2D transported_initial(const InitialData& f0, const FieldSampler& field, double t,
                                  const VelocityGrid& vg, const SourceQuad& q) {
  const int mt = field.node_index(t);
  ScalarField2D free_part = free_transport_density(f0, t, field.grid(), vg, q);
  if (mt == 0 || f0.is_zero()) return free_part;
  static const EquilibriumProfile no_mu = EquilibriumProfile::maxwellian();
  return free_part + flow_source_slice(f0, no_mu, field, mt, vg, q, true, false);
}

// ---------------------------------------------------------------------------
// pointwise-difference averages

SpaceTimeField t_operator(const SpaceTimeField& F, const VelocityWeight& eta,
                          const FieldSampler& field, const VelocityGrid& vg,
                          const SourceQuad& q) {
  if (!(F.time().M == field.time().M) || std::abs(F.time().T - field.time().T) > 1e-12)
    throw Error("grid-mismatch", "integrand and flow field live on different horizons");
  const double c =
      eta.constant > 0.0 ? eta.constant : VelocityWeight::measure(eta.eta, vg.vmax).constant;
  if (!std::isfinite(c) || c > 1.0 + 1e-6)
    throw Error("eta-weight-violation",
                "weight constant " + std::to_string(c) + " exceeds the unit gate");

  const PeriodicGrid full = field.grid();
  const PeriodicGrid xs = strided_grid(full, q.x_stride);
  const VelocityGrid vs = strided_vgrid(vg, q.v_stride);
  const ScalarSampler FS(F);

  const std::size_t nv = static_cast<std::size_t>(vs.Nv) * vs.Nv;
  const std::size_t nx = static_cast<std::size_t>(xs.N) * xs.N;
  std::vector<Vec2> vnode(nv);
  std::vector<double> etav(nv);
  for (int a = 0; a < vs.Nv; ++a)
    for (int b = 0; b < vs.Nv; ++b) {
      const std::size_t j = static_cast<std::size_t>(a) * vs.Nv + b;
      vnode[j] = {vs.node(a), vs.node(b)};
      etav[j] = eta.eta(vnode[j]);
    }

  SpaceTimeField out(F.time(), full);
  const double wv = vs.dv() * vs.dv();
  for (int mt = 1; mt <= F.time().M; ++mt) {
    const int stride = node_stride(mt, q.s_stride);
    const double h = stride * F.time().dt();
    const double t = F.time().node(mt);
    std::vector<Vec2> xt(nx * nv), vv(nx * nv);
    for (std::size_t i = 0; i < nx; ++i) {
      const Vec2 x{xs.node(static_cast<int>(i) / xs.N), xs.node(static_cast<int>(i) % xs.N)};
      for (std::size_t j = 0; j < nv; ++j) {
        xt[i * nv + j] = x - t * vnode[j];
        vv[i * nv + j] = vnode[j];
      }
    }
    std::vector<double> acc(nx * nv, 0.0);
    label_march(field, mt, stride, q, xt, vv,
                [&](int m, double s, std::size_t p, const Vec2& Y, const Vec2& W, const Vec2&) {
                  const std::size_t j = p % nv;
                  const Vec2 xf = xt[p] + s * vv[p];
                  const double Ff = FS.value_node(m, xf);
                  const double Fv = FS.value_node(m, xf + Y);
                  const double w = (m == 0) ? 0.5 * h : h;
                  acc[p] += w * (Ff * etav[j] - Fv * eta.eta(vnode[j] + W));
                });
    std::vector<double> slice(nx, 0.0);
    for (std::size_t i = 0; i < nx; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < nv; ++j) sum += acc[i * nv + j];
      slice[i] = wv * sum;
    }
    out.slice(mt) = lift_to(full, ScalarField2D(xs, std::move(slice)));
  }
  return out;
}

SpaceTimeField reaction(const FieldSampler& field, const EquilibriumProfile& mu,
                        const VelocityGrid& vg, const SourceQuad& q, double* weight_constant) {
  // The natural weights are the components of grad mu.  Their measured
  // constant c typically exceeds one; the rescaled weight grad mu / c passes
  // the unit gate and the factor c multiplies back outside the linear
  // operator, so the fused quadrature below may use grad mu directly.
  double c = 0.0;
  for (int ax = 0; ax < 2; ++ax) {
    auto comp = [&mu, ax](const Vec2& v) {
      const Vec2 g = mu.grad_mu(v);
      return ax == 0 ? g.x : g.y;
    };
    c = std::max(c, VelocityWeight::measure(comp, mu.vmax()).constant);
  }
  if (!std::isfinite(c)) throw Error("eta-weight-violation", "equilibrium weight is not finite");
  if (weight_constant) *weight_constant = c;

  static const InitialData no_data = InitialData::zero();
  SpaceTimeField out(field.time(), field.grid());
  for (int mt = 1; mt <= field.time().M; ++mt)
    out.slice(mt) = flow_source_slice(no_data, mu, field, mt, vg, q, false, true);
  return out;
}

// ---------------------------------------------------------------------------
// the Picard map

namespace {

// Marching norm for Picard control: sup_m <t_m>^2 (|.|_L1 + |.|_sup).  On the
// band-limited lattice this is equivalent to the Holder trajectory norm up to
// a fixed constant, and it is cheap enough to evaluate every sweep.
double marching_norm(const std::vector<ScalarField2D>& s, const TimeGrid& tg, int lo, int hi) {
  double best = 0.0;
  for (int m = lo; m <= hi; ++m) {
    const double w = bracket(tg.node(m));
    best = std::max(best, w * w * (lp_norm(s[static_cast<std::size_t>(m)], Lp::one) +
                                   lp_norm(s[static_cast<std::size_t>(m)], Lp::inf)));
  }
  return best;
}

SpaceTimeField stack_of(const TimeGrid& tg, const PeriodicGrid& g,
                        const std::vector<ScalarField2D>& s) {
  SpaceTimeField out(tg, g);
  for (int m = 0; m <= tg.M; ++m) out.slice(m) = s[static_cast<std::size_t>(m)];
  return out;
}

struct DerivedStacks {
  std::vector<ScalarField2D> u, g;
  std::vector<VectorField2D> e;
};

void derive_range(const std::vector<ScalarField2D>& rho, const SolverParams& prm, int lo, int hi,
                  DerivedStacks& d) {
  d.u.resize(rho.size());
  d.g.resize(rho.size());
  d.e.resize(rho.size());
  for (int m = lo; m <= hi; ++m) {
    const auto i = static_cast<std::size_t>(m);
    d.u[i] = solve_semilinear(rho[i], prm.A, 1e-12, 64, prm.eps0_field);
    d.g[i] = rho[i] + eval_A(prm.A, d.u[i]);
    d.e[i] = electric_field(d.u[i]);
  }
}

SpaceTimeVectorField field_stack(const TimeGrid& tg, const PeriodicGrid& g,
                                 const std::vector<VectorField2D>& e) {
  SpaceTimeVectorField out(tg, g);
  for (int m = 0; m <= tg.M; ++m) out.slice(m) = e[static_cast<std::size_t>(m)];
  return out;
}

}  // namespace

DensityTrajectory picard_map_J(const DensityTrajectory& rho_in, const InitialData& f0,
                               const SolverParams& prm) {
  const TimeGrid& tg = rho_in.tg;
  const PeriodicGrid& grid = rho_in.grid;
  std::vector<ScalarField2D> rho(static_cast<std::size_t>(tg.count()));
  for (int m = 0; m <= tg.M; ++m) rho[static_cast<std::size_t>(m)] = rho_in.slice(m);

  DerivedStacks d;
  derive_range(rho, prm, 0, tg.M, d);
  const ResolventTable table(prm.mu, grid, tg, prm.xi_free);

  std::vector<ScalarField2D> src(rho.size());
  for (int m = 0; m <= tg.M; ++m)
    src[static_cast<std::size_t>(m)] =
        free_transport_density(f0, tg.node(m), grid, prm.vg, prm.quad);

  double esup = 0.0;
  for (const auto& e : d.e)
    esup = std::max(esup, std::max(lp_norm(e.x, Lp::inf), lp_norm(e.y, Lp::inf)));
  if (esup > 0.0) {
    const FieldSampler sampler(field_stack(tg, grid, d.e), FieldSampler::Options{prm.sampler_refine, true});
    for (int m = 1; m <= tg.M; ++m)
      src[static_cast<std::size_t>(m)] =
          src[static_cast<std::size_t>(m)] +
          flow_source_slice(f0, prm.mu, sampler, m, prm.vg, prm.quad, true, true);
  }

  std::vector<ScalarField2D> conv(rho.size());
  for (int m = 0; m <= tg.M; ++m) {
    const auto i = static_cast<std::size_t>(m);
    conv[i] = src[i] + eval_A(prm.A, d.u[i]);
  }
  const SpaceTimeField gs = apply_G_spacetime(stack_of(tg, grid, conv), table);

  DensityTrajectory out(tg, grid, 1);
  for (int m = 0; m <= tg.M; ++m)
    out.push(m, gs.slice(m) + src[static_cast<std::size_t>(m)]);
  return out;
}

void derive_fields(DensityTrajectory& traj, const SolverParams& prm, int from) {
  std::vector<ScalarField2D> rho(static_cast<std::size_t>(traj.tg.count()));
  for (int m = 0; m <= traj.tg.M; ++m) rho[static_cast<std::size_t>(m)] = traj.slice(m);
  DerivedStacks d;
  if (traj.derived && from > 0) {
    for (int m = 0; m < from; ++m) {
      const auto i = static_cast<std::size_t>(m);
      d.u.resize(rho.size());
      d.g.resize(rho.size());
      d.e.resize(rho.size());
      d.u[i] = traj.u.slice(m);
      d.g[i] = traj.g.slice(m);
      d.e[i] = traj.e.slice(m);
    }
  } else {
    from = 0;
  }
  derive_range(rho, prm, from, traj.tg.M, d);
  traj.u = stack_of(traj.tg, traj.grid, d.u);
  traj.g = stack_of(traj.tg, traj.grid, d.g);
  traj.e = field_stack(traj.tg, traj.grid, d.e);
  traj.derived = true;

  traj.ledger_rho.clear();
  traj.ledger_g.clear();
  for (int m = 0; m <= traj.tg.M; ++m) {
    const auto i = static_cast<std::size_t>(m);
    const double w = bracket(traj.tg.node(m));
    push_ledger(traj.ledger_rho, w * w * (traj.node_l1[i] + traj.node_sup[i]));
    push_ledger(traj.ledger_g,
                w * w * (lp_norm(d.g[i], Lp::one) + lp_norm(d.g[i], Lp::inf)));
  }
}

// ---------------------------------------------------------------------------
// local solve and continuation

namespace {

// Evenly spaced stride-aligned source targets in (lo, hi], always ending at hi.
std::vector<int> pick_targets(int lo, int hi, int per_slab, int stride) {
  std::vector<int> cands;
  for (int m = lo + 1; m <= hi; ++m)
    if (m % stride == 0) cands.push_back(m);
  if (cands.empty()) cands.push_back(hi);
  const int n = static_cast<int>(cands.size());
  const int per = (per_slab <= 0 || per_slab >= n) ? n : per_slab;
  std::vector<int> out;
  for (int i = 1; i <= per; ++i) {
    const int idx = static_cast<int>(std::lround(static_cast<double>(i) * n / per)) - 1;
    const int m = cands[static_cast<std::size_t>(std::clamp(idx, 0, n - 1))];
    if (out.empty() || m > out.back()) out.push_back(m);
  }
  if (out.back() != hi) out.push_back(hi);
  return out;
}

struct SlabEngine {
  const InitialData& f0;
  const SolverParams& prm;
  PeriodicGrid grid;
  double T0;
  int M0;

  TimeGrid tg{1.0, 2};
  std::vector<ScalarField2D> rho, ifree, ds;
  DerivedStacks d;
  std::vector<int> tnodes;             // global source targets, node 0 first
  std::vector<ScalarField2D> tvals;    // cached source slices at the targets
  double g_mark = std::numeric_limits<double>::infinity();
  double monitor_eps1 = std::numeric_limits<double>::infinity();
  bool breached = false;

  SlabEngine(const InitialData& f0_, const PeriodicGrid& g, double T0_, int M0_,
             const SolverParams& p)
      : f0(f0_), prm(p), grid(g), T0(T0_), M0(M0_) {}

  void extend(int slab) {
    tg = TimeGrid{slab * T0, slab * M0};
    const std::size_t count = static_cast<std::size_t>(tg.count());
    if (rho.empty()) {
      rho.assign(count, ScalarField2D(grid));
      rho[0] = free_transport_density(f0, 0.0, grid, prm.vg, prm.quad);
      for (std::size_t m = 1; m < count; ++m) rho[m] = rho[0];
      tnodes.assign(1, 0);
      tvals.assign(1, ScalarField2D(grid));
    } else {
      const ScalarField2D warm = rho.back();
      rho.resize(count, warm);
    }
    ifree.resize(count);
    ds.resize(count, ScalarField2D(grid));
    for (int m = tg.M - M0 + (tg.M == M0 ? 0 : 1); m <= tg.M; ++m)
      ifree[static_cast<std::size_t>(m)] =
          free_transport_density(f0, tg.node(m), grid, prm.vg, prm.quad);
  }

  double ledger_norm() {
    return trajectory_norm(stack_of(tg, grid, d.g), 1, prm.a, tg.T, prm.shifts).total;
  }

  void build_sources(int lo) {
    const FieldSampler sampler(field_stack(tg, grid, d.e), FieldSampler::Options{prm.sampler_refine, true});
    while (!tnodes.empty() && tnodes.back() > lo) {
      tnodes.pop_back();
      tvals.pop_back();
    }
    for (int m : pick_targets(lo, tg.M, prm.targets_per_slab, prm.quad.s_stride)) {
      tnodes.push_back(m);
      tvals.push_back(flow_source_slice(f0, prm.mu, sampler, m, prm.vg, prm.quad, true, true));
    }
    // Lagrange interpolation in time onto the slab nodes, 4-point windows
    for (int m = lo + 1; m <= tg.M; ++m) {
      const auto i = static_cast<std::size_t>(m);
      const auto hit = std::find(tnodes.begin(), tnodes.end(), m);
      if (hit != tnodes.end()) {
        ds[i] = tvals[static_cast<std::size_t>(hit - tnodes.begin())];
        continue;
      }
      const int n = static_cast<int>(tnodes.size());
      int jr = 0;
      while (jr < n && tnodes[static_cast<std::size_t>(jr)] < m) ++jr;
      const int first = std::clamp(jr - 2, 0, std::max(0, n - 4));
      const int last = std::min(first + 3, n - 1);
      ScalarField2D acc(grid);
      for (int a = first; a <= last; ++a) {
        double w = 1.0;
        for (int b = first; b <= last; ++b) {
          if (a == b) continue;
          w *= static_cast<double>(m - tnodes[static_cast<std::size_t>(b)]) /
               static_cast<double>(tnodes[static_cast<std::size_t>(a)] -
                                   tnodes[static_cast<std::size_t>(b)]);
        }
        acc = acc + tvals[static_cast<std::size_t>(a)] * w;
      }
      ds[i] = std::move(acc);
    }
  }

  // One slab of Picard sweeps.  Returns the iteration count; a monitored run
  // that already breaches the bootstrap ledger on the warm start stops before
  // sweeping so the breach is reported cleanly instead of diverging.
  int solve_slab(int slab, std::vector<double>* updates) {
    extend(slab);
    const int lo = slab == 1 ? 0 : tg.M - M0 + 1;
    const ResolventTable table(prm.mu, grid, tg, prm.xi_free);

    derive_range(rho, prm, lo, tg.M, d);
    if (ledger_norm() > monitor_eps1) {
      breached = true;
      return 0;
    }
    int bad_streak = 0;
    double prev_update = std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= prm.max_picard; ++iter) {
      const double g_now = marching_norm(d.g, tg, 0, tg.M);
      if (!(std::abs(g_now - g_mark) <= prm.flow_gate * prm.tol)) {
        build_sources(lo == 0 ? 0 : lo - 1);
        g_mark = g_now;
      }
      std::vector<ScalarField2D> conv(rho.size());
      for (int m = 0; m <= tg.M; ++m) {
        const auto i = static_cast<std::size_t>(m);
        conv[i] = ifree[i] + ds[i] + eval_A(prm.A, d.u[i]);
      }
      const SpaceTimeField gs = apply_G_spacetime(stack_of(tg, grid, conv), table);
      double update = 0.0;
      for (int m = lo; m <= tg.M; ++m) {
        const auto i = static_cast<std::size_t>(m);
        ScalarField2D next = gs.slice(m) + ifree[i] + ds[i];
        const ScalarField2D diff = next - rho[i];
        const double w = bracket(tg.node(m));
        update = std::max(update, w * w * (lp_norm(diff, Lp::one) + lp_norm(diff, Lp::inf)));
        rho[i] = std::move(next);
      }
      derive_range(rho, prm, lo, tg.M, d);
      if (updates) updates->push_back(update);
      if (update < prm.tol) return iter;
      bad_streak = update >= prev_update ? bad_streak + 1 : 0;
      if (bad_streak >= 3)
        throw Error("picard-divergence", "three non-contracting sweeps on slab " +
                                             std::to_string(slab));
      prev_update = update;
    }
    throw Error("local-solve-divergence",
                "no contraction to tolerance within the sweep budget");
  }

  DensityTrajectory finalize() {
    DensityTrajectory out(tg, grid, 1);
    for (int m = 0; m <= tg.M; ++m) out.push(m, rho[static_cast<std::size_t>(m)]);
    out.u = stack_of(tg, grid, d.u);
    out.g = stack_of(tg, grid, d.g);
    out.e = field_stack(tg, grid, d.e);
    out.derived = true;
    out.node_besov_l1.resize(out.node_l1.size());
    out.node_besov_sup.resize(out.node_l1.size());
    for (int m = 0; m <= tg.M; ++m) {
      const auto i = static_cast<std::size_t>(m);
      out.node_besov_l1[i] = besov_seminorm(rho[i], prm.a, Lp::one, prm.shifts);
      out.node_besov_sup[i] = besov_seminorm(rho[i], prm.a, Lp::inf, prm.shifts);
      const double w = bracket(tg.node(m));
      push_ledger(out.ledger_rho, w * w * (out.node_l1[i] + out.node_sup[i]));
      push_ledger(out.ledger_g, w * w * (lp_norm(d.g[i], Lp::one) + lp_norm(d.g[i], Lp::inf)));
    }
    return out;
  }
};

double smallness_functional(const ScalarField2D& rho0, double a, const ShiftSet& shifts) {
  double total = lp_norm(rho0, Lp::one) + lp_norm(rho0, Lp::inf);
  for (int ax = 0; ax < 2; ++ax) {
    const ScalarField2D dr = rho0.deriv(ax);
    total += besov_seminorm(dr, a, Lp::one, shifts) + besov_seminorm(dr, a, Lp::inf, shifts);
  }
  return total;
}

}  // namespace

DensityTrajectory local_solve(const InitialData& f0, const PeriodicGrid& grid, double T0, int M0,
                              const SolverParams& prm, SolveReport* report) {
  if (!(T0 > 0.0) || M0 < 1) throw Error("grid-mismatch", "empty local horizon");
  const ScalarField2D rho0 = free_transport_density(f0, 0.0, grid, prm.vg, prm.quad);
  const double small = smallness_functional(rho0, prm.a, prm.shifts);
  if (small > prm.eps2)
    throw Error("smallness-violation", "initial density functional " + std::to_string(small) +
                                           " exceeds eps2 = " + std::to_string(prm.eps2));

  SlabEngine engine(f0, grid, T0, M0, prm);
  std::vector<double> updates;
  const int iters = engine.solve_slab(1, &updates);
  DensityTrajectory out = engine.finalize();
  if (report) {
    report->iterations = iters;
    report->updates = updates;
    report->initial_norm = small;
    report->rho_norm =
        trajectory_norm(stack_of(out.tg, grid, engine.rho), 1, prm.a, T0, prm.shifts).total;
    report->u_norm = trajectory_norm(out.u, 1, prm.a, T0, prm.shifts).total;
    report->g_norm = trajectory_norm(out.g, 1, prm.a, T0, prm.shifts).total;
    report->C2 = small > 0.0 ? (report->rho_norm + report->u_norm) / small : 0.0;
  }
  return out;
}

ContinuationResult continuation(const InitialData& f0, const PeriodicGrid& grid, double T_max,
                                double T0, int M0, const SolverParams& prm) {
  const int slabs = static_cast<int>(std::lround(T_max / T0));
  if (slabs < 1 || std::abs(slabs * T0 - T_max) > 1e-9 * std::max(1.0, T_max))
    throw Error("grid-mismatch", "T_max must be a whole number of slabs");

  ContinuationResult res;
  res.state.eps1 = prm.eps1;
  {
    const ScalarField2D rho0 = free_transport_density(f0, 0.0, grid, prm.vg, prm.quad);
    const double small = smallness_functional(rho0, prm.a, prm.shifts);
    if (small > prm.eps2)
      throw Error("smallness-violation", "initial density functional " + std::to_string(small) +
                                             " exceeds eps2 = " + std::to_string(prm.eps2));
  }
  // |||f0||| converges fast in the lattice resolution, so a reduced phase
  // lattice keeps this entry-time constant cheap at production sizes.
  {
    const PeriodicGrid rg{std::min(grid.N, 16), grid.L};
    const VelocityGrid rv{std::min(prm.vg.Nv, 16), prm.vg.vmax};
    res.state.triple_norm = triple_norm_initial(f0, prm.a, prm.shifts, rg, rv);
  }

  SlabEngine engine(f0, grid, T0, M0, prm);
  engine.monitor_eps1 = prm.eps1;
  for (int slab = 1; slab <= slabs; ++slab) {
    const int iters = engine.solve_slab(slab, nullptr);
    const double ledger = engine.ledger_norm();
    res.state.slab_T.push_back(engine.tg.T);
    res.state.slab_iterations.push_back(iters);
    res.state.slab_ledger.push_back(ledger);
    res.state.T = engine.tg.T;
    res.state.ledger = ledger;
    if (engine.breached || ledger > prm.eps1) {
      res.state.status = "threshold-breach";
      break;
    }
    if (slab == slabs) res.state.status = "converged";
  }
  res.state.C1 =
      res.state.triple_norm > 0.0 ? res.state.ledger / res.state.triple_norm : 0.0;
  res.traj = engine.finalize();
  return res;
}

// ---------------------------------------------------------------------------
// phase-space reconstruction and scattering

namespace {

// Along the exact flow, int_0^t E(s, X) . grad mu(V) ds = mu(v) - mu(V_{0,t});
// substituting removes the time integral from the reconstruction entirely:
//   f(t, x, v) = f0(X_{0,t}, V_{0,t}) + mu(V_{0,t}) - mu(v).
// In particular mu + f = f0(X, V) + mu(V_{0,t}) >= 0 whenever mu + f0 factors
// are nonnegative, exactly as for the continuum solution.
struct MapsOnLattice {
  std::vector<Vec2> Y, W;
};

MapsOnLattice maps_at_node(const FieldSampler& sampler, int mt, const std::vector<Vec2>& xt,
                           const std::vector<Vec2>& vv, const SourceQuad& q) {
  MapsOnLattice maps;
  maps.Y.assign(xt.size(), Vec2{});
  maps.W.assign(xt.size(), Vec2{});
  if (mt == 0) return maps;
  const int stride = node_stride(mt, q.s_stride);
  label_march(sampler, mt, stride, q, xt, vv,
              [&](int m, double, std::size_t p, const Vec2& Y, const Vec2& W, const Vec2&) {
                if (m == 0) {
                  maps.Y[p] = Y;
                  maps.W[p] = W;
                }
              });
  return maps;
}

}  // namespace

PhaseField reconstruct_f(const DensityTrajectory& traj, const InitialData& f0,
                         const SolverParams& prm, double t) {
  DensityTrajectory derived;
  const DensityTrajectory* src = &traj;
  if (!traj.derived) {
    derived = traj;
    derive_fields(derived, prm);
    src = &derived;
  }
  const TimeGrid& tg = src->tg;
  const int mt = [&] {
    const double q = t / tg.dt();
    const int m = static_cast<int>(std::lround(q));
    if (std::abs(q - m) > 1e-9 * std::max(1.0, tg.T) || m < 0 || m > tg.M)
      throw Error("grid-mismatch", "reconstruction time is not a stored node");
    return m;
  }();

  PhaseField out;
  out.grid = PhaseGrid{src->grid, prm.vg};
  out.time = t;
  const PeriodicGrid& xg = src->grid;
  const VelocityGrid& vg = prm.vg;
  const std::size_t nv = static_cast<std::size_t>(vg.Nv) * vg.Nv;
  const std::size_t nx = static_cast<std::size_t>(xg.N) * xg.N;
  std::vector<Vec2> vnode(nv);
  for (int a = 0; a < vg.Nv; ++a)
    for (int b = 0; b < vg.Nv; ++b)
      vnode[static_cast<std::size_t>(a) * vg.Nv + b] = {vg.node(a), vg.node(b)};
  std::vector<Vec2> xt(nx * nv), vv(nx * nv);
  for (std::size_t i = 0; i < nx; ++i) {
    const Vec2 x{xg.node(static_cast<int>(i) / xg.N), xg.node(static_cast<int>(i) % xg.N)};
    for (std::size_t j = 0; j < nv; ++j) {
      xt[i * nv + j] = x - t * vnode[j];
      vv[i * nv + j] = vnode[j];
    }
  }
  SourceQuad q = prm.quad;
  q.x_stride = q.v_stride = 1;  // output lives on the full phase lattice
  MapsOnLattice maps;
  if (mt > 0) {
    const FieldSampler sampler(src->e, FieldSampler::Options{prm.sampler_refine, true});
    maps = maps_at_node(sampler, mt, xt, vv, q);
  } else {
    maps.Y.assign(xt.size(), Vec2{});
    maps.W.assign(xt.size(), Vec2{});
  }
  out.values.resize(nx * nv);
  for (std::size_t p = 0; p < nx * nv; ++p) {
    const Vec2 V = vv[p] + maps.W[p];
    out.values[p] =
        f0(wrap2(xg, xt[p] + maps.Y[p]), V) + prm.mu.eval_mu(V) - prm.mu.eval_mu(vv[p]);
  }
  return out;
}

ScatteringProfile scattering_profile(const DensityTrajectory& traj, const InitialData& f0,
                                     const SolverParams& prm, double conv_tol) {
  DensityTrajectory derived;
  const DensityTrajectory* src = &traj;
  if (!traj.derived) {
    derived = traj;
    derive_fields(derived, prm);
    src = &derived;
  }
  const TimeGrid& tg = src->tg;
  const PeriodicGrid& xg = src->grid;
  const VelocityGrid& vg = prm.vg;

  std::vector<int> nodes;
  for (int j = 3; j >= 0; --j) {
    const double t = tg.T / static_cast<double>(1 << j);
    const double q = t / tg.dt();
    const int m = static_cast<int>(std::lround(q));
    if (std::abs(q - m) > 1e-9 * std::max(1.0, tg.T))
      throw Error("grid-mismatch", "dyadic output times must be horizon nodes");
    nodes.push_back(m);
  }

  const std::size_t nv = static_cast<std::size_t>(vg.Nv) * vg.Nv;
  const std::size_t nx = static_cast<std::size_t>(xg.N) * xg.N;
  std::vector<Vec2> vnode(nv);
  for (int a = 0; a < vg.Nv; ++a)
    for (int b = 0; b < vg.Nv; ++b)
      vnode[static_cast<std::size_t>(a) * vg.Nv + b] = {vg.node(a), vg.node(b)};
  // scattering maps live on the sheared labels, so the lattice itself is the
  // label set: X_{0,t}(x + t v, v) = x + Y_{0,t}(x, v)
  std::vector<Vec2> xt(nx * nv), vv(nx * nv);
  for (std::size_t i = 0; i < nx; ++i) {
    const Vec2 x{xg.node(static_cast<int>(i) / xg.N), xg.node(static_cast<int>(i) % xg.N)};
    for (std::size_t j = 0; j < nv; ++j) {
      xt[i * nv + j] = x;
      vv[i * nv + j] = vnode[j];
    }
  }

  const FieldSampler sampler(src->e, FieldSampler::Options{prm.sampler_refine, true});
  std::vector<MapsOnLattice> maps;
  for (int m : nodes) maps.push_back(maps_at_node(sampler, m, xt, vv, prm.quad));

  auto moving_frame = [&](const MapsOnLattice& mp) {
    std::vector<double> f(nx * nv);
    for (std::size_t p = 0; p < nx * nv; ++p) {
      const Vec2 V = vv[p] + mp.W[p];
      f[p] = f0(wrap2(xg, xt[p] + mp.Y[p]), V) + prm.mu.eval_mu(V) - prm.mu.eval_mu(vv[p]);
    }
    return f;
  };

  const MapsOnLattice& fin = maps.back();
  const MapsOnLattice& half = maps[maps.size() - 2];
  double gap = 0.0;
  for (std::size_t p = 0; p < nx * nv; ++p)
    gap = std::max(gap, (fin.Y[p] - half.Y[p]).norm() + (fin.W[p] - half.W[p]).norm());
  if (gap > conv_tol)
    throw Error("scattering-not-converged", "dyadic map difference " + std::to_string(gap) +
                                                " exceeds " + std::to_string(conv_tol));

  ScatteringProfile prof;
  prof.grid = PhaseGrid{xg, vg};
  prof.Y_inf = fin.Y;
  prof.W_inf = fin.W;
  prof.converged_diff = gap;
  prof.Y_sup = prof.W_sup = 0.0;
  for (std::size_t p = 0; p < nx * nv; ++p) {
    prof.Y_sup = std::max(prof.Y_sup, fin.Y[p].norm());
    prof.W_sup = std::max(prof.W_sup, fin.W[p].norm());
  }
  prof.f_inf.grid = prof.grid;
  prof.f_inf.time = std::numeric_limits<double>::infinity();
  prof.f_inf.values = moving_frame(fin);
  for (std::size_t j = 0; j + 1 < maps.size(); ++j) {
    const std::vector<double> f = moving_frame(maps[j]);
    double diff = 0.0;
    for (std::size_t p = 0; p < nx * nv; ++p)
      diff = std::max(diff, std::abs(f[p] - prof.f_inf.values[p]));
    prof.times.push_back(tg.node(nodes[j]));
    prof.decay.push_back(diff);
  }
  return prof;
}

}  // namespace landau
