#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "landau/characteristics.hpp"

using namespace landau;

namespace {

// band-limited test field from a potential u; E = -grad u, scaled in time by g(t)
SpaceTimeVectorField make_field(const TimeGrid& tg, const PeriodicGrid& g, double amp,
                                const std::function<double(double)>& gt) {
  SpaceTimeVectorField E(tg, g);
  for (int m = 0; m <= tg.M; ++m) {
    const double w = amp * gt(tg.node(m));
    E.slice(m).x = ScalarField2D::from_function(
        g, [&](double x, double y) { return w * (std::sin(x) - 0.5 * std::cos(x + y)); });
    E.slice(m).y = ScalarField2D::from_function(
        g, [&](double x, double y) { return w * (-0.5 * std::cos(x + y)); });
  }
  return E;
}

Vec2 field_eval(double amp, double gt, const Vec2& p) {
  return {amp * gt * (std::sin(p.x) - 0.5 * std::cos(p.x + p.y)),
          amp * gt * (-0.5 * std::cos(p.x + p.y))};
}

double wrap_dist(double a, double b, double L) {
  double d = std::fmod(a - b, 2.0 * L);
  if (d > L) d -= 2.0 * L;
  if (d < -L) d += 2.0 * L;
  return std::abs(d);
}

}  // namespace

TEST_CASE("sampler reproduces stored nodes and commutes with differentiation") {
  PeriodicGrid g(32, M_PI);
  TimeGrid tg(1.0, 10);
  auto E = make_field(tg, g, 0.7, [](double t) { return 1.0 + 0.5 * t - 0.25 * t * t; });
  FieldSampler smp(E, {.refine = 8, .precompute = true});

  // node reproduction, both paths
  double worst_exact = 0.0, worst_fast = 0.0;
  for (int m : {0, 3, 10})
    for (int i = 0; i < g.N; i += 7)
      for (int j = 0; j < g.N; j += 5) {
        const Vec2 x{g.node(i), g.node(j)};
        const Vec2 stored{E.slice(m).x(i, j), E.slice(m).y(i, j)};
        worst_exact = std::max(worst_exact, (smp.value_exact(tg.node(m), x) - stored).norm());
        Vec2 e;
        Mat2 de;
        smp.eval_node(m, x, e, de);
        worst_fast = std::max(worst_fast, (e - stored).norm());
      }
  CHECK(worst_exact < 1e-13);
  CHECK(worst_fast < 1e-13);

  // gradient of the interpolant equals the interpolated gradient
  const double h = 1e-3;
  double worst_grad = 0.0;
  for (const Vec2& x : {Vec2{0.37, -1.2}, Vec2{2.9, 0.01}, Vec2{-3.0, 2.2}}) {
    const double t = 0.44;
    const Mat2 gE = smp.grad_exact(t, x);
    for (int ax = 0; ax < 2; ++ax) {
      const Vec2 dp = ax == 0 ? Vec2{h, 0.0} : Vec2{0.0, h};
      // 4-point central difference of the exact interpolant
      const Vec2 d = (1.0 / (12.0 * h)) *
                     (8.0 * (smp.value_exact(t, x + dp) - smp.value_exact(t, x - dp)) -
                      (smp.value_exact(t, x + 2.0 * dp) - smp.value_exact(t, x - 2.0 * dp)));
      worst_grad = std::max(worst_grad, std::abs((ax == 0 ? gE.a11 : gE.a12) - d.x));
      worst_grad = std::max(worst_grad, std::abs((ax == 0 ? gE.a21 : gE.a22) - d.y));
    }
  }
  CHECK(worst_grad < 1e-8);

  // Hessian: symmetric, consistent with gradient differences
  const Mat2 H = smp.hess_exact(0.3, {0.8, -0.4}, 0);
  CHECK(H.a12 == doctest::Approx(H.a21).epsilon(1e-12));
  const Mat2 gp = smp.grad_exact(0.3, {0.8 + h, -0.4});
  const Mat2 gm = smp.grad_exact(0.3, {0.8 - h, -0.4});
  CHECK(H.a11 == doctest::Approx((gp.a11 - gm.a11) / (2 * h)).epsilon(1e-4));

  // fast path tracks the exact interpolant off-lattice
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ux(-M_PI, M_PI), ut(0.0, 1.0);
  double dv_fast = 0.0, dg_fast = 0.0;
  for (int q = 0; q < 40; ++q) {
    const Vec2 x{ux(rng), ux(rng)};
    const double t = ut(rng);
    dv_fast = std::max(dv_fast, (smp.value(t, x) - smp.value_exact(t, x)).norm());
    dg_fast = std::max(dg_fast, (smp.grad(t, x) - smp.grad_exact(t, x)).max_abs());
  }
  CHECK(dv_fast < 1e-6);
  CHECK(dg_fast < 1e-5);

  // quadratic time profile is reproduced exactly on interior intervals
  const double tmid = 0.55;  // inside [0.5, 0.6]
  const double gtm = 1.0 + 0.5 * tmid - 0.25 * tmid * tmid;
  const Vec2 xq{1.13, -0.76};
  CHECK((smp.value(tmid, xq) - field_eval(0.7, gtm, xq)).norm() < 1e-6);

  CHECK_THROWS_AS(smp.node_index(0.53), Error);
  CHECK_THROWS_AS(smp.value(1.5, xq), Error);
  CHECK(smp.node_sup() > 0.0);
}

TEST_CASE("zero field gives identically zero flow maps") {
  PeriodicGrid g(8, M_PI);
  TimeGrid tg(1.0, 20);
  SpaceTimeVectorField E(tg, g);
  FieldSampler smp(E, {.refine = 2, .precompute = true});
  PhaseGrid pg{g, VelocityGrid(8, 2.0)};

  auto flow = compute_flow(smp, 0.0, 1.0, pg);
  for (std::size_t p = 0; p < pg.size(); p += 17) {
    CHECK(flow.Y[p].norm() == 0.0);
    CHECK(flow.W[p].norm() == 0.0);
    CHECK(flow.grad_x_Y[p].max_abs() == 0.0);
    CHECK(flow.grad_v_W[p].max_abs() == 0.0);
  }
  CHECK(liouville_defect(flow, 2) < 1e-12);

  invert_flow(flow, smp);
  for (std::size_t p = 0; p < pg.size(); p += 23) {
    const int jy = static_cast<int>(p % pg.v.Nv);
    const int jx = static_cast<int>((p / pg.v.Nv) % pg.v.Nv);
    CHECK(flow.Psi[p].x == doctest::Approx(pg.v.node(jx)).epsilon(1e-12));
    CHECK(flow.Psi[p].y == doctest::Approx(pg.v.node(jy)).epsilon(1e-12));
  }
}

TEST_CASE("constant field integrates in closed form") {
  const Vec2 e{0.04, -0.025};
  PeriodicGrid g(8, 4.0);
  TimeGrid tg(2.0, 40);
  SpaceTimeVectorField E(tg, g);
  for (int m = 0; m <= tg.M; ++m) {
    E.slice(m).x = ScalarField2D::from_function(g, [&](double, double) { return e.x; });
    E.slice(m).y = ScalarField2D::from_function(g, [&](double, double) { return e.y; });
  }
  FieldSampler smp(E, {.refine = 2, .precompute = true});
  PhaseGrid pg{g, VelocityGrid(6, 1.5)};

  const double s = 0.5, t = 2.0;
  auto flow = compute_flow(smp, s, t, pg);
  const Vec2 Yex = (0.5 * (t - s) * (t - s)) * e;
  const Vec2 Wex = (-(t - s)) * e;
  double dy = 0.0, dw = 0.0, dj = 0.0;
  for (std::size_t p = 0; p < pg.size(); ++p) {
    dy = std::max(dy, (flow.Y[p] - Yex).norm());
    dw = std::max(dw, (flow.W[p] - Wex).norm());
    dj = std::max(dj, flow.grad_x_Y[p].max_abs());
    dj = std::max(dj, flow.grad_v_W[p].max_abs());
  }
  CHECK(dy < 1e-12);
  CHECK(dw < 1e-12);
  CHECK(dj < 1e-12);
  CHECK(liouville_defect(flow, 1) < 1e-12);

  // Psi = v + e (t-s)/2 solves the affine inversion exactly
  invert_flow(flow, smp, 1e-11);
  const Vec2 corr = (0.5 * (t - s)) * e;
  double dpsi = 0.0;
  for (std::size_t p = 0; p < pg.size(); ++p) {
    const int jy = static_cast<int>(p % pg.v.Nv);
    const int jx = static_cast<int>((p / pg.v.Nv) % pg.v.Nv);
    const Vec2 v{pg.v.node(jx), pg.v.node(jy)};
    dpsi = std::max(dpsi, (flow.Psi[p] - (v + corr)).norm());
  }
  CHECK(dpsi < 1e-9);
}

TEST_CASE("smooth static field matches a Runge-Kutta oracle") {
  PeriodicGrid g(16, M_PI);
  TimeGrid tg(0.8, 160);
  const double amp = 0.05;
  auto E = make_field(tg, g, amp, [](double) { return 1.0; });
  FieldSampler smp(E, {.refine = 8, .precompute = true});
  PhaseGrid pg{g, VelocityGrid(8, 1.5)};

  const double t = 0.8;
  auto fam = compute_flow_family(smp, t, {0.0, 0.4}, pg, 1e-6, 4);

  auto rk_flow = [&](const Vec2& x0, const Vec2& v0, double s_end) {
    // backward integration of dX/ds = V, dV/ds = E(X) from time t to s_end
    const int steps = 800;
    const double h = (s_end - t) / steps;
    Vec2 X = x0, V = v0;
    auto acc = [&](const Vec2& p) { return field_eval(amp, 1.0, p); };
    for (int k = 0; k < steps; ++k) {
      const Vec2 k1x = V, k1v = acc(X);
      const Vec2 k2x = V + (h / 2) * k1v, k2v = acc(X + (h / 2) * k1x);
      const Vec2 k3x = V + (h / 2) * k2v, k3v = acc(X + (h / 2) * k2x);
      const Vec2 k4x = V + h * k3v, k4v = acc(X + h * k3x);
      X += (h / 6) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      V += (h / 6) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    return std::pair<Vec2, Vec2>{X, V};
  };

  for (const auto& flow : fam) {
    double dy = 0.0, dw = 0.0;
    for (int ix = 0; ix < pg.x.N; ix += 4)
      for (int iy = 0; iy < pg.x.N; iy += 4)
        for (int jx = 1; jx < pg.v.Nv; jx += 2)
          for (int jy = 1; jy < pg.v.Nv; jy += 2) {
            const Vec2 xt{pg.x.node(ix), pg.x.node(iy)};
            const Vec2 v{pg.v.node(jx), pg.v.node(jy)};
            const auto [X, V] = rk_flow(xt + t * v, v, flow.s);
            const std::size_t p = pg.index(ix, iy, jx, jy);
            const Vec2 Yrk = X - (xt + flow.s * v);
            dy = std::max(dy, wrap_dist(flow.Y[p].x, Yrk.x, pg.x.L));
            dy = std::max(dy, wrap_dist(flow.Y[p].y, Yrk.y, pg.x.L));
            dw = std::max(dw, (flow.W[p] - (V - v)).norm());
          }
    CHECK(dy < 1e-6);
    CHECK(dw < 1e-6);
  }

  CHECK(liouville_defect(fam.front(), 2) < 1e-5);
}

TEST_CASE("flow Jacobians match finite differences of the sampled maps") {
  PeriodicGrid g(16, M_PI);
  TimeGrid tg(0.5, 50);
  auto E = make_field(tg, g, 0.01, [](double t) { return 1.0 + t; });
  FieldSampler smp(E, {.refine = 8, .precompute = true});
  VelocityGrid vg(8, 1.5);
  PhaseGrid pg{g, vg};

  auto flow = compute_flow(smp, 0.0, 0.5, pg);
  const double dx = g.dx(), dv = vg.dv();
  auto richardson = [](const Vec2& p1, const Vec2& m1, const Vec2& p2, const Vec2& m2, double h) {
    return (1.0 / (12.0 * h)) * (8.0 * (p1 - m1) - (p2 - m2));
  };

  double worst = 0.0;
  for (int ix = 0; ix < g.N; ix += 3)
    for (int iy = 0; iy < g.N; iy += 3)
      for (int jx = 2; jx < vg.Nv - 2; ++jx)
        for (int jy = 2; jy < vg.Nv - 2; ++jy) {
          const std::size_t p = pg.index(ix, iy, jx, jy);
          auto wrapi = [&](int i) { return (i % g.N + g.N) % g.N; };
          // d/dx1 of Y against grad_x_Y column 1
          const Vec2 fd_x = richardson(flow.Y[pg.index(wrapi(ix + 1), iy, jx, jy)],
                                       flow.Y[pg.index(wrapi(ix - 1), iy, jx, jy)],
                                       flow.Y[pg.index(wrapi(ix + 2), iy, jx, jy)],
                                       flow.Y[pg.index(wrapi(ix - 2), iy, jx, jy)], dx);
          worst = std::max(worst, std::abs(fd_x.x - flow.grad_x_Y[p].a11));
          worst = std::max(worst, std::abs(fd_x.y - flow.grad_x_Y[p].a21));
          // d/dv1 of Y and W against the v-Jacobian column 1
          const Vec2 fdv_y = richardson(flow.Y[pg.index(ix, iy, jx + 1, jy)],
                                        flow.Y[pg.index(ix, iy, jx - 1, jy)],
                                        flow.Y[pg.index(ix, iy, jx + 2, jy)],
                                        flow.Y[pg.index(ix, iy, jx - 2, jy)], dv);
          worst = std::max(worst, std::abs(fdv_y.x - flow.grad_v_Y[p].a11));
          worst = std::max(worst, std::abs(fdv_y.y - flow.grad_v_Y[p].a21));
          const Vec2 fdv_w = richardson(flow.W[pg.index(ix, iy, jx + 1, jy)],
                                        flow.W[pg.index(ix, iy, jx - 1, jy)],
                                        flow.W[pg.index(ix, iy, jx + 2, jy)],
                                        flow.W[pg.index(ix, iy, jx - 2, jy)], dv);
          worst = std::max(worst, std::abs(fdv_w.x - flow.grad_v_W[p].a11));
          worst = std::max(worst, std::abs(fdv_w.y - flow.grad_v_W[p].a21));
        }
  CHECK(worst < 1e-5);
}

TEST_CASE("flow families compose") {
  PeriodicGrid g(32, M_PI);
  TimeGrid tg(1.0, 100);
  auto E = make_field(tg, g, 1e-3, [](double t) { return 1.0 + 0.3 * std::sin(t); });
  FieldSampler smp(E, {.refine = 4, .precompute = true});
  PhaseGrid pg{g, VelocityGrid(12, 1.8)};

  auto full = compute_flow_family(smp, 1.0, {0.0, 0.5}, pg);
  auto lower = compute_flow(smp, 0.0, 0.5, pg);
  const FlowMaps& f01 = full[0];   // (s,t) = (0, 1)
  const FlowMaps& fmid = full[1];  // (s,t) = (0.5, 1)

  double worst_x = 0.0, worst_v = 0.0;
  for (int ix = 0; ix < g.N; ix += 5)
    for (int iy = 0; iy < g.N; iy += 5)
      for (int jx = 3; jx < pg.v.Nv - 3; jx += 2)
        for (int jy = 3; jy < pg.v.Nv - 3; jy += 2) {
          const std::size_t p = pg.index(ix, iy, jx, jy);
          const Vec2 xt{pg.x.node(ix), pg.x.node(iy)};
          const Vec2 v{pg.v.node(jx), pg.v.node(jy)};
          // physical point at time 1 with sheared label xt
          const Vec2 X1 = xt + v;  // t v with t = 1
          const Vec2 Xdirect = xt + f01.Y[p];
          const Vec2 Vdirect = v + f01.W[p];
          // stop at t = 0.5 first
          const Vec2 Xmid = xt + 0.5 * v + fmid.Y[p];
          const Vec2 Vmid = v + fmid.W[p];
          // then continue with the (0, 0.5) map: sheared label is X - 0.5 V
          const Vec2 lab{Xmid.x - 0.5 * Vmid.x, Xmid.y - 0.5 * Vmid.y};
          const Vec2 Xcomp = lab + lower.sample_Y(lab, Vmid);
          const Vec2 Vcomp = Vmid + lower.sample_W(lab, Vmid);
          worst_x = std::max(worst_x, wrap_dist(Xdirect.x, Xcomp.x, g.L));
          worst_x = std::max(worst_x, wrap_dist(Xdirect.y, Xcomp.y, g.L));
          worst_v = std::max(worst_v, (Vdirect - Vcomp).norm());
          (void)X1;
        }
  CHECK(worst_x < 1e-6);
  CHECK(worst_v < 1e-6);

  // a single compute_flow reproduces the family snapshot bit for bit
  auto single = compute_flow(smp, 0.5, 1.0, pg);
  CHECK(single.Y[pg.index(3, 4, 5, 6)].x == fmid.Y[pg.index(3, 4, 5, 6)].x);
  CHECK(single.W[pg.index(9, 2, 7, 4)].y == fmid.W[pg.index(9, 2, 7, 4)].y);
}

TEST_CASE("oversized fields trip the divergence guard") {
  PeriodicGrid g(16, M_PI);
  TimeGrid tg(2.0, 20);
  auto E = make_field(tg, g, 60.0, [](double) { return 1.0; });
  FieldSampler smp(E, {.refine = 2, .precompute = true});
  PhaseGrid pg{g, VelocityGrid(6, 1.0)};
  try {
    compute_flow(smp, 0.0, 2.0, pg, 1e-8, 4);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == "picard-divergence");
  }
}

TEST_CASE("inverse map satisfies its defining relation and stays near v") {
  PeriodicGrid g(16, M_PI);
  TimeGrid tg(1.0, 80);
  auto E = make_field(tg, g, 0.02, [](double t) { return std::exp(-0.2 * t); });
  FieldSampler smp(E, {.refine = 8, .precompute = true});
  PhaseGrid pg{g, VelocityGrid(16, 2.0)};

  auto flow = compute_flow(smp, 0.0, 1.0, pg);
  invert_flow(flow, smp, 1e-10);

  std::mt19937 rng(21);
  std::uniform_real_distribution<double> uu(0.0, 1.0);
  double worst = 0.0, worst_dev = 0.0;
  const double ts = flow.t - flow.s;
  for (int q = 0; q < 10000; ++q) {
    const int ix = static_cast<int>(uu(rng) * g.N) % g.N;
    const int iy = static_cast<int>(uu(rng) * g.N) % g.N;
    const int jx = 4 + static_cast<int>(uu(rng) * (pg.v.Nv - 8));
    const int jy = 4 + static_cast<int>(uu(rng) * (pg.v.Nv - 8));
    const std::size_t p = pg.index(ix, iy, jx, jy);
    const Vec2 x{g.node(ix), g.node(iy)};
    const Vec2 v{pg.v.node(jx), pg.v.node(jy)};
    const Vec2 psi = flow.Psi[p];
    const Vec2 xq{x.x - flow.t * psi.x, x.y - flow.t * psi.y};
    const Vec2 defect = ts * (psi - v) - flow.sample_Y(xq, psi);
    worst = std::max(worst, defect.norm());
    worst_dev = std::max(worst_dev, (psi - v).norm());
  }
  CHECK(worst < 1e-10);
  CHECK(worst_dev > 0.0);
  CHECK(worst_dev < 0.1);  // smallness regime: |Psi - v| = O(field)
}

TEST_CASE("flow diagnostics scale linearly in the field and vanish at zero") {
  PeriodicGrid g(16, M_PI);
  TimeGrid tg(2.0, 100);
  VelocityGrid vg(12, 2.0);
  PhaseGrid pg{g, vg};
  const auto shifts = ShiftSet::dyadic(vg.vmax / 4.0, 6);
  const std::vector<double> ladder{0.0, 0.5, 1.0, 2.0};

  SpaceTimeVectorField Z(tg, g);
  FieldSampler zs(Z, {.refine = 2, .precompute = true});
  auto zfam = compute_flow_family(zs, 2.0, ladder, pg);
  auto zd = flow_diagnostics(zfam, 0.5, shifts);
  for (const auto& c : zd.summary.components) CHECK(c.value == 0.0);

  auto run = [&](double amp) {
    auto E = make_field(tg, g, amp, [](double t) { return std::exp(-0.3 * t); });
    FieldSampler smp(E, {.refine = 8, .precompute = true});
    auto fam = compute_flow_family(smp, 2.0, ladder, pg);
    return flow_diagnostics(fam, 0.5, shifts, amp, 2);
  };
  const auto d1 = run(1e-3);
  const auto d2 = run(5e-4);
  REQUIRE(d1.summary.components.size() == 7);
  for (std::size_t c = 0; c < 7; ++c) {
    CHECK(d1.summary.components[c].value > 0.0);
    const double ratio = d1.summary.components[c].value / d2.summary.components[c].value;
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.1));
  }
  CHECK(d1.rows.size() == ladder.size());
  CHECK(d1.ratio > 0.0);
  // weights: the s = 0 row carries bracket weight 1, so wY there is sup |Y|
  CHECK(d1.rows[0].s == 0.0);
  CHECK(d1.rows[0].wY > 0.0);
}
