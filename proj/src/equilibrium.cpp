// Equilibrium profiles, their radial Fourier factors, and the Penrose scan.
//
// Radial profiles use the Hankel form  mu_hat(eta) = F(|eta|),
//     F(s) = 2 pi int_0^inf m(r) J0(r s) r dr,
// evaluated once on an s-grid and splined.  The dispersion kernel then costs
// one spline lookup per (t, xi) point, which keeps the tau-xi scan cheap.

#include "landau/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "landau/quadrature.hpp"

namespace landau {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// cubic spline: y = a + b u + c u^2 + d u^3 on [x_i, x_{i+1}], u = t - x_i.
// Endpoints are clamped to a prescribed slope when given (NaN selects the
// natural condition); radial profiles are clamped flat at 0 to avoid the
// O(h^2) natural-spline boundary artifact.
struct CubicSpline {
  std::vector<double> x, a, b, c, d;

  static constexpr double kNatural = std::numeric_limits<double>::quiet_NaN();

  static CubicSpline build(const std::vector<double>& xs, const std::vector<double>& ys,
                           double left_slope = kNatural, double right_slope = kNatural) {
    const int n = static_cast<int>(xs.size());
    CubicSpline s;
    s.x = xs;
    s.a = ys;
    s.b.assign(n, 0.0);
    s.c.assign(n, 0.0);
    s.d.assign(n, 0.0);
    if (n < 3) {
      if (n == 2) s.b[0] = (ys[1] - ys[0]) / (xs[1] - xs[0]);
      return s;
    }
    const bool cl = !std::isnan(left_slope), cr = !std::isnan(right_slope);
    std::vector<double> h(n - 1), alpha(n, 0.0), l(n), mu(n), z(n);
    for (int i = 0; i + 1 < n; ++i) h[i] = xs[i + 1] - xs[i];
    if (cl) alpha[0] = 3.0 * ((ys[1] - ys[0]) / h[0] - left_slope);
    for (int i = 1; i + 1 < n; ++i)
      alpha[i] = 3.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
    if (cr) alpha[n - 1] = 3.0 * (right_slope - (ys[n - 1] - ys[n - 2]) / h[n - 2]);
    l[0] = cl ? 2.0 * h[0] : 1.0;
    mu[0] = cl ? 0.5 : 0.0;
    z[0] = cl ? alpha[0] / l[0] : 0.0;
    for (int i = 1; i + 1 < n; ++i) {
      l[i] = 2.0 * (xs[i + 1] - xs[i - 1]) - h[i - 1] * mu[i - 1];
      mu[i] = h[i] / l[i];
      z[i] = (alpha[i] - h[i - 1] * z[i - 1]) / l[i];
    }
    if (cr) {
      l[n - 1] = h[n - 2] * (2.0 - mu[n - 2]);
      z[n - 1] = (alpha[n - 1] - h[n - 2] * z[n - 2]) / l[n - 1];
      s.c[n - 1] = z[n - 1];
    } else {
      s.c[n - 1] = 0.0;
    }
    for (int j = n - 2; j >= 0; --j) {
      s.c[j] = z[j] - mu[j] * s.c[j + 1];
      s.b[j] = (ys[j + 1] - ys[j]) / h[j] - h[j] * (s.c[j + 1] + 2.0 * s.c[j]) / 3.0;
      s.d[j] = (s.c[j + 1] - s.c[j]) / (3.0 * h[j]);
    }
    return s;
  }

  int segment(double t) const {
    int lo = 0, hi = static_cast<int>(x.size()) - 1;
    while (hi - lo > 1) {
      int mid = (lo + hi) / 2;
      (x[mid] <= t ? lo : hi) = mid;
    }
    return lo;
  }

  double eval(double t) const {
    const int i = segment(t);
    const double u = t - x[i];
    return a[i] + u * (b[i] + u * (c[i] + u * d[i]));
  }

  double deriv(double t) const {
    const int i = segment(t);
    const double u = t - x[i];
    return b[i] + u * (2.0 * c[i] + 3.0 * u * d[i]);
  }

  void scale(double f) {
    for (auto* v : {&a, &b, &c, &d})
      for (double& y : *v) y *= f;
  }
};

double bessel_j0(double x) { return std::cyl_bessel_j(0.0, std::abs(x)); }

}  // namespace

struct EquilibriumProfile::Table {
  CubicSpline m;      // radial profile m(r) on [0, r_last]
  double r_last = 0.0;
  bool tail = false;
  double tail_A = 0.0, tail_b = 1.0;  // m(r) ~ A e^{-b r} past r_last
  int max_blocks = 8;

  // radial Fourier factor on [0, s_hi], built on first Fourier-side query
  mutable CubicSpline F;
  mutable double s_hi = 0.0;
  mutable double env_cut = 0.0;
  mutable std::once_flag F_once;

  double eval_m(double r) const {
    if (r <= r_last) return m.eval(r);
    if (tail) return tail_A * std::exp(-tail_b * r);
    throw Error("profile-out-of-range",
                "tabulated profile queried at r=" + std::to_string(r) +
                    " beyond last knot with no tail model");
  }

  double eval_m_deriv(double r) const {
    if (r <= r_last) return m.deriv(r);
    if (tail) return -tail_b * tail_A * std::exp(-tail_b * r);
    throw Error("profile-out-of-range", "tabulated profile gradient beyond last knot");
  }

  // F(s) from the spline plus the exponential tail piece
  double hankel(double s, double tol) const {
    auto f = [&](double r) { return cplx(m.eval(r) * bessel_j0(r * s) * r, 0.0); };
    double val = kTwoPi * adaptive_simpson(f, 0.0, r_last, tol).real();
    if (tail && tail_A != 0.0) {
      const double r_inf = r_last + 40.0 / tail_b;
      auto g = [&](double r) { return cplx(tail_A * std::exp(-tail_b * r) * bessel_j0(r * s) * r, 0.0); };
      val += kTwoPi * adaptive_simpson(g, r_last, r_inf, tol).real();
    }
    return val;
  }

  void ensure_F() const {
    std::call_once(F_once, [&] {
      // expanding s-grid; stop once s|F(s)| has stayed below 1e-12 of the
      // running peak for a whole block (and s is past the peak)
      std::vector<double> sg, Fg;
      double peak = 0.0;
      double s = 0.0;
      const double block = 4.0;
      for (int blk = 0; blk < max_blocks; ++blk) {
        const double ds = (s < 16.0) ? 0.025 : 0.1;
        double block_max = 0.0;
        const double s_end = s + block;
        for (; s < s_end - 0.5 * ds; s += ds) {
          sg.push_back(s);
          Fg.push_back(hankel(s, 1e-11));
          const double env = s * std::abs(Fg.back());
          peak = std::max(peak, env);
          block_max = std::max(block_max, env);
        }
        if (blk >= 2 && block_max < 1e-12 * peak) break;
      }
      sg.push_back(s);
      Fg.push_back(hankel(s, 1e-11));
      s_hi = s;
      F = CubicSpline::build(sg, Fg, 0.0, 0.0);

      double ds = 0.01, pk = 0.0, cut = s_hi;
      for (double u = 0.0; u <= s_hi; u += ds) pk = std::max(pk, u * std::abs(F.eval(u)));
      for (double u = s_hi; u >= 0.0; u -= ds)
        if (u * std::abs(F.eval(u)) >= 1e-12 * pk) { cut = u + ds; break; }
      env_cut = cut;
    });
  }
};

EquilibriumProfile EquilibriumProfile::maxwellian(double vmax) {
  EquilibriumProfile p;
  p.kind_ = Kind::maxwellian;
  p.vmax_ = vmax;
  p.decay_order_ = 99.0;
  p.compute_envelope_cut();
  return p;
}

EquilibriumProfile EquilibriumProfile::two_bump(double u0, double vmax) {
  EquilibriumProfile p;
  p.kind_ = Kind::two_bump;
  p.vmax_ = vmax;
  p.decay_order_ = 99.0;
  p.u0_ = std::abs(u0);
  const double sup = p.eval_mu(Vec2{p.u0_, 0.0});
  if (p.eval_mu(Vec2{vmax, 0.0}) > 1e-10 * sup)
    throw Error("velocity-truncation-breach",
                "two-bump profile not negligible at vmax; increase vmax");
  p.compute_envelope_cut();
  return p;
}

EquilibriumProfile EquilibriumProfile::tabulated(std::vector<double> r, std::vector<double> m,
                                                 bool tail_model, double decay_order,
                                                 double vmax) {
  if (r.size() != m.size() || r.size() < 4)
    throw Error("profile-out-of-range", "tabulated profile needs >= 4 matching knots");
  if (std::abs(r.front()) > 1e-12)
    throw Error("profile-out-of-range", "tabulated profile must start at r=0");
  for (size_t i = 0; i + 1 < r.size(); ++i)
    if (!(r[i] < r[i + 1]))
      throw Error("profile-out-of-range", "tabulated radii must be strictly increasing");
  for (double y : m)
    if (!std::isfinite(y) || y < -1e-12)
      throw Error("profile-out-of-range", "tabulated profile values must be finite and >= 0");
  if (decay_order < 7.0)
    throw Error("profile-out-of-range", "decay order must be at least 7");

  auto tab = std::make_shared<Table>();
  tab->r_last = r.back();
  tab->m = CubicSpline::build(r, m, 0.0);  // radial smoothness: m'(0) = 0
  if (tail_model) {
    const double mv = m.back(), md = tab->m.deriv(tab->r_last);
    if (!(mv > 0.0) || !(md < 0.0))
      throw Error("profile-out-of-range",
                  "tail model needs a positive, decreasing profile at the last knot");
    tab->tail = true;
    tab->tail_b = -md / mv;
    tab->tail_A = mv * std::exp(tab->tail_b * tab->r_last);
  }
  if (!tail_model && vmax > tab->r_last + 1e-12)
    throw Error("profile-out-of-range", "vmax exceeds the table range and no tail model is set");

  // renormalize so that int mu dv = 2 pi int m(r) r dr = 1
  auto mr = [&](double rr) { return cplx(tab->m.eval(rr) * rr, 0.0); };
  double mass = kTwoPi * adaptive_simpson(mr, 0.0, tab->r_last, 1e-12).real();
  if (tab->tail)
    mass += kTwoPi * tab->tail_A * std::exp(-tab->tail_b * tab->r_last) *
            (tab->r_last / tab->tail_b + 1.0 / (tab->tail_b * tab->tail_b));
  if (!(mass > 1e-8))
    throw Error("profile-out-of-range", "tabulated profile has near-zero mass");
  tab->m.scale(1.0 / mass);
  tab->tail_A /= mass;

  // Fourier-side reach needed before the kernel envelope falls under 1e-12,
  // from the declared decay order; block = 4 units of s
  const double s_need = std::pow(1e12, 1.0 / (decay_order - 1.0));
  tab->max_blocks = std::min(40, std::max(4, static_cast<int>(std::ceil(s_need / 4.0)) + 2));

  EquilibriumProfile p;
  p.kind_ = Kind::tabulated;
  p.vmax_ = vmax;
  p.decay_order_ = decay_order;
  p.table_ = tab;

  double sup = 0.0;
  for (size_t i = 0; i < r.size(); ++i) sup = std::max(sup, tab->m.eval(r[i]));
  if (p.eval_mu(Vec2{vmax, 0.0}) > 1e-10 * sup)
    throw Error("velocity-truncation-breach", "tabulated profile not negligible at vmax");
  return p;
}

double EquilibriumProfile::eval_mu(const Vec2& v) const {
  switch (kind_) {
    case Kind::maxwellian:
      return std::exp(-0.5 * v.norm2()) / kTwoPi;
    case Kind::two_bump: {
      const double ap = std::exp(-0.5 * (Vec2{v.x - u0_, v.y}).norm2());
      const double am = std::exp(-0.5 * (Vec2{v.x + u0_, v.y}).norm2());
      return (ap + am) / (2.0 * kTwoPi);
    }
    case Kind::tabulated:
      return table_->eval_m(v.norm());
  }
  return 0.0;
}

Vec2 EquilibriumProfile::grad_mu(const Vec2& v) const {
  switch (kind_) {
    case Kind::maxwellian:
      return v * (-eval_mu(v));
    case Kind::two_bump: {
      const Vec2 vp{v.x - u0_, v.y}, vm{v.x + u0_, v.y};
      const double ap = std::exp(-0.5 * vp.norm2()) / (2.0 * kTwoPi);
      const double am = std::exp(-0.5 * vm.norm2()) / (2.0 * kTwoPi);
      return vp * (-ap) + vm * (-am);
    }
    case Kind::tabulated: {
      const double r = v.norm();
      if (r < 1e-12) return Vec2{0.0, 0.0};
      return v * (table_->eval_m_deriv(r) / r);
    }
  }
  return Vec2{};
}

double EquilibriumProfile::radial_fourier_factor(double s) const {
  s = std::abs(s);
  switch (kind_) {
    case Kind::maxwellian:
      return std::exp(-0.5 * s * s);
    case Kind::two_bump:
      throw Error("profile-out-of-range", "radial Fourier factor undefined for two-bump profile");
    case Kind::tabulated:
      table_->ensure_F();
      if (s >= table_->s_hi) return 0.0;
      return table_->F.eval(s);
  }
  return 0.0;
}

double EquilibriumProfile::mu_hat(const Vec2& eta) const {
  if (kind_ == Kind::two_bump)
    return std::cos(u0_ * eta.x) * std::exp(-0.5 * eta.norm2());
  return radial_fourier_factor(eta.norm());
}

std::array<cplx, 2> EquilibriumProfile::fourier_grad_mu(const Vec2& eta) const {
  const double f = mu_hat(eta);
  return {cplx(0.0, eta.x * f), cplx(0.0, eta.y * f)};
}

double EquilibriumProfile::kernel_time(double t, const Vec2& xi) const {
  const double q = xi.norm2();
  if (q < 1e-28) return 0.0;
  return -(q / (1.0 + q)) * t * mu_hat(xi * t);
}

double EquilibriumProfile::envelope_scale() const {
  switch (kind_) {
    case Kind::maxwellian: return 1.0;
    case Kind::two_bump: return std::max(1.0, u0_);
    case Kind::tabulated: return std::max(1.0, 0.5 * table_->r_last);
  }
  return 1.0;
}

void EquilibriumProfile::compute_envelope_cut() {
  // s beyond which the kernel envelope s e^{-s^2/2} stays under 1e-12 of its
  // peak; the two-bump cosine is bounded by its Gaussian envelope.  The
  // tabulated kind computes its cut alongside the cached Fourier factor.
  const double s_max = 16.0, ds = 0.01;
  auto env = [](double s) { return s * std::exp(-0.5 * s * s); };
  double peak = 0.0;
  for (double s = 0.0; s <= s_max; s += ds) peak = std::max(peak, env(s));
  double cut = s_max;
  for (double s = s_max; s >= 0.0; s -= ds) {
    if (env(s) >= 1e-12 * peak) { cut = s + ds; break; }
  }
  envelope_cut_s_ = cut;
}

double EquilibriumProfile::kernel_cutoff(double xi_mag) const {
  if (xi_mag < 1e-14) return 0.0;
  if (kind_ == Kind::tabulated) {
    table_->ensure_F();
    return table_->env_cut / xi_mag;
  }
  return envelope_cut_s_ / xi_mag;
}

EquilibriumProfile::KernelHat EquilibriumProfile::kernel_hat(double tau, const Vec2& xi,
                                                             double tol) const {
  KernelHat out;
  if (xi.norm2() < 1e-28) {
    out.zero_wavenumber = true;
    return out;
  }
  const double T = kernel_cutoff(xi.norm());
  auto f = [&](double t) { return cplx(kernel_time(t, xi), 0.0); };
  out.value = fourier_integral(f, 0.0, T, tau, tol);
  return out;
}

PenroseScan penrose_margin(const EquilibriumProfile& mu, const PenroseScanParams& p) {
  const int n_dir = (p.n_dir > 0) ? p.n_dir : (mu.radial() ? 1 : 8);
  std::vector<Vec2> dirs;
  for (int j = 0; j < n_dir; ++j) {
    // [0, pi/2] covers all behaviors for profiles symmetric in each axis
    const double th = (n_dir == 1) ? 0.0 : 1.5707963267948966 * j / (n_dir - 1);
    dirs.push_back(Vec2{std::cos(th), std::sin(th)});
  }

  PenroseScan out;
  double prev_margin = std::numeric_limits<double>::quiet_NaN();
  for (int round = 0; round < p.max_rounds; ++round) {
    const int nt = p.n_tau << round;
    const int nx = p.n_xi << round;
    const double lmin = std::log(p.xi_min), lmax = std::log(p.xi_max);

    double best = std::numeric_limits<double>::infinity();
    double best_tau = 0.0;
    Vec2 best_xi{};
    out.samples.clear();
    out.samples.reserve(static_cast<size_t>(nt + 1) * (nx + 1));

    const int panels =
        p.sweep_panels * std::max(1, static_cast<int>(std::ceil(mu.envelope_scale() / 2.0)));
    for (int d = 0; d < n_dir; ++d) {
      for (int ix = 0; ix <= nx; ++ix) {
        const double xim = std::exp(lmin + (lmax - lmin) * ix / nx);
        const Vec2 xi = dirs[d] * xim;
        auto f = [&](double t) { return mu.kernel_time(t, xi); };
        const auto row = filon_sweep(f, mu.kernel_cutoff(xim), p.tau_max, nt, panels);
        for (int it = 0; it <= nt; ++it) {
          const cplx K = row[it];
          const double dist = std::abs(1.0 - K);
          if (dist < best) { best = dist; best_tau = p.tau_max * it / nt; best_xi = xi; }
          if (d == 0) out.samples.push_back({p.tau_max * it / nt, xim, K, dist});
        }
      }
    }
    // |K_tilde| -> 0 as |xi| -> inf, so |1 - K_tilde| -> 1 at the scan edge
    const double margin = std::min(best, 1.0);
    out.rounds = round + 1;
    out.last_change = std::abs(margin - prev_margin);
    out.margin = margin;
    out.arg_tau = best_tau;
    out.arg_xi = best_xi;
    if (round > 0 && out.last_change <= p.refine_tol) {
      out.violation = (margin <= p.violation_tol);
      return out;
    }
    prev_margin = margin;
  }
  throw Error("quadrature-failure", "Penrose scan did not stabilize under refinement");
}

}  // namespace landau
