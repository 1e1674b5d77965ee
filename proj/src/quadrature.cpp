#include "landau/quadrature.hpp"

#include <cmath>

namespace landau {

namespace {

cplx simpson_step(const std::function<cplx(double)>& f, double a, double b, cplx fa, cplx fm,
                  cplx fb, cplx whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const cplx fl = f(0.5 * (a + m)), fr = f(0.5 * (m + b));
  const cplx left = (m - a) / 6.0 * (fa + 4.0 * fl + fm);
  const cplx right = (b - m) / 6.0 * (fm + 4.0 * fr + fb);
  const cplx s = left + right;
  if (std::abs(s - whole) < 15.0 * tol || depth > 48) {
    if (depth > 48) throw Error("quadrature-failure", "adaptive refinement exceeded depth 48");
    return s + (s - whole) / 15.0;
  }
  return simpson_step(f, a, m, fa, fl, fm, left, 0.5 * tol, depth + 1) +
         simpson_step(f, m, b, fm, fr, fb, right, 0.5 * tol, depth + 1);
}

// Filon moments M_k(theta) = int_{-1}^1 x^k e^{-i theta x} dx, k = 0,1,2.
void filon_moments(double th, cplx& m0, cplx& m1, cplx& m2) {
  if (std::abs(th) < 0.05) {
    const double t2 = th * th;
    m0 = 2.0 * (1.0 - t2 / 6.0 + t2 * t2 / 120.0 - t2 * t2 * t2 / 5040.0);
    m1 = cplx(0.0, -2.0) * (th / 3.0 - th * t2 / 30.0 + th * t2 * t2 / 840.0);
    m2 = 2.0 / 3.0 - t2 / 5.0 + t2 * t2 / 84.0 - t2 * t2 * t2 / 3240.0;
    return;
  }
  const double s = std::sin(th), c = std::cos(th);
  m0 = 2.0 * s / th;
  m1 = cplx(0.0, -2.0) * (s - th * c) / (th * th);
  m2 = 4.0 * c / (th * th) + 2.0 * s * (th * th - 2.0) / (th * th * th);
}

cplx filon_fixed(const std::function<cplx(double)>& f, double a, double b, double tau, int n) {
  const double h = (b - a) / (2.0 * n);
  const double th = tau * h;
  cplx m0, m1, m2;
  filon_moments(th, m0, m1, m2);
  cplx acc = 0.0;
  cplx fl = f(a);
  for (int p = 0; p < n; ++p) {
    const double t0 = a + 2.0 * p * h;
    const cplx fm = f(t0 + h), fr = f(t0 + 2.0 * h);
    const cplx A = fm, B = 0.5 * (fr - fl), C = 0.5 * (fr + fl) - fm;
    acc += std::polar(1.0, -tau * (t0 + h)) * (A * m0 + B * m1 + C * m2) * h;
    fl = fr;
  }
  return acc;
}

}  // namespace

cplx adaptive_simpson(const std::function<cplx(double)>& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  const cplx fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
  const cplx whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 0);
}

cplx filon_integral(const std::function<cplx(double)>& f, double a, double b, double tau,
                    double tol) {
  if (b <= a) return 0.0;
  int n = 32;
  cplx prev = filon_fixed(f, a, b, tau, n);
  for (int round = 0; round < 14; ++round) {
    n *= 2;
    const cplx cur = filon_fixed(f, a, b, tau, n);
    if (std::abs(cur - prev) <= tol * (1.0 + std::abs(cur))) return cur;
    prev = cur;
  }
  throw Error("quadrature-failure", "Filon refinement did not stabilize");
}

cplx fourier_integral(const std::function<cplx(double)>& f, double a, double b, double tau,
                      double tol) {
  if (std::abs(tau) * (b - a) > 50.0) return filon_integral(f, a, b, tau, tol);
  auto g = [&f, tau](double t) { return f(t) * std::polar(1.0, -tau * t); };
  return adaptive_simpson(g, a, b, tol);
}

std::vector<cplx> filon_sweep(const std::function<double(double)>& f, double T, double tau_max,
                              int n, int P) {
  std::vector<cplx> out(n + 1, cplx{0.0, 0.0});
  if (T <= 0.0) return out;
  const double h = T / (2.0 * P);

  // per-panel quadratic coefficients from shared endpoint samples
  std::vector<double> A(P), B(P), C(P);
  double fl = f(0.0);
  for (int p = 0; p < P; ++p) {
    const double t0 = 2.0 * p * h;
    const double fm = f(t0 + h), fr = f(t0 + 2.0 * h);
    A[p] = fm;
    B[p] = 0.5 * (fr - fl);
    C[p] = 0.5 * (fr + fl) - fm;
    fl = fr;
  }

  for (int j = 0; j <= n; ++j) {
    const double tau = tau_max * j / n;
    const double th = tau * h;
    cplx m0, m1, m2;
    filon_moments(th, m0, m1, m2);
    // sum_p coeff_p e^{-i tau c_p} with centers c_p = (2p+1) h
    const cplx ph0 = std::polar(1.0, -tau * h);
    const cplx step = ph0 * ph0;
    cplx ph = ph0, sa{0.0, 0.0}, sb{0.0, 0.0}, sc{0.0, 0.0};
    for (int p = 0; p < P; ++p) {
      sa += A[p] * ph;
      sb += B[p] * ph;
      sc += C[p] * ph;
      ph *= step;
    }
    out[j] = h * (m0 * sa + m1 * sb + m2 * sc);
  }
  return out;
}

}  // namespace landau
