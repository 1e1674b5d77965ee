#include "landau/spectral_field.hpp"

#include <cmath>

namespace landau {

NonlinearityA NonlinearityA::zero() {
  NonlinearityA a;
  a.kind_ = Kind::zero;
  auto z = [](double) { return 0.0; };
  a.A_ = z; a.d1_ = z; a.d2_ = z; a.d3_ = z;
  a.CA_ = 0.0;
  return a;
}

NonlinearityA NonlinearityA::massless_electron() {
  NonlinearityA a;
  a.kind_ = Kind::massless_electron;
  a.A_ = [](double r) { return r + 1.0 - std::exp(r); };
  a.d1_ = [](double r) { return 1.0 - std::exp(r); };
  a.d2_ = [](double r) { return -std::exp(r); };
  a.d3_ = [](double r) { return -std::exp(r); };
  a.finalize();
  return a;
}

NonlinearityA NonlinearityA::custom(std::function<double(double)> A,
                                    std::function<double(double)> dA,
                                    std::function<double(double)> d2A,
                                    std::function<double(double)> d3A) {
  NonlinearityA a;
  a.kind_ = Kind::custom;
  a.A_ = std::move(A);
  a.d1_ = std::move(dA);
  a.d2_ = std::move(d2A);
  a.d3_ = std::move(d3A);
  if (std::abs(a.A_(0.0)) > 1e-12 || std::abs(a.d1_(0.0)) > 1e-12)
    throw Error("assumption-window-exceeded", "custom closure must satisfy A(0) = A'(0) = 0");
  a.finalize();
  return a;
}

void NonlinearityA::finalize() {
  // quadratic-degeneracy bound, sampled
  double ca = 0.0;
  const int n = 10000;
  for (int i = 0; i <= n; ++i) {
    const double r = -1.0 + 2.0 * i / n;
    double s = std::abs(d2_(r)) + std::abs(d3_(r));
    if (std::abs(r) > 1e-9) s += std::abs(A_(r) / (r * r)) + std::abs(d1_(r) / r);
    ca = std::max(ca, s);
  }
  CA_ = ca;
}

namespace {
std::vector<double> helmholtz_multiplier(const PeriodicGrid& g) {
  std::vector<double> m(g.size());
  for (int i = 0; i < g.N; ++i)
    for (int j = 0; j < g.N; ++j) {
      const double fx = g.freq(i), fy = g.freq(j);
      m[static_cast<std::size_t>(i) * g.N + j] = 1.0 / (1.0 + fx * fx + fy * fy);
    }
  return m;
}
}  // namespace

ScalarField2D helmholtz_invert(const ScalarField2D& rho) {
  return rho.apply_multiplier(helmholtz_multiplier(rho.grid()));
}

VectorField2D electric_field(const ScalarField2D& u) {
  return VectorField2D{u.deriv(0) * -1.0, u.deriv(1) * -1.0};
}

ScalarField2D eval_A(const NonlinearityA& A, const ScalarField2D& u) {
  if (A.is_zero()) return ScalarField2D(u.grid());
  const double sup = u.norm_sup();
  if (sup > 1.0)
    throw Error("assumption-window-exceeded",
                "closure evaluated outside |u| <= 1 (sup = " + std::to_string(sup) + ")");
  std::vector<double> out(u.values());
  for (double& r : out) r = A(r);
  return ScalarField2D(u.grid(), std::move(out));
}

ScalarField2D solve_semilinear(const ScalarField2D& rho, const NonlinearityA& A, double tol,
                               int max_iter, double eps0, SemilinearStats* stats) {
  const double small = std::max(rho.norm_l1(), rho.norm_sup());
  if (small > eps0)
    throw Error("smallness-violation", "source norm " + std::to_string(small) +
                                           " exceeds the smallness gate " + std::to_string(eps0));

  const auto mult = helmholtz_multiplier(rho.grid());
  ScalarField2D u = rho.apply_multiplier(mult);
  if (A.is_zero()) {
    if (stats) *stats = SemilinearStats{1, 0.0, 0.0};
    return u;
  }

  double delta = 0.0;
  int it = 0;
  bool converged = false;
  for (; it < max_iter; ++it) {
    const ScalarField2D Au = eval_A(A, u.dealias());
    ScalarField2D next = (rho + Au).apply_multiplier(mult);
    delta = (next - u).norm_sup();
    u = std::move(next);
    if (delta < tol) { converged = true; break; }
  }
  if (!converged)
    throw Error("picard-divergence",
                "no convergence in " + std::to_string(max_iter) + " iterations");

  if (stats) {
    // residual of the non-truncated equation, with (-Delta+1)u spectral
    std::vector<double> m(u.grid().size());
    const auto& g = u.grid();
    for (int i = 0; i < g.N; ++i)
      for (int j = 0; j < g.N; ++j) {
        const double fx = g.freq(i), fy = g.freq(j);
        m[static_cast<std::size_t>(i) * g.N + j] = 1.0 + fx * fx + fy * fy;
      }
    const ScalarField2D res = u.apply_multiplier(m) - rho - eval_A(A, u);
    *stats = SemilinearStats{it + 1, delta, res.norm_sup()};
  }
  return u;
}

}  // namespace landau
