// Screened-Poisson field solves on the periodic box.
//
// The potential solves the semilinear equation
//
//     -Delta u + u = rho + A(u),        E = -grad u,
//
// where A is the electron closure: A(r) = r + 1 - e^r for massless
// electrons (A(0) = A'(0) = 0, A(r) = -r^2/2 + O(r^3)).  The linear part is
// inverted mode-wise by 1/(1+|xi|^2); the semilinear solve is a Picard
// iteration in the smallness regime, with the 2/3 dealias rule applied
// before each nonlinear evaluation.
#pragma once

#include <functional>

#include "landau/grid.hpp"

namespace landau {

class NonlinearityA {
 public:
  enum class Kind { zero, massless_electron, custom };

  static NonlinearityA zero();
  static NonlinearityA massless_electron();
  // derivatives are validated at 0 and the C_A bound sampled on |r| <= 1
  static NonlinearityA custom(std::function<double(double)> A, std::function<double(double)> dA,
                              std::function<double(double)> d2A, std::function<double(double)> d3A);

  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::zero; }
  double operator()(double r) const { return A_(r); }
  double d1(double r) const { return d1_(r); }
  double d2(double r) const { return d2_(r); }
  double d3(double r) const { return d3_(r); }

  // sampled sup over |r|<=1 of |A/r^2| + |A'/r| + |A''| + |A'''|
  double CA() const { return CA_; }

 private:
  NonlinearityA() = default;
  void finalize();  // validate A(0), A'(0); sample C_A

  Kind kind_ = Kind::zero;
  std::function<double(double)> A_, d1_, d2_, d3_;
  double CA_ = 0.0;
};

// u with u_hat = rho_hat / (1 + |xi|^2)
ScalarField2D helmholtz_invert(const ScalarField2D& rho);

// E = -grad u by spectral differentiation
VectorField2D electric_field(const ScalarField2D& u);

// pointwise A(u); the closure is only controlled on |u| <= 1
ScalarField2D eval_A(const NonlinearityA& A, const ScalarField2D& u);

struct SemilinearStats {
  int iterations = 0;
  double final_delta = 0.0;   // last sup-norm Picard increment
  double residual_sup = 0.0;  // sup |(-Delta+1)u - rho - A(u)|
};

// Picard solve of -Delta u + u = rho + A(u), gated on
// max(|rho|_L1, |rho|_sup) <= eps0
ScalarField2D solve_semilinear(const ScalarField2D& rho, const NonlinearityA& A,
                               double tol = 1e-10, int max_iter = 64, double eps0 = 0.1,
                               SemilinearStats* stats = nullptr);

}  // namespace landau
