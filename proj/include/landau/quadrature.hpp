// Quadrature helpers for the dispersion kernel: an adaptive Simpson rule for
// slow phases and a composite Filon rule (piecewise-quadratic envelope with
// exact oscillatory moments) for fast ones.  fourier_integral computes
//
//     I(tau) = int_a^b f(t) e^{-i tau t} dt
//
// choosing the rule by |tau|(b-a); the Filon moments use series expansions
// near theta = 0 so the two branches agree smoothly.
#pragma once

#include <functional>
#include <vector>

#include "landau/core.hpp"

namespace landau {

cplx adaptive_simpson(const std::function<cplx(double)>& f, double a, double b, double tol);

// Composite Filon with panel doubling until two refinements agree to tol
// (absolute + relative).  Throws "quadrature-failure" if refinement stalls.
cplx filon_integral(const std::function<cplx(double)>& f, double a, double b, double tau,
                    double tol);

cplx fourier_integral(const std::function<cplx(double)>& f, double a, double b, double tau,
                      double tol);

// I(tau_j) = int_0^T f(t) e^{-i tau_j t} dt for the whole uniform frequency
// row tau_j = tau_max j / n, j = 0..n, from one set of P quadratic panels.
// The panel sums reduce to three phase-recurrence sums per frequency, so the
// sweep costs O(P) function evaluations and O(n P) arithmetic total.  P must
// resolve the envelope of f (not the phase).
std::vector<cplx> filon_sweep(const std::function<double(double)>& f, double T, double tau_max,
                              int n, int P);

}  // namespace landau
