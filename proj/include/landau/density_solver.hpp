// The density fixed point and its bootstrap continuation.
//
// The macroscopic density of the perturbation satisfies
//
//     rho = G *_{t,x} ( I(g) + R(g) + A(U) ) + I(g) + R(g)  =:  J(rho),
//
// where U = N(rho) solves the screened field equation, g = rho + A(U) drives
// the backward flow (X, V) of E = -grad U, and
//
//     I(g)(t,x)  = int f0(X_{0,t}(x,v), V_{0,t}(x,v)) dv,
//     R(g)(t,x)  = int_0^t int [ E(s, x-(t-s)v) . grad mu(v)
//                              - E(s, X_{s,t}(x,v)) . grad mu(V_{s,t}(x,v)) ] dv ds,
//
// with R a sum of generic reaction integrals T[F, eta] = T_L - T_NL,
//
//     T_L (t,x) = int_0^t int F(s, x-(t-s)v) eta(v) dv ds,
//     T_NL(t,x) = int_0^t int F(s, X_{s,t}) eta(V_{s,t}) dv ds,
//
// for eta = d_{v_i} mu and F = E_i.  Both integrals share one phase-space
// quadrature so that the zero-flow cancellation T_L = T_NL is exact pointwise.
//
// Numerically I splits as I_free + (I - I_free): the free part needs no flow
// and is summed exactly on the velocity lattice; the correction and R vanish
// with the flow, are quadratic in the data size, and are quadrated on strided
// lattices with strided trapezoidal marches (SourceQuad).  Flows enter through
// the same label marches as `characteristics`: for an output point x and
// velocity node v the label is (x - t v, v) and one backward sweep yields
// Y_{s,t}, W_{s,t} at every intermediate node via trapezoidal suffix sums.
//
// local_solve iterates J from the free-transport density on [0, T0];
// continuation extends the horizon slab by slab (the solved prefix is a fixed
// point of the extended problem by causality and is never recomputed),
// monitoring the norm ledger of g against the bootstrap threshold.
// reconstruct_f assembles, using that E(s,X) . grad mu(V) ds integrates to
// mu(v) - mu(V_{0,t}) along the flow,
//
//     f(t,x,v) = f0(X_{0,t}, V_{0,t}) + mu(V_{0,t}) - mu(v),
//
// and scattering_profile takes the large-t limits Y_inf, W_inf of Y_{0,t},
// W_{0,t} in the sheared frame together with the decay sequence
// d(t) = || f(t, x+tv, v) - f_inf(x, v) ||_inf.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "landau/characteristics.hpp"
#include "landau/equilibrium.hpp"
#include "landau/initial_data.hpp"
#include "landau/linear_response.hpp"
#include "landau/norms.hpp"
#include "landau/sampler.hpp"
#include "landau/spacetime.hpp"
#include "landau/spectral_field.hpp"

namespace landau {

// Decaying velocity weight together with the measured constant
// sup_v sum_{j<=3} <v>^3 |grad^j eta(v)| (derivatives by finite differences,
// magnitudes of the j-th differential as sup over component stencils).
struct VelocityWeight {
  std::function<double(const Vec2&)> eta;
  double constant = 0.0;

  static VelocityWeight measure(std::function<double(const Vec2&)> eta, double vmax);
};

// Quadrature reduction knobs for the flow-dependent source corrections.  The
// corrections are quadratic in the perturbation, so strided lattices and a
// strided march keep full-order accuracy of the assembled density.
struct SourceQuad {
  int x_stride = 1;        // output x-lattice stride; coarse values are lifted spectrally
  int v_stride = 1;        // velocity-lattice stride of the correction quadratures
  int s_stride = 1;        // march stride in s (target nodes must be multiples)
  double skip_sup = 0.0;   // march nodes with sup|E| below this contribute nothing
  double breach_tol = 1e-10;  // boundary-ring gate of the velocity quadrature
  double blowup_guard = 1e3;
};

// free-streaming density int f0(x - t v, v) dv on the velocity lattice
ScalarField2D free_transport_density(const InitialData& f0, double t, const PeriodicGrid& xg,
                                     const VelocityGrid& vg, const SourceQuad& q = {});

// I(g)(t): velocity average of f0 along the backward flow of the sampled field
ScalarField2D transported_initial(const InitialData& f0, const FieldSampler& field, double t,
                                  const VelocityGrid& vg, const SourceQuad& q = {});

// generic reaction integral T[F, eta] on every node of F's time grid;
// throws "eta-weight-violation" unless eta.constant <= 1 (+ slack)
SpaceTimeField t_operator(const SpaceTimeField& F, const VelocityWeight& eta,
                          const FieldSampler& field, const VelocityGrid& vg,
                          const SourceQuad& q = {});

// R(g) = sum_i T[E_i, d_{v_i} mu] as one pointwise-difference quadrature; the
// weight gate constant used for the internal normalization is reported
SpaceTimeField reaction(const FieldSampler& field, const EquilibriumProfile& mu,
                        const VelocityGrid& vg, const SourceQuad& q = {},
                        double* weight_constant = nullptr);

struct SolverParams {
  EquilibriumProfile mu = EquilibriumProfile::maxwellian();
  NonlinearityA A = NonlinearityA::massless_electron();
  VelocityGrid vg{32, 8.0};
  double a = 0.5;                      // Holder index of the norm ledger
  ShiftSet shifts = ShiftSet::dyadic(2.0, 8);
  double tol = 1e-6;                   // Picard stopping norm
  int max_picard = 25;
  double eps1 = 0.05;                  // bootstrap threshold on the g ledger
  double eps2 = 0.05;                  // initial-data gate of local_solve
  double eps0_field = 0.1;             // smallness gate of the semilinear field solve
  double xi_free = 8.5;
  int sampler_refine = 4;
  SourceQuad quad;
  int targets_per_slab = 0;  // 0: sources at every node; else per-slab targets + cubic interp
  double flow_gate = 0.1;    // recompute sources when ||g|| moved > gate * tol
};

struct SolveReport {
  int iterations = 0;
  std::vector<double> updates;  // Picard update norms, one per iterate
  double initial_norm = 0.0;    // sum_p ||rho(0)||_p + besov gate value
  double rho_norm = 0.0;        // ||rho||_{1+a,T} of the solution
  double u_norm = 0.0;
  double g_norm = 0.0;
  double C2 = 0.0;              // (rho_norm + u_norm) / initial_norm
};

struct BootstrapState {
  double T = 0.0;
  double eps1 = 0.0;
  std::string status = "continuing";  // continuing | converged | threshold-breach
  double ledger = 0.0;                // ||g||_{1+a,T} at the reached horizon
  double triple_norm = 0.0;           // |||f0|||_{1+a}
  double C1 = 0.0;                    // ledger / triple_norm
  std::vector<double> slab_T;
  std::vector<int> slab_iterations;
  std::vector<double> slab_ledger;
};

// one sweep of the fixed-point map J at the trajectory's own resolution
DensityTrajectory picard_map_J(const DensityTrajectory& rho, const InitialData& f0,
                               const SolverParams& prm);

// Picard iteration of J from the free-transport density on [0, T0], M0 steps;
// throws "local-solve-divergence" after three non-contracting updates and
// "smallness-violation" when the initial data fails the eps2 gate
DensityTrajectory local_solve(const InitialData& f0, const PeriodicGrid& grid, double T0, int M0,
                              const SolverParams& prm, SolveReport* report = nullptr);

struct ContinuationResult {
  DensityTrajectory traj;
  BootstrapState state;
};

// slab-by-slab horizon extension with warm starts; a ledger crossing of eps1
// sets status "threshold-breach" and returns the data gathered so far
ContinuationResult continuation(const InitialData& f0, const PeriodicGrid& grid, double T_max,
                                double T0, int M0, const SolverParams& prm);

// derive U = N(rho), g = rho + A(U), E = -grad U on nodes [from, last stored]
// and refresh the norm ledgers; requires every node slice to be stored
void derive_fields(DensityTrajectory& traj, const SolverParams& prm, int from = 0);

struct PhaseField {
  PhaseGrid grid;
  double time = 0.0;
  std::vector<double> values;  // PhaseGrid::index ordering

  double operator()(int ix, int iy, int jx, int jy) const {
    return values[grid.index(ix, iy, jx, jy)];
  }
};

// distribution at time t through the flow of the trajectory's field
PhaseField reconstruct_f(const DensityTrajectory& traj, const InitialData& f0,
                         const SolverParams& prm, double t);

struct ScatteringProfile {
  PhaseGrid grid;
  std::vector<Vec2> Y_inf, W_inf;  // on the (x, v) label lattice, PhaseGrid order
  PhaseField f_inf;
  std::vector<double> times;   // dyadic check times, ascending
  std::vector<double> decay;   // d(t) at those times
  double converged_diff = 0.0; // sup-norm gap between the last two dyadic maps
  double Y_sup = 0.0, W_sup = 0.0;
};

// limits of the sheared-frame maps at dyadic times; throws
// "scattering-not-converged" when the last dyadic gap exceeds conv_tol
ScatteringProfile scattering_profile(const DensityTrajectory& traj, const InitialData& f0,
                                     const SolverParams& prm, double conv_tol = 1e-6);

}  // namespace landau
