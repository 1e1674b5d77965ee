// Split-step semi-Lagrangian reference solver.
//
// Independent cross-check for the fixed-point density: the kinetic equation
//
//     dt f + v . grad_x f - E . grad_v (mu + f) = 0,   E = -grad U,
//     -Delta U + U = rho + A(U),   rho = int f dv,
//
// is advanced by Strang splitting on the perturbation f.  The x-advection is
// a per-velocity-node spectral phase shift (exact on the lattice), the
// v-advection at frozen x is a constant shift by E(x) dt realized by cubic
// interpolation on the velocity lattice, with the equilibrium contribution
//     mu(v - E dt) - mu(v)
// injected analytically so the large smooth background never passes through
// an interpolant.  The lattice sum of the analytic injection telescopes to
// zero at machine precision, so total mass is conserved to roundoff.
//
// Nothing here shares code with the characteristic solver: fields are the
// same spectral solves, but transport, time stepping, and the treatment of
// the equilibrium are disjoint, which is what makes the comparison a test.

#pragma once

#include "landau/equilibrium.hpp"
#include "landau/initial_data.hpp"
#include "landau/spacetime.hpp"
#include "landau/spectral_field.hpp"

namespace landau {

struct SLParams {
  EquilibriumProfile mu = EquilibriumProfile::maxwellian();
  NonlinearityA A = NonlinearityA::massless_electron();
  VelocityGrid vg{32, 8.0};
  int substeps = 2;          // split steps per trajectory node interval
  double eps0_field = 0.1;   // smallness gate forwarded to the field solve
};

// Evolve f0 and store the density at every node of tg.  node_l1/node_sup are
// filled through the usual trajectory bookkeeping; mass(m) of the returned
// slices is conserved to roundoff.
DensityTrajectory sl_reference_solve(const InitialData& f0, const PeriodicGrid& grid,
                                     const TimeGrid& tg, const SLParams& prm);

}  // namespace landau
