// Time-domain dispersion kernel rows K(t_m, xi), their Volterra resolvents
//
//     G = K + K * G    (product trapezoidal convolution, marched in t),
//
// the space-time convolution g -> G *_{t,x} g, and the linearized density
// evolution rho_hat = S_hat + K * rho_hat per spatial mode.
//
// K(0, xi) = 0 for every profile here, so the marching is explicit; the
// general scheme divides by (1 - dt K_0 / 2) and aborts with
// "resolvent-instability" once |G| exceeds 1e6.  Kernel rows are truncated
// at the profile's cutoff time and shared between modes with equal |k|
// (radial profiles) or equal (|k1|, |k2|); modes with |xi| past xi_free use
// G = K, where |K_tilde| is already negligible.
#pragma once

#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "landau/equilibrium.hpp"
#include "landau/spacetime.hpp"

namespace landau {

struct ModeResolvent {
  Vec2 xi;                       // representative frequency for the shared row
  std::vector<cplx> K_samples;   // per time node
  std::vector<cplx> G_samples;
};

// samples K(t_m, xi); zero past the profile's kernel cutoff
std::vector<cplx> kernel_time_K(const EquilibriumProfile& mu, const Vec2& xi,
                                const TimeGrid& tg);

std::vector<cplx> volterra_resolvent(const std::vector<cplx>& K, const TimeGrid& tg);

// causal trapezoidal convolution (a*b)(t_m) on a shared time grid
std::vector<cplx> causal_convolve(const std::vector<cplx>& a, const std::vector<cplx>& b,
                                  double dt);

// marching residual max_m |G - K - K*G|(t_m)
double resolvent_residual(const std::vector<cplx>& K, const std::vector<cplx>& G, double dt);

// trapezoidal int_0^T e^{-i tau t} f(t) dt on the sample nodes
cplx discrete_laplace(const std::vector<cplx>& f, double dt, double tau);

// Resolvent rows for every storage mode of a spatial grid, deduplicated by
// kernel symmetry.  Rows return K and G on the full time grid.
class ResolventTable {
 public:
  ResolventTable(const EquilibriumProfile& mu, const PeriodicGrid& grid, const TimeGrid& tg,
                 double xi_free = 8.5);

  const TimeGrid& time() const { return tg_; }
  const PeriodicGrid& grid() const { return grid_; }
  double xi_free() const { return xi_free_; }

  const ModeResolvent& mode(int i, int j) const;  // storage indices
  std::size_t distinct_rows() const { return rows_.size(); }
  double max_residual() const { return max_residual_; }  // over resolved rows

 private:
  EquilibriumProfile mu_;
  PeriodicGrid grid_;
  TimeGrid tg_;
  double xi_free_;
  double max_residual_ = 0.0;
  std::unordered_map<long long, std::unique_ptr<ModeResolvent>> rows_;
};

// out_hat(t, xi) = int_0^t G(t-s, xi) g_hat(s, xi) ds per spatial mode
SpaceTimeField apply_G_spacetime(const SpaceTimeField& g, const ResolventTable& resolvents);

struct LinearEvolveParams {
  double xi_free = 8.5;  // modes above skip the kernel; 0 disables the response
  int slice_stride = 1;
  bool assume_real = true;  // Hermitian source: march half the mode plane
  std::function<void(int, const ScalarField2D&)> observer;  // per-node tap
};

// per dealiased mode, rho_hat = S_hat + K * rho_hat with S_hat(t) = source(xi, t)
DensityTrajectory linear_density_evolve(const std::function<cplx(const Vec2&, double)>& source,
                                        const EquilibriumProfile& mu, const TimeGrid& tg,
                                        const PeriodicGrid& grid,
                                        const LinearEvolveParams& p = {});

}  // namespace landau
