// Space-time sampling of the electric field E(t,x) for characteristics.
//
// Spatial interpolation is trigonometric: a stored slice is the band-limited
// function determined by its samples, and evaluation anywhere on the torus
// sums its Fourier series.  Temporal interpolation is cubic Hermite between
// time nodes with centered-difference slopes (one-sided at the ends), so node
// evaluation reproduces stored slices.  Gradients and Hessians come from
// spectral differentiation of the same series, hence differentiation and
// interpolation commute on the exact path.
//
// The exact path costs O(N^2) per point.  The flow march needs ~1e8 samples,
// so the sampler also precomputes each slice (and its gradient) on a
// `refine`-times finer lattice by zero-padding the spectrum, and interpolates
// that lattice with separable Catmull-Rom cubics.  Fine-lattice values are
// exact; between fine nodes the error is O((xi dx/refine)^4), far below the
// flow quadrature error for the smooth screened fields this library produces.
#pragma once

#include "landau/spacetime.hpp"

namespace landau {

struct SamplerOptions {
  int refine = 8;          // fine-lattice refinement factor (power of two)
  bool precompute = true;  // build the fast path; exact path always available
};

class FieldSampler {
 public:
  using Options = SamplerOptions;

  explicit FieldSampler(SpaceTimeVectorField E, Options opt = Options());

  const TimeGrid& time() const { return E_.time(); }
  const PeriodicGrid& grid() const { return E_.grid(); }
  int refine() const { return opt_.refine; }
  bool has_fast_path() const { return opt_.precompute; }

  // nearest time node for t, throws "grid-mismatch" if t is not a node
  int node_index(double t) const;

  // exact trigonometric interpolation, O(N^2) per call
  Vec2 value_exact(double t, const Vec2& x) const;
  Mat2 grad_exact(double t, const Vec2& x) const;  // row i = component, col j = d/dx_j
  // Hessian of one component (comp 0 = E_x, 1 = E_y)
  Mat2 hess_exact(double t, const Vec2& x, int comp) const;

  // fast path at a time node: E and grad E in one fused lattice gather
  void eval_node(int m, const Vec2& x, Vec2& E, Mat2& gradE) const;
  // value-only node gather, half the fetch cost of eval_node
  Vec2 value_node(int m, const Vec2& x) const;
  // fast path at arbitrary t (cubic Hermite over up to 4 node evaluations)
  Vec2 value(double t, const Vec2& x) const;
  Mat2 grad(double t, const Vec2& x) const;

  // sup over stored nodes and lattice points of |E| (Euclidean)
  double node_sup() const { return node_sup_; }
  // same sup restricted to one time node
  double node_sup(int m) const { return per_node_sup_[static_cast<std::size_t>(m)]; }

 private:
  void build_fine();
  void exact_node(int m, const Vec2& x, Vec2& E, Mat2& gradE) const;
  // Hermite weights on nodes m0..m0+3 (clamped) for time t
  void time_weights(double t, int idx[4], double w[4]) const;

  SpaceTimeVectorField E_;
  Options opt_;
  double node_sup_ = 0.0;
  std::vector<double> per_node_sup_;
  int Nf_ = 0;                // fine lattice points per axis
  std::vector<double> fine_;  // per node: Nf^2 cells of [Ex, Ey, dxEx, dyEx, dxEy, dyEy]
};

// Scalar counterpart for space-time densities: value-only fine lattice, same
// Catmull-Rom gathers, no gradients.  Used where integrands sample a stored
// density off its lattice (the generic reaction quadrature).
class ScalarSampler {
 public:
  explicit ScalarSampler(SpaceTimeField F, int refine = 8);

  const TimeGrid& time() const { return F_.time(); }
  const PeriodicGrid& grid() const { return F_.grid(); }

  int node_index(double t) const;
  double value_node(int m, const Vec2& x) const;
  double node_sup(int m) const { return per_node_sup_[static_cast<std::size_t>(m)]; }

 private:
  SpaceTimeField F_;
  int refine_ = 8;
  int Nf_ = 0;
  std::vector<double> per_node_sup_;
  std::vector<double> fine_;  // per node: Nf^2 values
};

}  // namespace landau
