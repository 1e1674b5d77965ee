// Perturbative backward characteristics in the sheared frame.
//
// For a trajectory that sits at phase point (x + tv, v) at time t, the
// displacement from free streaming at an earlier time s solves
//
//     Y_{s,t}(x,v) =  int_s^t (tau - s) E(tau, x + tau v + Y_{tau,t}(x,v)) dtau,
//     W_{s,t}(x,v) = -int_s^t           E(tau, x + tau v + Y_{tau,t}(x,v)) dtau,
//
// so the physical flow is X_{s,t}(x,v) = x - (t-s)v + Y_{s,t}(x - tv, v) and
// V_{s,t}(x,v) = v + W_{s,t}(x - tv, v).  Differentiating the equations in the
// (x,v) labels gives the Jacobian system, integrated in the same pass:
//
//     grad_x Y = int (tau-s) gradE . (I + grad_x Y_tau) dtau,
//     grad_v Y = int (tau-s) gradE . (tau I + grad_v Y_tau) dtau,
//
// and the W gradients likewise without the (tau-s) factor.  On the field's
// native time grid the trapezoid discretization is lower triangular: the
// tau = s term of Y carries a zero weight, so marching s downward from t is
// an exact backward substitution for the discrete Picard system, one field
// evaluation per node per phase point, with running suffix sums
//   U0 = sum_tau w E,  U1 = sum_tau w tau E   =>   Y_s = dt (U1 - s U0),
// and matrix analogues for the Jacobians.  Convergence is certified by
// re-marching a random subsample at dt/2^k until the change is below tol.
//
// The inverse velocity map Psi_{s,t}(x,v) solves
// X_{s,t}(x, Psi) = x - (t-s)v, i.e. (t-s)(Psi - v) = Y_{s,t}(x - t Psi, Psi),
// by Newton iteration on the sampled Y.
#pragma once

#include <cstdint>

#include "landau/norms.hpp"
#include "landau/sampler.hpp"

namespace landau {

struct PhaseGrid {
  PeriodicGrid x;
  VelocityGrid v;
  std::size_t size() const { return x.size() * v.size(); }
  std::size_t index(int ix, int iy, int jx, int jy) const {
    return ((static_cast<std::size_t>(ix) * x.N + iy) * v.Nv + jx) * v.Nv + jy;
  }
  bool operator==(const PhaseGrid& o) const { return x == o.x && v == o.v; }
};

// One (s,t) pair sampled over a phase grid; arguments of Y, W and the
// Jacobians are the sheared labels (x - tv, v).
struct FlowMaps {
  double s = 0.0, t = 0.0;
  PhaseGrid grid;
  std::vector<Vec2> Y, W;
  std::vector<Mat2> grad_x_Y, grad_v_Y, grad_x_W, grad_v_W;
  std::vector<Vec2> Psi;  // physical-label inverse map, empty until invert_flow

  // Catmull-Rom interpolation over the sample lattice (periodic in x,
  // clamped in v); valid for queries away from the velocity boundary
  Vec2 sample_Y(const Vec2& x, const Vec2& v) const;
  Vec2 sample_W(const Vec2& x, const Vec2& v) const;
  Mat2 sample_grad_x_Y(const Vec2& x, const Vec2& v) const;
  Mat2 sample_grad_v_Y(const Vec2& x, const Vec2& v) const;
};

struct FlowOptions {
  double blowup_guard = 1e3;  // sup |Y| bound; beyond it the march has left the regime
  bool verify = true;
  int verify_points = 200;
  std::uint64_t verify_seed = 0x9e3779b97f4a7c15ull;
};

// march from t down to s; s and t must be field time nodes
FlowMaps compute_flow(const FieldSampler& field, double s, double t, const PhaseGrid& pg,
                      double tol = 1e-6, int max_iter = 4, const FlowOptions& opt = {});

// one march from t down to min(s_list), snapshotting every requested s
std::vector<FlowMaps> compute_flow_family(const FieldSampler& field, double t,
                                          const std::vector<double>& s_list, const PhaseGrid& pg,
                                          double tol = 1e-6, int max_iter = 4,
                                          const FlowOptions& opt = {});

// fill flow.Psi by Newton iteration; defect below tol at every sample or
// "inverse-map-failure"
void invert_flow(FlowMaps& flow, const FieldSampler& field, double tol = 1e-10,
                 int max_iter = 30);

// sup |det d(X,V)/d(x,v) - 1| over the sample lattice (stride subsampling)
double liouville_defect(const FlowMaps& flow, int stride = 1);

struct FlowDiagnosticsRow {
  double s = 0.0, t = 0.0;
  double wY = 0.0;             // <s>   sup |Y|
  double wGradxY = 0.0;        // <s>^{1+a} sup |grad_x Y|
  double wGradvY = 0.0;        // <s>^a sup |grad_v Y|
  double wW = 0.0;             // <s>^2 sup |W|
  double wGradvW = 0.0;        // <s>^{1+a} sup |grad_v W|
  double wHolderGradvW = 0.0;  // <s> sup_alpha |alpha|^{-a} sup |delta_alpha^v grad_v W|
  double holderGradvY = 0.0;   // sup_alpha |alpha|^{-a} sup |delta_alpha^v grad_v Y|
};

struct FlowDiagnostics {
  std::vector<FlowDiagnosticsRow> rows;  // one per (s,t) pair
  NormReport summary;                    // sups over the pair set, one component per column
  double g_norm = 0.0;                   // reference field norm when supplied
  double ratio = 0.0;                    // max component / g_norm
};

FlowDiagnostics flow_diagnostics(const std::vector<FlowMaps>& flows, double a,
                                 const ShiftSet& shifts, double g_norm = 0.0,
                                 int holder_stride = 2);

}  // namespace landau
