// Weighted space-time norms and Holder/Besov seminorms.
//
//     ||g||_{B^a_{p,inf}}  = sup_alpha ||g - g(. - alpha)||_{L^p} / |alpha|^a,
//     ||g||_{m+gamma,T}    = sum_{j<=m} sum_{p=1,inf} sup_s ( <s>^{2(p-1)/p} ||g(s)||_{L^p}
//                              + <s>^{j+gamma+2(p-1)/p} ||grad^j g(s)||_{B^gamma_{p,inf}} ),
//     |||h|||_{1+a}        = sum_p sum_{i<=1} || D^a(grad^i h) ||_{L1_x Lp_v  cap  L1_v Lp_x},
//
// where D^a h = |h| + sup_z |h(x,v)-h(x-z,v)|/|z|^a + sup_z |h(x,v)-h(x,v-z)|/|z|^a
// pointwise.  The sup over shifts is taken over a finite dyadic ladder of
// magnitudes times a fixed direction set (axes and diagonals); a seminorm can
// only grow when the ladder is enlarged.  Spatial shifts are periodic and
// trig-exact; velocity shifts re-evaluate the analytic data.  Gradient
// components contribute additively, and the intersection of the two mixed
// orderings is their max (outer integral first).
#pragma once

#include <string>
#include <vector>

#include "landau/initial_data.hpp"
#include "landau/spacetime.hpp"

namespace landau {

enum class Lp { one, inf };

inline double lp_norm(const ScalarField2D& f, Lp p) {
  return p == Lp::one ? f.norm_l1() : f.norm_sup();
}
// exponent 2(p-1)/p of the dispersive time weight
inline double lp_weight_power(Lp p) { return p == Lp::one ? 0.0 : 2.0; }

struct ShiftSet {
  std::vector<double> magnitudes;  // dyadic ladder h0 2^{-j}, j = 0..J
  std::vector<Vec2> directions;    // unit vectors

  // axes plus both diagonals when diagonals is set
  static ShiftSet dyadic(double h0, int J = 10, bool diagonals = true);
  bool empty() const { return magnitudes.empty() || directions.empty(); }
  double h0() const { return magnitudes.empty() ? 0.0 : magnitudes.front(); }
};

double besov_seminorm(const ScalarField2D& g, double a, Lp p, const ShiftSet& shifts);

struct NormReport {
  struct Component {
    std::string label;
    double value = 0.0;
  };
  std::vector<Component> components;
  double total = 0.0;

  double gamma = 0.0;  // Holder/Besov index used
  int m = 0;
  double T = 0.0;
  double h0 = 0.0;  // largest shift magnitude
  int shift_count = 0;

  void add(const std::string& label, double value);
};

NormReport trajectory_norm(const SpaceTimeField& g, int m, double gamma, double T,
                           const ShiftSet& shifts);

// |||f0|||_{1+a} by phase-lattice quadrature; x shifts wrap the box, v shifts
// evaluate the data off-lattice
double triple_norm_initial(const InitialData& f0, double a, const ShiftSet& shifts,
                           const PeriodicGrid& xg, const VelocityGrid& vg);

struct DispersiveCheckParams {
  PeriodicGrid x_grid{64, 12.0};  // quadrature box carrying the L^p_x norm
  int nv = 64;                    // velocity patch nodes per axis
  double h_radius = 6.0;          // |u| beyond which H is negligible
  int n_h_l1 = 512;               // nodes per axis for ||H||_{L^1}
  double fd_step = 1e-4;          // finite-difference step for the gradient gate
};

// ratio of || int H(phi + x - (t-s) v) <v>^{-3} dv ||_{L^p_x} to
// t^{-2(p-1)/p} ||H||_{L^1}; requires s <= t/2 and ||grad phi||_inf <= 1/2
double dispersive_average_check(const std::function<double(const Vec2&)>& H,
                                const std::function<Vec2(const Vec2&, const Vec2&)>& phi,
                                double s, double t, Lp p,
                                const DispersiveCheckParams& prm = {});

}  // namespace landau
