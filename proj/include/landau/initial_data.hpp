// Initial phase-space perturbations f0(x, v) with analytic gradients.
//
// Evaluators are plain functions on R^2 x R^2; periodization onto the spatial
// box is the caller's concern (wrap the argument first).  Built-in kinds decay
// fast enough that a single image is exact to machine precision on the boxes
// used here.  The amplitude enters multiplicatively, so norms of eps f are
// eps times norms of f.
#pragma once

#include <functional>

#include "landau/grid.hpp"

namespace landau {

class InitialData {
 public:
  using Eval = std::function<double(const Vec2&, const Vec2&)>;
  using GradEval = std::function<Vec2(const Vec2&, const Vec2&)>;

  static InitialData zero();
  // eps e^{-|x|^2/(2 sx^2)} e^{-|v|^2/(2 sv^2)} / (2 pi sv^2); the velocity
  // integral is eps e^{-|x|^2/(2 sx^2)}
  static InitialData gaussian(double eps, double sigma_x = 1.0, double sigma_v = 1.0);
  // user evaluator with matching analytic gradients; radius bounds the support
  static InitialData custom(Eval f, GradEval grad_x, GradEval grad_v, double eps, double radius);

  double operator()(const Vec2& x, const Vec2& v) const { return f_(x, v); }
  Vec2 grad_x(const Vec2& x, const Vec2& v) const { return gx_(x, v); }
  Vec2 grad_v(const Vec2& x, const Vec2& v) const { return gv_(x, v); }

  double amplitude() const { return eps_; }
  double radius() const { return radius_; }  // decay radius in both x and v
  bool is_zero() const { return zero_; }

  // lattice quadrature of the total perturbation mass int int f0 dx dv
  double mass(const PeriodicGrid& xg, const VelocityGrid& vg) const;

 private:
  InitialData() = default;
  Eval f_;
  GradEval gx_, gv_;
  double eps_ = 0.0;
  double radius_ = 0.0;
  bool zero_ = false;
};

}  // namespace landau
