#include "landau/initial_data.hpp"

#include <cmath>
#include <utility>

namespace landau {

InitialData InitialData::zero() {
  InitialData d;
  d.f_ = [](const Vec2&, const Vec2&) { return 0.0; };
  d.gx_ = [](const Vec2&, const Vec2&) { return Vec2{0.0, 0.0}; };
  d.gv_ = [](const Vec2&, const Vec2&) { return Vec2{0.0, 0.0}; };
  d.eps_ = 0.0;
  d.radius_ = 1.0;
  d.zero_ = true;
  return d;
}

InitialData InitialData::gaussian(double eps, double sigma_x, double sigma_v) {
  if (!(sigma_x > 0.0) || !(sigma_v > 0.0))
    throw Error("profile-out-of-range", "gaussian widths must be positive");
  InitialData d;
  const double ax = 1.0 / (sigma_x * sigma_x), av = 1.0 / (sigma_v * sigma_v);
  const double c = eps / (2.0 * M_PI * sigma_v * sigma_v);
  auto val = [=](const Vec2& x, const Vec2& v) {
    return c * std::exp(-0.5 * ax * (x.x * x.x + x.y * x.y) -
                        0.5 * av * (v.x * v.x + v.y * v.y));
  };
  d.f_ = val;
  d.gx_ = [=](const Vec2& x, const Vec2& v) {
    const double f = val(x, v);
    return Vec2{-ax * x.x * f, -ax * x.y * f};
  };
  d.gv_ = [=](const Vec2& x, const Vec2& v) {
    const double f = val(x, v);
    return Vec2{-av * v.x * f, -av * v.y * f};
  };
  d.eps_ = eps;
  d.radius_ = 9.0 * std::max(sigma_x, sigma_v);
  d.zero_ = (eps == 0.0);
  return d;
}

InitialData InitialData::custom(Eval f, GradEval grad_x, GradEval grad_v, double eps,
                                double radius) {
  if (!(radius > 0.0)) throw Error("profile-out-of-range", "support radius must be positive");
  InitialData d;
  d.f_ = std::move(f);
  d.gx_ = std::move(grad_x);
  d.gv_ = std::move(grad_v);
  d.eps_ = eps;
  d.radius_ = radius;
  d.zero_ = (eps == 0.0);
  return d;
}

double InitialData::mass(const PeriodicGrid& xg, const VelocityGrid& vg) const {
  double acc = 0.0;
  for (int i = 0; i < xg.N; ++i)
    for (int j = 0; j < xg.N; ++j) {
      const Vec2 x{xg.node(i), xg.node(j)};
      double mv = 0.0;
      for (int a = 0; a < vg.Nv; ++a)
        for (int b = 0; b < vg.Nv; ++b) mv += f_(x, Vec2{vg.node(a), vg.node(b)});
      acc += mv;
    }
  return acc * xg.dx() * xg.dx() * vg.weight();
}

}  // namespace landau
