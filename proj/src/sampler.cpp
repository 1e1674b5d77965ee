// Exact path: direct Fourier series summation with per-axis phase tables,
// derivatives by (i xi)^alpha factors under the sum.  Fast path: zero-pad the
// slice spectrum onto a refine*N lattice (values there are exact), store
// [E, grad E] interleaved per cell, gather 4x4 Catmull-Rom stencils.
#include "landau/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace landau {

namespace {

// Catmull-Rom weights for fraction u in [0,1) over nodes {-1,0,1,2}
inline void cr_weights(double u, double w[4]) {
  const double u2 = u * u, u3 = u2 * u;
  w[0] = -0.5 * u3 + u2 - 0.5 * u;
  w[1] = 1.5 * u3 - 2.5 * u2 + 1.0;
  w[2] = -1.5 * u3 + 2.0 * u2 + 0.5 * u;
  w[3] = 0.5 * u3 - 0.5 * u2;
}

// stencil bases and weights for a 4x4 Catmull-Rom gather on an Nf lattice
struct Gather {
  int ix[4], iy[4];
  double wx[4], wy[4];
};

inline Gather make_gather(const PeriodicGrid& g, int Nf, const Vec2& x) {
  Gather s;
  const double dxf = 2.0 * g.L / Nf;
  const double ux = (x.x + g.L) / dxf, uy = (x.y + g.L) / dxf;
  const double fx = std::floor(ux), fy = std::floor(uy);
  cr_weights(ux - fx, s.wx);
  cr_weights(uy - fy, s.wy);
  const long bx = static_cast<long>(fx) - 1, by = static_cast<long>(fy) - 1;
  for (int q = 0; q < 4; ++q) {
    s.ix[q] = static_cast<int>(((bx + q) % Nf + Nf) % Nf);
    s.iy[q] = static_cast<int>(((by + q) % Nf + Nf) % Nf);
  }
  return s;
}

// derivative order per axis: (ax, ay) each 0..2, summed series
// returns sum_k hat_k (i xi1)^ax (i xi2)^ay e^{i xi . x}, real part
double trig_sum(const ScalarField2D& f, const Vec2& x, int ax, int ay) {
  const PeriodicGrid& g = f.grid();
  const auto& hat = f.spectrum();
  const int N = g.N;
  std::vector<cplx> px(N), py(N);
  for (int i = 0; i < N; ++i) {
    const double xi = g.freq(i);
    px[i] = std::polar(1.0, xi * x.x);
    py[i] = std::polar(1.0, xi * x.y);
    const cplx ifac(0.0, xi);
    if (ax == 1) px[i] *= ifac;
    if (ax == 2) px[i] *= ifac * ifac;
    if (ay == 1) py[i] *= cplx(0.0, xi);
    if (ay == 2) py[i] *= cplx(0.0, xi) * cplx(0.0, xi);
  }
  cplx acc(0.0, 0.0);
  for (int i = 0; i < N; ++i) {
    cplx row(0.0, 0.0);
    const std::size_t off = static_cast<std::size_t>(i) * N;
    for (int j = 0; j < N; ++j) row += hat[off + j] * py[j];
    acc += px[i] * row;
  }
  return acc.real();
}

}  // namespace

FieldSampler::FieldSampler(SpaceTimeVectorField E, Options opt) : E_(std::move(E)), opt_(opt) {
  if (E_.time().M < 2) throw Error("grid-mismatch", "sampler needs at least two time intervals");
  if (opt_.refine < 1) throw Error("grid-mismatch", "refine factor must be positive");
  const int M = E_.time().M;
  per_node_sup_.assign(static_cast<std::size_t>(M) + 1, 0.0);
  for (int m = 0; m <= M; ++m) {
    const auto& vx = E_.slice(m).x.values();
    const auto& vy = E_.slice(m).y.values();
    double s = 0.0;
    for (std::size_t p = 0; p < vx.size(); ++p) s = std::max(s, std::hypot(vx[p], vy[p]));
    per_node_sup_[static_cast<std::size_t>(m)] = s;
    node_sup_ = std::max(node_sup_, s);
  }
  if (opt_.precompute) build_fine();
}

void FieldSampler::build_fine() {
  const PeriodicGrid& g = E_.grid();
  const int N = g.N, R = opt_.refine;
  Nf_ = N * R;
  const PeriodicGrid fg(Nf_, g.L);
  const int M = E_.time().M;
  const std::size_t cells = static_cast<std::size_t>(Nf_) * Nf_;
  fine_.assign(static_cast<std::size_t>(M + 1) * cells * 6, 0.0);

  std::vector<cplx> pad(cells);
  auto embed = [&](const std::vector<cplx>& hat, int dax) {
    std::fill(pad.begin(), pad.end(), cplx(0.0, 0.0));
    for (int i = 0; i < N; ++i) {
      const int k1 = g.kindex(i);
      const int fi = k1 >= 0 ? k1 : k1 + Nf_;
      for (int j = 0; j < N; ++j) {
        const int k2 = g.kindex(j);
        const int fj = k2 >= 0 ? k2 : k2 + Nf_;
        cplx c = hat[static_cast<std::size_t>(i) * N + j];
        if (dax == 1) c *= cplx(0.0, M_PI * k1 / g.L);
        if (dax == 2) c *= cplx(0.0, M_PI * k2 / g.L);
        pad[static_cast<std::size_t>(fi) * Nf_ + fj] = c;
      }
    }
    return ScalarField2D::from_spectrum(fg, pad);
  };

  for (int m = 0; m <= M; ++m) {
    const ScalarField2D* comp[2] = {&E_.slice(m).x, &E_.slice(m).y};
    double* base = fine_.data() + static_cast<std::size_t>(m) * cells * 6;
    for (int c = 0; c < 2; ++c) {
      const auto& hat = comp[c]->spectrum();
      const auto val = embed(hat, 0).values();
      const auto dx = embed(hat, 1).values();
      const auto dy = embed(hat, 2).values();
      for (std::size_t p = 0; p < cells; ++p) {
        base[p * 6 + c] = val[p];
        base[p * 6 + 2 + 2 * c] = dx[p];
        base[p * 6 + 3 + 2 * c] = dy[p];
      }
    }
  }
}

int FieldSampler::node_index(double t) const {
  const TimeGrid& tg = E_.time();
  const int m = static_cast<int>(std::lround(t / tg.dt()));
  if (m < 0 || m > tg.M || std::abs(t - tg.node(m)) > 1e-9 * std::max(1.0, tg.T))
    throw Error("grid-mismatch", "time is not a stored field node");
  return m;
}

Vec2 FieldSampler::value_exact(double t, const Vec2& x) const {
  int idx[4];
  double w[4];
  time_weights(t, idx, w);
  Vec2 out;
  for (int q = 0; q < 4; ++q) {
    if (w[q] == 0.0) continue;
    const VectorField2D& s = E_.slice(idx[q]);
    out += w[q] * Vec2{trig_sum(s.x, x, 0, 0), trig_sum(s.y, x, 0, 0)};
  }
  return out;
}

Mat2 FieldSampler::grad_exact(double t, const Vec2& x) const {
  int idx[4];
  double w[4];
  time_weights(t, idx, w);
  Mat2 out;
  for (int q = 0; q < 4; ++q) {
    if (w[q] == 0.0) continue;
    const VectorField2D& s = E_.slice(idx[q]);
    out += w[q] * Mat2{trig_sum(s.x, x, 1, 0), trig_sum(s.x, x, 0, 1),
                       trig_sum(s.y, x, 1, 0), trig_sum(s.y, x, 0, 1)};
  }
  return out;
}

Mat2 FieldSampler::hess_exact(double t, const Vec2& x, int comp) const {
  int idx[4];
  double w[4];
  time_weights(t, idx, w);
  Mat2 out;
  for (int q = 0; q < 4; ++q) {
    if (w[q] == 0.0) continue;
    const VectorField2D& s = E_.slice(idx[q]);
    const ScalarField2D& f = comp == 0 ? s.x : s.y;
    const double dxy = trig_sum(f, x, 1, 1);
    out += w[q] * Mat2{trig_sum(f, x, 2, 0), dxy, dxy, trig_sum(f, x, 0, 2)};
  }
  return out;
}

void FieldSampler::exact_node(int m, const Vec2& x, Vec2& E, Mat2& gradE) const {
  const VectorField2D& s = E_.slice(m);
  E = {trig_sum(s.x, x, 0, 0), trig_sum(s.y, x, 0, 0)};
  gradE = {trig_sum(s.x, x, 1, 0), trig_sum(s.x, x, 0, 1),
           trig_sum(s.y, x, 1, 0), trig_sum(s.y, x, 0, 1)};
}

void FieldSampler::eval_node(int m, const Vec2& x, Vec2& E, Mat2& gradE) const {
  if (!opt_.precompute) {
    exact_node(m, x, E, gradE);
    return;
  }
  const Gather s = make_gather(E_.grid(), Nf_, x);
  const double* base = fine_.data() + static_cast<std::size_t>(m) * Nf_ * Nf_ * 6;
  double acc[6] = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  for (int a = 0; a < 4; ++a) {
    const double* row = base + static_cast<std::size_t>(s.ix[a]) * Nf_ * 6;
    const double wa = s.wx[a];
    for (int b = 0; b < 4; ++b) {
      const double w = wa * s.wy[b];
      const double* p = row + static_cast<std::size_t>(s.iy[b]) * 6;
      for (int c = 0; c < 6; ++c) acc[c] += w * p[c];
    }
  }
  E = {acc[0], acc[1]};
  gradE = {acc[2], acc[3], acc[4], acc[5]};
}

Vec2 FieldSampler::value_node(int m, const Vec2& x) const {
  if (!opt_.precompute) {
    const VectorField2D& sl = E_.slice(m);
    return {trig_sum(sl.x, x, 0, 0), trig_sum(sl.y, x, 0, 0)};
  }
  const Gather s = make_gather(E_.grid(), Nf_, x);
  const double* base = fine_.data() + static_cast<std::size_t>(m) * Nf_ * Nf_ * 6;
  double ax = 0.0, ay = 0.0;
  for (int a = 0; a < 4; ++a) {
    const double* row = base + static_cast<std::size_t>(s.ix[a]) * Nf_ * 6;
    const double wa = s.wx[a];
    for (int b = 0; b < 4; ++b) {
      const double w = wa * s.wy[b];
      const double* p = row + static_cast<std::size_t>(s.iy[b]) * 6;
      ax += w * p[0];
      ay += w * p[1];
    }
  }
  return {ax, ay};
}

Vec2 FieldSampler::value(double t, const Vec2& x) const {
  int idx[4];
  double w[4];
  time_weights(t, idx, w);
  Vec2 out;
  Vec2 e;
  Mat2 de;
  for (int q = 0; q < 4; ++q) {
    if (w[q] == 0.0) continue;
    eval_node(idx[q], x, e, de);
    out += w[q] * e;
  }
  return out;
}

Mat2 FieldSampler::grad(double t, const Vec2& x) const {
  int idx[4];
  double w[4];
  time_weights(t, idx, w);
  Mat2 out;
  Vec2 e;
  Mat2 de;
  for (int q = 0; q < 4; ++q) {
    if (w[q] == 0.0) continue;
    eval_node(idx[q], x, e, de);
    out += w[q] * de;
  }
  return out;
}

ScalarSampler::ScalarSampler(SpaceTimeField F, int refine) : F_(std::move(F)), refine_(refine) {
  if (F_.time().M < 1) throw Error("grid-mismatch", "sampler needs at least one time interval");
  if (refine_ < 1) throw Error("grid-mismatch", "refine factor must be positive");
  const PeriodicGrid& g = F_.grid();
  const int N = g.N, M = F_.time().M;
  Nf_ = N * refine_;
  const PeriodicGrid fg(Nf_, g.L);
  const std::size_t cells = static_cast<std::size_t>(Nf_) * Nf_;
  fine_.assign(static_cast<std::size_t>(M + 1) * cells, 0.0);
  per_node_sup_.assign(static_cast<std::size_t>(M) + 1, 0.0);

  std::vector<cplx> pad(cells);
  for (int m = 0; m <= M; ++m) {
    const auto& hat = F_.slice(m).spectrum();
    std::fill(pad.begin(), pad.end(), cplx(0.0, 0.0));
    for (int i = 0; i < N; ++i) {
      const int k1 = g.kindex(i);
      const int fi = k1 >= 0 ? k1 : k1 + Nf_;
      for (int j = 0; j < N; ++j) {
        const int k2 = g.kindex(j);
        const int fj = k2 >= 0 ? k2 : k2 + Nf_;
        pad[static_cast<std::size_t>(fi) * Nf_ + fj] = hat[static_cast<std::size_t>(i) * N + j];
      }
    }
    const auto val = ScalarField2D::from_spectrum(fg, pad).values();
    double* base = fine_.data() + static_cast<std::size_t>(m) * cells;
    double sup = 0.0;
    for (std::size_t p = 0; p < cells; ++p) {
      base[p] = val[p];
      sup = std::max(sup, std::abs(val[p]));
    }
    per_node_sup_[static_cast<std::size_t>(m)] = sup;
  }
}

int ScalarSampler::node_index(double t) const {
  const TimeGrid& tg = F_.time();
  const int m = static_cast<int>(std::lround(t / tg.dt()));
  if (m < 0 || m > tg.M || std::abs(t - tg.node(m)) > 1e-9 * std::max(1.0, tg.T))
    throw Error("grid-mismatch", "time is not a stored field node");
  return m;
}

double ScalarSampler::value_node(int m, const Vec2& x) const {
  const Gather s = make_gather(F_.grid(), Nf_, x);
  const double* base = fine_.data() + static_cast<std::size_t>(m) * Nf_ * Nf_;
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    const double* row = base + static_cast<std::size_t>(s.ix[a]) * Nf_;
    const double wa = s.wx[a];
    for (int b = 0; b < 4; ++b) acc += wa * s.wy[b] * row[s.iy[b]];
  }
  return acc;
}

void FieldSampler::time_weights(double t, int idx[4], double w[4]) const {
  const TimeGrid& tg = E_.time();
  const double slack = 1e-9 * std::max(1.0, tg.T);
  if (t < -slack || t > tg.T + slack)
    throw Error("grid-mismatch", "sample time outside the stored window");
  t = std::clamp(t, 0.0, tg.T);
  const double dt = tg.dt();
  int m = std::min(static_cast<int>(std::floor(t / dt)), tg.M - 1);
  const double th = t / dt - m;
  const double th2 = th * th, th3 = th2 * th;
  const double h00 = 2 * th3 - 3 * th2 + 1, h10 = th3 - 2 * th2 + th;
  const double h01 = -2 * th3 + 3 * th2, h11 = th3 - th2;
  for (int q = 0; q < 4; ++q) w[q] = 0.0;
  idx[0] = std::max(m - 1, 0);
  idx[1] = m;
  idx[2] = m + 1;
  idx[3] = std::min(m + 2, tg.M);
  w[1] += h00;
  w[2] += h01;
  if (m > 0) {  // centered left slope (S[m+1]-S[m-1])/2
    w[0] += -0.5 * h10;
    w[2] += 0.5 * h10;
  } else {  // one-sided S[1]-S[0]
    w[1] += -h10;
    w[2] += h10;
  }
  if (m + 1 < tg.M) {
    w[1] += -0.5 * h11;
    w[3] += 0.5 * h11;
  } else {
    w[1] += -h11;
    w[2] += h11;
  }
}

}  // namespace landau
