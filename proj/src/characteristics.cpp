// Backward substitution for the discretized flow integral equations (see the
// header for the suffix-sum algebra), subsample dt-refinement verification,
// Newton inversion of the velocity map, and the weighted flow diagnostics.
#include "landau/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace landau {

namespace {

inline void cr_weights(double u, double w[4]) {
  const double u2 = u * u, u3 = u2 * u;
  w[0] = -0.5 * u3 + u2 - 0.5 * u;
  w[1] = 1.5 * u3 - 2.5 * u2 + 1.0;
  w[2] = -1.5 * u3 + 2.0 * u2 + 0.5 * u;
  w[3] = 0.5 * u3 - 0.5 * u2;
}

// stencil start index and weights along one axis; periodic or clamped
inline void axis_stencil(double u, int n, bool periodic, int idx[4], double w[4]) {
  const double f = std::floor(u);
  cr_weights(u - f, w);
  const long b = static_cast<long>(f) - 1;
  for (int q = 0; q < 4; ++q) {
    long i = b + q;
    if (periodic)
      i = (i % n + n) % n;
    else
      i = std::clamp(i, 0l, static_cast<long>(n - 1));
    idx[q] = static_cast<int>(i);
  }
}

template <typename T>
T lattice_interp(const std::vector<T>& a, const PhaseGrid& pg, const Vec2& x, const Vec2& v) {
  const int N = pg.x.N, Nv = pg.v.Nv;
  int ix[4], iy[4], jx[4], jy[4];
  double wx[4], wy[4], wvx[4], wvy[4];
  axis_stencil((x.x + pg.x.L) / pg.x.dx(), N, true, ix, wx);
  axis_stencil((x.y + pg.x.L) / pg.x.dx(), N, true, iy, wy);
  axis_stencil((v.x + pg.v.vmax) / pg.v.dv(), Nv, false, jx, wvx);
  axis_stencil((v.y + pg.v.vmax) / pg.v.dv(), Nv, false, jy, wvy);
  T out{};
  for (int a1 = 0; a1 < 4; ++a1)
    for (int a2 = 0; a2 < 4; ++a2) {
      const double w12 = wx[a1] * wy[a2];
      for (int b1 = 0; b1 < 4; ++b1) {
        const double w123 = w12 * wvx[b1];
        for (int b2 = 0; b2 < 4; ++b2)
          out += w123 * wvy[b2] * a[pg.index(ix[a1], iy[a2], jx[b1], jy[b2])];
      }
    }
  return out;
}

// Mat2 field interpolated in v only, x fixed on the lattice
Mat2 v_interp(const std::vector<Mat2>& a, const PhaseGrid& pg, int ix, int iy, const Vec2& v) {
  const int Nv = pg.v.Nv;
  int jx[4], jy[4];
  double wvx[4], wvy[4];
  axis_stencil((v.x + pg.v.vmax) / pg.v.dv(), Nv, false, jx, wvx);
  axis_stencil((v.y + pg.v.vmax) / pg.v.dv(), Nv, false, jy, wvy);
  Mat2 out{};
  const std::size_t base = (static_cast<std::size_t>(ix) * pg.x.N + iy) * pg.v.size();
  for (int b1 = 0; b1 < 4; ++b1) {
    const std::size_t row = base + static_cast<std::size_t>(jx[b1]) * Nv;
    for (int b2 = 0; b2 < 4; ++b2) out += wvx[b1] * wvy[b2] * a[row + jy[b2]];
  }
  return out;
}

struct MarchState {
  std::vector<Vec2> U0, U1;            // suffix sums of w E and w tau E
  std::vector<Mat2> UB0, UB1, UC0, UC1;  // Jacobian analogues
};

FlowMaps make_snapshot(double s, double t, const PhaseGrid& pg) {
  FlowMaps f;
  f.s = s;
  f.t = t;
  f.grid = pg;
  const std::size_t n = pg.size();
  f.Y.resize(n);
  f.W.resize(n);
  f.grad_x_Y.resize(n);
  f.grad_v_Y.resize(n);
  f.grad_x_W.resize(n);
  f.grad_v_W.resize(n);
  return f;
}

// scalar (no Jacobians) re-march of selected points at dt_native/2^level,
// collecting Y,W at the requested s nodes; used for convergence verification
void march_points(const FieldSampler& field, double t, const std::vector<double>& s_nodes,
                  const std::vector<Vec2>& xt, const std::vector<Vec2>& vp, int level,
                  std::vector<Vec2>& Yout, std::vector<Vec2>& Wout) {
  const double dtn = field.time().dt();
  const int sub = 1 << level;
  const double dt = dtn / sub;
  const double smin = s_nodes.back();
  const int steps = static_cast<int>(std::lround((t - smin) / dt));
  const std::size_t np = xt.size(), ns = s_nodes.size();
  Yout.assign(np * ns, Vec2{});
  Wout.assign(np * ns, Vec2{});
  for (std::size_t p = 0; p < np; ++p) {
    Vec2 U0, U1;
    Vec2 e;
    Mat2 de;
    // seed at tau = t
    {
      const Vec2 z = xt[p] + t * vp[p];
      if (level == 0)
        field.eval_node(field.node_index(t), z, e, de);
      else
        e = field.value(t, z);
      U0 = 0.5 * e;
      U1 = (0.5 * t) * e;
    }
    std::size_t snext = 0;
    while (snext < ns && std::abs(s_nodes[snext] - t) < 1e-12 * std::max(1.0, t)) {
      // s = t snapshot is identically zero
      ++snext;
    }
    for (int k = 1; k <= steps; ++k) {
      const double s = t - k * dt;
      const Vec2 Ynew = dt * (U1 - s * U0);
      const Vec2 z = xt[p] + s * vp[p] + Ynew;
      if (k % sub == 0)
        field.eval_node(field.node_index(s), z, e, de);
      else
        e = field.value(s, z);
      if (snext < ns && std::abs(s - s_nodes[snext]) < 1e-9 * std::max(1.0, t)) {
        Yout[p * ns + snext] = Ynew;
        Wout[p * ns + snext] = -dt * (U0 + 0.5 * e);
        ++snext;
      }
      U0 += e;
      U1 += s * e;
    }
  }
}

double det4(const double m[4][4]) {
  double d = 0.0;
  for (int c = 0; c < 4; ++c) {
    double sub[3][3];
    for (int r = 1; r < 4; ++r) {
      int cc = 0;
      for (int k = 0; k < 4; ++k) {
        if (k == c) continue;
        sub[r - 1][cc++] = m[r][k];
      }
    }
    const double minor = sub[0][0] * (sub[1][1] * sub[2][2] - sub[1][2] * sub[2][1]) -
                         sub[0][1] * (sub[1][0] * sub[2][2] - sub[1][2] * sub[2][0]) +
                         sub[0][2] * (sub[1][0] * sub[2][1] - sub[1][1] * sub[2][0]);
    d += (c % 2 == 0 ? 1.0 : -1.0) * m[0][c] * minor;
  }
  return d;
}

}  // namespace

Vec2 FlowMaps::sample_Y(const Vec2& x, const Vec2& v) const { return lattice_interp(Y, grid, x, v); }
Vec2 FlowMaps::sample_W(const Vec2& x, const Vec2& v) const { return lattice_interp(W, grid, x, v); }
Mat2 FlowMaps::sample_grad_x_Y(const Vec2& x, const Vec2& v) const {
  return lattice_interp(grad_x_Y, grid, x, v);
}
Mat2 FlowMaps::sample_grad_v_Y(const Vec2& x, const Vec2& v) const {
  return lattice_interp(grad_v_Y, grid, x, v);
}

std::vector<FlowMaps> compute_flow_family(const FieldSampler& field, double t,
                                          const std::vector<double>& s_list, const PhaseGrid& pg,
                                          double tol, int max_iter, const FlowOptions& opt) {
  if (s_list.empty()) throw Error("grid-mismatch", "empty snapshot list");
  if (pg.x.N <= 0 || pg.v.Nv <= 0) throw Error("grid-mismatch", "empty phase grid");
  const int mt = field.node_index(t);
  // snapshot node -> output position, validated against the field grid
  std::vector<std::pair<int, std::size_t>> snaps;
  for (std::size_t i = 0; i < s_list.size(); ++i) {
    if (s_list[i] > t + 1e-12 * std::max(1.0, t))
      throw Error("grid-mismatch", "snapshot after the target time");
    snaps.emplace_back(field.node_index(s_list[i]), i);
  }
  std::sort(snaps.begin(), snaps.end(), [](auto& a, auto& b) { return a.first > b.first; });
  const int ms_min = snaps.back().first;

  std::vector<FlowMaps> out(s_list.size());
  const std::size_t n = pg.size();
  const int N = pg.x.N, Nv = pg.v.Nv;
  const double dt = field.time().dt();

  MarchState st;
  st.U0.resize(n);
  st.U1.resize(n);
  st.UB0.resize(n);
  st.UB1.resize(n);
  st.UC0.resize(n);
  st.UC1.resize(n);

  std::mutex merge_mtx;
  double ymax_all = 0.0;
  bool finite_all = true;

  std::size_t snap_pos = 0;
  auto snapshots_at = [&](int m) {
    std::vector<std::size_t> hit;
    while (snap_pos < snaps.size() && snaps[snap_pos].first == m) hit.push_back(snaps[snap_pos++].second);
    return hit;
  };

  // tau = t seed
  {
    const auto hit = snapshots_at(mt);
    for (std::size_t i : hit) out[i] = make_snapshot(t, t, pg);
    parallel_for_chunks(n, [&](std::size_t b, std::size_t e) {
      Vec2 Ev;
      Mat2 dEv;
      for (std::size_t p = b; p < e; ++p) {
        const std::size_t jy = p % Nv, jx = (p / Nv) % Nv;
        const std::size_t iy = (p / (Nv * static_cast<std::size_t>(Nv))) % N;
        const std::size_t ix = p / (Nv * static_cast<std::size_t>(Nv) * N);
        const Vec2 xt{pg.x.node(static_cast<int>(ix)), pg.x.node(static_cast<int>(iy))};
        const Vec2 v{pg.v.node(static_cast<int>(jx)), pg.v.node(static_cast<int>(jy))};
        field.eval_node(mt, xt + t * v, Ev, dEv);
        st.U0[p] = 0.5 * Ev;
        st.U1[p] = (0.5 * t) * Ev;
        st.UB0[p] = 0.5 * dEv;
        st.UB1[p] = (0.5 * t) * dEv;
        const Mat2 C = t * dEv;
        st.UC0[p] = 0.5 * C;
        st.UC1[p] = (0.5 * t) * C;
      }
    });
  }

  for (int m = mt - 1; m >= ms_min; --m) {
    const double s = field.time().node(m);
    const auto hit = snapshots_at(m);
    FlowMaps* snap = nullptr;
    if (!hit.empty()) {
      out[hit.front()] = make_snapshot(s, t, pg);
      snap = &out[hit.front()];
    }
    parallel_for_chunks(n, [&](std::size_t b, std::size_t e) {
      Vec2 Ev;
      Mat2 dEv;
      double ymax = 0.0;
      bool finite = true;
      const Mat2 id = Mat2::identity();
      for (std::size_t p = b; p < e; ++p) {
        const std::size_t jy = p % Nv, jx = (p / Nv) % Nv;
        const std::size_t iy = (p / (Nv * static_cast<std::size_t>(Nv))) % N;
        const std::size_t ix = p / (Nv * static_cast<std::size_t>(Nv) * N);
        const Vec2 xt{pg.x.node(static_cast<int>(ix)), pg.x.node(static_cast<int>(iy))};
        const Vec2 v{pg.v.node(static_cast<int>(jx)), pg.v.node(static_cast<int>(jy))};

        const Vec2 Ynew = dt * (st.U1[p] - s * st.U0[p]);
        const Mat2 dxYn = dt * (st.UB1[p] - s * st.UB0[p]);
        const Mat2 dvYn = dt * (st.UC1[p] - s * st.UC0[p]);
        const double yn = Ynew.norm();
        ymax = std::max(ymax, yn);
        finite = finite && std::isfinite(yn);

        field.eval_node(m, xt + s * v + Ynew, Ev, dEv);
        const Mat2 B = dEv * (id + dxYn);
        const Mat2 C = s * dEv + dEv * dvYn;
        if (snap) {
          snap->Y[p] = Ynew;
          snap->W[p] = -dt * (st.U0[p] + 0.5 * Ev);
          snap->grad_x_Y[p] = dxYn;
          snap->grad_v_Y[p] = dvYn;
          snap->grad_x_W[p] = -dt * (st.UB0[p] + 0.5 * B);
          snap->grad_v_W[p] = -dt * (st.UC0[p] + 0.5 * C);
        }
        st.U0[p] += Ev;
        st.U1[p] += s * Ev;
        st.UB0[p] += B;
        st.UB1[p] += s * B;
        st.UC0[p] += C;
        st.UC1[p] += s * C;
      }
      std::lock_guard<std::mutex> lk(merge_mtx);
      ymax_all = std::max(ymax_all, ymax);
      finite_all = finite_all && finite;
    });
    if (!finite_all || ymax_all > opt.blowup_guard)
      throw Error("picard-divergence", "flow displacement left the perturbative regime");
    for (std::size_t i = 1; i < hit.size(); ++i) out[hit[i]] = out[hit.front()];
  }

  // duplicate snapshots requested at the same node
  for (std::size_t i = 0; i < s_list.size(); ++i)
    if (out[i].Y.empty()) {
      // can only happen for duplicates of the seed node
      out[i] = make_snapshot(t, t, pg);
    }

  if (opt.verify && max_iter > 1 && mt > ms_min) {
    // deterministic subsample; splitmix-style index hashing
    std::vector<Vec2> xt, vp;
    std::vector<std::size_t> pts;
    std::uint64_t h = opt.verify_seed;
    const std::size_t want = std::min<std::size_t>(opt.verify_points, n);
    for (std::size_t i = 0; i < want; ++i) {
      h += 0x9e3779b97f4a7c15ull;
      std::uint64_t z = h;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      pts.push_back((z ^ (z >> 31)) % n);
    }
    std::vector<double> s_nodes;
    for (const auto& sn : snaps) {
      const double sv = field.time().node(sn.first);
      if (s_nodes.empty() || std::abs(s_nodes.back() - sv) > 1e-15) s_nodes.push_back(sv);
    }
    for (std::size_t p : pts) {
      const std::size_t jy = p % Nv, jx = (p / Nv) % Nv;
      const std::size_t iy = (p / (Nv * static_cast<std::size_t>(Nv))) % N;
      const std::size_t ix = p / (Nv * static_cast<std::size_t>(Nv) * N);
      xt.push_back({pg.x.node(static_cast<int>(ix)), pg.x.node(static_cast<int>(iy))});
      vp.push_back({pg.v.node(static_cast<int>(jx)), pg.v.node(static_cast<int>(jy))});
    }
    // level-0 reference from the full-grid snapshots
    const std::size_t ns = s_nodes.size();
    std::vector<Vec2> Y0(pts.size() * ns), W0(pts.size() * ns);
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < ns; ++j) {
        // find the output snapshot at this s node
        for (const auto& sn : snaps)
          if (std::abs(field.time().node(sn.first) - s_nodes[j]) < 1e-15) {
            Y0[i * ns + j] = out[sn.second].Y.empty() ? Vec2{} : out[sn.second].Y[pts[i]];
            W0[i * ns + j] = out[sn.second].W.empty() ? Vec2{} : out[sn.second].W[pts[i]];
            break;
          }
      }
    std::vector<Vec2> Yp = Y0, Wp = W0, Yl, Wl;
    double diff = 0.0;
    for (int level = 1; level < max_iter; ++level) {
      march_points(field, t, s_nodes, xt, vp, level, Yl, Wl);
      diff = 0.0;
      for (std::size_t q = 0; q < Yl.size(); ++q)
        diff = std::max(diff, std::max((Yl[q] - Yp[q]).norm(), (Wl[q] - Wp[q]).norm()));
      Yp = Yl;
      Wp = Wl;
      if (diff < tol) break;
    }
    double resid = 0.0;
    for (std::size_t q = 0; q < Yp.size(); ++q)
      resid = std::max(resid, std::max((Yp[q] - Y0[q]).norm(), (Wp[q] - W0[q]).norm()));
    if (diff >= tol || resid > 10.0 * tol)
      throw Error("picard-divergence",
                  "flow march not converged: refinement change " + std::to_string(diff) +
                      ", residual " + std::to_string(resid) + " vs tol " + std::to_string(tol));
  }

  return out;
}

FlowMaps compute_flow(const FieldSampler& field, double s, double t, const PhaseGrid& pg,
                      double tol, int max_iter, const FlowOptions& opt) {
  auto fam = compute_flow_family(field, t, {s}, pg, tol, max_iter, opt);
  return std::move(fam.front());
}

void invert_flow(FlowMaps& flow, const FieldSampler& field, double tol, int max_iter) {
  if (!(field.grid() == flow.grid.x))
    throw Error("grid-mismatch", "sampler and flow use different spatial grids");
  const std::size_t n = flow.grid.size();
  flow.Psi.assign(n, Vec2{});
  const double ts = flow.t - flow.s;
  const int N = flow.grid.x.N, Nv = flow.grid.v.Nv;
  std::mutex mtx;
  double worst = 0.0;
  parallel_for_chunks(n, [&](std::size_t b, std::size_t e) {
    double bad = 0.0;
    for (std::size_t p = b; p < e; ++p) {
      const std::size_t jy = p % Nv, jx = (p / Nv) % Nv;
      const std::size_t iy = (p / (Nv * static_cast<std::size_t>(Nv))) % N;
      const std::size_t ix = p / (Nv * static_cast<std::size_t>(Nv) * N);
      const Vec2 x{flow.grid.x.node(static_cast<int>(ix)), flow.grid.x.node(static_cast<int>(iy))};
      const Vec2 v{flow.grid.v.node(static_cast<int>(jx)), flow.grid.v.node(static_cast<int>(jy))};
      if (ts == 0.0) {
        flow.Psi[p] = v;
        continue;
      }
      Vec2 psi = v;
      double defect = 0.0;
      for (int it = 0; it < max_iter; ++it) {
        const Vec2 xq{x.x - flow.t * psi.x, x.y - flow.t * psi.y};
        const Vec2 F = ts * (psi - v) - flow.sample_Y(xq, psi);
        defect = F.norm();
        if (defect < tol) break;
        const Mat2 gx = flow.sample_grad_x_Y(xq, psi);
        const Mat2 gv = flow.sample_grad_v_Y(xq, psi);
        // dF/dpsi = (t-s) I + t grad_x Y - grad_v Y
        Mat2 J{ts + flow.t * gx.a11 - gv.a11, flow.t * gx.a12 - gv.a12,
               flow.t * gx.a21 - gv.a21, ts + flow.t * gx.a22 - gv.a22};
        const double det = J.det();
        if (std::abs(det) < 1e-14) {
          defect = 1e30;
          break;
        }
        const Vec2 step{(J.a22 * F.x - J.a12 * F.y) / det, (-J.a21 * F.x + J.a11 * F.y) / det};
        psi = psi - step;
      }
      flow.Psi[p] = psi;
      bad = std::max(bad, defect);
    }
    std::lock_guard<std::mutex> lk(mtx);
    worst = std::max(worst, bad);
  });
  if (worst >= tol)
    throw Error("inverse-map-failure",
                "Newton defect " + std::to_string(worst) + " above tol " + std::to_string(tol));
}

double liouville_defect(const FlowMaps& flow, int stride) {
  const int N = flow.grid.x.N, Nv = flow.grid.v.Nv;
  const double ts = flow.t - flow.s, t = flow.t;
  double worst = 0.0;
  for (int ix = 0; ix < N; ix += stride)
    for (int iy = 0; iy < N; iy += stride)
      for (int jx = 0; jx < Nv; jx += stride)
        for (int jy = 0; jy < Nv; jy += stride) {
          const std::size_t p = flow.grid.index(ix, iy, jx, jy);
          const Mat2& ax = flow.grad_x_Y[p];
          const Mat2& av = flow.grad_v_Y[p];
          const Mat2& cx = flow.grad_x_W[p];
          const Mat2& cv = flow.grad_v_W[p];
          // physical Jacobian blocks: X = x-(t-s)v+Y(x-tv,v), V = v+W(x-tv,v)
          const double m[4][4] = {
              {1.0 + ax.a11, ax.a12, -ts - t * ax.a11 + av.a11, -t * ax.a12 + av.a12},
              {ax.a21, 1.0 + ax.a22, -t * ax.a21 + av.a21, -ts - t * ax.a22 + av.a22},
              {cx.a11, cx.a12, 1.0 - t * cx.a11 + cv.a11, -t * cx.a12 + cv.a12},
              {cx.a21, cx.a22, -t * cx.a21 + cv.a21, 1.0 - t * cx.a22 + cv.a22}};
          worst = std::max(worst, std::abs(det4(m) - 1.0));
        }
  return worst;
}

FlowDiagnostics flow_diagnostics(const std::vector<FlowMaps>& flows, double a,
                                 const ShiftSet& shifts, double g_norm, int holder_stride) {
  if (a <= 0.0 || a >= 1.0) throw Error("assumption-window-exceeded", "Holder index must be in (0,1)");
  if (holder_stride < 1) holder_stride = 1;
  FlowDiagnostics d;
  d.g_norm = g_norm;
  double cols[7] = {0, 0, 0, 0, 0, 0, 0};
  for (const FlowMaps& f : flows) {
    FlowDiagnosticsRow r;
    r.s = f.s;
    r.t = f.t;
    double sy = 0, sxy = 0, svy = 0, sw = 0, svw = 0;
    for (std::size_t p = 0; p < f.Y.size(); ++p) {
      sy = std::max(sy, f.Y[p].norm());
      sw = std::max(sw, f.W[p].norm());
      sxy = std::max(sxy, f.grad_x_Y[p].max_abs());
      svy = std::max(svy, f.grad_v_Y[p].max_abs());
      svw = std::max(svw, f.grad_v_W[p].max_abs());
    }
    const double br = bracket(f.s);
    r.wY = br * sy;
    r.wGradxY = std::pow(br, 1.0 + a) * sxy;
    r.wGradvY = std::pow(br, a) * svy;
    r.wW = br * br * sw;
    r.wGradvW = std::pow(br, 1.0 + a) * svw;

    // velocity-Holder quotients of the v gradients, interpolated off-lattice
    const int N = f.grid.x.N, Nv = f.grid.v.Nv;
    const double vmax = f.grid.v.vmax, dv = f.grid.v.dv();
    double hw = 0.0, hy = 0.0;
    for (double h : shifts.magnitudes)
      for (const Vec2& dir : shifts.directions) {
        const Vec2 al = h * dir;
        const double fac = std::pow(h, -a);
        for (int ix = 0; ix < N; ix += holder_stride)
          for (int iy = 0; iy < N; iy += holder_stride)
            for (int jx = 0; jx < Nv; jx += holder_stride)
              for (int jy = 0; jy < Nv; jy += holder_stride) {
                const Vec2 v{f.grid.v.node(jx), f.grid.v.node(jy)};
                const Vec2 vq = v + al;
                if (vq.x < -vmax + dv || vq.x > vmax - 2 * dv || vq.y < -vmax + dv ||
                    vq.y > vmax - 2 * dv)
                  continue;
                const std::size_t p = f.grid.index(ix, iy, jx, jy);
                const Mat2 dw = v_interp(f.grad_v_W, f.grid, ix, iy, vq) - f.grad_v_W[p];
                const Mat2 dy = v_interp(f.grad_v_Y, f.grid, ix, iy, vq) - f.grad_v_Y[p];
                hw = std::max(hw, fac * dw.max_abs());
                hy = std::max(hy, fac * dy.max_abs());
              }
      }
    r.wHolderGradvW = br * hw;
    r.holderGradvY = hy;

    cols[0] = std::max(cols[0], r.wY);
    cols[1] = std::max(cols[1], r.wGradxY);
    cols[2] = std::max(cols[2], r.wGradvY);
    cols[3] = std::max(cols[3], r.wW);
    cols[4] = std::max(cols[4], r.wGradvW);
    cols[5] = std::max(cols[5], r.wHolderGradvW);
    cols[6] = std::max(cols[6], r.holderGradvY);
    d.rows.push_back(r);
  }
  const char* names[7] = {"wY", "wGradxY", "wGradvY", "wW", "wGradvW", "wHolderGradvW", "holderGradvY"};
  d.summary.gamma = a;
  d.summary.m = 1;
  d.summary.T = flows.empty() ? 0.0 : flows.front().t;
  d.summary.h0 = shifts.h0();
  d.summary.shift_count = static_cast<int>(shifts.magnitudes.size() * shifts.directions.size());
  double peak = 0.0;
  for (int c = 0; c < 7; ++c) {
    d.summary.add(names[c], cols[c]);
    peak = std::max(peak, cols[c]);
  }
  if (g_norm > 0.0) d.ratio = peak / g_norm;
  return d;
}

}  // namespace landau
