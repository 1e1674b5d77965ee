#include "landau/linear_response.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>

namespace landau {

namespace {

constexpr double kBlowup = 1e6;

// rows are shared between modes with identical kernels: |k| for radial
// profiles, (|k1|, |k2|) otherwise (mu_hat even in each component)
long long row_key(int k1, int k2, bool radial) {
  if (radial) return static_cast<long long>(k1) * k1 + static_cast<long long>(k2) * k2;
  return (static_cast<long long>(std::abs(k1)) << 32) | static_cast<long long>(std::abs(k2));
}

// K(t_m, xi) as a real row, truncated at the kernel cutoff time
std::vector<double> kernel_row(const EquilibriumProfile& mu, const Vec2& xi, const TimeGrid& tg) {
  const double q = xi.x * xi.x + xi.y * xi.y;
  if (q <= 0.0) return {};
  const double cut = mu.kernel_cutoff(std::sqrt(q));
  const int len = std::min(tg.count(), static_cast<int>(std::ceil(cut / tg.dt())) + 2);
  std::vector<double> row(static_cast<std::size_t>(std::max(len, 1)));
  for (int l = 0; l < static_cast<int>(row.size()); ++l) row[l] = mu.kernel_time(tg.node(l), xi);
  return row;
}

}  // namespace

std::vector<cplx> kernel_time_K(const EquilibriumProfile& mu, const Vec2& xi,
                                const TimeGrid& tg) {
  std::vector<cplx> K(static_cast<std::size_t>(tg.count()), cplx(0.0, 0.0));
  const auto row = kernel_row(mu, xi, tg);
  for (std::size_t l = 0; l < row.size(); ++l) K[l] = row[l];
  return K;
}

std::vector<cplx> volterra_resolvent(const std::vector<cplx>& K, const TimeGrid& tg) {
  if (static_cast<int>(K.size()) != tg.count())
    throw Error("grid-mismatch", "kernel row does not match the time grid");
  const int M = tg.M;
  const double dt = tg.dt();

  int klast = 0;  // last nonzero kernel node; the convolution window
  for (int l = 0; l <= M; ++l)
    if (K[static_cast<std::size_t>(l)] != cplx(0.0, 0.0)) klast = l;

  const cplx den = 1.0 - 0.5 * dt * K[0];
  if (std::abs(den) < 1e-12)
    throw Error("resolvent-instability", "trapezoidal marching denominator vanished");

  std::vector<cplx> G(K.size());
  G[0] = K[0];
  for (int m = 1; m <= M; ++m) {
    cplx acc(0.0, 0.0);
    if (m <= klast) acc += 0.5 * K[static_cast<std::size_t>(m)] * G[0];
    for (int j = std::max(1, m - klast); j < m; ++j)
      acc += K[static_cast<std::size_t>(m - j)] * G[static_cast<std::size_t>(j)];
    G[static_cast<std::size_t>(m)] = (K[static_cast<std::size_t>(m)] + dt * acc) / den;
    if (std::abs(G[static_cast<std::size_t>(m)]) > kBlowup)
      throw Error("resolvent-instability", "resolvent exceeded 1e6; Penrose violation or dt too coarse");
  }
  return G;
}

std::vector<cplx> causal_convolve(const std::vector<cplx>& a, const std::vector<cplx>& b,
                                  double dt) {
  if (a.size() != b.size()) throw Error("grid-mismatch", "convolution rows differ in length");
  std::vector<cplx> out(a.size(), cplx(0.0, 0.0));
  for (std::size_t m = 1; m < a.size(); ++m) {
    cplx acc = 0.5 * (a[m] * b[0] + a[0] * b[m]);
    for (std::size_t j = 1; j < m; ++j) acc += a[m - j] * b[j];
    out[m] = dt * acc;
  }
  return out;
}

double resolvent_residual(const std::vector<cplx>& K, const std::vector<cplx>& G, double dt) {
  const auto conv = causal_convolve(K, G, dt);
  double r = 0.0;
  for (std::size_t m = 0; m < K.size(); ++m) r = std::max(r, std::abs(G[m] - K[m] - conv[m]));
  return r;
}

cplx discrete_laplace(const std::vector<cplx>& f, double dt, double tau) {
  cplx acc(0.0, 0.0);
  for (std::size_t m = 0; m < f.size(); ++m) {
    const double w = (m == 0 || m + 1 == f.size()) ? 0.5 : 1.0;
    acc += w * f[m] * std::polar(1.0, -tau * (dt * static_cast<double>(m)));
  }
  return dt * acc;
}

ResolventTable::ResolventTable(const EquilibriumProfile& mu, const PeriodicGrid& grid,
                               const TimeGrid& tg, double xi_free)
    : mu_(mu), grid_(grid), tg_(tg), xi_free_(xi_free) {
  const bool radial = mu.radial();
  for (int i = 0; i < grid.N; ++i)
    for (int j = 0; j < grid.N; ++j) {
      const int k1 = grid.kindex(i), k2 = grid.kindex(j);
      const long long key = row_key(k1, k2, radial);
      if (rows_.count(key)) continue;
      auto row = std::make_unique<ModeResolvent>();
      row->xi = Vec2{grid.freq(i), grid.freq(j)};
      row->K_samples = kernel_time_K(mu, row->xi, tg);
      const double q = row->xi.x * row->xi.x + row->xi.y * row->xi.y;
      if (q > 0.0 && std::sqrt(q) <= xi_free_) {
        row->G_samples = volterra_resolvent(row->K_samples, tg);
        max_residual_ =
            std::max(max_residual_, resolvent_residual(row->K_samples, row->G_samples, tg.dt()));
      } else {
        row->G_samples = row->K_samples;
      }
      rows_.emplace(key, std::move(row));
    }
}

const ModeResolvent& ResolventTable::mode(int i, int j) const {
  if (i < 0 || i >= grid_.N || j < 0 || j >= grid_.N)
    throw Error("grid-mismatch", "mode index outside the grid");
  const auto it = rows_.find(row_key(grid_.kindex(i), grid_.kindex(j), mu_.radial()));
  return *it->second;
}

SpaceTimeField apply_G_spacetime(const SpaceTimeField& g, const ResolventTable& resolvents) {
  if (g.time() != resolvents.time() || !(g.grid() == resolvents.grid()))
    throw Error("grid-mismatch", "field grids differ from the resolvent table");
  const PeriodicGrid& grid = g.grid();
  const int N = grid.N, Mn = g.time().count();
  const double dt = g.time().dt();

  std::vector<const std::vector<cplx>*> gh(static_cast<std::size_t>(Mn));
  for (int m = 0; m < Mn; ++m) gh[static_cast<std::size_t>(m)] = &g.slice(m).spectrum();

  std::vector<std::vector<cplx>> oh(static_cast<std::size_t>(Mn),
                                    std::vector<cplx>(grid.size(), cplx(0.0, 0.0)));
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * N + j;
      const auto& G = resolvents.mode(i, j).G_samples;
      for (int m = 1; m < Mn; ++m) {
        cplx acc = 0.5 * (G[static_cast<std::size_t>(m)] * (*gh[0])[idx] +
                          G[0] * (*gh[static_cast<std::size_t>(m)])[idx]);
        for (int jj = 1; jj < m; ++jj)
          acc += G[static_cast<std::size_t>(m - jj)] * (*gh[static_cast<std::size_t>(jj)])[idx];
        oh[static_cast<std::size_t>(m)][idx] = dt * acc;
      }
    }

  SpaceTimeField out(g.time(), grid);
  for (int m = 1; m < Mn; ++m)
    out.slice(m) = ScalarField2D::from_spectrum(grid, oh[static_cast<std::size_t>(m)]);
  return out;
}

DensityTrajectory linear_density_evolve(const std::function<cplx(const Vec2&, double)>& source,
                                        const EquilibriumProfile& mu, const TimeGrid& tg,
                                        const PeriodicGrid& grid, const LinearEvolveParams& p) {
  const int N = grid.N, band = grid.dealias_limit(), Mn = tg.count();
  const double dt = tg.dt();
  const bool radial = mu.radial();

  struct Mode {
    int i, j, im, jm;     // storage index and its conjugate mirror
    Vec2 xi;
    const double* row;    // shared kernel row, nullptr for free modes
    int klen;
    std::size_t ofs;      // ring offset into the history arena
    int W;                // ring length
  };

  std::unordered_map<long long, std::vector<double>> rows;
  std::vector<Mode> modes;
  std::size_t arena_size = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const int k1 = grid.kindex(i), k2 = grid.kindex(j);
      if (std::abs(k1) > band || std::abs(k2) > band) continue;
      if (p.assume_real && !(k1 > 0 || (k1 == 0 && k2 >= 0))) continue;
      Mode md;
      md.i = i;
      md.j = j;
      md.im = (N - i) % N;
      md.jm = (N - j) % N;
      md.xi = Vec2{grid.freq(i), grid.freq(j)};
      const double q = md.xi.x * md.xi.x + md.xi.y * md.xi.y;
      md.row = nullptr;
      md.klen = 0;
      if (q > 0.0 && std::sqrt(q) <= p.xi_free) {
        const long long key = row_key(k1, k2, radial);
        auto it = rows.find(key);
        if (it == rows.end()) it = rows.emplace(key, kernel_row(mu, md.xi, tg)).first;
        md.klen = static_cast<int>(it->second.size());
      }
      md.W = std::min(Mn, md.klen + 1);
      md.ofs = arena_size;
      arena_size += static_cast<std::size_t>(md.W);
      modes.push_back(md);
    }
  // map keys are stable now; bind row pointers
  for (auto& md : modes)
    if (md.klen > 0)
      md.row = rows.at(row_key(grid.kindex(md.i), grid.kindex(md.j), radial)).data();

  std::vector<cplx> ring(arena_size, cplx(0.0, 0.0));
  std::vector<cplx> hat(grid.size());

  DensityTrajectory traj(tg, grid, p.slice_stride);
  for (int m = 0; m < Mn; ++m) {
    const double t = tg.node(m);
    std::fill(hat.begin(), hat.end(), cplx(0.0, 0.0));
    for (auto& md : modes) {
      cplx val = source(md.xi, t);
      if (md.row && m >= 1) {
        cplx acc(0.0, 0.0);
        if (m < md.klen) acc += 0.5 * md.row[m] * ring[md.ofs];
        const int jmin = std::max(1, m - md.klen + 1);
        int rj = jmin % md.W;
        for (int j = jmin; j < m; ++j) {
          acc += md.row[m - j] * ring[md.ofs + static_cast<std::size_t>(rj)];
          if (++rj == md.W) rj = 0;
        }
        val += dt * acc;
      }
      ring[md.ofs + static_cast<std::size_t>(m % md.W)] = val;
      hat[static_cast<std::size_t>(md.i) * N + md.j] = val;
      if (p.assume_real && (md.im != md.i || md.jm != md.j))
        hat[static_cast<std::size_t>(md.im) * N + md.jm] = std::conj(val);
    }
    ScalarField2D slice = ScalarField2D::from_spectrum(grid, hat);
    if (p.observer) p.observer(m, slice);
    traj.push(m, std::move(slice));
  }
  return traj;
}

}  // namespace landau
