// Uniform time grid t_m = m dt on [0,T] and per-node stacks of spatial
// fields.  DensityTrajectory carries the density history together with
// per-node norm entries and running (sup-in-time, hence non-decreasing)
// norm ledgers; long horizons may retain spatial slices at a stride while
// the scalar ledgers always cover every node.
#pragma once

#include <cmath>
#include <vector>

#include "landau/grid.hpp"

namespace landau {

struct TimeGrid {
  double T = 0.0;
  int M = 0;

  TimeGrid() = default;
  TimeGrid(double T_, int M_);

  double dt() const { return T / M; }
  double node(int m) const { return m * dt(); }
  int count() const { return M + 1; }
  bool operator==(const TimeGrid& o) const { return T == o.T && M == o.M; }
  bool operator!=(const TimeGrid& o) const { return !(*this == o); }
};

class SpaceTimeField {
 public:
  SpaceTimeField() = default;
  SpaceTimeField(const TimeGrid& tg, const PeriodicGrid& g);  // zero slices

  const TimeGrid& time() const { return tg_; }
  const PeriodicGrid& grid() const { return g_; }
  ScalarField2D& slice(int m) { return s_[static_cast<std::size_t>(m)]; }
  const ScalarField2D& slice(int m) const { return s_[static_cast<std::size_t>(m)]; }

 private:
  TimeGrid tg_;
  PeriodicGrid g_;
  std::vector<ScalarField2D> s_;
};

class SpaceTimeVectorField {
 public:
  SpaceTimeVectorField() = default;
  SpaceTimeVectorField(const TimeGrid& tg, const PeriodicGrid& g);

  const TimeGrid& time() const { return tg_; }
  const PeriodicGrid& grid() const { return g_; }
  VectorField2D& slice(int m) { return s_[static_cast<std::size_t>(m)]; }
  const VectorField2D& slice(int m) const { return s_[static_cast<std::size_t>(m)]; }

 private:
  TimeGrid tg_;
  PeriodicGrid g_;
  std::vector<VectorField2D> s_;
};

// Density history rho(t_m, .).  Slices are kept at nodes m % slice_stride == 0
// plus the final node; node_l1 / node_sup are recorded for every node as the
// slices stream through push().  Derived stacks (u, g, e), the Besov entries
// and the running ledgers are filled by the solver layers that compute them.
struct DensityTrajectory {
  DensityTrajectory() = default;
  DensityTrajectory(const TimeGrid& tg, const PeriodicGrid& g, int slice_stride = 1);

  TimeGrid tg;
  PeriodicGrid grid;
  int stride = 1;

  std::vector<int> stored;           // node indices of retained slices, ascending
  std::vector<ScalarField2D> rho;    // one per entry of `stored`

  std::vector<double> node_l1, node_sup;          // size count() once complete
  std::vector<double> node_besov_l1, node_besov_sup;  // NaN until measured

  SpaceTimeField u, g;      // electrostatic potential and forcing density
  SpaceTimeVectorField e;   // field E = -grad u
  bool derived = false;     // u/g/e populated

  std::vector<double> ledger_rho, ledger_g;  // running sup-in-time norms

  // record node m (must advance one node at a time from 0)
  void push(int m, ScalarField2D slice);

  bool has_slice(int m) const;
  const ScalarField2D& slice(int m) const;  // throws "grid-mismatch" when absent
  int last_node() const { return static_cast<int>(node_l1.size()) - 1; }
};

// append v to a running sup ledger (entries never decrease)
inline void push_ledger(std::vector<double>& ledger, double v) {
  ledger.push_back(ledger.empty() ? v : std::max(ledger.back(), v));
}

}  // namespace landau
