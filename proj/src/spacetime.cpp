#include "landau/spacetime.hpp"

#include <limits>
#include <utility>

namespace landau {

TimeGrid::TimeGrid(double T_, int M_) : T(T_), M(M_) {
  if (!(T > 0.0)) throw Error("grid-mismatch", "time horizon must be positive");
  if (M < 2) throw Error("grid-mismatch", "time grid needs at least 2 steps");
}

SpaceTimeField::SpaceTimeField(const TimeGrid& tg, const PeriodicGrid& g) : tg_(tg), g_(g) {
  s_.assign(static_cast<std::size_t>(tg.count()), ScalarField2D(g));
}

SpaceTimeVectorField::SpaceTimeVectorField(const TimeGrid& tg, const PeriodicGrid& g)
    : tg_(tg), g_(g) {
  s_.assign(static_cast<std::size_t>(tg.count()),
            VectorField2D{ScalarField2D(g), ScalarField2D(g)});
}

DensityTrajectory::DensityTrajectory(const TimeGrid& tg_, const PeriodicGrid& g_, int slice_stride)
    : tg(tg_), grid(g_), stride(slice_stride) {
  if (stride < 1) throw Error("grid-mismatch", "slice stride must be >= 1");
  node_l1.reserve(tg.count());
  node_sup.reserve(tg.count());
}

void DensityTrajectory::push(int m, ScalarField2D slice) {
  if (m != static_cast<int>(node_l1.size()))
    throw Error("grid-mismatch", "trajectory nodes must be pushed in order");
  if (!(slice.grid() == grid)) throw Error("grid-mismatch", "slice grid differs from trajectory");
  node_l1.push_back(slice.norm_l1());
  node_sup.push_back(slice.norm_sup());
  node_besov_l1.push_back(std::numeric_limits<double>::quiet_NaN());
  node_besov_sup.push_back(std::numeric_limits<double>::quiet_NaN());
  if (m % stride == 0 || m == tg.M) {
    stored.push_back(m);
    rho.push_back(std::move(slice));
  }
}

bool DensityTrajectory::has_slice(int m) const {
  return (m % stride == 0 || m == tg.M) && m <= last_node() && m >= 0;
}

const ScalarField2D& DensityTrajectory::slice(int m) const {
  if (m == tg.M && !stored.empty() && stored.back() == m) return rho.back();
  if (m >= 0 && m % stride == 0) {
    const std::size_t idx = static_cast<std::size_t>(m / stride);
    if (idx < rho.size() && stored[idx] == m) return rho[idx];
  }
  throw Error("grid-mismatch", "trajectory slice not retained at this node");
}

}  // namespace landau
