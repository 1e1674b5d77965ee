// Experiment configuration: a sectioned key=value text format shared by every
// subcommand.  Eight fixed sections (equilibrium, grid, time, nonlinearity,
// initial_data, solver, norms, output) with explicit defaults for every gate;
// parsing an unknown section or key, or a malformed value, raises
// "config-invalid" with the offending field spelled section.key.  Serializing
// and re-parsing reproduces the configuration exactly (doubles round-trip
// through %.17g), which is what makes run outputs byte-reproducible.
#pragma once

#include <string>
#include <vector>

#include "landau/density_solver.hpp"
#include "landau/equilibrium.hpp"
#include "landau/initial_data.hpp"
#include "landau/spectral_field.hpp"

namespace landau {

struct EquilibriumSection {
  std::string kind = "maxwellian";  // maxwellian | two_bump | tabulated
  double u0 = 0.0;                  // bump offset of two_bump
  std::string table;                // radius/value text file of tabulated
  double v_max = 8.0;
  double decay_order = 99.0;        // Fourier falloff of tabulated tails
};

struct GridSection {
  int N = 32;
  double L = 7.0;
};

struct TimeSection {
  double T = 20.0;   // full horizon
  double T0 = 2.5;   // slab length of the local solve / continuation
  int M0 = 10;       // time steps per slab (dt = T0 / M0)
};

struct NonlinearitySection {
  std::string kind = "massless";  // massless | zero
};

struct InitialDataSection {
  std::string kind = "gaussian";  // gaussian | zero
  double eps = 1e-3;
  double sigma_x = 1.0;
  double sigma_v = 1.0;
  std::uint64_t seed = 0;  // property-harness generator seed
};

struct SolverSection {
  double tol = 1e-6;
  int max_picard = 25;
  double eps1 = 1.0;    // bootstrap threshold on the forcing ledger
  double eps2 = 0.05;   // initial-data gate
  double eps0_field = 0.1;
  double a = 0.5;       // Holder index
  int Nv = 32;
  double xi_free = 8.5;
  int sampler_refine = 4;
  int targets_per_slab = 2;
  int x_stride = 2;
  int v_stride = 2;
  int s_stride = 2;
  double flow_gate = 0.1;
};

struct NormsSection {
  double a = 0.5;
  double h0 = 2.0;   // largest Besov shift
  int octaves = 8;
  bool diagonals = true;
};

struct OutputSection {
  std::string dir = ".";
  bool csv = true;
  bool snapshots = false;  // binary field / phase-space dumps
};

struct ExperimentConfig {
  EquilibriumSection equilibrium;
  GridSection grid;
  TimeSection time;
  NonlinearitySection nonlinearity;
  InitialDataSection initial_data;
  SolverSection solver;
  NormsSection norms;
  OutputSection output;

  // canonical text form: every section, every key, fixed order
  std::string serialize() const;

  // gate positivity, lattice invariants; throws "config-invalid" naming the
  // field.  Appends non-fatal notes (dispersive window) to warnings.
  void validate(std::vector<std::string>* warnings = nullptr) const;

  // FNV-1a of the canonical serialization, 16 hex digits
  std::string hash() const;

  // realized objects
  EquilibriumProfile make_equilibrium() const;
  NonlinearityA make_nonlinearity() const;
  InitialData make_initial_data() const;
  PeriodicGrid make_grid() const;
  VelocityGrid make_velocity_grid() const;
  ShiftSet make_shifts() const;
  SolverParams make_solver_params() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace landau
