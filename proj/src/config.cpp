#include "landau/config.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace landau {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& what) { throw Error("config-invalid", what); }

double to_double(const std::string& field, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size()) bad(field + ": expected a number, got '" + v + "'");
  return x;
}

int to_int(const std::string& field, const std::string& v) {
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size())
    bad(field + ": expected an integer, got '" + v + "'");
  return static_cast<int>(x);
}

std::uint64_t to_u64(const std::string& field, const std::string& v) {
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size())
    bad(field + ": expected an unsigned integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& field, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(field + ": expected a boolean, got '" + v + "'");
}

}  // namespace

std::string ExperimentConfig::serialize() const {
  std::ostringstream o;
  o << "[equilibrium]\n";
  o << "kind = " << equilibrium.kind << "\n";
  o << "u0 = " << fmt_double(equilibrium.u0) << "\n";
  o << "table = " << equilibrium.table << "\n";
  o << "v_max = " << fmt_double(equilibrium.v_max) << "\n";
  o << "decay_order = " << fmt_double(equilibrium.decay_order) << "\n";
  o << "\n[grid]\n";
  o << "N = " << grid.N << "\n";
  o << "L = " << fmt_double(grid.L) << "\n";
  o << "\n[time]\n";
  o << "T = " << fmt_double(time.T) << "\n";
  o << "T0 = " << fmt_double(time.T0) << "\n";
  o << "M0 = " << time.M0 << "\n";
  o << "\n[nonlinearity]\n";
  o << "kind = " << nonlinearity.kind << "\n";
  o << "\n[initial_data]\n";
  o << "kind = " << initial_data.kind << "\n";
  o << "eps = " << fmt_double(initial_data.eps) << "\n";
  o << "sigma_x = " << fmt_double(initial_data.sigma_x) << "\n";
  o << "sigma_v = " << fmt_double(initial_data.sigma_v) << "\n";
  o << "seed = " << initial_data.seed << "\n";
  o << "\n[solver]\n";
  o << "tol = " << fmt_double(solver.tol) << "\n";
  o << "max_picard = " << solver.max_picard << "\n";
  o << "eps1 = " << fmt_double(solver.eps1) << "\n";
  o << "eps2 = " << fmt_double(solver.eps2) << "\n";
  o << "eps0_field = " << fmt_double(solver.eps0_field) << "\n";
  o << "a = " << fmt_double(solver.a) << "\n";
  o << "Nv = " << solver.Nv << "\n";
  o << "xi_free = " << fmt_double(solver.xi_free) << "\n";
  o << "sampler_refine = " << solver.sampler_refine << "\n";
  o << "targets_per_slab = " << solver.targets_per_slab << "\n";
  o << "x_stride = " << solver.x_stride << "\n";
  o << "v_stride = " << solver.v_stride << "\n";
  o << "s_stride = " << solver.s_stride << "\n";
  o << "flow_gate = " << fmt_double(solver.flow_gate) << "\n";
  o << "\n[norms]\n";
  o << "a = " << fmt_double(norms.a) << "\n";
  o << "h0 = " << fmt_double(norms.h0) << "\n";
  o << "octaves = " << norms.octaves << "\n";
  o << "diagonals = " << (norms.diagonals ? "true" : "false") << "\n";
  o << "\n[output]\n";
  o << "dir = " << output.dir << "\n";
  o << "csv = " << (output.csv ? "true" : "false") << "\n";
  o << "snapshots = " << (output.snapshots ? "true" : "false") << "\n";
  return o.str();
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') bad("line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "equilibrium" && section != "grid" && section != "time" &&
          section != "nonlinearity" && section != "initial_data" && section != "solver" &&
          section != "norms" && section != "output")
        bad("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      bad("line " + std::to_string(lineno) + ": expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (section.empty()) bad("line " + std::to_string(lineno) + ": key '" + key + "' before any section");
    const std::string field = section + "." + key;

    bool known = true;
    if (section == "equilibrium") {
      if (key == "kind") c.equilibrium.kind = val;
      else if (key == "u0") c.equilibrium.u0 = to_double(field, val);
      else if (key == "table") c.equilibrium.table = val;
      else if (key == "v_max") c.equilibrium.v_max = to_double(field, val);
      else if (key == "decay_order") c.equilibrium.decay_order = to_double(field, val);
      else known = false;
    } else if (section == "grid") {
      if (key == "N") c.grid.N = to_int(field, val);
      else if (key == "L") c.grid.L = to_double(field, val);
      else known = false;
    } else if (section == "time") {
      if (key == "T") c.time.T = to_double(field, val);
      else if (key == "T0") c.time.T0 = to_double(field, val);
      else if (key == "M0") c.time.M0 = to_int(field, val);
      else known = false;
    } else if (section == "nonlinearity") {
      if (key == "kind") c.nonlinearity.kind = val;
      else known = false;
    } else if (section == "initial_data") {
      if (key == "kind") c.initial_data.kind = val;
      else if (key == "eps") c.initial_data.eps = to_double(field, val);
      else if (key == "sigma_x") c.initial_data.sigma_x = to_double(field, val);
      else if (key == "sigma_v") c.initial_data.sigma_v = to_double(field, val);
      else if (key == "seed") c.initial_data.seed = to_u64(field, val);
      else known = false;
    } else if (section == "solver") {
      if (key == "tol") c.solver.tol = to_double(field, val);
      else if (key == "max_picard") c.solver.max_picard = to_int(field, val);
      else if (key == "eps1") c.solver.eps1 = to_double(field, val);
      else if (key == "eps2") c.solver.eps2 = to_double(field, val);
      else if (key == "eps0_field") c.solver.eps0_field = to_double(field, val);
      else if (key == "a") c.solver.a = to_double(field, val);
      else if (key == "Nv") c.solver.Nv = to_int(field, val);
      else if (key == "xi_free") c.solver.xi_free = to_double(field, val);
      else if (key == "sampler_refine") c.solver.sampler_refine = to_int(field, val);
      else if (key == "targets_per_slab") c.solver.targets_per_slab = to_int(field, val);
      else if (key == "x_stride") c.solver.x_stride = to_int(field, val);
      else if (key == "v_stride") c.solver.v_stride = to_int(field, val);
      else if (key == "s_stride") c.solver.s_stride = to_int(field, val);
      else if (key == "flow_gate") c.solver.flow_gate = to_double(field, val);
      else known = false;
    } else if (section == "norms") {
      if (key == "a") c.norms.a = to_double(field, val);
      else if (key == "h0") c.norms.h0 = to_double(field, val);
      else if (key == "octaves") c.norms.octaves = to_int(field, val);
      else if (key == "diagonals") c.norms.diagonals = to_bool(field, val);
      else known = false;
    } else if (section == "output") {
      if (key == "dir") c.output.dir = val;
      else if (key == "csv") c.output.csv = to_bool(field, val);
      else if (key == "snapshots") c.output.snapshots = to_bool(field, val);
      else known = false;
    }
    if (!known) bad("line " + std::to_string(lineno) + ": unknown key " + field);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void ExperimentConfig::validate(std::vector<std::string>* warnings) const {
  if (equilibrium.kind != "maxwellian" && equilibrium.kind != "two_bump" &&
      equilibrium.kind != "tabulated")
    bad("equilibrium.kind: unknown profile '" + equilibrium.kind + "'");
  if (!(equilibrium.v_max > 0.0)) bad("equilibrium.v_max: must be positive");
  if (equilibrium.kind == "tabulated" && equilibrium.table.empty())
    bad("equilibrium.table: tabulated profile needs a table path");

  if (grid.N < 4 || (grid.N & (grid.N - 1)) != 0)
    bad("grid.N: must be a power of two >= 4, got " + std::to_string(grid.N));
  if (!(grid.L > 0.0)) bad("grid.L: must be positive");

  if (!(time.T > 0.0)) bad("time.T: must be positive");
  if (!(time.T0 > 0.0)) bad("time.T0: must be positive");
  if (time.M0 < 2) bad("time.M0: need at least 2 steps per slab");
  if (time.T0 > time.T * (1.0 + 1e-12)) bad("time.T0: slab exceeds the horizon T");

  if (nonlinearity.kind != "massless" && nonlinearity.kind != "zero")
    bad("nonlinearity.kind: unknown closure '" + nonlinearity.kind + "'");

  if (initial_data.kind != "gaussian" && initial_data.kind != "zero")
    bad("initial_data.kind: unknown data '" + initial_data.kind + "'");
  if (initial_data.eps < 0.0) bad("initial_data.eps: must be nonnegative");
  if (!(initial_data.sigma_x > 0.0)) bad("initial_data.sigma_x: must be positive");
  if (!(initial_data.sigma_v > 0.0)) bad("initial_data.sigma_v: must be positive");

  if (!(solver.tol > 0.0)) bad("solver.tol: must be positive");
  if (solver.max_picard < 1) bad("solver.max_picard: must be at least 1");
  if (!(solver.eps1 > 0.0)) bad("solver.eps1: must be positive");
  if (!(solver.eps2 > 0.0)) bad("solver.eps2: must be positive");
  if (!(solver.eps0_field > 0.0)) bad("solver.eps0_field: must be positive");
  if (!(solver.a > 0.0 && solver.a < 1.0)) bad("solver.a: need 0 < a < 1");
  if (solver.Nv < 2) bad("solver.Nv: need at least 2 velocity nodes");
  if (!(solver.xi_free > 0.0)) bad("solver.xi_free: must be positive");
  if (solver.sampler_refine < 1) bad("solver.sampler_refine: must be at least 1");
  if (solver.targets_per_slab < 0) bad("solver.targets_per_slab: must be nonnegative");
  if (solver.x_stride < 1 || solver.v_stride < 1 || solver.s_stride < 1)
    bad("solver.x_stride: quadrature strides must be at least 1");
  if (solver.flow_gate < 0.0) bad("solver.flow_gate: must be nonnegative");

  if (!(norms.a > 0.0 && norms.a < 1.0)) bad("norms.a: need 0 < a < 1");
  if (!(norms.h0 > 0.0)) bad("norms.h0: must be positive");
  if (norms.octaves < 1) bad("norms.octaves: must be at least 1");
  if (output.dir.empty()) bad("output.dir: must not be empty");

  if (warnings) {
    const PeriodicGrid g{grid.N, grid.L};
    if (!dispersive_window_ok(g, equilibrium.v_max, time.T))
      warnings->push_back("grid.L = " + fmt_double(grid.L) +
                          " sits below the dispersive window v_max*T = " +
                          fmt_double(equilibrium.v_max * time.T) +
                          "; decay measurements on this grid alias");
    if (norms.h0 > grid.L)
      warnings->push_back("norms.h0 exceeds the box half-width; largest shifts wrap");
  }
}

std::string ExperimentConfig::hash() const {
  const std::string s = serialize();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

EquilibriumProfile ExperimentConfig::make_equilibrium() const {
  if (equilibrium.kind == "maxwellian") return EquilibriumProfile::maxwellian(equilibrium.v_max);
  if (equilibrium.kind == "two_bump")
    return EquilibriumProfile::two_bump(equilibrium.u0, equilibrium.v_max);
  std::ifstream in(equilibrium.table);
  if (!in) bad("equilibrium.table: cannot open '" + equilibrium.table + "'");
  std::vector<double> r, m;
  double a = 0.0, b = 0.0;
  while (in >> a >> b) {
    r.push_back(a);
    m.push_back(b);
  }
  if (r.size() < 4) bad("equilibrium.table: need at least 4 radius/value rows");
  return EquilibriumProfile::tabulated(std::move(r), std::move(m), true, equilibrium.decay_order,
                                       equilibrium.v_max);
}

NonlinearityA ExperimentConfig::make_nonlinearity() const {
  return nonlinearity.kind == "massless" ? NonlinearityA::massless_electron()
                                         : NonlinearityA::zero();
}

InitialData ExperimentConfig::make_initial_data() const {
  if (initial_data.kind == "zero" || initial_data.eps == 0.0) return InitialData::zero();
  return InitialData::gaussian(initial_data.eps, initial_data.sigma_x, initial_data.sigma_v);
}

PeriodicGrid ExperimentConfig::make_grid() const { return PeriodicGrid{grid.N, grid.L}; }

VelocityGrid ExperimentConfig::make_velocity_grid() const {
  return VelocityGrid{solver.Nv, equilibrium.v_max};
}

ShiftSet ExperimentConfig::make_shifts() const {
  return ShiftSet::dyadic(norms.h0, norms.octaves, norms.diagonals);
}

SolverParams ExperimentConfig::make_solver_params() const {
  SolverParams p;
  p.mu = make_equilibrium();
  p.A = make_nonlinearity();
  p.vg = make_velocity_grid();
  p.a = solver.a;
  p.shifts = make_shifts();
  p.tol = solver.tol;
  p.max_picard = solver.max_picard;
  p.eps1 = solver.eps1;
  p.eps2 = solver.eps2;
  p.eps0_field = solver.eps0_field;
  p.xi_free = solver.xi_free;
  p.sampler_refine = solver.sampler_refine;
  p.quad.x_stride = solver.x_stride;
  p.quad.v_stride = solver.v_stride;
  p.quad.s_stride = solver.s_stride;
  p.targets_per_slab = solver.targets_per_slab;
  p.flow_gate = solver.flow_gate;
  return p;
}

}  // namespace landau
