#include "landau/studies.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>

#include "landau/io.hpp"

namespace landau {

namespace {

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string artifact(const std::string& outdir, const std::string& name) {
  std::filesystem::create_directories(outdir);
  return (std::filesystem::path(outdir) / name).string();
}

// series coefficient of the free-transport density of the configured data:
// rho_hat_free(t, xi) = f0_hat(xi, t xi) / (2L)^2, analytic for the Gaussian
std::function<cplx(const Vec2&, double)> free_source(const ExperimentConfig& cfg) {
  if (cfg.initial_data.kind == "zero" || cfg.initial_data.eps == 0.0)
    return [](const Vec2&, double) { return cplx{0.0, 0.0}; };
  const double sx2 = cfg.initial_data.sigma_x * cfg.initial_data.sigma_x;
  const double sv2 = cfg.initial_data.sigma_v * cfg.initial_data.sigma_v;
  const double amp = cfg.initial_data.eps * 2.0 * M_PI * sx2;
  const double box = (2.0 * cfg.grid.L) * (2.0 * cfg.grid.L);
  return [=](const Vec2& xi, double t) {
    return cplx{amp * std::exp(-0.5 * (sx2 + sv2 * t * t) * xi.norm2()) / box, 0.0};
  };
}

// horizon grid at the slab step dt = T0/M0
TimeGrid horizon_grid(const ExperimentConfig& cfg) {
  const double dt = cfg.time.T0 / cfg.time.M0;
  const int M = std::max(2, static_cast<int>(std::lround(cfg.time.T / dt)));
  return TimeGrid{M * dt, M};
}

void finish(RunReport& rep, const ExperimentConfig& cfg, const std::string& outdir,
            const Timer& timer) {
  rep.wall_seconds = timer.seconds();
  if (cfg.output.csv) write_report(artifact(outdir, "report.txt"), rep.rows());
}

}  // namespace

void RunReport::add(const std::string& name, double value, const std::string& source) {
  constants.push_back(Entry{name, value, source});
}

std::vector<std::pair<std::string, std::string>> RunReport::rows() const {
  std::vector<std::pair<std::string, std::string>> r;
  r.emplace_back("subcommand", subcommand);
  r.emplace_back("config", config_hash);
  r.emplace_back("status", status);
  for (const auto& c : constants)
    r.emplace_back(c.name, format_double(c.value) + "  [" + c.source + "]");
  for (std::size_t i = 0; i < warnings.size(); ++i)
    r.emplace_back("warning_" + std::to_string(i), warnings[i]);
  return r;
}

FitResult fit_decay_exponent(const std::vector<double>& t, const std::vector<double>& value,
                             double t1, double t2) {
  if (t.size() != value.size())
    throw Error("insufficient-window", "time and value series differ in length");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= t1 && t[i] <= t2 && t[i] > 0.0 && value[i] > 0.0) {
      x.push_back(std::log(t[i]));
      y.push_back(std::log(value[i]));
    }
  const int n = static_cast<int>(x.size());
  if (n < 4)
    throw Error("insufficient-window", "decay fit needs at least 4 positive samples in [" +
                                           format_double(t1) + ", " + format_double(t2) +
                                           "], found " + std::to_string(n));
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  FitResult r;
  r.points = n;
  r.exponent = sxy / sxx;
  const double ss = std::max(0.0, syy - r.exponent * sxy);
  r.width = 2.0 * std::sqrt(ss / (n - 2) / sxx);
  return r;
}

RunReport run_penrose(const ExperimentConfig& cfg, const std::string& outdir) {
  Timer timer;
  RunReport rep;
  rep.subcommand = "penrose";
  rep.config_hash = cfg.hash();
  cfg.validate(&rep.warnings);

  const EquilibriumProfile mu = cfg.make_equilibrium();
  const PenroseScan scan = penrose_margin(mu);
  if (cfg.output.csv) {
    CsvWriter csv(artifact(outdir, "penrose.csv"),
                  {"tau", "xi_mag", "re_K", "im_K", "abs_one_minus_K"});
    for (const auto& s : scan.samples)
      csv.row({s.tau, s.xi_mag, s.K.real(), s.K.imag(), s.dist});
  }
  rep.add("penrose_margin", scan.margin, "min |1 - K_tilde| over the refined (tau, xi) scan");
  rep.add("arg_tau", scan.arg_tau, "tau attaining the margin");
  rep.add("arg_xi_mag", scan.arg_xi.norm(), "|xi| attaining the margin");
  rep.add("refine_rounds", scan.rounds, "scan rounds until the margin settled");
  rep.add("margin_last_change", scan.last_change, "margin movement in the final refinement");
  if (scan.violation) rep.status = "penrose-violation";
  finish(rep, cfg, outdir, timer);
  return rep;
}

RunReport run_linear(const ExperimentConfig& cfg, const std::string& outdir) {
  Timer timer;
  RunReport rep;
  rep.subcommand = "linear";
  rep.config_hash = cfg.hash();
  cfg.validate(&rep.warnings);

  const PeriodicGrid grid = cfg.make_grid();
  const TimeGrid tg = horizon_grid(cfg);
  const EquilibriumProfile mu = cfg.make_equilibrium();
  LinearEvolveParams lp;
  lp.xi_free = cfg.solver.xi_free;
  const DensityTrajectory lin = linear_density_evolve(free_source(cfg), mu, tg, grid, lp);

  const ShiftSet shifts = cfg.make_shifts();
  std::vector<double> ts(static_cast<std::size_t>(tg.count()));
  for (int m = 0; m <= tg.M; ++m) ts[static_cast<std::size_t>(m)] = tg.node(m);
  if (cfg.output.csv) {
    CsvWriter csv(artifact(outdir, "rho_norms.csv"),
                  {"t", "L1", "Linf", "besov_a_L1", "besov_a_Linf"});
    for (int m = 0; m <= tg.M; ++m) {
      const ScalarField2D& s = lin.slice(m);
      csv.row({tg.node(m), s.norm_l1(), s.norm_sup(),
               besov_seminorm(s, cfg.norms.a, Lp::one, shifts),
               besov_seminorm(s, cfg.norms.a, Lp::inf, shifts)});
    }
  }

  // kernel and resolvent rows of two representative low modes
  double worst_residual = 0.0;
  const int reps[2][2] = {{1, 0}, {1, 1}};
  for (const auto& k : reps) {
    const Vec2 xi{M_PI * k[0] / grid.L, M_PI * k[1] / grid.L};
    const std::vector<cplx> K = kernel_time_K(mu, xi, tg);
    const std::vector<cplx> G = volterra_resolvent(K, tg);
    worst_residual = std::max(worst_residual, resolvent_residual(K, G, tg.dt()));
    if (cfg.output.csv) {
      CsvWriter csv(artifact(outdir, "resolvent_mode_" + std::to_string(k[0]) + "_" +
                                         std::to_string(k[1]) + ".csv"),
                    {"t", "re_K", "im_K", "re_G", "im_G"});
      for (int m = 0; m <= tg.M; ++m) {
        const auto i = static_cast<std::size_t>(m);
        csv.row({tg.node(m), K[i].real(), K[i].imag(), G[i].real(), G[i].imag()});
      }
    }
  }
  rep.add("resolvent_residual", worst_residual,
          "max_m |G - K - K*G| over the emitted kernel rows");

  bool alive = false;
  for (int m = 0; m <= tg.M; ++m) alive = alive || lin.node_sup[static_cast<std::size_t>(m)] > 0.0;
  if (alive) {
    const FitResult fs =
        fit_decay_exponent(ts, lin.node_sup, std::max(0.25 * tg.T, tg.dt()), tg.T);
    const FitResult f1 =
        fit_decay_exponent(ts, lin.node_l1, std::max(0.25 * tg.T, tg.dt()), tg.T);
    rep.add("linf_exponent", fs.exponent, "log-log slope of sup |rho| over the last 3/4 horizon");
    rep.add("linf_exponent_width", fs.width, "two standard errors of that slope");
    rep.add("l1_exponent", f1.exponent, "log-log slope of |rho|_L1 over the last 3/4 horizon");
  } else {
    rep.warnings.push_back("density vanishes identically; decay fit skipped");
  }
  finish(rep, cfg, outdir, timer);
  return rep;
}

RunReport run_flow(const ExperimentConfig& cfg, const std::string& outdir) {
  Timer timer;
  RunReport rep;
  rep.subcommand = "flow";
  rep.config_hash = cfg.hash();
  cfg.validate(&rep.warnings);

  const PeriodicGrid grid = cfg.make_grid();
  const TimeGrid slab{cfg.time.T0, cfg.time.M0};
  const SolverParams prm = cfg.make_solver_params();
  DensityTrajectory lin =
      linear_density_evolve(free_source(cfg), prm.mu, slab, grid);
  derive_fields(lin, prm, 0);
  const FieldSampler field(lin.e, FieldSampler::Options{prm.sampler_refine, true});

  // diagnostics lattice: sups stabilize well below the solve resolution
  const PhaseGrid pg{PeriodicGrid{std::min(grid.N, 16), grid.L},
                     VelocityGrid{std::min(cfg.solver.Nv, 16), cfg.equilibrium.v_max}};
  std::vector<FlowMaps> flows;
  for (int mt : {slab.M / 2, slab.M}) {
    if (mt < 1) continue;
    std::vector<double> s_list;
    for (int m = 0; m <= mt; ++m) s_list.push_back(slab.node(m));
    auto family = compute_flow_family(field, slab.node(mt), s_list, pg, prm.tol);
    for (auto& f : family) flows.push_back(std::move(f));
  }

  const double g_norm = trajectory_norm(lin.g, 1, prm.a, slab.T, prm.shifts).total;
  const FlowDiagnostics diag = flow_diagnostics(flows, prm.a, prm.shifts, g_norm);
  if (cfg.output.csv) {
    CsvWriter csv(artifact(outdir, "flow_diagnostics.csv"),
                  {"s", "t", "wY", "wGradxY", "wGradvY", "wW", "wGradvW", "wHolderGradvW",
                   "holderGradvY"});
    for (const auto& r : diag.rows)
      csv.row({r.s, r.t, r.wY, r.wGradxY, r.wGradvY, r.wW, r.wGradvW, r.wHolderGradvW,
               r.holderGradvY});
  }

  double defect = 0.0;
  for (const auto& f : flows)
    if (f.t == slab.T && f.s == 0.0) defect = liouville_defect(f, 2);
  rep.add("g_norm", g_norm, "||g||_{1+a, T0} of the driving linear field");
  rep.add("flow_ratio", diag.ratio, "max weighted flow diagnostic / g_norm");
  rep.add("liouville_defect", defect, "sup |det d(X,V)/d(x,v) - 1| at (s, t) = (0, T0)");
  finish(rep, cfg, outdir, timer);
  return rep;
}

namespace {

// shared by simulate and scatter
ContinuationResult solve_configured(const ExperimentConfig& cfg, const SolverParams& prm) {
  return continuation(cfg.make_initial_data(), cfg.make_grid(), cfg.time.T, cfg.time.T0,
                      cfg.time.M0, prm);
}

void density_csv(const ExperimentConfig& cfg, const std::string& outdir,
                 const DensityTrajectory& traj) {
  if (!cfg.output.csv) return;
  CsvWriter csv(artifact(outdir, "rho_norms.csv"),
                {"t", "L1", "Linf", "besov_a_L1", "besov_a_Linf", "ledger_rho", "ledger_g"});
  for (int m = 0; m <= traj.tg.M; ++m) {
    const auto i = static_cast<std::size_t>(m);
    csv.row({traj.tg.node(m), traj.node_l1[i], traj.node_sup[i], traj.node_besov_l1[i],
             traj.node_besov_sup[i], traj.ledger_rho[i], traj.ledger_g[i]});
  }
}

void continuation_constants(RunReport& rep, const ContinuationResult& res) {
  const BootstrapState& st = res.state;
  rep.add("horizon", st.T, "time reached by the continuation");
  rep.add("slabs", static_cast<double>(st.slab_T.size()), "slabs solved");
  double picard = 0.0;
  for (int n : st.slab_iterations) picard += n;
  rep.add("picard_total", picard, "Picard sweeps summed over slabs");
  rep.add("triple_norm", st.triple_norm, "|||f0|||_{1+a} of the initial data");
  rep.add("ledger", st.ledger, "sup-in-time weighted norm of the forcing density");
  rep.add("C1", st.C1, "ledger / triple norm");
  if (st.status != "converged") {
    rep.status = st.status;
    rep.warnings.push_back("bootstrap ledger crossed eps1 = " + format_double(st.eps1) +
                           " at T = " + format_double(st.T) + "; partial data emitted");
  }
}

}  // namespace

RunReport run_simulate(const ExperimentConfig& cfg, const std::string& outdir) {
  Timer timer;
  RunReport rep;
  rep.subcommand = "simulate";
  rep.config_hash = cfg.hash();
  cfg.validate(&rep.warnings);

  const SolverParams prm = cfg.make_solver_params();
  const ContinuationResult res = solve_configured(cfg, prm);
  const DensityTrajectory& traj = res.traj;
  density_csv(cfg, outdir, traj);
  continuation_constants(rep, res);

  const double m0 = traj.slice(0).integral();
  double drift = 0.0;
  for (int m = 1; m <= traj.tg.M; ++m)
    if (traj.has_slice(m)) drift = std::max(drift, std::abs(traj.slice(m).integral() - m0));
  rep.add("mass", m0, "box integral of rho(0)");
  rep.add("mass_drift", drift, "max_t |integral rho(t) - integral rho(0)|");

  if (cfg.output.snapshots) {
    const int last = traj.tg.M;
    write_vpf2(artifact(outdir, "rho_final.vpf2"), traj.slice(last), traj.tg.T);
    const InitialData f0 = cfg.make_initial_data();
    const PhaseField f = reconstruct_f(traj, f0, prm, traj.tg.T);
    write_vpf4(artifact(outdir, "f_final.vpf4"), f);
  }
  finish(rep, cfg, outdir, timer);
  return rep;
}

RunReport run_scatter(const ExperimentConfig& cfg, const std::string& outdir) {
  Timer timer;
  RunReport rep;
  rep.subcommand = "scatter";
  rep.config_hash = cfg.hash();
  cfg.validate(&rep.warnings);

  const SolverParams prm = cfg.make_solver_params();
  const ContinuationResult res = solve_configured(cfg, prm);
  continuation_constants(rep, res);

  const InitialData f0 = cfg.make_initial_data();
  const ScatteringProfile sc = scattering_profile(res.traj, f0, prm);
  if (cfg.output.csv) {
    CsvWriter csv(artifact(outdir, "scatter.csv"), {"t", "decay", "weighted_decay"});
    for (std::size_t i = 0; i < sc.times.size(); ++i)
      csv.row({sc.times[i], sc.decay[i], bracket(sc.times[i]) * sc.decay[i]});
  }
  rep.add("Y_inf_sup", sc.Y_sup, "sup |Y_inf| over the label lattice");
  rep.add("W_inf_sup", sc.W_sup, "sup |W_inf| over the label lattice");
  rep.add("profile_gap", sc.converged_diff, "map change between the last two dyadic times");
  if (res.state.triple_norm > 0.0)
    rep.add("scatter_constant", (sc.Y_sup + sc.W_sup) / res.state.triple_norm,
            "(|Y_inf| + |W_inf|) / |||f0|||_{1+a}");
  if (cfg.output.snapshots) write_vpf4(artifact(outdir, "f_inf.vpf4"), sc.f_inf);
  finish(rep, cfg, outdir, timer);
  return rep;
}

RunReport run_norms(const ExperimentConfig& cfg, const std::string& snapshot,
                    const std::string& outdir, double a) {
  Timer timer;
  RunReport rep;
  rep.subcommand = "norms";
  rep.config_hash = cfg.hash();
  cfg.validate(&rep.warnings);
  if (snapshot.empty()) throw Error("config-invalid", "norms needs --snapshot <file>");
  if (a < 0.0) a = cfg.norms.a;
  if (!(a > 0.0 && a < 1.0)) throw Error("config-invalid", "norms.a: need 0 < a < 1");

  const Vpf2 snap = read_vpf2(snapshot);
  const ShiftSet shifts = cfg.make_shifts();
  const double l1 = snap.field.norm_l1();
  const double sup = snap.field.norm_sup();
  const double b1 = besov_seminorm(snap.field, a, Lp::one, shifts);
  const double bs = besov_seminorm(snap.field, a, Lp::inf, shifts);
  rep.add("time", snap.time, "snapshot header");
  rep.add("integral", snap.field.integral(), "box integral");
  rep.add("L1", l1, "lattice L1 norm");
  rep.add("Linf", sup, "lattice sup norm");
  rep.add("besov_a_L1", b1, "Besov seminorm, p = 1, index a = " + format_double(a));
  rep.add("besov_a_Linf", bs, "Besov seminorm, p = inf, index a = " + format_double(a));
  if (cfg.output.csv) {
    CsvWriter csv(artifact(outdir, "norms.csv"), {"a", "L1", "Linf", "besov_a_L1", "besov_a_Linf"});
    csv.row({a, l1, sup, b1, bs});
  }
  finish(rep, cfg, outdir, timer);
  return rep;
}

RunReport run_subcommand(const std::string& name, const ExperimentConfig& cfg,
                         const std::string& outdir, const std::string& snapshot) {
  if (name == "penrose") return run_penrose(cfg, outdir);
  if (name == "linear") return run_linear(cfg, outdir);
  if (name == "flow") return run_flow(cfg, outdir);
  if (name == "simulate") return run_simulate(cfg, outdir);
  if (name == "scatter") return run_scatter(cfg, outdir);
  if (name == "norms") return run_norms(cfg, snapshot, outdir);
  throw Error("config-invalid", "unknown subcommand '" + name + "'");
}

}  // namespace landau
