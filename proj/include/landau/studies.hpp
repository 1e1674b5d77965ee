// Experiment drivers behind the CLI subcommands.  Each runner consumes a
// validated ExperimentConfig, writes its artifacts (CSV, snapshots, report.txt)
// into an output directory, and returns the measured constants; the command
// line layer only parses flags and prints the report.  Runs are deterministic
// functions of the configuration, so re-running one reproduces every artifact
// byte for byte.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "landau/config.hpp"

namespace landau {

struct RunReport {
  std::string subcommand;
  std::string config_hash;
  std::string status = "ok";
  double wall_seconds = 0.0;

  // measured constant plus the check that produced it
  struct Entry {
    std::string name;
    double value = 0.0;
    std::string source;
  };
  std::vector<Entry> constants;
  std::vector<std::string> warnings;

  void add(const std::string& name, double value, const std::string& source);

  // status, constants and warnings as report rows (wall time excluded so that
  // reruns of one configuration emit identical bytes)
  std::vector<std::pair<std::string, std::string>> rows() const;
};

struct FitResult {
  double exponent = 0.0;
  double width = 0.0;  // two standard errors of the slope
  int points = 0;
};

// least-squares slope of log(value) against log(t) over t in [t1, t2];
// nonpositive values are excluded, fewer than 4 usable points raises
// "insufficient-window"
FitResult fit_decay_exponent(const std::vector<double>& t, const std::vector<double>& value,
                             double t1, double t2);

RunReport run_penrose(const ExperimentConfig& cfg, const std::string& outdir);
RunReport run_linear(const ExperimentConfig& cfg, const std::string& outdir);
RunReport run_flow(const ExperimentConfig& cfg, const std::string& outdir);
RunReport run_simulate(const ExperimentConfig& cfg, const std::string& outdir);
RunReport run_scatter(const ExperimentConfig& cfg, const std::string& outdir);
// measures a VPF2 snapshot; `a` overrides [norms].a when nonnegative
RunReport run_norms(const ExperimentConfig& cfg, const std::string& snapshot,
                    const std::string& outdir, double a = -1.0);

// dispatch by subcommand name; `snapshot` is only read by `norms`
RunReport run_subcommand(const std::string& name, const ExperimentConfig& cfg,
                         const std::string& outdir, const std::string& snapshot = "");

}  // namespace landau
