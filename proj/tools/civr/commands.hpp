#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "run_config.hpp"

namespace civr::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalFailure = 3 };

/// Pipeline result for one propagation time.
struct TimeRun {
  std::size_t index = 0;
  double T = 0.0;
  double a = 0.0;
  double c = 0.0;
  TrajectoryEnsemble ensemble;
  PropagatorGrid K;
  ContributionMap map;
  WavefunctionGrid psi;  // renormalized when the config asks for it
  double norm_before = 0.0;
  double invalid_fraction = 0.0;
  double h1_drift_max = 0.0;  // relative, over valid trajectories
  double h2_drift_max = 0.0;
  double h2_drift_mean = 0.0;
};

/// Ensemble, kernel, contribution map and wavefunction for cfg.times[i].
/// `a_override` > 0 replaces the configured width.
TimeRun run_time(const RunConfig& cfg, std::size_t i, unsigned workers, double a_override = 0.0);

/// Same as run_time but reusing an already computed ensemble.
TimeRun run_time(const RunConfig& cfg, std::size_t i, TrajectoryEnsemble ensemble, unsigned workers,
                 double a_override = 0.0);

/// Empty when the run is numerically acceptable, otherwise the reason.
std::string numerical_problem(const RunConfig& cfg, const TimeRun& run);

using FileSet = std::vector<std::pair<std::string, std::string>>;  // (name, contents)

/// propagator.csv, wavefunction.csv, contributions.csv, [trajectories.csv,] manifest.json
FileSet propagate_files(const RunConfig& cfg, const TimeRun& run);

/// Directory name for one time, e.g. "T_8.5".
std::string time_dir(double T);

struct Comparison {
  double T = 0.0;
  double a = 0.0;
  double fidelity = 0.0;
  double norm_before = 0.0;
  double accepted_fraction = 0.0;
  bool reference_edge_ok = true;
  WavefunctionGrid reference;
};

/// Split-operator reference for run.T and its fidelity with run.psi.
Comparison compare(const RunConfig& cfg, const TimeRun& run);

struct ScanRow {
  double a;
  double fidelity;
  double norm;
  double accepted_fraction;
};

struct ScanResult {
  double T = 0.0;
  std::vector<ScanRow> rows;
  std::size_t best = 0;  // argmax fidelity
};

/// Fidelity against the split-operator reference for every a in cfg.scan.
ScanResult scan_width(const RunConfig& cfg, std::size_t i, unsigned workers);

std::string scan_csv(const ScanResult& scan);

int cmd_propagate(const RunConfig& cfg, const std::string& out_dir, unsigned workers, std::ostream& log);
int cmd_compare(const RunConfig& cfg, const std::string& out_dir, unsigned workers, std::ostream& log);
int cmd_scan_width(const RunConfig& cfg, const std::string& out_dir, unsigned workers, std::ostream& log);
int cmd_trajectories(const RunConfig& cfg, const std::string& out_dir, double q1, double p1,
                     std::size_t stride, std::ostream& log);
int cmd_eigen(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);

}  // namespace civr::cli
