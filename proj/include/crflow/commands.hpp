#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "crflow/analysis.hpp"
#include "crflow/config.hpp"

namespace crflow {

// Process exit codes shared by the commands and the CLI.
inline constexpr int kExitConverged = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitTimeout = 2;
inline constexpr int kExitBlowup = 3;

int exit_code_for(Termination reason);

/// Column-exact writer for the time series CSV (header comments record the
/// conventions in force, then the fixed column order).
void write_timeseries_csv(const std::string& path, const RunConfig& config,
                          const ResolvedRun& run, const Trajectory& traj);

struct RunArtifacts {
  Trajectory trajectory;
  TerminationReport classification;
  std::string out_dir;
};

/// Execute a configured run and write timeseries.csv, initial/final
/// snapshots and summary.json into the output directory.
RunArtifacts execute_run(const RunConfig& config, std::ostream& log);
int command_run(const RunConfig& config, std::ostream& log);

struct SweepRow {
  double lambda = 0.0;
  double E_b_h = 0.0;
  double sup_e_h = 0.0;
  Termination reason = Termination::Timeout;
  double final_sup_tau = 0.0;
  double max_vertical_ratio = 0.0;
  TerminationReport classification;
  std::vector<EnergyReport> reports;
  ControlParams control;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Largest lambda whose prefix is entirely CONVERGED; negative when the
  /// first row already fails to converge.
  double lambda_star = -1.0;
  double E_b_at_lambda_star = 0.0;
  /// Smallest non-converged lambda, when one exists.
  double first_nonconverged = -1.0;
};

/// Rerun the configured flow from scratch for each amplitude in the grid.
SweepResult run_sweep(const RunConfig& base, const std::vector<double>& lambdas,
                      std::ostream& log, const std::string& out_dir = "");
int command_sweep(const RunConfig& base, const std::vector<double>& lambdas,
                  std::ostream& log);

/// Exact linear-reduction solution for the configured single-mode data,
/// written as a snapshot; rejects sphere targets and t-dependent families.
int command_oracle(const RunConfig& config, double t, std::ostream& log);

enum class CheckLevel { Quick, Full };
int command_check(CheckLevel level, std::ostream& log);

}  // namespace crflow
