#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "inertdrift/config.hpp"

namespace inertdrift {

inline constexpr const char* kVersion = "0.1.0";

/// Process exit codes shared by all subcommands.
enum ExitCode : int {
  kExitOk = 0,
  kExitTestFailure = 1,
  kExitConfigError = 2,
  kExitNumericalError = 3,
  kExitIoError = 4,
};

struct RunOptions {
  bool dry_run = false;
  /// Overrides the config's `strict` flag when set.
  std::optional<bool> strict;
};

/// Simulates the configured ensemble and runs the selected tests. Writes
/// manifest.json, trajectories.csv, report.csv and, when selected,
/// residuals.csv and hist_* files into cfg.output_directory.
int run_pipeline(const RunConfig& cfg, const RunOptions& options, std::ostream& log);

/// Solves the Skorokhod problem on the config's domain for a `t,x1..xd` path
/// file and writes `t,x1..xd,ell`.
int skorokhod_command(const RunConfig& cfg, const std::filesystem::path& input,
                      const std::filesystem::path& output, std::ostream& log);

/// Generator residuals over the default test basis; writes residuals.csv.
int residual_command(const RunConfig& cfg, std::ostream& log);

/// Weak-convergence sweep over cfg.sweep.n_list; writes sweep.csv and report.csv.
int sweep_command(const RunConfig& cfg, std::ostream& log);

/// Histograms of a saved trajectory CSV against the config's stationary law.
int histogram_command(const RunConfig& cfg, const std::filesystem::path& batch_csv, int bins,
                      const std::filesystem::path& directory, std::ostream& log);

}  // namespace inertdrift
