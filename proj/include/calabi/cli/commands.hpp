#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "calabi/cli/config.hpp"
#include "calabi/estimates.hpp"
#include "calabi/flow.hpp"

namespace calabi::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitMonitor = 2,
  kExitTMax = 3,
  kExitConfig = 4,
  kExitNumerical = 5,
};

/// Overrides output.dir when set.
inline constexpr const char* kOutputDirEnv = "CALABI_OUTPUT_DIR";

std::string output_dir(const RunConfig& config);

/// "warmup", "armed", "exited_lower" or "exited_upper".
std::string monitor_label(const flow::TrapMonitor& monitor);

int exit_code(flow::Outcome outcome);

struct SweepRow {
  std::vector<int> wavevector;
  double amplitude = 0.0;
  double initial_calabi = 0.0;
  std::string outcome;  ///< a flow outcome, or "error"
  double final_calabi = 0.0;
  int steps = 0;
  double final_time = 0.0;
  std::optional<double> time_to_half_energy;  ///< first accepted t with Ca ≤ Ca(0)/2
  std::string error;
};

/// Runs the grid on sweep.threads workers. Rows are in grid order
/// (wavevector-major); per-run failures become "error" rows.
std::vector<SweepRow> run_sweep(const RunConfig& config);

struct CheckRow {
  std::string suite;
  estimates::IdentityReport report;
};

/// The estimates suite plus the decomposition identity on: the flat pair,
/// the configured initial potential (if any), and check.random_pairs
/// seeded random potentials, each against the flat background.
std::vector<CheckRow> run_checks(const RunConfig& config);

int cmd_flow_run(const std::string& config_path, std::ostream& out, std::ostream& err);
int cmd_sweep(const std::string& config_path, std::ostream& out, std::ostream& err);
int cmd_check(const std::string& config_path, std::ostream& out, std::ostream& err);

struct CohomologyArgs {
  int n = 1;
  double c1w = 0.0;
  double c1sq = 0.0;
  double wn = 1.0;
  double eps = 1e-3;
};

int cmd_cohomology(const CohomologyArgs& args, std::ostream& out, std::ostream& err);

}  // namespace calabi::cli
