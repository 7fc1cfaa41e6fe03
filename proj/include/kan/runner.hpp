#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kan/benchmarks.hpp"
#include "kan/stats.hpp"
#include "kan/training.hpp"

namespace kan {

struct RunConfig {
  std::string experiment;         // gaussian | synthetic | feynman | helmholtz
  std::string strategy = "both";  // input | curvature | both
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  double scale = 1.0;  // fraction of iterations/points, (0,1]
  std::string out_dir = "results";
  std::size_t threads = 0;  // 0 = hardware concurrency
  bool dry_run = false;

  std::optional<std::size_t> iterations;
  std::optional<double> learning_rate;
  std::optional<double> epsilon;
  std::optional<double> boundary_weight;
  std::optional<std::vector<GridEvent>> grid_schedule;
  std::optional<std::vector<std::string>> tasks;  // subset filter by name
};

/// Parses the JSON config file into `cfg`; malformed content appends to
/// `errors` instead of throwing.
void apply_config_file(RunConfig& cfg, const std::string& path, std::vector<std::string>& errors);

/// Exhaustive validation; returns every problem found.
std::vector<std::string> validate_config(const RunConfig& cfg);

std::string resolved_config_json(const RunConfig& cfg);

/// Everything needed to run one (task, strategy, seed) cell outside the CLI;
/// the acceptance suite drives cells through this too.
struct ResolvedExperiment {
  std::string name;
  std::vector<RegressionTask> tasks;          // regression experiments
  std::vector<std::pair<int, int>> helmholtz;  // helmholtz configs (a1, a2)
  std::vector<std::size_t> hidden;            // hidden widths
  TrainConfig train_proto;                    // iterations/lr/schedule after scaling
  std::size_t grid_initial = 3;
  std::size_t helmholtz_per_axis = 64;
  std::size_t helmholtz_per_edge = 64;
};

ResolvedExperiment resolve_experiment(const RunConfig& cfg);

struct CellOutcome {
  CellResult result;
  std::vector<TraceRow> trace;
  Network net;
  bool failed = false;
  std::string error;
};

CellOutcome run_regression_cell(const ResolvedExperiment& exp, const RegressionTask& task,
                                const std::string& strategy, std::uint64_t seed);
CellOutcome run_helmholtz_cell(const ResolvedExperiment& exp, int a1, int a2,
                               const std::string& strategy, std::uint64_t seed);

/// Runs every cell through a worker pool, writes traces, checkpoints, report
/// and figures under cfg.out_dir. Returns 0 on success, 1 on validation
/// errors, 2 when cells failed (partial results plus failures.json).
int run_experiment(const RunConfig& cfg, std::ostream& log);

int report_command(const std::string& results_dir, std::ostream& out);
int plot_command(const std::string& results_dir, std::ostream& log);

void render_report(const ExperimentReport& report, std::ostream& out);

/// Dispatches jobs over `threads` workers (run on the caller when <= 1).
void run_parallel(std::vector<std::function<void()>>& jobs, std::size_t threads);

std::string cell_id(const std::string& task, const std::string& strategy, std::uint64_t seed);

}  // namespace kan
