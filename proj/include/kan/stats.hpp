#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace kan {

/// ||pred - ref||_2 / ||ref||_2. Throws on zero reference norm.
double relative_l2(std::span<const double> pred, std::span<const double> ref);

/// (err_input - err_curv) / err_input * 100; positive = curvature is better.
double improvement_pct(double err_input, double err_curv);

enum class ZeroPolicy {
  Drop,   // zero differences removed before ranking (default)
  Pratt,  // zeros ranked, then excluded from the signed sum
};

/// One-tailed Wilcoxon signed-rank p-value for the alternative that the
/// differences are positive (curvature errors lower, deltas = input - curv).
/// Exact tail enumeration for n <= 20 nonzero pairs, normal approximation
/// with tie-corrected variance and continuity correction above. Ties share
/// average ranks. All-zero input returns 1.0 and sets *all_zero.
double wilcoxon_one_tailed(std::span<const double> deltas, ZeroPolicy policy = ZeroPolicy::Drop,
                           bool* all_zero = nullptr);

struct SeedErrors {
  std::vector<double> values;  // one per seed, seed order irrelevant

  double median() const;
  double stddev() const;  // sample (n-1) form
};

struct CellResult {
  std::string task;
  std::string strategy;  // "input-based" | "curvature-based"
  std::uint64_t seed = 0;
  double rel_l2 = 0.0;
  double wall_ms = 0.0;
};

struct TaskSummary {
  std::string task;
  std::map<std::string, SeedErrors> by_strategy;
  double improvement = 0.0;  // percent, from medians (both strategies present)
};

struct ExperimentReport {
  std::string experiment;
  std::vector<std::string> strategies;
  std::vector<std::uint64_t> seeds;
  std::vector<TaskSummary> tasks;
  double average_improvement = 0.0;
  double wilcoxon_p = 1.0;
  bool comparative = false;  // true when both strategies are present
  std::map<std::string, double> wall_ms_by_strategy;
};

/// Requires every (task, strategy, seed) cell; throws listing any gaps.
ExperimentReport aggregate(const std::string& experiment,
                           const std::vector<std::string>& tasks,
                           const std::vector<std::string>& strategies,
                           const std::vector<std::uint64_t>& seeds,
                           const std::vector<CellResult>& cells);

std::string report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const std::string& text);

/// CSV flattening: task, input median/std, curvature median/std, improvement,
/// with a trailing AVERAGE row.
void write_report_csv(const std::string& path, const ExperimentReport& report);

}  // namespace kan
