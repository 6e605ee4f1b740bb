#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sizekit/objective.hpp"

namespace sizekit::opt {

struct EvaluationRecord {
  /// 0 for the initial design, then 1..max_iterations.
  std::size_t iteration = 0;
  /// Global evaluation index (0-based).
  std::size_t index = 0;
  std::vector<double> x;
  EvalResult result;
  /// Incumbent fom after this evaluation.
  double best_fom = kFailedFom;
};

struct RunRecord {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::size_t init_points = 0;
  std::size_t batch = 0;
  std::size_t max_iterations = 0;
  std::size_t completed_iterations = 0;
  std::vector<EvaluationRecord> history;
  /// Index into history of the incumbent (first evaluation attaining the minimum fom).
  std::size_t best_index = 0;
  std::optional<std::size_t> iterations_to_pass;
  /// 1-based count of evaluations up to and including the first feasible one.
  std::optional<std::size_t> evaluations_to_pass;
  /// Cost-model seconds: evaluations consumed x nominal seconds per evaluation.
  double total_time = 0.0;
  /// Cost-model seconds up to the end of the batch containing the first feasible point.
  std::optional<double> time_to_pass;
  /// Cost-model seconds of the full budget (init + max_iterations x batch).
  double budget_time = 0.0;
  /// Measured seconds; not part of the deterministic log.
  double wall_time = 0.0;

  bool passed() const { return evaluations_to_pass.has_value(); }
  const EvaluationRecord& best() const { return history.at(best_index); }
  /// Time charged to this run by the comparison: time to pass, else the full budget time.
  double charged_time() const { return time_to_pass ? *time_to_pass : budget_time; }
};

/// Line-oriented history log: a '#' header then one tab-separated row per evaluation
/// (iteration, index, free vector, metrics, fom, feasible, failed, best).
std::string history_log(const RunRecord& run, const std::vector<std::string>& metric_names);

/// One-line tab-separated summary of a run and the matching header line.
std::string summary_header();
std::string summary_line(const RunRecord& run);
/// Summary fields needed by the comparison, read back from a summary file.
struct RunSummary {
  std::uint64_t seed = 0;
  bool passed = false;
  std::optional<std::size_t> evaluations_to_pass;
  std::optional<std::size_t> iterations_to_pass;
  std::size_t evaluations = 0;
  double best_fom = kFailedFom;
  double time = 0.0;
  double budget_time = 0.0;
};
RunSummary summarize(const RunRecord& run);
std::vector<RunSummary> parse_summaries(std::string_view text);

struct ArmStats {
  std::string label;
  std::size_t runs = 0;
  std::size_t passed = 0;
  double mean_time = 0.0;
  std::optional<double> median_evaluations_to_pass;
  double pass_rate() const { return runs ? static_cast<double>(passed) / static_cast<double>(runs) : 0.0; }
};

struct Comparison {
  ArmStats a;
  ArmStats b;
  /// mean_time(b) / mean_time(a).
  double speedup = 0.0;
  double pass_rate_delta() const { return a.pass_rate() - b.pass_rate(); }
};

ArmStats arm_stats(std::string label, const std::vector<RunSummary>& runs);
/// Throws std::invalid_argument when either arm is empty.
Comparison compare_runs(const std::vector<RunSummary>& a, const std::vector<RunSummary>& b,
                        std::string label_a = "a", std::string label_b = "b");
Comparison compare_runs(const std::vector<RunRecord>& a, const std::vector<RunRecord>& b,
                        std::string label_a = "a", std::string label_b = "b");
/// Plain-text table with Time and Pass Rate columns per arm plus the speedup.
std::string comparison_table(const Comparison& c);

/// Incumbent fom after each evaluation, one row per evaluation index, one column per run.
std::string incumbent_curves(const std::vector<RunRecord>& runs);

}  // namespace sizekit::opt
