#pragma once

#include <chrono>
#include <vector>

#include "sizekit/optimizer.hpp"
#include "sizekit/sampling.hpp"

namespace sizekit::opt::detail {

/// Bookkeeping shared by the optimizers: evaluation, incumbent and pass tracking, budget.
class RunState {
 public:
  RunState(const space::PrunedSpace& ps, const eval::Evaluator& evaluator, const ObjectiveSpec& spec,
           const OptimizerConfig& cfg, std::string algorithm);

  /// Draws a point uniformly, resampling up to the configured attempts to satisfy residual inequalities.
  Point feasible_unit_point(Rng& rng) const;
  /// Replaces an infeasible point by a feasible random draw when one is found.
  Point repair(Point u, Rng& rng) const;
  bool unit_feasible(const Point& u) const;

  /// Evaluates unit-cube points and appends them to the history. Returns the results.
  std::vector<EvalResult> evaluate(const std::vector<Point>& unit_points, std::size_t iteration);
  /// Initial Latin hypercube design; throws EvaluationError when every point fails.
  std::vector<EvalResult> initial_design(Rng& rng);

  bool should_stop() const { return cfg_.stop_on_pass && record_.passed(); }
  void finish_iteration(std::size_t iteration) { record_.completed_iterations = iteration; }
  RunRecord finish();

  const RunRecord& record() const { return record_; }
  const std::vector<Point>& unit_points() const { return unit_points_; }
  const space::PrunedSpace& space() const { return ps_; }
  const OptimizerConfig& config() const { return cfg_; }

 private:
  const space::PrunedSpace& ps_;
  const eval::Evaluator& evaluator_;
  const ObjectiveSpec& spec_;
  const OptimizerConfig& cfg_;
  RunRecord record_;
  std::vector<Point> unit_points_;
  double cost_ = 1.0;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace sizekit::opt::detail
