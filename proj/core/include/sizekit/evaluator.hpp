#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sizekit/objective.hpp"
#include "sizekit/space.hpp"

namespace sizekit::eval {

/// Circuit (or test-function) evaluator. Implementations must be callable
/// concurrently from several threads.
class Evaluator {
 public:
  virtual ~Evaluator() = default;

  virtual std::string name() const = 0;
  virtual std::vector<std::string> metric_names() const = 0;
  virtual opt::Measurement evaluate(const space::Assignment& assignment) const = 0;

  /// Nominal seconds per evaluation used by the deterministic time model.
  virtual double nominal_cost() const { return 1.0; }

  /// Throws ConfigError when a handle the evaluator needs is absent from `space`.
  virtual void check_space(const space::ParameterSpace& space) const { (void)space; }
};

/// Throws ConfigError naming every objective metric the evaluator does not produce.
void check_metrics(const Evaluator& evaluator, const opt::ObjectiveSpec& spec);

/// Expands, evaluates and scores each free vector. With workers > 1 the calls run
/// on a small thread pool; results are returned in input order.
/// Points violating residual inequalities get their infeasibility added to the fom.
std::vector<opt::EvalResult> evaluate_batch(const Evaluator& evaluator, const opt::ObjectiveSpec& spec,
                                            const space::PrunedSpace& ps,
                                            const std::vector<std::vector<double>>& points, std::size_t workers = 1);

}  // namespace sizekit::eval
