#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sizekit/acquisition.hpp"
#include "sizekit/evaluator.hpp"
#include "sizekit/objective.hpp"
#include "sizekit/run_record.hpp"
#include "sizekit/space.hpp"

namespace sizekit::opt {

enum class Algorithm { mace, random, de };
std::string to_string(Algorithm a);
Algorithm algorithm_from_string(std::string_view s);

struct OptimizerConfig {
  Algorithm algorithm = Algorithm::mace;
  std::size_t max_iterations = 100;
  std::size_t batch = 40;
  std::size_t init_points = 40;
  std::uint64_t seed = 1;
  std::vector<Acquisition> acquisitions = {Acquisition::lcb, Acquisition::ei, Acquisition::pi};
  std::size_t inner_population = 100;
  std::size_t inner_generations = 50;
  bool stop_on_pass = false;
  /// Concurrent evaluations per batch; 1 gives byte-identical histories for a seed.
  std::size_t workers = 1;
  /// Training-set cap for the surrogate (best half kept, the rest strided).
  std::size_t gp_max_points = 150;
  std::size_t gp_restarts = 3;
  std::size_t gp_max_evaluations = 60;
  /// Rejection-sampling attempts per point for residual inequalities.
  std::size_t resample_attempts = 100;
  double de_f = 0.5;
  double de_cr = 0.9;

  /// Throws ConfigError unless batch >= 1, init_points >= 2, max_iterations >= 1 and the acquisition set is non-empty.
  void validate() const;
  /// Applies `key = value` lines; unknown keys throw ConfigError.
  static OptimizerConfig parse(std::string_view source, OptimizerConfig base);
  static OptimizerConfig parse(std::string_view source);
  void set(std::string_view key, std::string_view value);
  std::string to_text() const;
};

/// Batch Bayesian optimization: GP surrogate, LCB/EI/PI Pareto front by NSGA-II, k-means batch selection.
RunRecord run_mace(const space::PrunedSpace& ps, const eval::Evaluator& evaluator, const ObjectiveSpec& spec,
                   const OptimizerConfig& cfg);
/// Uniform random search with the same budget accounting.
RunRecord run_random(const space::PrunedSpace& ps, const eval::Evaluator& evaluator, const ObjectiveSpec& spec,
                     const OptimizerConfig& cfg);
/// Differential evolution rand/1/bin over the unit free box; population = batch.
RunRecord run_de(const space::PrunedSpace& ps, const eval::Evaluator& evaluator, const ObjectiveSpec& spec,
                 const OptimizerConfig& cfg);
/// Dispatches on cfg.algorithm.
RunRecord run(const space::PrunedSpace& ps, const eval::Evaluator& evaluator, const ObjectiveSpec& spec,
              const OptimizerConfig& cfg);

}  // namespace sizekit::opt
