#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sizekit/config.hpp"
#include "sizekit/eval_spec.hpp"
#include "sizekit/netlist.hpp"
#include "sizekit/objective.hpp"
#include "sizekit/optimizer.hpp"
#include "sizekit/relations.hpp"
#include "sizekit/run_record.hpp"
#include "sizekit/space.hpp"

namespace sizekit::pipeline {

enum class Arm { constrained, unconstrained };
std::string to_string(Arm a);
Arm arm_from_string(std::string_view s);

/// Everything an optimization run needs, loaded from a config.
///
/// [run]       netlist, relations, bounds, objective, output, seeds, jobs
/// [evaluator] kind, function, dim, model constants
/// [optimizer] OptimizerConfig keys (stop_on_pass defaults to true here)
struct Problem {
  std::optional<Netlist> netlist;
  space::ParameterSpace space;
  opt::ObjectiveSpec objective;
  eval::EvaluatorSpec evaluator_spec;
  std::unique_ptr<eval::Evaluator> evaluator;
  opt::OptimizerConfig optimizer;
  std::vector<std::uint64_t> seeds;
};

Problem load_problem(const config::Config& cfg);
/// Reads [run].relations, validates against the netlist (unknown devices are a ConfigError) and normalizes.
relations::RelationSet load_relations(const config::Config& cfg, const Problem& problem);
space::PrunedSpace make_space(const config::Config& cfg, const Problem& problem, Arm arm);

/// First unused <out>/<command>/run-NNNN directory, created.
std::filesystem::path next_run_dir(const std::filesystem::path& out, const std::string& command);

struct OptimizeOutcome {
  std::filesystem::path dir;
  std::map<Arm, std::vector<opt::RunRecord>> runs;
};
/// Runs every seed on each arm; writes per-seed history logs, per-arm summary.tsv, timing.tsv and a config snapshot.
OptimizeOutcome cmd_optimize(const config::Config& cfg, const std::vector<Arm>& arms, std::ostream& log);

/// Dry-run space report for one arm.
std::string cmd_prune(const config::Config& cfg, Arm arm);

/// Compares two summary files; writes the table (and curves when both history dirs are given) to `out`.
opt::Comparison cmd_compare(const std::filesystem::path& summary_a, const std::filesystem::path& summary_b,
                            const std::string& label_a, const std::string& label_b, std::ostream& out);

struct ExtractOutcome {
  std::filesystem::path dir;
  std::vector<std::size_t> counts;
  std::vector<relations::RelationSet> sets;
  /// Max - min of the per-attempt counts (0 for a single attempt).
  int max_variation = 0;
};
/// Topology detection plus agent extraction per attempt. Reads [run].netlist, [run].paper and [agents].
ExtractOutcome cmd_extract(const config::Config& cfg, std::size_t attempts, std::ostream& log);

/// End-to-end: optimize both arms then compare; writes report.txt and curves.tsv.
opt::Comparison cmd_bench(const config::Config& cfg, std::ostream& log);

}  // namespace sizekit::pipeline
