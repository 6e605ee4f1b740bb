#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sizekit/evaluator.hpp"

namespace sizekit::eval {

/// A simulator measurement mapped onto an objective metric: metric = scale * measured.
struct MeasurementMap {
  std::string measurement;
  std::string metric;
  double scale = 1.0;
};

struct ExternalConfig {
  /// Testbench deck with {P_DEV} or {P(DEV)} placeholders, e.g. {W_M1}.
  std::string deck_template;
  /// Shell command; {deck}, {output} and {scratch} expand to paths inside the per-evaluation scratch dir.
  std::string command;
  std::vector<MeasurementMap> measurements;
  double timeout_seconds = 300.0;
  std::size_t pool_size = 1;
  std::filesystem::path scratch_root = "scratch";
  bool keep_scratch = false;
  double nominal_cost = 1.0;
};

/// Placeholders found in a template, in order of first appearance ("W_M1" style, without braces).
std::vector<std::string> template_placeholders(const std::string& deck);
/// Substitutes every placeholder; throws ConfigError naming the first unresolved one.
std::string render_deck(const std::string& deck, const space::Assignment& a);
/// Parses `name = value` lines (case-insensitive names, SPICE suffixes allowed). Later lines win.
std::map<std::string, double> parse_measurements(const std::string& output);

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  bool spawn_failed = false;
};
/// Runs `/bin/sh -c command` in `cwd` with stdout and stderr redirected to `log`, killing the process group on timeout.
ProcessResult run_process(const std::string& command, const std::filesystem::path& cwd,
                          const std::filesystem::path& log, double timeout_seconds);

class ExternalEvaluator final : public Evaluator {
 public:
  explicit ExternalEvaluator(ExternalConfig cfg);
  ~ExternalEvaluator() override;
  std::string name() const override { return "external-sim"; }
  std::vector<std::string> metric_names() const override;
  opt::Measurement evaluate(const space::Assignment& a) const override;
  double nominal_cost() const override { return cfg_.nominal_cost; }
  void check_space(const space::ParameterSpace& space) const override;

 private:
  struct Pool;
  ExternalConfig cfg_;
  std::unique_ptr<Pool> pool_;
  mutable std::atomic<std::uint64_t> counter_{0};
};

}  // namespace sizekit::eval
