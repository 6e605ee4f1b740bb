#pragma once

#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sizekit::opt {

enum class Direction { maximize, minimize, inside_range };

/// One performance target. `threshold` is used by maximize/minimize, [lo, hi] by inside_range.
struct MetricSpec {
  std::string name;
  Direction direction = Direction::minimize;
  double threshold = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double normalizer = 1.0;
};

/// Per-metric targets.
///
/// Text form, one metric per line ('#' comments):
///   <name> max <threshold> [norm=<value>]
///   <name> min <threshold> [norm=<value>]
///   <name> range <lo> <hi> [norm=<value>]
/// The normalizer defaults to |threshold| (1 when the threshold is 0) or hi - lo.
struct ObjectiveSpec {
  std::vector<MetricSpec> metrics;

  static ObjectiveSpec parse(std::string_view source);
  std::string to_text() const;
  /// Throws ConfigError when a threshold is non-finite, a range has lo >= hi or a normalizer is <= 0.
  void validate() const;
  std::vector<std::string> names() const;
};

/// Raw evaluator output before scoring.
struct Measurement {
  std::map<std::string, double> metrics;
  /// Simulation failure: the point gets the +inf fom sentinel and is kept out of the surrogate.
  bool failed = false;
  /// Instability (e.g. phase margin <= 0): never feasible, whatever the metrics say.
  bool oscillation = false;
  std::string note;
};

inline constexpr double kFailedFom = std::numeric_limits<double>::infinity();
inline constexpr double kOscillationPenalty = 1.0;

struct EvalResult {
  std::map<std::string, double> metrics;
  double fom = 0.0;
  bool feasible = false;
  bool failed = false;
  bool oscillation = false;
  double wall_time = 0.0;
};

/// Normalized violation of one target (0 when met, including exactly at the threshold).
double violation(const MetricSpec& spec, double value);

/// Sum of normalized violations; 0 iff every target is met. Throws ConfigError on a missing metric.
double fom(const ObjectiveSpec& spec, const std::map<std::string, double>& metrics);

/// Applies the failure and oscillation contracts on top of fom().
EvalResult score(const ObjectiveSpec& spec, const Measurement& m, double wall_time = 0.0);

}  // namespace sizekit::opt
