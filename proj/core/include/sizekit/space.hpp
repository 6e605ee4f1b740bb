#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sizekit/interval.hpp"
#include "sizekit/netlist.hpp"
#include "sizekit/relations.hpp"

namespace sizekit::space {

enum class Scale { linear, log };

std::string_view to_string(Scale s);

/// Full assignment of every sizable handle.
using Assignment = std::map<Handle, double>;

/// Default [lo, hi] and scale per (device kind, parameter), plus per-handle overrides.
///
/// Text form, one entry per line, '#' comments:
///   default  <kind> <param> <lo> <hi> [log|linear]
///   override <device> <param> <lo> <hi> [log|linear]
struct BoundTable {
  struct Entry {
    Interval range;
    Scale scale = Scale::log;
  };
  std::map<std::pair<DeviceKind, std::string>, Entry> defaults;
  std::map<Handle, Entry> overrides;

  static BoundTable parse(std::string_view source);
  /// Entries of `other` replace ours.
  void merge(const BoundTable& other);
  std::string to_text() const;
};

/// W, L, M for MOS, R, C and current-source DC with log scale except M (linear).
BoundTable default_bound_table();

/// Full search box: one entry per sizable handle in netlist order.
class ParameterSpace {
 public:
  ParameterSpace(std::vector<Handle> handles, std::vector<Interval> bounds, std::vector<Scale> scales);

  std::size_t dim() const { return handles_.size(); }
  const std::vector<Handle>& handles() const { return handles_; }
  const std::vector<Interval>& bounds() const { return bounds_; }
  const std::vector<Scale>& scales() const { return scales_; }
  /// Index of `h`, or dim() when absent.
  std::size_t index_of(const Handle& h) const;

 private:
  std::vector<Handle> handles_;
  std::vector<Interval> bounds_;
  std::vector<Scale> scales_;
};

/// Throws ConfigError on a missing default or an override with lo >= hi,
/// UnknownHandle for an override naming no sizable handle.
ParameterSpace build_space(const Netlist& netlist, const BoundTable& table);

struct FreeVariable {
  Handle representative;
  Interval bounds;
  Scale scale = Scale::log;
  bool integer = false;
};

/// How one full handle is obtained from the free vector.
struct Binding {
  enum class Kind { free, fixed } kind = Kind::free;
  std::size_t free_index = 0;
  double multiplier = 1.0;
  double value = 0.0;
  bool integer = false;
};

/// sum_j coefficients[j].second * x[coefficients[j].first] + constant >= 0
struct ResidualInequality {
  std::vector<std::pair<std::size_t, double>> coefficients;
  double constant = 0.0;
  std::string label;
};

/// Reduced free box with an exact expansion back to full assignments.
class PrunedSpace {
 public:
  const ParameterSpace& full() const { return full_; }
  const std::vector<FreeVariable>& free() const { return free_; }
  const std::vector<Binding>& bindings() const { return bindings_; }
  const std::vector<ResidualInequality>& residual_inequalities() const { return residual_; }
  const relations::RelationSet& relations() const { return relations_; }
  std::size_t dim() const { return free_.size(); }

  /// Throws std::out_of_range for a vector outside the free box or of the wrong size.
  /// Integer-valued handles are rounded to the nearest integer >= 1.
  Assignment expand(std::span<const double> x) const;
  std::vector<double> expand_values(std::span<const double> x) const;

  bool contains(std::span<const double> x) const;
  /// All residual inequalities hold (relative slack 1e-12).
  bool feasible(std::span<const double> x) const;
  /// Sum of normalized inequality violations; 0 when feasible.
  double infeasibility(std::span<const double> x) const;

  /// Maps between free coordinates and the unit cube using each variable's scale.
  std::vector<double> to_unit(std::span<const double> x) const;
  std::vector<double> from_unit(std::span<const double> u) const;

  /// Human-readable summary: free variables, classes, fixed handles, reduction.
  std::string report() const;

 private:
  friend PrunedSpace prune(const ParameterSpace& space, const relations::RelationSet& rs);
  PrunedSpace(ParameterSpace full, relations::RelationSet rs) : full_(std::move(full)), relations_(std::move(rs)) {}

  ParameterSpace full_;
  relations::RelationSet relations_;
  std::vector<FreeVariable> free_;
  std::vector<Binding> bindings_;
  std::vector<ResidualInequality> residual_;
};

/// Throws UnknownHandle when the set names a handle outside the space and
/// InfeasibleBound when a projected bound is empty.
PrunedSpace prune(const ParameterSpace& space, const relations::RelationSet& rs);

/// Pruned view with no relations (every handle free).
PrunedSpace unpruned(const ParameterSpace& space);

struct VolumeReduction {
  std::size_t dims_removed = 0;
  /// log(volume(free box) / volume(full box)) with widths measured in each handle's scale.
  double log_volume_ratio = 0.0;
  double volume_ratio() const;
};

VolumeReduction volume_reduction(const ParameterSpace& space, const PrunedSpace& pruned);

}  // namespace sizekit::space
