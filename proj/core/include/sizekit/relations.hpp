#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sizekit/interval.hpp"
#include "sizekit/netlist.hpp"

namespace sizekit::relations {

/// equal/ratio tie parameters together, bound/fix constrain each listed device
/// independently, geq is a one-sided linear constraint param(a) >= k * param(b).
enum class RelationKind { equal, ratio, bound, fix, geq };
enum class Provenance { topology, agent, manual };

std::string_view to_string(RelationKind kind);
std::string_view to_string(Provenance p);

/// One quantitative relationship among a single parameter of several devices.
///
/// For equal/ratio, `coefficients[i]` is k_i in param(devices[i]) = k_i * param(devices[0]),
/// with k_0 = 1; equal means every k_i is 1. For geq, devices = {a, b} and
/// coefficients = {1, k}.
struct SizingRelation {
  std::vector<std::string> devices;
  std::string param;
  RelationKind kind = RelationKind::equal;
  std::vector<double> coefficients;
  Interval range;      // bound
  double value = 0.0;  // fix
  Provenance provenance = Provenance::manual;
  std::string rationale;
  std::string evidence;

  std::vector<Handle> handles() const;
  bool operator==(const SizingRelation&) const = default;
};

/// Parses one record. Grammar (whitespace separated):
///   equal <P> <dev> <dev> [<dev>...]
///   ratio <P> <dev>=<k>*<base> [<dev>=<k>*<base>...]
///   bound <P> <dev> [<dev>...] [<lo>,<hi>]
///   fix   <P> <dev> [<dev>...] = <value>
///   geq   <P> <dev>>=<k>*<dev>
/// optionally followed by "| key=value ..." with keys provenance, rationale, evidence.
/// Values accept SPICE suffixes; coefficients may be written as a/b.
SizingRelation parse_record(std::string_view record, std::size_t line = 0);

/// One record per line; '#' starts a comment; blank lines ignored.
std::vector<SizingRelation> parse_relations(std::string_view source);

/// Canonical record text (round-trips through parse_record).
std::string to_record(const SizingRelation& r);
std::string to_text(const std::vector<SizingRelation>& rels);

struct Rejection {
  SizingRelation relation;
  std::string reason;
};

struct Validation {
  std::vector<SizingRelation> accepted;
  std::vector<Rejection> rejected;
};

/// Accepts relations whose devices exist and whose parameter is sizable for every
/// listed device; everything else comes back with a reason.
Validation validate(const std::vector<SizingRelation>& rels, const Netlist& netlist);

struct Member {
  Handle handle;
  /// value(handle) = multiplier * value(representative)
  double multiplier = 1.0;
  bool operator==(const Member&) const = default;
};

struct EquivalenceClass {
  Handle representative;
  /// Sorted by handle; the representative is the first member with multiplier 1.
  std::vector<Member> members;

  double multiplier(const Handle& h) const;
  bool operator==(const EquivalenceClass&) const = default;
};

/// param(lhs) >= k * param(rhs)
struct LinearInequality {
  Handle lhs;
  Handle rhs;
  double k = 1.0;
  auto operator<=>(const LinearInequality&) const = default;
};

/// Normalized, conflict-checked relation algebra.
class RelationSet {
 public:
  const std::vector<SizingRelation>& relations() const { return relations_; }
  const std::vector<EquivalenceClass>& classes() const { return classes_; }
  const std::map<Handle, Interval>& bounds() const { return bounds_; }
  const std::map<Handle, double>& fixes() const { return fixes_; }
  const std::vector<LinearInequality>& inequalities() const { return inequalities_; }

  /// Class containing `h`, or nullptr for untouched handles.
  const EquivalenceClass* class_of(const Handle& h) const;
  bool empty() const { return classes_.empty() && bounds_.empty() && fixes_.empty() && inequalities_.empty(); }

  /// Canonical relations that normalize back to this set.
  std::vector<SizingRelation> to_relations() const;

  /// Compares the algebra (classes, multipliers, bounds, fixes, inequalities), not the inputs.
  friend bool operator==(const RelationSet& a, const RelationSet& b);

 private:
  friend RelationSet normalize(const std::vector<SizingRelation>& rels);

  std::vector<SizingRelation> relations_;
  std::vector<EquivalenceClass> classes_;
  std::map<Handle, Interval> bounds_;
  std::map<Handle, double> fixes_;
  std::vector<LinearInequality> inequalities_;
  std::size_t bound_records_ = 0;
  std::size_t fix_records_ = 0;
  std::size_t geq_records_ = 0;

  friend std::size_t valid_relation_count(const RelationSet& rs);
};

/// Relative tolerance for ratio and fixed-value consistency.
inline constexpr double kRatioTolerance = 1e-9;

/// Weighted union-find over handles. Throws ConflictError when two relations imply
/// different ratios (or fixed values) for the same pair of handles, InfeasibleBound
/// when bounds cannot be met.
RelationSet normalize(const std::vector<SizingRelation>& rels);

/// Multi-member classes plus distinct bound, fix and inequality records.
std::size_t valid_relation_count(const RelationSet& rs);

/// Per row: max - min. Throws std::invalid_argument on an empty matrix or row.
std::vector<int> stability_report(const std::vector<std::vector<int>>& counts);

/// Largest relative violation of `r` under `values` (0 when satisfied exactly).
/// Throws UnknownHandle when a referenced handle is absent.
double residual(const SizingRelation& r, const std::map<Handle, double>& values);

}  // namespace sizekit::relations
