#pragma once

#include <string>
#include <vector>

#include "sizekit/netlist.hpp"
#include "sizekit/relations.hpp"

namespace sizekit::topology {

enum class MotifKind { current_mirror, differential_pair };

std::string_view to_string(MotifKind kind);

/// A matched structural pattern.
/// Mirror: `reference` is the diode-connected device, `outputs` the rest (sorted).
/// Pair: `left`/`right` sorted by name, `tail` the device feeding the shared source net.
struct MotifAnnotation {
  MotifKind kind = MotifKind::current_mirror;
  std::string reference;
  std::vector<std::string> outputs;
  std::string left;
  std::string right;
  std::string tail;
  std::string evidence;

  /// All member device names (reference/outputs or left/right/tail).
  std::vector<std::string> members() const;

  bool operator==(const MotifAnnotation&) const = default;
};

/// Maximal groups of same-kind MOS sharing gate and source nets with exactly one
/// diode-connected member. Sorted by reference name.
std::vector<MotifAnnotation> detect_current_mirrors(const Netlist& netlist);

/// Same-kind MOS pairs on a shared source net, with different gate nets, where the
/// source net is fed by a third MOS drain or a current source and is not a rail.
/// Sorted by (left, right).
std::vector<MotifAnnotation> detect_differential_pairs(const Netlist& netlist);

/// Mirrors followed by pairs.
std::vector<MotifAnnotation> detect_motifs(const Netlist& netlist);

/// Re-checks the structural predicate of `a` against `netlist`.
bool holds(const MotifAnnotation& a, const Netlist& netlist);

/// Pairs seed W- and L-equality; mirrors seed L-equality between the reference and each output.
std::vector<relations::SizingRelation> motif_seed_relations(const std::vector<MotifAnnotation>& annotations);

/// Relation-format text: one '#' comment line per motif followed by its seed records,
/// so the block parses with relations::parse_relations and can go into agent context as is.
std::string serialize_annotations(const std::vector<MotifAnnotation>& annotations);

}  // namespace sizekit::topology
