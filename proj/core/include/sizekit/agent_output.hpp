#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sizekit/relations.hpp"

namespace sizekit::agents {

/// An employee's position on a proposed relation, referenced by pool id (R1, R2, ...).
struct Stance {
  std::string relation_id;
  bool agree = true;
  std::string evidence;
  bool operator==(const Stance&) const = default;
};

/// Structured content of one agent reply.
///
/// Relations are read from ```relations fenced blocks (one record per line, relations grammar);
/// stances from ```stance blocks, one per line: `agree R1 | evidence="..."` or `refute R2 | evidence="..."`.
/// Everything outside fenced blocks is the rationale.
struct AgentOutput {
  std::vector<relations::SizingRelation> relations;
  std::vector<Stance> stances;
  std::string rationale;
  /// One entry per malformed record or stance line that was skipped.
  std::vector<std::string> skipped;
};

/// Never throws on malformed content; bad lines are reported in `skipped`.
AgentOutput parse_agent_output(std::string_view text);

/// Parses one stance line; returns false when malformed.
bool parse_stance(std::string_view line, Stance& out);

}  // namespace sizekit::agents
