#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sizekit/backend.hpp"
#include "sizekit/message_pool.hpp"
#include "sizekit/netlist.hpp"
#include "sizekit/relations.hpp"
#include "sizekit/topology.hpp"

namespace sizekit::agents {

struct AgentProfile {
  std::string name;
  Role role = Role::employee;
  std::shared_ptr<ChatBackend> backend;
  /// Not sent when empty (backends without temperature control).
  std::optional<double> temperature;
};

/// Prompt templates. Placeholders: {{agent}} {{round}} {{rounds}} {{paper}} {{netlist}} {{motifs}} {{pool}} {{grammar}}.
struct Prompts {
  std::string system;
  std::string expert;
  std::string employee;
  /// Copies compiled in from the shipped asset files.
  static Prompts defaults();
  /// Reads system.txt, expert.txt and employee.txt from `dir`.
  static Prompts load(const std::string& dir);
};

/// Default team: one expert and three employees at temperature 0.5, sharing `backend`.
std::vector<AgentProfile> default_team(const std::shared_ptr<ChatBackend>& backend);

struct ExtractionJob {
  std::string paper_text;
  Netlist netlist;
  std::vector<topology::MotifAnnotation> motifs;
  std::size_t rounds = 5;
  std::vector<AgentProfile> team;
  Prompts prompts = Prompts::defaults();
  /// Keep a relation when agreements - refutations >= margin (1 means strictly more agreements).
  int agreement_margin = 1;
  std::size_t attempt = 1;
  std::uint64_t seed = 0;

  /// Throws ConfigError unless rounds >= 1, exactly one expert, >= 1 employee, unique names and backends set.
  void validate() const;
};

/// Stance count for one proposed relation.
struct Tally {
  std::string id;
  relations::SizingRelation relation;
  std::string proposer;
  Role proposer_role = Role::employee;
  int agreements = 0;
  int refutations = 0;
  bool kept = false;
};

struct Summary {
  std::vector<Tally> tallies;
  /// Kept, validated, conflict-free relations in support order.
  std::vector<relations::SizingRelation> accepted;
  std::vector<relations::Rejection> rejected;
  relations::RelationSet set;
};

/// Majority-stance summarization over a finished pool. Each employee's latest stance per relation counts;
/// stances by a relation's own proposer are ignored. Kept relations are re-parsed, validated against the
/// netlist and added in order of (net support desc, id asc), rejecting any that conflict with earlier ones.
Summary summarize(const MessagePool& pool, const Netlist& netlist, int agreement_margin = 1);

struct ExtractionResult {
  Summary summary;
  MessagePool pool;
  /// JSON lines, identical to the persisted transcript.
  std::vector<std::string> transcript;
  std::vector<std::string> skipped;
  std::size_t valid_relation_count = 0;
};

/// Runs the cooperation-and-debate rounds. When `transcript_path` is non-empty every record is appended and
/// flushed as it is produced, so a backend failure leaves the partial transcript on disk before rethrowing.
ExtractionResult run_extraction(const ExtractionJob& job, const std::string& transcript_path = "");

/// Context sent to `agent` in `round` given the pool so far.
std::vector<ChatMessage> build_context(const ExtractionJob& job, const AgentProfile& agent, std::size_t round,
                                       const MessagePool& pool);

/// Rebuilds the message pool from transcript JSON lines.
MessagePool pool_from_transcript(std::string_view transcript);
/// Scripted backend answering with the replies recorded in a transcript.
ScriptedBackend backend_from_transcript(std::string_view transcript);

struct AuditReport {
  bool ok = true;
  std::size_t rounds = 0;
  std::vector<std::string> problems;
};
/// Checks protocol invariants on a transcript: one expert turn per round, no expert stances, proposals carry
/// relations, sequence numbers strictly increase, and each turn saw every earlier message.
AuditReport audit_transcript(std::string_view transcript);

}  // namespace sizekit::agents
