#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sizekit/agent_output.hpp"
#include "sizekit/relations.hpp"

namespace sizekit::agents {

enum class Role { expert, employee };
enum class MessageKind { proposal, agreement, refutation, rationale };

std::string to_string(Role r);
std::string to_string(MessageKind k);
Role role_from_string(std::string_view s);
MessageKind message_kind_from_string(std::string_view s);

struct Message {
  std::size_t seq = 0;  // assigned by the pool, 1-based
  std::size_t round = 1;
  std::string author;
  Role role = Role::employee;
  MessageKind kind = MessageKind::rationale;
  std::vector<relations::SizingRelation> relations;
  /// Pool ids of `relations` (proposals only), assigned on append.
  std::vector<std::string> relation_ids;
  /// Target relation id (agreements and refutations only).
  std::string target;
  std::string text;
  std::string evidence;
};

/// Append-only, totally ordered transcript visible to every agent.
class MessagePool {
 public:
  /// Validates the message (round >= 1, proposals carry relations, stances carry a target),
  /// assigns its sequence number and relation ids, and returns the stored copy.
  const Message& append(Message m);
  const std::vector<Message>& messages() const { return messages_; }
  std::size_t size() const { return messages_.size(); }
  /// Proposal message holding relation `id`, or nullptr.
  const Message* proposal_of(const std::string& id) const;
  /// Relation with pool id `id`, or nullptr.
  const relations::SizingRelation* relation(const std::string& id) const;
  /// Text rendering of the messages with seq < `upto` (all when upto == 0), as shown to agents.
  std::string render(std::size_t upto = 0) const;

 private:
  std::vector<Message> messages_;
  std::size_t next_relation_ = 1;
};

/// Rendering of one message as it appears in agent context.
std::string render_message(const Message& m);

/// Turns one agent reply into pool messages: a proposal (relations + rationale) or a rationale message,
/// followed by one agreement/refutation message per stance. Expert stances are dropped (returned in `dropped`).
std::vector<Message> to_messages(const AgentOutput& out, std::size_t round, const std::string& author, Role role,
                                 std::vector<std::string>* dropped = nullptr);

}  // namespace sizekit::agents
