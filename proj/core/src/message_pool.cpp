#include "sizekit/message_pool.hpp"

#include <fmt/format.h>

#include "sizekit/errors.hpp"
#include "sizekit/text.hpp"

namespace sizekit::agents {

std::string to_string(Role r) { return r == Role::expert ? "expert" : "employee"; }

std::string to_string(MessageKind k) {
  switch (k) {
    case MessageKind::proposal: return "proposal";
    case MessageKind::agreement: return "agreement";
    case MessageKind::refutation: return "refutation";
    case MessageKind::rationale: return "rationale";
  }
  return "?";
}

Role role_from_string(std::string_view s) {
  const auto l = text::to_lower(s);
  if (l == "expert") return Role::expert;
  if (l == "employee") return Role::employee;
  throw ConfigError("unknown role '" + std::string(s) + "'");
}

MessageKind message_kind_from_string(std::string_view s) {
  const auto l = text::to_lower(s);
  if (l == "proposal") return MessageKind::proposal;
  if (l == "agreement") return MessageKind::agreement;
  if (l == "refutation") return MessageKind::refutation;
  if (l == "rationale") return MessageKind::rationale;
  throw ConfigError("unknown message kind '" + std::string(s) + "'");
}

const Message& MessagePool::append(Message m) {
  if (m.round < 1) throw Error("message round must be >= 1");
  if (!messages_.empty() && m.round < messages_.back().round) throw Error("message rounds must not decrease");
  if (m.kind == MessageKind::proposal && m.relations.empty()) throw Error("proposal without relations");
  if ((m.kind == MessageKind::agreement || m.kind == MessageKind::refutation) && m.target.empty()) {
    throw Error("stance without a target relation");
  }
  if (m.role == Role::expert && (m.kind == MessageKind::agreement || m.kind == MessageKind::refutation)) {
    throw Error("the expert does not take stances");
  }
  m.seq = messages_.size() + 1;
  m.relation_ids.clear();
  for (std::size_t i = 0; i < m.relations.size(); ++i) m.relation_ids.push_back(fmt::format("R{}", next_relation_++));
  messages_.push_back(std::move(m));
  return messages_.back();
}

const Message* MessagePool::proposal_of(const std::string& id) const {
  for (const auto& m : messages_) {
    for (const auto& rid : m.relation_ids) {
      if (rid == id) return &m;
    }
  }
  return nullptr;
}

const relations::SizingRelation* MessagePool::relation(const std::string& id) const {
  for (const auto& m : messages_) {
    for (std::size_t i = 0; i < m.relation_ids.size(); ++i) {
      if (m.relation_ids[i] == id) return &m.relations[i];
    }
  }
  return nullptr;
}

std::string render_message(const Message& m) {
  std::string out = fmt::format("[#{} round {} {} ({}) {}", m.seq, m.round, m.author, to_string(m.role), to_string(m.kind));
  if (!m.target.empty()) out += " " + m.target;
  out += "]\n";
  for (std::size_t i = 0; i < m.relations.size(); ++i) {
    out += fmt::format("{}: {}\n", i < m.relation_ids.size() ? m.relation_ids[i] : "R?", relations::to_record(m.relations[i]));
  }
  if (!m.evidence.empty()) out += "evidence: \"" + m.evidence + "\"\n";
  if (!m.text.empty()) out += m.text + "\n";
  return out;
}

std::string MessagePool::render(std::size_t upto) const {
  std::string out;
  for (const auto& m : messages_) {
    if (upto && m.seq >= upto) break;
    out += render_message(m) + "\n";
  }
  return out.empty() ? "(no messages yet)\n" : out;
}

std::vector<Message> to_messages(const AgentOutput& out, std::size_t round, const std::string& author, Role role,
                                 std::vector<std::string>* dropped) {
  std::vector<Message> msgs;
  Message main;
  main.round = round;
  main.author = author;
  main.role = role;
  main.text = out.rationale;
  if (!out.relations.empty()) {
    main.kind = MessageKind::proposal;
    main.relations = out.relations;
    for (auto& r : main.relations) r.provenance = relations::Provenance::agent;
  } else {
    main.kind = MessageKind::rationale;
  }
  msgs.push_back(std::move(main));
  for (const auto& s : out.stances) {
    if (role == Role::expert) {
      if (dropped) dropped->push_back("expert stance on " + s.relation_id + " dropped");
      continue;
    }
    Message m;
    m.round = round;
    m.author = author;
    m.role = role;
    m.kind = s.agree ? MessageKind::agreement : MessageKind::refutation;
    m.target = s.relation_id;
    m.evidence = s.evidence;
    msgs.push_back(std::move(m));
  }
  return msgs;
}

}  // namespace sizekit::agents
