#include "sizekit/agent_output.hpp"

#include <regex>

#include "sizekit/errors.hpp"
#include "sizekit/text.hpp"

namespace sizekit::agents {

bool parse_stance(std::string_view line, Stance& out) {
  static const std::regex re(
      R"re(^\s*(agree|agrees|support|refute|refutes|disagree)\s*:?\s+(R\d+)\s*(?:\|\s*(?:evidence\s*=\s*)?(?:"([^"]*)"|(.*?)))?\s*$)re",
      std::regex::icase);
  std::smatch m;
  const std::string s(line);
  if (!std::regex_match(s, m, re)) return false;
  const auto verb = text::to_lower(m[1].str());
  out.agree = verb == "agree" || verb == "agrees" || verb == "support";
  out.relation_id = text::to_upper(m[2].str());
  out.evidence = m[3].matched ? m[3].str() : std::string(text::trim(m[4].str()));
  return true;
}

AgentOutput parse_agent_output(std::string_view source) {
  AgentOutput out;
  std::string rationale;
  enum class Block { none, relations, stance, other } block = Block::none;
  for (const auto& raw : text::lines(source)) {
    const auto l = text::trim(raw);
    if (l.rfind("```", 0) == 0) {
      if (block != Block::none) {
        block = Block::none;
        continue;
      }
      const auto tag = text::to_lower(text::trim(l.substr(3)));
      if (tag == "relations" || tag == "relation") block = Block::relations;
      else if (tag == "stance" || tag == "stances") block = Block::stance;
      else block = Block::other;
      continue;
    }
    switch (block) {
      case Block::relations: {
        if (l.empty() || l.front() == '#') break;
        try {
          out.relations.push_back(relations::parse_record(l));
        } catch (const Error& e) {
          out.skipped.push_back("malformed record '" + std::string(l) + "': " + e.what());
        }
        break;
      }
      case Block::stance: {
        if (l.empty() || l.front() == '#') break;
        Stance s;
        if (parse_stance(l, s)) out.stances.push_back(std::move(s));
        else out.skipped.push_back("malformed stance '" + std::string(l) + "'");
        break;
      }
      case Block::none:
      case Block::other:
        rationale += std::string(raw) + "\n";
        break;
    }
  }
  out.rationale = std::string(text::trim(rationale));
  return out;
}

}  // namespace sizekit::agents
