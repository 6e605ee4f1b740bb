#include "sizekit/extraction.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include <fmt/format.h>
#include <json.hpp>

#include "sizekit/default_prompts.hpp"
#include "sizekit/errors.hpp"
#include "sizekit/text.hpp"

namespace sizekit::agents {

using nlohmann::json;

Prompts Prompts::defaults() {
  return Prompts{default_prompts::system, default_prompts::expert, default_prompts::employee};
}

Prompts Prompts::load(const std::string& dir) {
  return Prompts{text::read_file(dir + "/system.txt"), text::read_file(dir + "/expert.txt"),
                 text::read_file(dir + "/employee.txt")};
}

std::vector<AgentProfile> default_team(const std::shared_ptr<ChatBackend>& backend) {
  return {{"ExpertAgent", Role::expert, backend, std::nullopt},
          {"EmployeeA", Role::employee, backend, 0.5},
          {"EmployeeB", Role::employee, backend, 0.5},
          {"EmployeeC", Role::employee, backend, 0.5}};
}

void ExtractionJob::validate() const {
  if (rounds < 1) throw ConfigError("extraction rounds must be >= 1");
  std::size_t experts = 0, employees = 0;
  std::set<std::string> names;
  for (const auto& a : team) {
    if (a.name.empty()) throw ConfigError("agent without a name");
    if (!names.insert(text::to_lower(a.name)).second) throw ConfigError("duplicate agent name " + a.name);
    if (!a.backend) throw ConfigError("agent " + a.name + " has no backend");
    (a.role == Role::expert ? experts : employees) += 1;
  }
  if (experts != 1) throw ConfigError(fmt::format("team needs exactly one expert, got {}", experts));
  if (employees < 1) throw ConfigError("team needs at least one employee");
}

namespace {

constexpr const char* kGrammar =
    "equal <P> <dev> <dev> [<dev>...]\n"
    "ratio <P> <dev>=<k>*<base> [<dev>=<k>*<base>...]\n"
    "bound <P> <dev> [<dev>...] [<lo>,<hi>]\n"
    "fix <P> <dev> [<dev>...] = <value>\n"
    "geq <P> <dev>>=<k>*<dev>\n"
    "optional suffix: | rationale=\"...\" evidence=\"<quote from the paper>\"\n"
    "P is W, L, M (transistors), R, C or DC (current sources).";

std::string substitute(std::string s, const std::map<std::string, std::string>& vars) {
  for (const auto& [k, v] : vars) {
    const std::string key = "{{" + k + "}}";
    for (std::size_t pos = 0; (pos = s.find(key, pos)) != std::string::npos; pos += v.size()) s.replace(pos, key.size(), v);
  }
  return s;
}

json relation_json(const std::string& id, const relations::SizingRelation& r) {
  return json{{"id", id}, {"record", relations::to_record(r)}};
}

json message_json(const Message& m) {
  json rels = json::array();
  for (std::size_t i = 0; i < m.relations.size(); ++i) rels.push_back(relation_json(m.relation_ids[i], m.relations[i]));
  return json{{"type", "message"},      {"seq", m.seq},       {"round", m.round},   {"author", m.author},
              {"role", to_string(m.role)}, {"kind", to_string(m.kind)}, {"relations", rels}, {"target", m.target},
              {"text", m.text},          {"evidence", m.evidence}};
}

Message message_from_json(const json& j) {
  Message m;
  m.seq = j.at("seq").get<std::size_t>();
  m.round = j.at("round").get<std::size_t>();
  m.author = j.at("author").get<std::string>();
  m.role = role_from_string(j.at("role").get<std::string>());
  m.kind = message_kind_from_string(j.at("kind").get<std::string>());
  for (const auto& r : j.at("relations")) m.relations.push_back(relations::parse_record(r.at("record").get<std::string>()));
  m.target = j.value("target", "");
  m.text = j.value("text", "");
  m.evidence = j.value("evidence", "");
  return m;
}

/// Appends JSON lines to memory and, optionally, to a file flushed per record.
class TranscriptSink {
 public:
  TranscriptSink(std::vector<std::string>& lines, const std::string& path) : lines_(lines) {
    if (!path.empty()) {
      file_.open(path, std::ios::app);
      if (!file_) throw ConfigError("cannot open transcript " + path);
    }
  }
  void write(const json& j) {
    lines_.push_back(j.dump());
    if (file_.is_open()) {
      file_ << lines_.back() << '\n';
      file_.flush();
    }
  }

 private:
  std::vector<std::string>& lines_;
  std::ofstream file_;
};

std::string algebra_key(relations::SizingRelation r) {
  r.provenance = relations::Provenance::agent;
  r.rationale.clear();
  r.evidence.clear();
  using relations::RelationKind;
  if (r.kind == RelationKind::equal || r.kind == RelationKind::fix || r.kind == RelationKind::bound) {
    std::sort(r.devices.begin(), r.devices.end());
  } else if (r.kind == RelationKind::ratio && r.devices.size() == r.coefficients.size() && r.devices.size() > 1) {
    // Base first, then the scaled devices in name order.
    std::vector<std::pair<std::string, double>> rest;
    for (std::size_t i = 1; i < r.devices.size(); ++i) rest.emplace_back(r.devices[i], r.coefficients[i]);
    std::sort(rest.begin(), rest.end());
    for (std::size_t i = 0; i < rest.size(); ++i) std::tie(r.devices[i + 1], r.coefficients[i + 1]) = rest[i];
  }
  return relations::to_record(r);
}

}  // namespace

std::vector<ChatMessage> build_context(const ExtractionJob& job, const AgentProfile& agent, std::size_t round,
                                       const MessagePool& pool) {
  std::string motifs = topology::serialize_annotations(job.motifs);
  if (text::trim(motifs).empty()) motifs = "(none detected)";
  const std::map<std::string, std::string> vars = {
      {"agent", agent.name},
      {"round", std::to_string(round)},
      {"rounds", std::to_string(job.rounds)},
      {"paper", job.paper_text},
      {"netlist", emit_netlist(job.netlist)},
      {"motifs", motifs},
      {"pool", pool.render()},
      {"grammar", kGrammar},
  };
  const auto& role_prompt = agent.role == Role::expert ? job.prompts.expert : job.prompts.employee;
  return {{"system", substitute(job.prompts.system, vars)}, {"user", substitute(role_prompt, vars)}};
}

Summary summarize(const MessagePool& pool, const Netlist& netlist, int agreement_margin) {
  Summary s;
  std::map<std::string, std::size_t> index;
  for (const auto& m : pool.messages()) {
    for (std::size_t i = 0; i < m.relation_ids.size(); ++i) {
      Tally t;
      t.id = m.relation_ids[i];
      t.relation = m.relations[i];
      t.proposer = m.author;
      t.proposer_role = m.role;
      index[t.id] = s.tallies.size();
      s.tallies.push_back(std::move(t));
    }
  }
  // Latest stance of each employee per relation.
  std::map<std::pair<std::string, std::string>, bool> latest;
  for (const auto& m : pool.messages()) {
    if (m.kind != MessageKind::agreement && m.kind != MessageKind::refutation) continue;
    if (m.role == Role::expert) continue;
    auto it = index.find(m.target);
    if (it == index.end() || text::iequals(s.tallies[it->second].proposer, m.author)) continue;
    latest[{m.target, text::to_lower(m.author)}] = m.kind == MessageKind::agreement;
  }
  for (const auto& [key, agree] : latest) (agree ? s.tallies[index[key.first]].agreements : s.tallies[index[key.first]].refutations)++;

  struct Candidate {
    int support;
    std::size_t order;
    relations::SizingRelation relation;
  };
  std::vector<Candidate> candidates;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < s.tallies.size(); ++i) {
    auto& t = s.tallies[i];
    const bool unopposed_expert = t.proposer_role == Role::expert && t.agreements == 0 && t.refutations == 0;
    t.kept = unopposed_expert || t.agreements - t.refutations >= agreement_margin;
    if (!t.kept) continue;
    // Re-parse the canonical record so kept relations go through the grammar once more.
    auto rel = relations::parse_record(relations::to_record(t.relation));
    rel.provenance = relations::Provenance::agent;
    if (!seen.insert(algebra_key(rel)).second) continue;
    candidates.push_back({t.agreements - t.refutations, i, std::move(rel)});
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return a.support != b.support ? a.support > b.support : a.order < b.order;
  });

  std::vector<relations::SizingRelation> ordered;
  for (auto& c : candidates) ordered.push_back(std::move(c.relation));
  auto v = relations::validate(ordered, netlist);
  s.rejected = std::move(v.rejected);
  for (auto& r : v.accepted) {
    auto trial = s.accepted;
    trial.push_back(r);
    try {
      relations::normalize(trial);
      s.accepted.push_back(std::move(r));
    } catch (const ConflictError&) {
      s.rejected.push_back({std::move(r), "conflict"});
    } catch (const InfeasibleBound&) {
      s.rejected.push_back({std::move(r), "conflict"});
    }
  }
  s.set = relations::normalize(s.accepted);
  return s;
}

ExtractionResult run_extraction(const ExtractionJob& job, const std::string& transcript_path) {
  job.validate();
  ExtractionResult res;
  TranscriptSink sink(res.transcript, transcript_path);

  std::vector<const AgentProfile*> employees;
  const AgentProfile* expert = nullptr;
  for (const auto& a : job.team) {
    if (a.role == Role::expert) expert = &a;
    else employees.push_back(&a);
  }
  std::sort(employees.begin(), employees.end(), [](auto* a, auto* b) { return a->name < b->name; });

  json team = json::array();
  for (const auto& a : job.team) {
    team.push_back({{"name", a.name}, {"role", to_string(a.role)}, {"backend", a.backend->name()},
                    {"temperature", a.temperature ? json(*a.temperature) : json(nullptr)}});
  }
  sink.write({{"type", "job"}, {"rounds", job.rounds}, {"attempt", job.attempt}, {"margin", job.agreement_margin},
              {"team", team}});

  auto turn = [&](const AgentProfile& agent, std::size_t round) {
    const auto context = build_context(job, agent, round, res.pool);
    json visible = json::array();
    for (const auto& m : res.pool.messages()) visible.push_back(m.seq);
    ChatParams params;
    params.agent = agent.name;
    params.round = round;
    params.attempt = job.attempt;
    params.temperature = agent.temperature;
    params.seed = job.seed;
    const std::string reply = agent.backend->chat(context, params);
    sink.write({{"type", "turn"}, {"round", round}, {"agent", agent.name}, {"role", to_string(agent.role)},
                {"attempt", job.attempt}, {"visible", visible}, {"response", reply}});

    const auto out = parse_agent_output(reply);
    std::vector<std::string> skipped = out.skipped;
    auto messages = to_messages(out, round, agent.name, agent.role, &skipped);
    for (auto& m : messages) {
      if (!m.target.empty() && !res.pool.relation(m.target)) {
        skipped.push_back("stance on unknown relation " + m.target);
        continue;
      }
      sink.write(message_json(res.pool.append(std::move(m))));
    }
    for (const auto& s : skipped) {
      sink.write({{"type", "skip"}, {"round", round}, {"agent", agent.name}, {"reason", s}});
      res.skipped.push_back(fmt::format("round {} {}: {}", round, agent.name, s));
    }
  };

  for (std::size_t round = 1; round <= job.rounds; ++round) {
    turn(*expert, round);
    for (const auto* e : employees) turn(*e, round);
  }

  res.summary = summarize(res.pool, job.netlist, job.agreement_margin);
  res.valid_relation_count = relations::valid_relation_count(res.summary.set);
  json kept = json::array(), rejected = json::array();
  for (const auto& r : res.summary.accepted) kept.push_back(relations::to_record(r));
  for (const auto& r : res.summary.rejected) rejected.push_back({{"record", relations::to_record(r.relation)}, {"reason", r.reason}});
  sink.write({{"type", "summary"}, {"kept", kept}, {"rejected", rejected}, {"valid_relation_count", res.valid_relation_count}});
  return res;
}

namespace {

std::vector<json> transcript_records(std::string_view transcript) {
  std::vector<json> out;
  const auto lines = text::lines(transcript);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    try {
      out.push_back(json::parse(lines[i]));
    } catch (const json::exception& e) {
      throw ParseError(i + 1, std::string("bad transcript record: ") + e.what());
    }
  }
  return out;
}

}  // namespace

MessagePool pool_from_transcript(std::string_view transcript) {
  MessagePool pool;
  for (const auto& j : transcript_records(transcript)) {
    if (j.value("type", "") != "message") continue;
    const auto m = message_from_json(j);
    const auto& stored = pool.append(m);
    if (stored.seq != m.seq) throw ParseError(0, fmt::format("transcript message seq {} out of order", m.seq));
  }
  return pool;
}

ScriptedBackend backend_from_transcript(std::string_view transcript) {
  ScriptedBackend b;
  for (const auto& j : transcript_records(transcript)) {
    if (j.value("type", "") != "turn") continue;
    b.add(j.at("agent").get<std::string>(), j.at("round").get<std::size_t>(), j.at("response").get<std::string>(),
          j.value("attempt", std::size_t{0}));
  }
  return b;
}

AuditReport audit_transcript(std::string_view transcript) {
  AuditReport rep;
  auto problem = [&](std::string p) {
    rep.ok = false;
    rep.problems.push_back(std::move(p));
  };
  std::map<std::size_t, int> expert_turns;
  std::vector<std::pair<std::size_t, std::size_t>> seen;  // (seq, round)
  std::size_t last_seq = 0;
  std::size_t max_round = 0;
  std::size_t declared_rounds = 0;
  for (const auto& j : transcript_records(transcript)) {
    const auto type = j.value("type", "");
    if (type == "job") declared_rounds = j.value("rounds", std::size_t{0});
    if (type == "turn") {
      const auto round = j.at("round").get<std::size_t>();
      max_round = std::max(max_round, round);
      if (j.at("role").get<std::string>() == "expert") expert_turns[round]++;
      std::set<std::size_t> visible;
      for (const auto& v : j.at("visible")) visible.insert(v.get<std::size_t>());
      for (const auto& [seq, r] : seen) {
        if (r < round && !visible.count(seq)) {
          problem(fmt::format("turn of {} in round {} missed message #{}", j.at("agent").get<std::string>(), round, seq));
        }
      }
    } else if (type == "message") {
      const auto seq = j.at("seq").get<std::size_t>();
      if (seq <= last_seq) problem(fmt::format("message #{} does not increase the sequence", seq));
      last_seq = seq;
      const auto kind = j.at("kind").get<std::string>();
      if (j.at("role").get<std::string>() == "expert" && (kind == "agreement" || kind == "refutation")) {
        problem(fmt::format("expert message #{} is a {}", seq, kind));
      }
      if (kind == "proposal" && j.at("relations").empty()) problem(fmt::format("proposal #{} has no relations", seq));
      seen.emplace_back(seq, j.at("round").get<std::size_t>());
    }
  }
  const std::size_t rounds = std::max(max_round, declared_rounds);
  rep.rounds = rounds;
  for (std::size_t r = 1; r <= rounds; ++r) {
    if (expert_turns[r] != 1) problem(fmt::format("round {} has {} expert turns", r, expert_turns[r]));
  }
  return rep;
}

}  // namespace sizekit::agents
