#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <httplib.h>
#include <json.hpp>
#include <thread>

#include "agents_support.hpp"
#include "sizekit/errors.hpp"
#include "sizekit/extraction.hpp"

using namespace sizekit;
using namespace sizekit::agents;

namespace {

std::string transcript_text(const ExtractionResult& r) {
  std::string out;
  for (const auto& l : r.transcript) out += l + "\n";
  return out;
}

const Tally& tally(const Summary& s, const std::string& id) {
  for (const auto& t : s.tallies) {
    if (t.id == id) return t;
  }
  throw std::out_of_range(id);
}

/// Local chat-completions server running on a background thread.
class FakeServer {
 public:
  explicit FakeServer(httplib::Server::Handler handler) {
    server_.Post("/v1/chat/completions", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

HttpBackendConfig http_config(const std::string& url) {
  HttpBackendConfig c;
  c.base_url = url;
  c.model = "test-model";
  c.api_key_env = "SIZEKIT_TEST_KEY";
  c.initial_backoff_seconds = 0.01;
  c.timeout_seconds = 5;
  return c;
}

}  // namespace

TEST_CASE("agent replies: fenced relations and stances") {
  const auto out = parse_agent_output(
      "Mirror matching.\n```relations\nequal W M1 M2 | rationale=\"pair\"\nequal W M1\n```\n"
      "```stance\nagree R1 | evidence=\"Fig. 3\"\nrefute R2\nmaybe R3\n```\ntrailing text\n");
  REQUIRE(out.relations.size() == 1);
  CHECK(out.relations[0].rationale == "pair");
  REQUIRE(out.stances.size() == 2);
  CHECK(out.stances[0] == Stance{"R1", true, "Fig. 3"});
  CHECK(out.stances[1] == Stance{"R2", false, ""});
  CHECK(out.skipped.size() == 2);
  CHECK(out.rationale.find("Mirror matching.") != std::string::npos);
  CHECK(out.rationale.find("trailing text") != std::string::npos);
  CHECK(parse_agent_output("no blocks at all").relations.empty());
  Stance s;
  CHECK_FALSE(parse_stance("agree", s));
  CHECK_FALSE(parse_stance("agree X1", s));
}

TEST_CASE("message pool assigns sequence numbers and relation ids in append order") {
  MessagePool pool;
  auto first = to_messages(parse_agent_output("```relations\nequal W M1 M2\nequal L M1 M2\n```"), 1, "ExpertAgent",
                           Role::expert);
  REQUIRE(first.size() == 1);
  CHECK(pool.append(first[0]).relation_ids == std::vector<std::string>{"R1", "R2"});
  auto second = to_messages(parse_agent_output("```stance\nagree R2\n```\n```relations\nequal W M3 M4\n```"), 1,
                            "EmployeeA", Role::employee);
  REQUIRE(second.size() == 2);
  for (auto& m : second) pool.append(m);
  CHECK(pool.messages()[1].relation_ids == std::vector<std::string>{"R3"});
  CHECK(pool.messages()[2].target == "R2");
  CHECK(pool.messages()[2].kind == MessageKind::agreement);
  for (std::size_t i = 0; i < pool.size(); ++i) CHECK(pool.messages()[i].seq == i + 1);
  CHECK(pool.proposal_of("R3")->author == "EmployeeA");
  CHECK(pool.relation("R4") == nullptr);

  Message bad;
  bad.kind = MessageKind::proposal;
  CHECK_THROWS(pool.append(bad));
  bad.kind = MessageKind::agreement;
  CHECK_THROWS(pool.append(bad));
}

TEST_CASE("expert stances are dropped") {
  std::vector<std::string> dropped;
  const auto msgs = to_messages(parse_agent_output("```stance\nagree R1\n```"), 1, "ExpertAgent", Role::expert, &dropped);
  CHECK(msgs.size() == 1);
  CHECK(msgs[0].kind == MessageKind::rationale);
  CHECK(dropped.size() == 1);
}

TEST_CASE("job validation") {
  auto backend = std::make_shared<ScriptedBackend>();
  auto job = testing::scripted_job(backend);
  CHECK_NOTHROW(job.validate());
  CHECK(job.team.size() == 4);
  CHECK(job.team[0].role == Role::expert);
  auto two_experts = job;
  two_experts.team[1].role = Role::expert;
  CHECK_THROWS_AS(two_experts.validate(), ConfigError);
  auto no_rounds = job;
  no_rounds.rounds = 0;
  CHECK_THROWS_AS(no_rounds.validate(), ConfigError);
  auto dup = job;
  dup.team[2].name = dup.team[1].name;
  CHECK_THROWS_AS(dup.validate(), ConfigError);
}

TEST_CASE("majority fixture: refuted proposal is dropped") {
  const auto r = testing::run_fixture("majority.txt");
  CHECK(testing::joined_records(r.summary.accepted) ==
        "equal W M1 M2\nequal L M1 M2\nequal L M3 M4\nequal L M5 M7 M8\n");
  const auto& r3 = tally(r.summary, "R3");
  CHECK(r3.agreements == 0);
  CHECK(r3.refutations == 3);
  CHECK_FALSE(r3.kept);
  CHECK(r.valid_relation_count == 4);
  CHECK(audit_transcript(transcript_text(r)).ok);
}

TEST_CASE("conflict fixture: conflicts, unknown devices and duplicates") {
  const auto r = testing::run_fixture("conflict.txt");
  CHECK(tally(r.summary, "R1").agreements == 3);
  const auto& r2 = tally(r.summary, "R2");
  CHECK(r2.agreements - r2.refutations == 1);
  CHECK(r2.kept);
  const auto& r4 = tally(r.summary, "R4");
  // A's round-2 agreement precedes B's proposal of R4 and is skipped.
  CHECK(r4.agreements == 0);
  CHECK(r4.refutations == 1);
  CHECK_FALSE(r4.kept);
  CHECK(testing::joined_records(r.summary.accepted) == "equal W M3 M4\nequal L M1 M2\n");
  bool conflict = false, unknown = false;
  for (const auto& rej : r.summary.rejected) {
    if (rej.relation.kind == relations::RelationKind::ratio) conflict = rej.reason.find("conflict") != std::string::npos;
    if (std::count(rej.relation.devices.begin(), rej.relation.devices.end(), "M9")) unknown = true;
  }
  CHECK(conflict);
  CHECK(unknown);
  bool skipped_r99 = false, skipped_r4 = false;
  for (const auto& s : r.skipped) {
    skipped_r99 |= s.find("R99") != std::string::npos;
    skipped_r4 |= s.find("R4") != std::string::npos;
  }
  CHECK(skipped_r99);
  CHECK(skipped_r4);
  CHECK(r.valid_relation_count == 2);
}

TEST_CASE("unopposed fixture: expert proposals stand without stances") {
  const auto r = testing::run_fixture("unopposed.txt");
  // The agreed bound (net support 1) outranks the unopposed expert ratio (net 0).
  CHECK(testing::joined_records(r.summary.accepted) ==
        testing::joined_records(relations::parse_relations("bound L M1 [0.5u,2u]\nratio W M7=2*M5 M8=2*M5\n")));
  CHECK_FALSE(tally(r.summary, "R2").kept);
  CHECK(r.skipped.size() >= 2);
  CHECK(r.valid_relation_count == 2);
}

TEST_CASE("each turn sees the whole pool and the expert goes first") {
  auto backend = std::make_shared<ScriptedBackend>(
      ScriptedBackend::parse(text::read_file(testing::fixture("agents/majority.txt"))));
  const auto r = run_extraction(testing::scripted_job(backend));
  const auto calls = backend->calls();
  REQUIRE(calls.size() == 20);
  for (std::size_t i = 0; i < calls.size(); ++i) {
    CHECK(calls[i].params.round == i / 4 + 1);
    CHECK((i % 4 == 0) == (calls[i].params.agent == "ExpertAgent"));
    if (i % 4 != 0) CHECK(calls[i].params.temperature == 0.5);
  }
  // The last turn's context holds every message appended before it.
  std::string ctx;
  for (const auto& m : calls.back().context) ctx += m.content;
  for (const auto& m : r.pool.messages()) {
    if (m.round < 5) CHECK(ctx.find(render_message(m)) != std::string::npos);
  }
}

TEST_CASE("replaying a transcript reproduces the accepted set") {
  const auto first = testing::run_fixture("conflict.txt");
  const auto text = transcript_text(first);
  CHECK(pool_from_transcript(text).size() == first.pool.size());
  for (int i = 0; i < 3; ++i) {
    auto replay = std::make_shared<ScriptedBackend>(backend_from_transcript(text));
    const auto again = run_extraction(testing::scripted_job(replay));
    CHECK(again.summary.set == first.summary.set);
    CHECK(again.transcript == first.transcript);
  }
}

TEST_CASE("persisted transcript matches the in-memory one") {
  const auto dir = testing::scratch_dir("transcript");
  auto backend = std::make_shared<ScriptedBackend>(
      ScriptedBackend::parse(text::read_file(testing::fixture("agents/majority.txt"))));
  const auto path = (dir / "t.jsonl").string();
  const auto r = run_extraction(testing::scripted_job(backend), path);
  CHECK(text::read_file(path) == transcript_text(r));
}

TEST_CASE("a missing scripted reply fails and leaves the partial transcript") {
  const auto dir = testing::scratch_dir("partial");
  auto backend = std::make_shared<ScriptedBackend>();
  backend->add("ExpertAgent", 1, "```relations\nequal W M1 M2\n```");
  const auto path = (dir / "t.jsonl").string();
  CHECK_THROWS_AS(run_extraction(testing::scripted_job(backend), path), BackendError);
  CHECK(text::read_file(path).find("\"turn\"") != std::string::npos);
}

TEST_CASE("audit flags protocol violations") {
  const auto good = transcript_text(testing::run_fixture("majority.txt"));
  const auto rep = audit_transcript(good);
  CHECK(rep.ok);
  CHECK(rep.rounds == 5);

  std::string tampered;
  for (const auto& line : text::lines(good)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    if (j["type"] == "message" && j["seq"] == 2) {
      j["role"] = "expert";
      j["kind"] = "agreement";
      j["target"] = "R1";
    }
    if (j["type"] == "turn" && j["round"] == 3 && j["agent"] == "EmployeeB") j["visible"] = nlohmann::json::array();
    tampered += j.dump() + "\n";
  }
  const auto bad = audit_transcript(tampered);
  CHECK_FALSE(bad.ok);
  CHECK(bad.problems.size() >= 2);
}

TEST_CASE("http backend retries and then fails") {
  std::atomic<int> hits{0};
  FakeServer server([&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 500;
  });
  HttpBackend backend(http_config(server.url()));
  ChatParams p;
  CHECK_THROWS_AS(backend.chat({{"user", "hi"}}, p), BackendError);
  CHECK(hits == 3);
}

TEST_CASE("http backend request shape") {
  std::string body, auth;
  FakeServer server([&](const httplib::Request& req, httplib::Response& res) {
    body = req.body;
    auth = req.get_header_value("Authorization");
    res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"ok"}}]})", "application/json");
  });
  ::setenv("SIZEKIT_TEST_KEY", "secret", 1);
  auto cfg = http_config(server.url());
  ChatParams p;
  p.temperature = 0.5;
  CHECK(HttpBackend(cfg).chat({{"system", "s"}, {"user", "u"}}, p) == "ok");
  auto j = nlohmann::json::parse(body);
  CHECK(j["model"] == "test-model");
  CHECK(j["messages"].size() == 2);
  CHECK(j["temperature"] == 0.5);
  CHECK(auth == "Bearer secret");

  cfg.supports_temperature = false;
  CHECK(HttpBackend(cfg).chat({{"user", "u"}}, p) == "ok");
  CHECK_FALSE(nlohmann::json::parse(body).contains("temperature"));
  ::unsetenv("SIZEKIT_TEST_KEY");
  CHECK_THROWS_AS(HttpBackend(HttpBackendConfig{}), ConfigError);
}
