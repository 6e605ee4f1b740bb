#include <doctest.h>

#include <random>

#include "sizekit/errors.hpp"
#include "sizekit/relations.hpp"
#include "support.hpp"

using namespace sizekit;
using namespace sizekit::relations;

namespace {

RelationSet set_of(const std::string& text) { return normalize(parse_relations(text)); }

}  // namespace

TEST_CASE("record grammar") {
  auto e = parse_record("equal W M1 M2 M3 | rationale=\"pair\" evidence=\"Fig. 2\"");
  CHECK(e.kind == RelationKind::equal);
  CHECK(e.param == "W");
  CHECK(e.devices == std::vector<std::string>{"M1", "M2", "M3"});
  CHECK(e.rationale == "pair");
  CHECK(e.evidence == "Fig. 2");

  auto r = parse_record("ratio W M7=2*M5 M8=3/2*M5");
  CHECK(r.kind == RelationKind::ratio);
  CHECK(r.devices == std::vector<std::string>{"M5", "M7", "M8"});
  CHECK(r.coefficients == std::vector<double>{1.0, 2.0, 1.5});

  auto b = parse_record("bound L M1 [0.5u,2u]");
  CHECK(b.range.lo == doctest::Approx(0.5e-6));
  CHECK(b.range.hi == doctest::Approx(2e-6));

  auto f = parse_record("fix M M1 M2 = 1");
  CHECK(f.kind == RelationKind::fix);
  CHECK(f.value == 1.0);

  auto g = parse_record("geq W M6>=2*M4");
  CHECK(g.kind == RelationKind::geq);
  CHECK(g.devices == std::vector<std::string>{"M6", "M4"});
  CHECK(g.coefficients[1] == 2.0);

  for (const char* bad : {"equal W M1", "ratio W M7", "bound L M1 [2u,1u]", "fix M M1", "frob W M1 M2",
                          "ratio W M7=-2*M5", "equal W M1 M1"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_record(bad), ParseError);
  }
}

TEST_CASE("records round-trip through canonical text") {
  for (const char* rec : {"equal W M1 M2", "ratio W M7=2*M5 M8=2*M5", "bound L M1 M2 [500n,2u]", "fix M M1 = 1",
                          "geq W M6>=2*M4", "equal L M3 M4 | provenance=agent rationale=\"x y\""}) {
    CAPTURE(rec);
    const auto a = parse_record(rec);
    CHECK(parse_record(to_record(a)) == a);
  }
}

TEST_CASE("validation rejects unknown devices and non-sizable parameters") {
  const auto n = testing::opamp();
  const auto v = validate(parse_relations("equal W M1 M2\nequal W M1 M9\nequal R M1 M2\nequal DC VDD IB\n"), n);
  CHECK(v.accepted.size() == 1);
  CHECK(v.rejected.size() == 3);
}

TEST_CASE("chained equalities form one class") {
  const auto s = set_of("equal W M1 M2\nequal W M2 M3\n");
  REQUIRE(s.classes().size() == 1);
  CHECK(s.classes()[0].members.size() == 3);
  CHECK(valid_relation_count(s) == 1);
}

TEST_CASE("ratios compose along the union-find path") {
  const auto s = set_of("ratio W M2=2*M1\nratio W M3=3*M2\n");
  REQUIRE(s.classes().size() == 1);
  const auto& c = s.classes()[0];
  CHECK(c.representative == Handle{"M1", "W"});
  CHECK(c.multiplier({"M3", "W"}) == doctest::Approx(6.0));
  // Consistent redundant ratio is accepted.
  CHECK_NOTHROW(set_of("ratio W M2=2*M1\nratio W M3=3*M2\nratio W M3=6*M1\n"));
}

TEST_CASE("conflicting ratios are reported with the relations involved") {
  try {
    set_of("equal W M1 M2\nratio W M2=2*M3\nratio W M1=3*M3\n");
    FAIL("expected a conflict");
  } catch (const ConflictError& e) {
    CHECK(e.relation() == 2);
    CHECK_FALSE(e.against().empty());
  }
  CHECK_THROWS_AS(set_of("fix M M1 = 1\nfix M M1 = 2\n"), ConflictError);
  CHECK_THROWS_AS(set_of("equal M M1 M2\nfix M M1 = 1\nfix M M2 = 2\n"), ConflictError);
}

TEST_CASE("bounds intersect through multipliers and empty ranges are infeasible") {
  const auto s = set_of("ratio W M2=2*M1\nbound W M2 [2u,10u]\nbound W M1 [0.5u,3u]\n");
  CHECK(s.bounds().size() == 2);
  CHECK_THROWS_AS(set_of("ratio W M2=2*M1\nbound W M2 [10u,20u]\nbound W M1 [1u,2u]\n"), InfeasibleBound);
  CHECK_THROWS_AS(set_of("fix L M1 = 1u\nbound L M1 [2u,3u]\n"), InfeasibleBound);
}

TEST_CASE("normalization does not depend on record order") {
  auto rels = parse_relations(text::read_file(testing::asset("configs/opamp.relations")));
  const auto ref = normalize(rels);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(rels.begin(), rels.end(), rng);
    CHECK(normalize(rels) == ref);
  }
  CHECK(normalize(ref.to_relations()) == ref);
}

TEST_CASE("counting: classes plus distinct bound, fix and inequality records") {
  CHECK(valid_relation_count(set_of("")) == 0);
  CHECK(valid_relation_count(set_of("equal W M1 M2\nequal W M2 M1\n")) == 1);
  CHECK(valid_relation_count(set_of("equal W M1 M2\nequal L M1 M2\n")) == 2);
  CHECK(valid_relation_count(set_of("bound L M1 [1u,2u]\nbound L M1 [1u,2u]\n")) == 1);
  CHECK(valid_relation_count(set_of("fix M M1 = 1\ngeq W M6>=2*M4\n")) == 2);
  CHECK(valid_relation_count(set_of(text::read_file(testing::asset("configs/opamp.relations")))) == 7);
}

TEST_CASE("stability report is max minus min per row") {
  CHECK(stability_report({{11, 11, 12}, {5, 3, 3}}) == std::vector<int>{1, 2});
  CHECK(stability_report({{4}}) == std::vector<int>{0});
  CHECK_THROWS_AS(stability_report({}), std::invalid_argument);
  CHECK_THROWS_AS(stability_report({{}}), std::invalid_argument);
}

TEST_CASE("residuals measure relative violation") {
  std::map<Handle, double> v{{{"M1", "W"}, 2e-6}, {{"M2", "W"}, 4e-6}, {{"M3", "W"}, 2e-6}};
  CHECK(residual(parse_record("ratio W M2=2*M1"), v) == 0.0);
  CHECK(residual(parse_record("equal W M1 M3"), v) == 0.0);
  CHECK(residual(parse_record("equal W M1 M2"), v) > 0.1);
  CHECK(residual(parse_record("geq W M2>=1*M1"), v) == 0.0);
  CHECK(residual(parse_record("geq W M1>=1*M2"), v) > 0.1);
  CHECK_THROWS_AS(residual(parse_record("equal W M1 M9"), v), UnknownHandle);
}
