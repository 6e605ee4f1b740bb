#include <doctest.h>

#include <algorithm>
#include <random>

#include "sizekit/errors.hpp"
#include "sizekit/netlist.hpp"
#include "sizekit/units.hpp"
#include "support.hpp"

using namespace sizekit;

TEST_CASE("values accept SPICE suffixes") {
  CHECK(parse_value("1meg") == doctest::Approx(1e6));
  CHECK(parse_value("1MEG") == doctest::Approx(1e6));
  CHECK(parse_value("1m") == doctest::Approx(1e-3));
  CHECK(parse_value("2.5u") == doctest::Approx(2.5e-6));
  CHECK(parse_value("100f") == doctest::Approx(1e-13));
  CHECK(parse_value("3p") == doctest::Approx(3e-12));
  CHECK(parse_value("4.7k") == doctest::Approx(4700));
  CHECK(parse_value("10pF") == doctest::Approx(1e-11));
  CHECK(parse_value("1e-3") == 1e-3);
  CHECK_FALSE(try_parse_value("u1").has_value());
  CHECK_FALSE(try_parse_value("1.2.3").has_value());
  CHECK_FALSE(try_parse_value("").has_value());
}

TEST_CASE("formatted values parse back to the same double") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> e(-15, 9);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::pow(10.0, e(rng)) * (1 + (rng() % 1000) / 997.0);
    CHECK(parse_value(format_value(v)) == v);
  }
}

TEST_CASE("op-amp template parses into the expected device graph") {
  const auto n = testing::opamp();
  CHECK(n.title() == "two-stage miller op-amp");
  CHECK(n.ground() == "0");
  const auto* m1 = n.find("M1");
  REQUIRE(m1);
  CHECK(m1->kind == DeviceKind::nmos);
  CHECK(m1->drain() == "n1");
  CHECK(m1->gate() == "inp");
  CHECK(m1->source() == "tail");
  CHECK(m1->params.at("W") == doctest::Approx(2e-6));
  CHECK(n.find("M3")->kind == DeviceKind::pmos);
  CHECK(n.find("CC")->params.at("C") == doctest::Approx(2e-12));
  CHECK(n.find("IB")->kind == DeviceKind::current_source);
  CHECK(n.nets().count("out") == 1);
  // 8 MOS x (W, L, M) + IB + CC
  CHECK(sizable_parameters(n).size() == 26);
}

TEST_CASE("sizable parameters are sorted by device then parameter") {
  const auto h = sizable_parameters(testing::opamp());
  CHECK(std::is_sorted(h.begin(), h.end()));
  CHECK(std::find(h.begin(), h.end(), Handle{"VDD", "DC"}) == h.end());
  CHECK(std::find(h.begin(), h.end(), Handle{"IB", "DC"}) != h.end());
  CHECK(is_sizable(DeviceKind::nmos, "W"));
  CHECK_FALSE(is_sizable(DeviceKind::voltage_source, "DC"));
  CHECK(is_integer_param("M"));
}

TEST_CASE("continuation lines, comments and subcircuits") {
  const auto n = testing::load_netlist(testing::fixture("netlists/cascode_mirror.sp"));
  CHECK(n.find("MA")->params.at("L") == doctest::Approx(0.5e-6));
  const auto s = testing::load_netlist(testing::fixture("netlists/subckt_amp.sp"));
  CHECK(s.find("X1")->kind == DeviceKind::subcircuit);
  CHECK(s.find("X1")->model == "inv");
  CHECK(s.find("MP") == nullptr);
  CHECK(std::any_of(s.cards().begin(), s.cards().end(), [](const std::string& c) { return c.find(".subckt") != std::string::npos; }));
}

TEST_CASE("parse and emit round-trip on the corpus") {
  const auto corpus = testing::netlist_corpus();
  CHECK(corpus.size() >= 10);
  for (const auto& path : corpus) {
    CAPTURE(path);
    const auto a = testing::load_netlist(path);
    const auto text = emit_netlist(a);
    const auto b = parse_netlist(text);
    CHECK(a == b);
    CHECK(emit_netlist(b) == text);
    CHECK(dump_netlist(a) == dump_netlist(b));
  }
}

TEST_CASE("device order does not affect equality") {
  auto n = testing::opamp();
  auto devices = n.devices();
  std::reverse(devices.begin(), devices.end());
  const auto r = Netlist::make(n.title(), devices, n.cards());
  CHECK(r == n);
  CHECK(emit_netlist(r) == emit_netlist(n));
}

TEST_CASE("malformed netlists report the offending line") {
  auto line_of = [](const std::string& src) -> std::size_t {
    try {
      parse_netlist(src);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("* t\nM1 d g s nch W=1u L=1u\n") == 2);
  CHECK(line_of("* t\nR1 a b 1k\nR1 b c 1k\n") == 3);
  CHECK(line_of("* t\nR1 a b -1k\n") == 2);
  CHECK(line_of("* t\nR1 a\n") == 2);
  CHECK(line_of("* t\n+ W=1u\n") == 2);
  CHECK(line_of("* t\n.subckt foo a b\nR1 a b 1k\n") == 2);
  CHECK(line_of("* t\nQ1 c b e npn\n") == 2);
  CHECK(line_of("* t\nM1 d g s b nch W=1u W=2u\n") == 2);
  CHECK(line_of("* t\nR1 a b 1x2\n") == 2);
}

TEST_CASE("voltage sources may sit at zero volts") {
  const auto n = parse_netlist("* t\nV1 a 0 DC 0\nR1 a 0 1k\n");
  CHECK(n.find("V1")->params.at("DC") == 0.0);
}

TEST_CASE("MOS polarity comes from the model card or the model name") {
  const auto n = parse_netlist("* t\n.model weird pmos\nM1 d g s b weird W=1u L=1u\nM2 d g s b pch_lvt W=1u L=1u\nM3 d g s b n18 W=1u L=1u\n");
  CHECK(n.find("M1")->kind == DeviceKind::pmos);
  CHECK(n.find("M2")->kind == DeviceKind::pmos);
  CHECK(n.find("M3")->kind == DeviceKind::nmos);
}
