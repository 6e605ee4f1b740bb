#include <doctest.h>

#include <algorithm>
#include <random>

#include "sizekit/relations.hpp"
#include "sizekit/topology.hpp"
#include "support.hpp"

using namespace sizekit;
using topology::MotifKind;

namespace {

Netlist shuffled(const Netlist& n, std::mt19937_64& rng) {
  auto devices = n.devices();
  std::shuffle(devices.begin(), devices.end(), rng);
  return Netlist::make(n.title(), devices, n.cards());
}

std::vector<topology::MotifAnnotation> of_kind(const std::vector<topology::MotifAnnotation>& all, MotifKind k) {
  std::vector<topology::MotifAnnotation> out;
  std::copy_if(all.begin(), all.end(), std::back_inserter(out), [&](const auto& a) { return a.kind == k; });
  return out;
}

}  // namespace

TEST_CASE("op-amp: one differential pair and the two mirrors") {
  const auto n = testing::opamp();
  const auto motifs = topology::detect_motifs(n);
  const auto pairs = of_kind(motifs, MotifKind::differential_pair);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].left == "M1");
  CHECK(pairs[0].right == "M2");
  CHECK(pairs[0].tail == "M8");
  const auto mirrors = of_kind(motifs, MotifKind::current_mirror);
  REQUIRE(mirrors.size() == 2);
  CHECK(mirrors[0].reference == "M3");
  CHECK(mirrors[0].outputs == std::vector<std::string>{"M4"});
  CHECK(mirrors[1].reference == "M5");
  CHECK(mirrors[1].outputs == std::vector<std::string>{"M7", "M8"});
  for (const auto& m : motifs) CHECK(topology::holds(m, n));
}

TEST_CASE("motif detection is invariant under device order") {
  const auto n = testing::opamp();
  const auto ref = topology::detect_motifs(n);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10; ++i) CHECK(topology::detect_motifs(shuffled(n, rng)) == ref);
}

TEST_CASE("resistive-load pair fed by a current source") {
  const auto n = testing::load_netlist(testing::fixture("netlists/diff_pair_resistive.sp"));
  const auto m = topology::detect_motifs(n);
  REQUIRE(m.size() == 1);
  CHECK(m[0].kind == MotifKind::differential_pair);
  CHECK(m[0].tail == "ITAIL");
}

TEST_CASE("multi-output mirror and circuits without motifs") {
  const auto bank = topology::detect_current_mirrors(testing::load_netlist(testing::fixture("netlists/wilson_mirror.sp")));
  REQUIRE(bank.size() == 1);
  CHECK(bank[0].outputs == std::vector<std::string>{"MO1", "MO2", "MO3"});
  CHECK(topology::detect_motifs(testing::load_netlist(testing::fixture("netlists/rc_ladder.sp"))).empty());
  CHECK(topology::detect_motifs(testing::load_netlist(testing::fixture("netlists/common_source.sp"))).empty());
}

TEST_CASE("devices whose gates share a rail are not a pair") {
  // Two PMOS loads on VDD with different gates: VDD is a rail, not a tail.
  const auto n = parse_netlist("* t\nVDD vdd 0 DC 1\nM1 a g1 vdd vdd pch W=1u L=1u\nM2 b g2 vdd vdd pch W=1u L=1u\n");
  CHECK(topology::detect_differential_pairs(n).empty());
}

TEST_CASE("holds rejects an annotation after the structure changes") {
  const auto n = testing::opamp();
  const auto pair = topology::detect_differential_pairs(n).at(0);
  auto devices = n.devices();
  for (auto& d : devices) {
    if (d.name == "M2") d.terminals[2] = "elsewhere";
  }
  CHECK_FALSE(topology::holds(pair, Netlist::make(n.title(), devices, n.cards())));
}

TEST_CASE("seed relations parse back and are valid on the netlist") {
  const auto n = testing::opamp();
  const auto motifs = topology::detect_motifs(n);
  const auto seeds = topology::motif_seed_relations(motifs);
  // pair: W and L equality; mirrors: one L equality per output
  CHECK(seeds.size() == 2 + 1 + 2);
  const auto text = topology::serialize_annotations(motifs);
  const auto parsed = relations::parse_relations(text);
  CHECK(parsed.size() == seeds.size());
  const auto v = relations::validate(parsed, n);
  CHECK(v.rejected.empty());
  CHECK(relations::normalize(parsed) == relations::normalize(seeds));
}
