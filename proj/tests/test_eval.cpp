#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "sizekit/analytic.hpp"
#include "sizekit/config.hpp"
#include "sizekit/errors.hpp"
#include "sizekit/eval_spec.hpp"
#include "sizekit/evaluator.hpp"
#include "sizekit/external.hpp"
#include "sizekit/objective.hpp"
#include "sizekit/relations.hpp"
#include "sizekit/space.hpp"
#include "sizekit/synthetic.hpp"
#include "support.hpp"

using namespace sizekit;
using namespace sizekit::opt;

namespace {

space::Assignment nominal(const Netlist& n) {
  space::Assignment a;
  for (const auto& h : sizable_parameters(n)) a[h] = n.find(h.device)->params.at(h.param);
  return a;
}

space::PrunedSpace pruned(const std::string& circuit, bool constrained) {
  const auto n = testing::load_netlist(testing::asset("templates/" + circuit + ".sp"));
  auto table = space::default_bound_table();
  table.merge(space::BoundTable::parse(text::read_file(testing::asset("configs/" + circuit + ".bounds"))));
  const auto full = space::build_space(n, table);
  if (!constrained) return space::unpruned(full);
  return space::prune(full, relations::normalize(relations::parse_relations(
                                text::read_file(testing::asset("configs/" + circuit + ".relations")))));
}

space::Assignment random_assignment(const space::PrunedSpace& ps, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> unit(ps.dim());
  for (auto& v : unit) v = u(rng);
  return ps.expand(ps.from_unit(unit));
}

eval::ExternalConfig fake_sim(const std::string& deck, const std::filesystem::path& scratch) {
  eval::ExternalConfig c;
  c.deck_template = text::read_file(testing::fixture("sim/" + deck));
  c.command = "sh " + testing::fixture("sim/fake_sim.sh") + " {deck} {output}";
  c.measurements = {{"total", "total_ohm", 1.0}, {"ratio", "ratio", 1.0}};
  c.scratch_root = scratch;
  c.timeout_seconds = 10;
  return c;
}

}  // namespace

TEST_CASE("objective text and violations") {
  const auto spec = ObjectiveSpec::parse("gain_db max 70\noffset_v min 5m\nvref_v range 0.5 1.3\nf min 0 # comment\n");
  REQUIRE(spec.metrics.size() == 4);
  CHECK(spec.metrics[0].normalizer == 70.0);
  CHECK(spec.metrics[1].normalizer == doctest::Approx(5e-3));
  CHECK(spec.metrics[2].normalizer == doctest::Approx(0.8));
  CHECK(spec.metrics[3].normalizer == 1.0);
  CHECK(violation(spec.metrics[0], 80) == 0.0);
  CHECK(violation(spec.metrics[0], 63) == doctest::Approx(7.0 / 70));
  CHECK(violation(spec.metrics[1], 7e-3) == doctest::Approx(2e-3 / 5e-3));
  CHECK(violation(spec.metrics[2], 0.4) == doctest::Approx(0.1 / 0.8));
  CHECK(violation(spec.metrics[2], 1.0) == 0.0);
  CHECK(violation(spec.metrics[2], 1.5) == doctest::Approx(0.2 / 0.8));
  CHECK(ObjectiveSpec::parse(spec.to_text()).to_text() == spec.to_text());
  CHECK_THROWS_AS(ObjectiveSpec::parse("gain_db above 70\n"), ParseError);
  CHECK_THROWS_AS(ObjectiveSpec::parse("v range 2 1\n"), ConfigError);
}

TEST_CASE("figure of merit, oscillation and failure") {
  const auto spec = ObjectiveSpec::parse("gain_db max 70\npm_deg max 40\n");
  CHECK(fom(spec, {{"gain_db", 63}, {"pm_deg", 50}}) == doctest::Approx(0.1));
  CHECK_THROWS_AS(fom(spec, {{"gain_db", 63}}), ConfigError);
  Measurement m;
  m.metrics = {{"gain_db", 80}, {"pm_deg", 50}};
  auto r = score(spec, m);
  CHECK(r.feasible);
  CHECK(r.fom == 0.0);
  m.oscillation = true;
  r = score(spec, m);
  CHECK_FALSE(r.feasible);
  CHECK(r.fom == kOscillationPenalty);
  m.failed = true;
  r = score(spec, m);
  CHECK(r.failed);
  CHECK(std::isinf(r.fom));
}

TEST_CASE("op-amp model at the template's nominal point") {
  const auto n = testing::opamp();
  const auto m = eval::eval_analytic_opamp(nominal(n));
  // I_tail = IB * (W8/L8)/(W5/L5) = 200 nA; I7 likewise.
  const double ib = 100e-9, i_tail = 200e-9, i7 = 200e-9, cc = 2e-12;
  CHECK(m.metrics.at("slew_vps") == doctest::Approx(i_tail / cc));
  CHECK(m.metrics.at("power_w") == doctest::Approx(1.2 * (ib + i_tail + i7)));
  const double gm1 = std::sqrt(2 * 300e-6 * (2.0 / 1.0) * (i_tail / 2));
  CHECK(m.metrics.at("ugb_hz") == doctest::Approx(gm1 / (2 * std::numbers::pi * cc)));
  CHECK(m.metrics.at("gain_db") > 40);
  CHECK_FALSE(m.failed);
}

TEST_CASE("op-amp offset vanishes under the correct relation set") {
  const auto ps = pruned("opamp", true);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto m = eval::eval_analytic_opamp(random_assignment(ps, rng));
    CHECK(m.metrics.at("offset_v") < 1e-12);
  }
}

TEST_CASE("analytic models stay finite over random assignments") {
  std::mt19937_64 rng(2024);
  for (const std::string c : {"opamp", "bgr", "ldo"}) {
    const auto ps = pruned(c, false);
    for (int i = 0; i < 10000; ++i) {
      const auto a = random_assignment(ps, rng);
      const auto m = c == "opamp" ? eval::eval_analytic_opamp(a) : c == "bgr" ? eval::eval_analytic_bgr(a) : eval::eval_analytic_ldo(a);
      for (const auto& [k, v] : m.metrics) {
        if (!std::isfinite(v)) {
          CAPTURE(c);
          CAPTURE(k);
          FAIL("non-finite metric");
        }
      }
    }
  }
}

TEST_CASE("op-amp targets are reachable in the constrained space") {
  const auto spec = ObjectiveSpec::parse(text::read_file(testing::asset("configs/opamp.objective")));
  const auto ps = pruned("opamp", true);
  std::mt19937_64 rng(5);
  int feasible = 0;
  for (int i = 0; i < 5000; ++i) feasible += score(spec, eval::eval_analytic_opamp(random_assignment(ps, rng))).feasible;
  CHECK(feasible > 0);
}

TEST_CASE("BGR closed-form derivative matches a finite difference") {
  const auto n = testing::load_netlist(testing::asset("templates/bgr.sp"));
  const auto a = nominal(n);
  const eval::BgrConstants c;
  for (double t : {-20.0, 27.0, 85.0}) {
    const double h = 1e-3;
    const double fd = (eval::bgr_vref(a, c, t + h) - eval::bgr_vref(a, c, t - h)) / (2 * h);
    CHECK(eval::bgr_dvdt(a, c, t) == doctest::Approx(fd).epsilon(1e-6));
  }
  const auto m = eval::eval_analytic_bgr(a);
  CHECK(m.metrics.at("vref_v") == doctest::Approx(eval::bgr_vref(a, c, 27.0)));
}

TEST_CASE("BGR temperature coefficient follows the box-method sum") {
  const auto n = testing::load_netlist(testing::asset("templates/bgr.sp"));
  const auto a = nominal(n);
  const eval::BgrConstants c;
  double total = 0;
  for (int i = 1; i < c.sweep_points; ++i) {
    const double t0 = c.t_min_c + (c.t_max_c - c.t_min_c) * (i - 1) / (c.sweep_points - 1);
    const double t1 = c.t_min_c + (c.t_max_c - c.t_min_c) * i / (c.sweep_points - 1);
    total += std::fabs(eval::bgr_vref(a, c, t1) - eval::bgr_vref(a, c, t0));
  }
  const double tc = 1e6 * total / (eval::bgr_vref(a, c, 27.0) * (c.t_max_c - c.t_min_c));
  CHECK(eval::eval_analytic_bgr(a).metrics.at("tc_ppm") == doctest::Approx(tc));
}

TEST_CASE("LDO loop relations") {
  const auto n = testing::load_netlist(testing::asset("templates/ldo.sp"));
  const auto m = eval::eval_analytic_ldo(nominal(n));
  const double loop = m.metrics.at("loop_gain");
  CHECK(loop > 1);
  // Vout approaches vref / r with r = RF2 / (RF1 + RF2).
  const double ideal = 0.6 * (100e3 + 120e3) / 120e3;
  CHECK(m.metrics.at("vout_v") == doctest::Approx(ideal * loop / (1 + loop)).epsilon(1e-3));
  CHECK(m.metrics.at("psrr_db") == doctest::Approx(-20 * std::log10(m.metrics.at("line_reg_vpv"))));
}

TEST_CASE("analytic evaluators check their templates") {
  const auto spec = ObjectiveSpec::parse(text::read_file(testing::asset("configs/opamp.objective")));
  CHECK_NOTHROW(eval::check_metrics(eval::OpAmpEvaluator{}, spec));
  CHECK_THROWS_AS(eval::check_metrics(eval::BgrEvaluator{}, spec), ConfigError);
  const auto wrong = space::build_space(testing::load_netlist(testing::asset("templates/bgr.sp")), space::default_bound_table());
  CHECK_THROWS_AS(eval::OpAmpEvaluator{}.check_space(wrong), ConfigError);
}

TEST_CASE("synthetic functions hit their known optima") {
  CHECK(eval::synthetic_value("sphere", std::vector<double>{0, 0, 0}) == 0.0);
  for (auto p : std::vector<std::vector<double>>{{-std::numbers::pi, 12.275}, {std::numbers::pi, 2.275}, {9.42478, 2.475}}) {
    CHECK(eval::synthetic_value("branin", p) == doctest::Approx(0.397887).epsilon(1e-5));
  }
  CHECK(eval::synthetic_value("hartmann3", std::vector<double>{0.114614, 0.555649, 0.852547}) ==
        doctest::Approx(-3.86278).epsilon(1e-5));
  CHECK(eval::synthetic_value("symmetric-valley", std::vector<double>{0.35, 0.35}) == doctest::Approx(0.0));
  CHECK(eval::synthetic_value("symmetric-valley", std::vector<double>{0.3, 0.3, 0.7, 0.7}) == doctest::Approx(0.0));
  CHECK(eval::synthetic_value("symmetric-valley", std::vector<double>{0.4, 0.3}) >= eval::kValleySteepness * 0.01);
  CHECK_THROWS_AS(eval::check_synthetic("symmetric-valley", 3), ConfigError);
  CHECK_THROWS_AS(eval::check_synthetic("hartmann3", 2), ConfigError);
  CHECK_THROWS_AS(eval::check_synthetic("rosenbrock", 2), ConfigError);
  const auto s = eval::synthetic_space("branin", 2);
  CHECK(s.bounds()[0] == Interval{-5, 10});
}

TEST_CASE("deck rendering") {
  const std::string deck = "R1 a b {R_R1}\nR2 b 0 {R(R2)}\nM1 d g s b n W={w_m1}\n";
  CHECK(eval::template_placeholders(deck) == std::vector<std::string>{"R_R1", "R(R2)", "w_m1"});
  const space::Assignment a{{{"R1", "R"}, 1000.0}, {{"R2", "R"}, 2000.0}, {{"M1", "W"}, 1e-6}};
  const auto out = eval::render_deck(deck, a);
  CHECK(out.find("{") == std::string::npos);
  CHECK(out.find("R1 a b 1000") != std::string::npos);
  CHECK_THROWS_AS(eval::render_deck("X {W_M9}", a), ConfigError);
  const auto meas = eval::parse_measurements("gain = 10k\nGAIN = 20k\nnoise\npm=45\n");
  CHECK(meas.at("gain") == doctest::Approx(20e3));
  CHECK(meas.at("pm") == 45.0);
}

TEST_CASE("external simulator: success, failure, missing output and timeout") {
  const auto scratch = testing::scratch_dir("external");
  const space::Assignment a{{{"R1", "R"}, 1000.0}, {{"R2", "R"}, 3000.0}};

  const eval::ExternalEvaluator ok(fake_sim("deck_ok.sp", scratch));
  auto m = ok.evaluate(a);
  CHECK_FALSE(m.failed);
  CHECK(m.metrics.at("total_ohm") == doctest::Approx(4000.0));
  CHECK(m.metrics.at("ratio") == doctest::Approx(3.0));
  CHECK(std::filesystem::is_empty(scratch));

  CHECK(eval::ExternalEvaluator(fake_sim("deck_fail.sp", scratch)).evaluate(a).failed);
  CHECK(eval::ExternalEvaluator(fake_sim("deck_missing.sp", scratch)).evaluate(a).failed);

  auto hang = fake_sim("deck_hang.sp", scratch);
  hang.timeout_seconds = 0.5;
  const auto start = std::chrono::steady_clock::now();
  const auto hm = eval::ExternalEvaluator(hang).evaluate(a);
  CHECK(hm.failed);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(10));

  auto keep = fake_sim("deck_ok.sp", scratch);
  keep.keep_scratch = true;
  eval::ExternalEvaluator(keep).evaluate(a);
  CHECK_FALSE(std::filesystem::is_empty(scratch));
}

TEST_CASE("external simulator under a parallel batch") {
  const auto scratch = testing::scratch_dir("external-pool");
  auto cfg = fake_sim("deck_ok.sp", scratch);
  cfg.pool_size = 2;
  const eval::ExternalEvaluator ev(cfg);
  const auto n = testing::load_netlist(testing::fixture("sim/divider.sp"));
  const auto ps = space::unpruned(space::build_space(n, space::default_bound_table()));
  std::vector<std::vector<double>> pts;
  for (int i = 1; i <= 6; ++i) pts.push_back({1e3 * i, 2e3 * i});
  const auto spec = ObjectiveSpec::parse("ratio range 1.9 2.1\n");
  const auto res = eval::evaluate_batch(ev, spec, ps, pts, 3);
  REQUIRE(res.size() == 6);
  for (std::size_t i = 0; i < res.size(); ++i) {
    CHECK(res[i].feasible);
    CHECK(res[i].metrics.at("total_ohm") == doctest::Approx(3e3 * static_cast<double>(i + 1)));
  }
}

TEST_CASE("evaluator specs from config") {
  auto cfg = config::Config::parse("[evaluator]\nkind = analytic-opamp\nvdd = 1.8\n");
  auto spec = eval::EvaluatorSpec::from_config(cfg);
  CHECK(spec.kind == eval::EvaluatorKind::analytic_opamp);
  CHECK(eval::opamp_constants(spec.constants).vdd == 1.8);
  CHECK(eval::make_evaluator(spec)->name() == "analytic-opamp");
  CHECK_THROWS_AS(eval::opamp_constants({{"vddd", 1.0}}), ConfigError);
  CHECK_THROWS_AS(eval::EvaluatorSpec::from_config(config::Config::parse("[evaluator]\nkind = spectre\n")), ConfigError);
  const auto syn = eval::EvaluatorSpec::from_config(config::Config::parse("[evaluator]\nkind = synthetic\nfunction = branin\ndim = 2\n"));
  CHECK(eval::make_evaluator(syn)->metric_names() == std::vector<std::string>{"f"});
}
