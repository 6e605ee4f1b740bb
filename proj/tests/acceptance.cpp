// One PASS/FAIL line per acceptance criterion; exits nonzero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "agents_support.hpp"
#include "sizekit/acquisition.hpp"
#include "sizekit/config.hpp"
#include "sizekit/errors.hpp"
#include "sizekit/extraction.hpp"
#include "sizekit/gp.hpp"
#include "sizekit/optimizer.hpp"
#include "sizekit/pipeline.hpp"
#include "sizekit/relations.hpp"
#include "sizekit/run_record.hpp"
#include "sizekit/sampling.hpp"
#include "sizekit/space.hpp"
#include "sizekit/synthetic.hpp"
#include "sizekit/topology.hpp"
#include "support.hpp"

using namespace sizekit;

namespace {

/// Collects failed checks for one criterion.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 8) failures.push_back(what);
    if (!ok && failures.size() == 8) failures.push_back("...");
  }
};

int g_failed = 0;

void criterion(const std::string& name, const std::function<std::string(Check&)>& body) {
  const auto start = std::chrono::steady_clock::now();
  Check c;
  std::string detail;
  try {
    detail = body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = c.failures.empty();
  g_failed += !ok;
  std::cout << (ok ? "PASS " : "FAIL ") << name << " (" << fmt::format("{:.1f}s", secs) << ")";
  if (!detail.empty()) std::cout << ": " << detail;
  std::cout << "\n";
  for (const auto& f : c.failures) std::cout << "    " << f << "\n";
  std::cout.flush();
}

// ---- speedup arithmetic ----

opt::RunSummary timed(double t) {
  opt::RunSummary s;
  s.passed = true;
  s.time = t;
  s.budget_time = t;
  s.evaluations_to_pass = 1;
  return s;
}

std::string speedup_arithmetic(Check& c) {
  struct Row {
    double unconstrained, constrained, expected;
  };
  const Row rows[] = {{7442, 3201.3, 2.32}, {7323, 275.17, 26.6}, {5081, 1027.8, 4.94}};
  std::string detail;
  for (const auto& r : rows) {
    const auto cmp = opt::compare_runs(std::vector<opt::RunSummary>{timed(r.constrained)},
                                       std::vector<opt::RunSummary>{timed(r.unconstrained)}, "constrained", "unconstrained");
    const double oracle = r.unconstrained / r.constrained;
    c.expect(std::fabs(cmp.speedup - oracle) < 1e-12, fmt::format("speedup {} != oracle {}", cmp.speedup, oracle));
    // Published speedups carry 3 significant figures; compare at that precision.
    const double scale = std::pow(10.0, 2 - std::floor(std::log10(cmp.speedup)));
    const double reported = std::round(cmp.speedup * scale) / scale;
    c.expect(std::fabs(reported - r.expected) <= 0.01,
             fmt::format("speedup {:.4f} reports as {} vs {} (tol 0.01)", cmp.speedup, reported, r.expected));
    detail += fmt::format("{:.4f}x -> {} ", cmp.speedup, reported);
  }
  return detail;
}

// ---- relation counting ----

std::string relation_counting(Check& c) {
  const auto chained = relations::normalize(relations::parse_relations("equal W M1 M2\nequal W M2 M3\n"));
  c.expect(relations::valid_relation_count(chained) == 1, "{M1=M2, M2=M3} should count once");
  const std::vector<std::vector<int>> counts = {{11, 11, 12}, {12, 11, 12}, {5, 3, 3}, {4, 5, 3}, {10, 9, 10}, {11, 10, 10}};
  const std::vector<int> expected = {1, 1, 2, 2, 1, 1};
  const auto got = relations::stability_report(counts);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const int oracle = *std::max_element(counts[i].begin(), counts[i].end()) - *std::min_element(counts[i].begin(), counts[i].end());
    c.expect(oracle == expected[i], fmt::format("row {} oracle {} != expected {}", i, oracle, expected[i]));
  }
  c.expect(got == expected, "stability report differs from the expected max-variation column");
  std::string detail = "max variation";
  for (int v : got) detail += " " + std::to_string(v);
  return detail;
}

// ---- pruning oracle ----

struct GridInstance {
  std::size_t n = 0;
  std::vector<int> k, lo, hi, cls;
  std::optional<std::pair<int, int>> fix;  // (class, grid index)
  static constexpr double unit = 1000.0;
};

std::optional<GridInstance> random_instance(std::mt19937_64& rng) {
  auto pick = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
  GridInstance g;
  g.n = static_cast<std::size_t>(pick(2, 4));
  for (std::size_t h = 0; h < g.n; ++h) {
    g.k.push_back(pick(1, 3));
    g.lo.push_back(pick(1, 5));
    g.hi.push_back(g.lo.back() + pick(1, 7));  // at most 8 grid points
    g.cls.push_back(pick(0, static_cast<int>(g.n) - 1));
  }
  for (int c = 0; c < static_cast<int>(g.n); ++c) {
    int a = 0, b = 1 << 20;
    for (std::size_t h = 0; h < g.n; ++h) {
      if (g.cls[h] != c) continue;
      a = std::max(a, g.lo[h]);
      b = std::min(b, g.hi[h]);
    }
    if (a > b) return std::nullopt;
  }
  if (pick(0, 9) < 3) {
    const int c = g.cls[static_cast<std::size_t>(pick(0, static_cast<int>(g.n) - 1))];
    int a = 0, b = 1 << 20;
    for (std::size_t h = 0; h < g.n; ++h) {
      if (g.cls[h] == c) a = std::max(a, g.lo[h]), b = std::min(b, g.hi[h]);
    }
    g.fix = {c, pick(a, b)};
  }
  return g;
}

std::string device(std::size_t h) { return "R" + std::to_string(h + 1); }

std::string relation_text(const GridInstance& g) {
  std::string out;
  for (int c = 0; c < static_cast<int>(g.n); ++c) {
    std::optional<std::size_t> first;
    for (std::size_t h = 0; h < g.n; ++h) {
      if (g.cls[h] != c) continue;
      if (!first) {
        first = h;
        continue;
      }
      const std::size_t f = *first;
      if (g.k[h] == g.k[f]) {
        out += fmt::format("equal R {} {}\n", device(f), device(h));
      } else {
        out += fmt::format("ratio R {}={}/{}*{}\n", device(h), g.k[h], g.k[f], device(f));
      }
    }
    if (g.fix && g.fix->first == c && first) {
      out += fmt::format("fix R {} = {}\n", device(*first), g.k[*first] * g.fix->second * GridInstance::unit);
    }
  }
  return out;
}

/// Objective over grid indices: deterministic, irregular, shared by both enumerations.
double grid_objective(const std::vector<int>& t, std::uint64_t salt) {
  double s = 0;
  for (std::size_t h = 0; h < t.size(); ++h) {
    s += std::sin(1.7 * t[h] + 0.3 * static_cast<double>(salt % 7) + static_cast<double>(h)) * (1.0 + static_cast<double>(h));
    if (h) s += 0.25 * std::cos(static_cast<double>(t[h] * t[h - 1]));
  }
  return s;
}

std::string pruning_oracle(Check& c) {
  std::mt19937_64 rng(2718);
  int done = 0, total_points = 0;
  for (int attempt = 0; done < 40 && attempt < 1000; ++attempt) {
    const auto inst = random_instance(rng);
    if (!inst) continue;
    const auto& g = *inst;
    const std::uint64_t salt = static_cast<std::uint64_t>(attempt);

    // Constrained full grid: every member of a class shares one index; fixed classes take the fixed index.
    double best_full = std::numeric_limits<double>::infinity();
    std::size_t full_count = 0;
    std::vector<int> t(g.lo);
    while (true) {
      bool ok = true;
      for (std::size_t a = 0; a < g.n && ok; ++a) {
        for (std::size_t b = a + 1; b < g.n && ok; ++b) ok = g.cls[a] != g.cls[b] || t[a] == t[b];
        if (ok && g.fix && g.cls[a] == g.fix->first) ok = t[a] == g.fix->second;
      }
      if (ok) {
        ++full_count;
        best_full = std::min(best_full, grid_objective(t, salt));
      }
      std::size_t h = 0;
      while (h < g.n && t[h] == g.hi[h]) t[h] = g.lo[h], ++h;
      if (h == g.n) break;
      ++t[h];
    }

    // Pruned grid: each representative's own grid clipped to its projected bounds, then expanded.
    std::string netlist = "* grid\n", bounds;
    for (std::size_t h = 0; h < g.n; ++h) {
      netlist += fmt::format("{} n{} 0 1k\n", device(h), h);
      bounds += fmt::format("override {} R {} {} linear\n", device(h), g.k[h] * g.lo[h] * GridInstance::unit,
                            g.k[h] * g.hi[h] * GridInstance::unit);
    }
    auto table = space::default_bound_table();
    table.merge(space::BoundTable::parse(bounds));
    const auto full = space::build_space(parse_netlist(netlist), table);
    const auto ps = space::prune(full, relations::normalize(relations::parse_relations(relation_text(g))));

    std::vector<std::vector<double>> axes;
    for (const auto& f : ps.free()) {
      const std::size_t h = static_cast<std::size_t>(std::stoi(f.representative.device.substr(1)) - 1);
      std::vector<double> axis;
      for (int v = g.lo[h]; v <= g.hi[h]; ++v) {
        const double x = g.k[h] * v * GridInstance::unit;
        if (x >= f.bounds.lo * (1 - 1e-12) && x <= f.bounds.hi * (1 + 1e-12)) axis.push_back(std::clamp(x, f.bounds.lo, f.bounds.hi));
      }
      axes.push_back(std::move(axis));
    }
    double best_pruned = std::numeric_limits<double>::infinity();
    std::size_t pruned_count = 0;
    bool off_grid = false;
    std::vector<std::size_t> idx(axes.size(), 0);
    const bool empty = std::any_of(axes.begin(), axes.end(), [](const auto& a) { return a.empty(); });
    while (!empty) {
      std::vector<double> x(axes.size());
      for (std::size_t i = 0; i < axes.size(); ++i) x[i] = axes[i][idx[i]];
      const auto a = ps.expand(x);
      std::vector<int> tt(g.n);
      for (std::size_t h = 0; h < g.n; ++h) {
        const double r = a.at({device(h), "R"}) / (g.k[h] * GridInstance::unit);
        tt[h] = static_cast<int>(std::lround(r));
        if (std::fabs(r - tt[h]) > 1e-9 || tt[h] < g.lo[h] || tt[h] > g.hi[h]) off_grid = true;
      }
      ++pruned_count;
      best_pruned = std::min(best_pruned, grid_objective(tt, salt));
      std::size_t i = 0;
      while (i < axes.size() && idx[i] + 1 == axes[i].size()) idx[i] = 0, ++i;
      if (i == axes.size()) break;
      ++idx[i];
    }
    c.expect(!off_grid, fmt::format("instance {}: expansion left the grid", attempt));
    c.expect(full_count == pruned_count, fmt::format("instance {}: {} full points vs {} pruned", attempt, full_count, pruned_count));
    c.expect(best_full == best_pruned, fmt::format("instance {}: best {} vs {}", attempt, best_full, best_pruned));
    total_points += static_cast<int>(full_count);
    ++done;
  }
  c.expect(done >= 20, fmt::format("only {} instances generated", done));
  return fmt::format("{} instances, {} feasible grid points, identical optima", done, total_points);
}

// ---- expansion exactness ----

space::PrunedSpace circuit_space(const std::string& circuit) {
  const auto n = testing::load_netlist(testing::asset("templates/" + circuit + ".sp"));
  auto table = space::default_bound_table();
  table.merge(space::BoundTable::parse(text::read_file(testing::asset("configs/" + circuit + ".bounds"))));
  return space::prune(space::build_space(n, table), relations::normalize(relations::parse_relations(
                                                        text::read_file(testing::asset("configs/" + circuit + ".relations")))));
}

std::string expansion_exactness(Check& c) {
  std::string detail;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const std::string circuit : {"opamp", "bgr", "ldo"}) {
    const auto ps = circuit_space(circuit);
    const auto rels = relations::parse_relations(text::read_file(testing::asset("configs/" + circuit + ".relations")));
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
      std::vector<double> unit(ps.dim());
      for (auto& v : unit) v = u(rng);
      const auto a = ps.expand(ps.from_unit(unit));
      for (const auto& r : rels) {
        if (r.kind == relations::RelationKind::equal || r.kind == relations::RelationKind::ratio ||
            r.kind == relations::RelationKind::fix) {
          worst = std::max(worst, relations::residual(r, a));
        }
      }
    }
    c.expect(worst < 1e-12, fmt::format("{}: worst residual {:.3e}", circuit, worst));
    detail += fmt::format("{} {:.1e} ", circuit, worst);
  }
  return "worst relative residual: " + detail;
}

// ---- optimizer validity ----

double simpson_gaussian(const std::function<double(double)>& g, double mu, double sigma, double upper) {
  const int n = 20000;
  const double a = mu - 12 * sigma, h = (upper - a) / n;
  double s = 0;
  for (int i = 0; i <= n; ++i) {
    const double y = a + i * h;
    const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
    const double z = (y - mu) / sigma;
    s += w * g(y) * std::exp(-0.5 * z * z) / (sigma * std::sqrt(2 * std::numbers::pi));
  }
  return s * h / 3;
}

void run_invariants(Check& c, const opt::RunRecord& r, const std::string& label) {
  double best = opt::kFailedFom;
  bool mono = true;
  for (const auto& e : r.history) {
    best = std::min(best, e.result.fom);
    mono = mono && e.best_fom == best;
  }
  c.expect(mono, label + ": incumbent not monotone");
  c.expect(r.history.size() == r.init_points + r.completed_iterations * r.batch, label + ": evaluation count");
  c.expect(r.completed_iterations <= r.max_iterations, label + ": iterations exceed budget");
  if (!r.passed()) c.expect(r.completed_iterations == r.max_iterations, label + ": stopped early without passing");
}

std::string optimizer_validity(Check& c) {
  // GP interpolation.
  opt::Rng rng(4);
  std::vector<opt::Point> x;
  std::vector<double> y;
  for (int i = 0; i < 30; ++i) {
    auto p = rng.unit_point(4);
    y.push_back(std::sin(5 * p[0]) + p[1] * p[1] - 0.5 * p[2] * p[3]);
    x.push_back(std::move(p));
  }
  opt::GaussianProcess gp;
  gp.fit(x, y, opt::GpOptions{}, rng);
  double worst = 0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::fabs(gp.predict(x[i]).mean - y[i]));
  c.expect(worst <= 1e-6, fmt::format("GP interpolation error {:.3e}", worst));

  // Acquisitions against numerical integration.
  const double ei_oracle = simpson_gaussian([](double v) { return -v; }, 0, 1, 0);
  const double pi_oracle = simpson_gaussian([](double) { return 1.0; }, 0, 1, 0);
  const double ei = opt::expected_improvement(0, 1, 0), pi = opt::probability_of_improvement(0, 1, 0);
  c.expect(std::fabs(ei - ei_oracle) <= 1e-6 && std::fabs(ei - 0.39894) <= 1e-5, fmt::format("EI {} vs oracle {}", ei, ei_oracle));
  c.expect(std::fabs(pi - pi_oracle) <= 1e-6 && std::fabs(pi - 0.5) <= 1e-6, fmt::format("PI {} vs oracle {}", pi, pi_oracle));

  // Budget accounting, monotonicity and determinism across algorithms.
  const auto ps = space::unpruned(eval::synthetic_space("branin", 2));
  const eval::SyntheticEvaluator ev("branin", 2);
  const auto spec = opt::ObjectiveSpec::parse("f min 0.45 norm=1\n");
  int runs = 0;
  for (auto alg : {opt::Algorithm::mace, opt::Algorithm::random, opt::Algorithm::de}) {
    for (std::uint64_t seed : {1, 2, 3}) {
      for (bool stop : {false, true}) {
        opt::OptimizerConfig cfg;
        cfg.algorithm = alg;
        cfg.seed = seed;
        cfg.max_iterations = 6;
        cfg.batch = 4;
        cfg.init_points = 6;
        cfg.stop_on_pass = stop;
        const auto r = opt::run(ps, ev, spec, cfg);
        const auto label = fmt::format("{} seed {}", opt::to_string(alg), seed);
        run_invariants(c, r, label);
        const double cost = ev.nominal_cost();
        c.expect(r.total_time == cost * static_cast<double>(r.history.size()), label + ": total time");
        c.expect(r.budget_time == cost * static_cast<double>(cfg.init_points + cfg.max_iterations * cfg.batch), label + ": budget time");
        const auto again = opt::run(ps, ev, spec, cfg);
        c.expect(opt::history_log(r, {"f"}) == opt::history_log(again, {"f"}), label + ": histories differ under one seed");
        ++runs;
      }
    }
  }
  return fmt::format("GP max error {:.1e}, EI {:.6f}, PI {:.6f}, {} runs deterministic", worst, ei, pi, runs);
}

// ---- pruning-speedup trend ----

double median_evaluations(const std::vector<opt::RunRecord>& runs) {
  std::vector<double> v;
  for (const auto& r : runs) {
    v.push_back(static_cast<double>(r.passed() ? *r.evaluations_to_pass : r.init_points + r.max_iterations * r.batch));
  }
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::size_t passes(const std::vector<opt::RunRecord>& runs) {
  return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const auto& r) { return r.passed(); }));
}

std::string speedup_trend(Check& c) {
  std::string detail;
  for (const std::string name : {"valley", "opamp"}) {
    const auto cfg = config::Config::load(testing::asset("configs/" + name + ".ini"));
    const auto problem = pipeline::load_problem(cfg);
    c.expect(problem.seeds.size() == 10, name + ": expected 10 seeds");
    c.expect(problem.optimizer.max_iterations == 100 && problem.optimizer.batch == 8, name + ": expected 100 x 8 budget");
    std::map<pipeline::Arm, std::vector<opt::RunRecord>> arms;
    for (auto arm : {pipeline::Arm::constrained, pipeline::Arm::unconstrained}) {
      const auto ps = pipeline::make_space(cfg, problem, arm);
      for (auto seed : problem.seeds) {
        auto oc = problem.optimizer;
        oc.seed = seed;
        arms[arm].push_back(opt::run(ps, *problem.evaluator, problem.objective, oc));
        run_invariants(c, arms[arm].back(), fmt::format("{} {} seed {}", name, pipeline::to_string(arm), seed));
      }
    }
    const auto& con = arms[pipeline::Arm::constrained];
    const auto& unc = arms[pipeline::Arm::unconstrained];
    const double mc = median_evaluations(con), mu = median_evaluations(unc);
    c.expect(mu >= 2.0 * mc, fmt::format("{}: median {} vs {} is below 2x", name, mc, mu));
    c.expect(passes(con) >= passes(unc), fmt::format("{}: pass rate {}/10 < {}/10", name, passes(con), passes(unc)));
    detail += fmt::format("{} median {} vs {} ({:.1f}x), pass {}/{} vs {}/{}; ", name, mc, mu, mu / mc, passes(con), con.size(),
                          passes(unc), unc.size());
  }
  return detail;
}

// ---- agent protocol ----

std::string transcript_text(const agents::ExtractionResult& r) {
  std::string out;
  for (const auto& l : r.transcript) out += l + "\n";
  return out;
}

std::string agent_protocol(Check& c) {
  const std::map<std::string, std::string> expected = {
      {"majority.txt", "equal W M1 M2\nequal L M1 M2\nequal L M3 M4\nequal L M5 M7 M8\n"},
      {"conflict.txt", "equal W M3 M4\nequal L M1 M2\n"},
      {"unopposed.txt", "bound L M1 [0.5u,2u]\nratio W M7=2*M5 M8=2*M5\n"},
  };
  for (const auto& [fixture, records] : expected) {
    const auto r = testing::run_fixture(fixture);
    const auto text = transcript_text(r);
    const auto audit = agents::audit_transcript(text);
    c.expect(audit.ok, fixture + ": audit failed" + (audit.problems.empty() ? "" : ": " + audit.problems.front()));
    c.expect(audit.rounds == 5, fixture + ": expected 5 rounds");
    std::map<std::size_t, int> expert_turns;
    for (const auto& line : text::lines(text)) {
      if (line.find("\"type\":\"turn\"") != std::string::npos && line.find("\"role\":\"expert\"") != std::string::npos) {
        const auto p = line.find("\"round\":");
        expert_turns[std::stoul(line.substr(p + 8))]++;
      }
    }
    for (std::size_t round = 1; round <= 5; ++round) c.expect(expert_turns[round] == 1, fmt::format("{}: round {} expert turns", fixture, round));
    for (const auto& m : r.pool.messages()) {
      c.expect(!(m.role == agents::Role::expert &&
                 (m.kind == agents::MessageKind::agreement || m.kind == agents::MessageKind::refutation)),
               fixture + ": expert stance in pool");
    }
    c.expect(testing::joined_records(r.summary.accepted) ==
                 testing::joined_records(relations::parse_relations(records)),
             fixture + ": accepted set differs from the hand-computed expectation");
    for (int i = 0; i < 3; ++i) {
      auto replay = std::make_shared<agents::ScriptedBackend>(agents::backend_from_transcript(text));
      c.expect(agents::run_extraction(testing::scripted_job(replay)).summary.set == r.summary.set, fixture + ": replay differs");
    }
  }
  return "3 fixtures, 5 rounds each, 3 replays each";
}

// ---- parser round-trip ----

std::string parser_round_trip(Check& c) {
  const auto corpus = testing::netlist_corpus();
  c.expect(corpus.size() >= 10, "corpus has fewer than 10 netlists");
  for (const auto& path : corpus) {
    const auto a = testing::load_netlist(path);
    const auto text = emit_netlist(a);
    const auto b = parse_netlist(text);
    c.expect(a == b, path + ": parse(emit(n)) != n");
    c.expect(emit_netlist(b) == text, path + ": emit not stable");
  }
  return fmt::format("{} netlists", corpus.size());
}

// ---- motif detection ----

std::string motif_detection(Check& c) {
  const auto n = testing::opamp();
  const auto motifs = topology::detect_motifs(n);
  int pairs = 0;
  std::vector<std::pair<std::string, std::vector<std::string>>> mirrors;
  for (const auto& m : motifs) {
    if (m.kind == topology::MotifKind::differential_pair) {
      ++pairs;
      c.expect(m.left == "M1" && m.right == "M2", "pair is not {M1,M2}");
    } else if (m.kind == topology::MotifKind::current_mirror) {
      mirrors.emplace_back(m.reference, m.outputs);
    }
  }
  c.expect(pairs == 1, fmt::format("{} differential pairs", pairs));
  const decltype(mirrors) expected = {{"M3", {"M4"}}, {"M5", {"M7", "M8"}}};
  c.expect(mirrors == expected, "mirror set differs from {M3->M4, M5->M7,M8}");
  std::mt19937_64 rng(31);
  for (int i = 0; i < 10; ++i) {
    auto devices = n.devices();
    std::shuffle(devices.begin(), devices.end(), rng);
    c.expect(topology::detect_motifs(Netlist::make(n.title(), devices, n.cards())) == motifs, fmt::format("shuffle {} differs", i));
  }
  return "pair {M1,M2}, mirrors M3->M4 and M5->M7,M8, 10 shuffles";
}

}  // namespace

int main() {
  criterion("speedup arithmetic", speedup_arithmetic);
  criterion("valid-relation counting and stability", relation_counting);
  criterion("pruning oracle equivalence", pruning_oracle);
  criterion("expansion exactness", expansion_exactness);
  criterion("optimizer validity", optimizer_validity);
  criterion("agent protocol invariants", agent_protocol);
  criterion("parser round-trip", parser_round_trip);
  criterion("motif detection", motif_detection);
  const auto start = std::chrono::steady_clock::now();
  criterion("pruning-speedup trend", speedup_trend);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > 600) {
    std::cout << "FAIL pruning-speedup trend runtime: " << secs << "s exceeds 600s\n";
    ++g_failed;
  }
  std::cout << (g_failed ? fmt::format("{} criteria failed\n", g_failed) : std::string("all criteria passed\n"));
  return g_failed ? 1 : 0;
}
