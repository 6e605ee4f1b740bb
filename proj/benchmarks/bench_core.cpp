#include <benchmark/benchmark.h>

#include <cmath>

#include "sizekit/analytic.hpp"
#include "sizekit/gp.hpp"
#include "sizekit/netlist.hpp"
#include "sizekit/optimizer.hpp"
#include "sizekit/relations.hpp"
#include "sizekit/sampling.hpp"
#include "sizekit/space.hpp"
#include "sizekit/text.hpp"
#include "sizekit/topology.hpp"

using namespace sizekit;

namespace {

std::string asset(const std::string& rel) { return text::read_file(std::string(SIZEKIT_ASSETS) + "/" + rel); }

void training_set(std::size_t n, std::size_t d, std::vector<opt::Point>& x, std::vector<double>& y) {
  opt::Rng rng(1);
  for (std::size_t i = 0; i < n; ++i) {
    auto p = rng.unit_point(d);
    double s = 0;
    for (double v : p) s += std::sin(4 * v);
    x.push_back(std::move(p));
    y.push_back(s);
  }
}

space::PrunedSpace opamp_space(bool constrained) {
  const auto full = space::build_space(parse_netlist(asset("templates/opamp.sp")), space::default_bound_table());
  if (!constrained) return space::unpruned(full);
  return space::prune(full, relations::normalize(relations::parse_relations(asset("configs/opamp.relations"))));
}

void BM_GpFit(benchmark::State& state) {
  std::vector<opt::Point> x;
  std::vector<double> y;
  training_set(static_cast<std::size_t>(state.range(0)), 8, x, y);
  for (auto _ : state) {
    opt::Rng rng(2);
    opt::GaussianProcess gp;
    gp.fit(x, y, opt::GpOptions{}, rng);
    benchmark::DoNotOptimize(gp.hyper().signal_variance);
  }
}
BENCHMARK(BM_GpFit)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_GpPredict(benchmark::State& state) {
  std::vector<opt::Point> x;
  std::vector<double> y;
  training_set(static_cast<std::size_t>(state.range(0)), 8, x, y);
  opt::Rng rng(2);
  opt::GaussianProcess gp;
  gp.fit(x, y, opt::GpOptions{}, rng);
  const auto q = rng.unit_point(8);
  for (auto _ : state) benchmark::DoNotOptimize(gp.predict(q));
}
BENCHMARK(BM_GpPredict)->Arg(32)->Arg(128)->Arg(512);

void BM_MaceIteration(benchmark::State& state) {
  const auto ps = opamp_space(true);
  const eval::OpAmpEvaluator ev;
  const auto spec = opt::ObjectiveSpec::parse(asset("configs/opamp.objective"));
  opt::OptimizerConfig cfg;
  cfg.max_iterations = 1;
  cfg.batch = 8;
  cfg.init_points = 16;
  cfg.stop_on_pass = false;
  for (auto _ : state) benchmark::DoNotOptimize(opt::run(ps, ev, spec, cfg).history.size());
}
BENCHMARK(BM_MaceIteration)->Unit(benchmark::kMillisecond);

void BM_Normalize(benchmark::State& state) {
  const auto rels = relations::parse_relations(asset("configs/opamp.relations"));
  for (auto _ : state) benchmark::DoNotOptimize(relations::normalize(rels));
}
BENCHMARK(BM_Normalize);

void BM_PruneAndExpand(benchmark::State& state) {
  const auto ps = opamp_space(true);
  opt::Rng rng(3);
  const auto x = ps.from_unit(rng.unit_point(ps.dim()));
  for (auto _ : state) benchmark::DoNotOptimize(ps.expand(x));
}
BENCHMARK(BM_PruneAndExpand);

void BM_ParseNetlist(benchmark::State& state) {
  const auto src = asset("templates/ldo.sp");
  for (auto _ : state) benchmark::DoNotOptimize(parse_netlist(src));
}
BENCHMARK(BM_ParseNetlist);

void BM_DetectMotifs(benchmark::State& state) {
  const auto n = parse_netlist(asset("templates/opamp.sp"));
  for (auto _ : state) benchmark::DoNotOptimize(topology::detect_motifs(n));
}
BENCHMARK(BM_DetectMotifs);

void BM_AnalyticOpAmp(benchmark::State& state) {
  const auto ps = opamp_space(false);
  opt::Rng rng(4);
  const auto a = ps.expand(ps.from_unit(rng.unit_point(ps.dim())));
  for (auto _ : state) benchmark::DoNotOptimize(eval::eval_analytic_opamp(a));
}
BENCHMARK(BM_AnalyticOpAmp);

}  // namespace

BENCHMARK_MAIN();
