#include <algorithm>
#include <numeric>

#include "run_state.hpp"
#include "sizekit/errors.hpp"
#include "sizekit/optimizer.hpp"

namespace sizekit::opt {

namespace detail {

RunState::RunState(const space::PrunedSpace& ps, const eval::Evaluator& evaluator, const ObjectiveSpec& spec,
                   const OptimizerConfig& cfg, std::string algorithm)
    : ps_(ps), evaluator_(evaluator), spec_(spec), cfg_(cfg), start_(std::chrono::steady_clock::now()) {
  cfg.validate();
  spec.validate();
  eval::check_metrics(evaluator, spec);
  evaluator.check_space(ps.full());
  record_.algorithm = std::move(algorithm);
  record_.seed = cfg.seed;
  record_.init_points = cfg.init_points;
  record_.batch = cfg.batch;
  record_.max_iterations = cfg.max_iterations;
  cost_ = evaluator.nominal_cost();
  record_.budget_time = static_cast<double>(cfg.init_points + cfg.max_iterations * cfg.batch) * cost_;
}

bool RunState::unit_feasible(const Point& u) const {
  return ps_.residual_inequalities().empty() || ps_.feasible(ps_.from_unit(u));
}

Point RunState::feasible_unit_point(Rng& rng) const {
  Point u = rng.unit_point(ps_.dim());
  for (std::size_t a = 1; a < cfg_.resample_attempts && !unit_feasible(u); ++a) u = rng.unit_point(ps_.dim());
  return u;
}

Point RunState::repair(Point u, Rng& rng) const {
  if (unit_feasible(u)) return u;
  for (std::size_t a = 0; a < cfg_.resample_attempts; ++a) {
    Point v = rng.unit_point(ps_.dim());
    if (unit_feasible(v)) return v;
  }
  return u;
}

std::vector<EvalResult> RunState::evaluate(const std::vector<Point>& unit_points, std::size_t iteration) {
  std::vector<Point> xs;
  xs.reserve(unit_points.size());
  for (const auto& u : unit_points) xs.push_back(ps_.from_unit(u));
  auto results = eval::evaluate_batch(evaluator_, spec_, ps_, xs, cfg_.workers);
  for (std::size_t i = 0; i < results.size(); ++i) {
    EvaluationRecord e;
    e.iteration = iteration;
    e.index = record_.history.size();
    e.x = xs[i];
    e.result = results[i];
    const double prev = record_.history.empty() ? kFailedFom : record_.history.back().best_fom;
    if (record_.history.empty() || e.result.fom < prev) record_.best_index = e.index;
    e.best_fom = std::min(prev, e.result.fom);
    if (e.result.feasible && !record_.evaluations_to_pass) {
      record_.evaluations_to_pass = e.index + 1;
      record_.iterations_to_pass = iteration;
    }
    record_.history.push_back(std::move(e));
    unit_points_.push_back(unit_points[i]);
  }
  if (record_.passed() && !record_.time_to_pass) {
    record_.time_to_pass = static_cast<double>(record_.history.size()) * cost_;
  }
  return results;
}

std::vector<EvalResult> RunState::initial_design(Rng& rng) {
  auto pts = latin_hypercube(cfg_.init_points, ps_.dim(), rng);
  for (auto& p : pts) p = repair(std::move(p), rng);
  auto results = evaluate(pts, 0);
  if (std::all_of(results.begin(), results.end(), [](const EvalResult& r) { return r.failed; })) {
    throw EvaluationError("every initial evaluation failed");
  }
  return results;
}

RunRecord RunState::finish() {
  record_.total_time = static_cast<double>(record_.history.size()) * cost_;
  record_.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  return std::move(record_);
}

}  // namespace detail

RunRecord run_random(const space::PrunedSpace& ps, const eval::Evaluator& evaluator, const ObjectiveSpec& spec,
                     const OptimizerConfig& cfg) {
  detail::RunState state(ps, evaluator, spec, cfg, "random");
  Rng rng(cfg.seed);
  state.initial_design(rng);
  for (std::size_t it = 1; it <= cfg.max_iterations && !state.should_stop(); ++it) {
    std::vector<Point> batch;
    for (std::size_t i = 0; i < cfg.batch; ++i) batch.push_back(state.feasible_unit_point(rng));
    state.evaluate(batch, it);
    state.finish_iteration(it);
  }
  return state.finish();
}

RunRecord run_de(const space::PrunedSpace& ps, const eval::Evaluator& evaluator, const ObjectiveSpec& spec,
                 const OptimizerConfig& cfg) {
  detail::RunState state(ps, evaluator, spec, cfg, "de");
  Rng rng(cfg.seed);
  const auto init = state.initial_design(rng);
  const std::size_t np = cfg.batch;
  const std::size_t d = ps.dim();

  std::vector<std::size_t> order(init.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return init[a].fom < init[b].fom; });
  std::vector<Point> pop;
  std::vector<double> fit;
  for (std::size_t i = 0; i < np; ++i) {
    const auto k = order[i % order.size()];
    pop.push_back(state.unit_points()[k]);
    fit.push_back(init[k].fom);
  }

  auto pick = [&](std::size_t exclude, std::vector<std::size_t>& taken) {
    for (int tries = 0; tries < 64; ++tries) {
      const auto c = rng.index(np);
      if ((c != exclude || np == 1) && (np < 4 || std::find(taken.begin(), taken.end(), c) == taken.end())) {
        taken.push_back(c);
        return c;
      }
    }
    const auto c = rng.index(np);
    taken.push_back(c);
    return c;
  };

  for (std::size_t it = 1; it <= cfg.max_iterations && !state.should_stop(); ++it) {
    std::vector<Point> trials;
    for (std::size_t i = 0; i < np; ++i) {
      std::vector<std::size_t> taken{i};
      const auto a = pick(i, taken), b = pick(i, taken), c = pick(i, taken);
      Point t = pop[i];
      const std::size_t jrand = d ? rng.index(d) : 0;
      for (std::size_t j = 0; j < d; ++j) {
        if (j == jrand || rng.uniform() < cfg.de_cr) {
          t[j] = std::clamp(pop[a][j] + cfg.de_f * (pop[b][j] - pop[c][j]), 0.0, 1.0);
        }
      }
      trials.push_back(state.repair(std::move(t), rng));
    }
    const auto results = state.evaluate(trials, it);
    for (std::size_t i = 0; i < np; ++i) {
      if (results[i].fom <= fit[i]) {
        pop[i] = trials[i];
        fit[i] = results[i].fom;
      }
    }
    state.finish_iteration(it);
  }
  return state.finish();
}

}  // namespace sizekit::opt
