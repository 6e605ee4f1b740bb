#include "sizekit/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "run_state.hpp"
#include "sizekit/errors.hpp"
#include "sizekit/gp.hpp"
#include "sizekit/text.hpp"

namespace sizekit::opt {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::mace: return "mace";
    case Algorithm::random: return "random";
    case Algorithm::de: return "de";
  }
  return "?";
}

Algorithm algorithm_from_string(std::string_view s) {
  const auto l = text::to_lower(s);
  if (l == "mace" || l == "bo") return Algorithm::mace;
  if (l == "random") return Algorithm::random;
  if (l == "de") return Algorithm::de;
  throw ConfigError("unknown algorithm '" + std::string(s) + "'");
}

void OptimizerConfig::validate() const {
  if (batch < 1) throw ConfigError("batch must be >= 1");
  if (init_points < 2) throw ConfigError("init_points must be >= 2");
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (acquisitions.empty()) throw ConfigError("acquisition set must not be empty");
  if (inner_population < 4) throw ConfigError("inner_population must be >= 4");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (gp_max_points < 2) throw ConfigError("gp_max_points must be >= 2");
  if (!(de_f > 0.0) || !(de_cr >= 0.0 && de_cr <= 1.0)) throw ConfigError("de_f must be > 0 and de_cr in [0,1]");
}

void OptimizerConfig::set(std::string_view key, std::string_view value) {
  const std::string k = text::to_lower(text::trim(key));
  const std::string v(text::trim(value));
  auto as_size = [&] {
    try {
      std::size_t pos = 0;
      const auto n = std::stoull(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return static_cast<std::size_t>(n);
    } catch (const std::logic_error&) {
      throw ConfigError("optimizer." + k + ": expected a non-negative integer, got '" + v + "'");
    }
  };
  auto as_double = [&] {
    try {
      return std::stod(v);
    } catch (const std::logic_error&) {
      throw ConfigError("optimizer." + k + ": expected a number, got '" + v + "'");
    }
  };
  if (k == "algorithm") algorithm = algorithm_from_string(v);
  else if (k == "max_iterations") max_iterations = as_size();
  else if (k == "batch") batch = as_size();
  else if (k == "init_points") init_points = as_size();
  else if (k == "seed") seed = as_size();
  else if (k == "inner_population") inner_population = as_size();
  else if (k == "inner_generations") inner_generations = as_size();
  else if (k == "workers") workers = as_size();
  else if (k == "gp_max_points") gp_max_points = as_size();
  else if (k == "gp_restarts") gp_restarts = as_size();
  else if (k == "gp_max_evaluations") gp_max_evaluations = as_size();
  else if (k == "resample_attempts") resample_attempts = as_size();
  else if (k == "de_f") de_f = as_double();
  else if (k == "de_cr") de_cr = as_double();
  else if (k == "stop_on_pass") {
    const auto b = text::to_lower(v);
    if (b == "true" || b == "1" || b == "yes") stop_on_pass = true;
    else if (b == "false" || b == "0" || b == "no") stop_on_pass = false;
    else throw ConfigError("optimizer.stop_on_pass: expected true/false, got '" + v + "'");
  } else if (k == "acquisitions") {
    acquisitions.clear();
    for (const auto& a : text::split(v, ',')) {
      if (!text::trim(a).empty()) acquisitions.push_back(acquisition_from_string(text::trim(a)));
    }
  } else {
    throw ConfigError("unknown optimizer key '" + k + "'");
  }
}

OptimizerConfig OptimizerConfig::parse(std::string_view source) { return parse(source, OptimizerConfig{}); }

OptimizerConfig OptimizerConfig::parse(std::string_view source, OptimizerConfig base) {
  const auto lines = text::lines(source);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto l = text::trim(lines[i]);
    if (l.empty() || l.front() == '#') continue;
    const auto eq = l.find('=');
    if (eq == std::string_view::npos) throw ParseError(i + 1, "expected 'key = value'");
    base.set(l.substr(0, eq), l.substr(eq + 1));
  }
  base.validate();
  return base;
}

std::string OptimizerConfig::to_text() const {
  std::vector<std::string> acq;
  for (auto a : acquisitions) acq.push_back(opt::to_string(a));
  return fmt::format(
      "algorithm = {}\nmax_iterations = {}\nbatch = {}\ninit_points = {}\nseed = {}\nacquisitions = {}\n"
      "inner_population = {}\ninner_generations = {}\nstop_on_pass = {}\nworkers = {}\ngp_max_points = {}\n"
      "gp_restarts = {}\ngp_max_evaluations = {}\nresample_attempts = {}\nde_f = {}\nde_cr = {}\n",
      opt::to_string(algorithm), max_iterations, batch, init_points, seed, text::join(acq, ","), inner_population,
      inner_generations, stop_on_pass ? "true" : "false", workers, gp_max_points, gp_restarts, gp_max_evaluations,
      resample_attempts, de_f, de_cr);
}

namespace {

constexpr double kLogOffset = 1e-4;

/// Training subset: every usable point when under the cap, otherwise the best half plus an even stride of the rest.
std::vector<std::size_t> training_indices(const std::vector<double>& y, std::size_t cap) {
  std::vector<std::size_t> idx(y.size());
  std::iota(idx.begin(), idx.end(), 0);
  if (y.size() <= cap) return idx;
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return y[a] < y[b]; });
  const std::size_t keep = cap / 2;
  std::vector<std::size_t> out(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep));
  const std::size_t rest = idx.size() - keep;
  const std::size_t want = cap - keep;
  for (std::size_t j = 0; j < want; ++j) out.push_back(idx[keep + j * rest / want]);
  std::sort(out.begin(), out.end());
  return out;
}

bool near_any(const Point& p, const std::vector<Point>& set) {
  return std::any_of(set.begin(), set.end(), [&](const Point& q) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (std::fabs(p[i] - q[i]) > 1e-9) return false;
    }
    return true;
  });
}

}  // namespace

RunRecord run_mace(const space::PrunedSpace& ps, const eval::Evaluator& evaluator, const ObjectiveSpec& spec,
                   const OptimizerConfig& cfg) {
  detail::RunState state(ps, evaluator, spec, cfg, "mace");
  Rng rng(cfg.seed);
  state.initial_design(rng);
  const std::size_t d = ps.dim();
  GpHyper hyper;
  bool have_hyper = false;

  for (std::size_t it = 1; it <= cfg.max_iterations && !state.should_stop(); ++it) {
    const auto& hist = state.record().history;
    std::vector<Point> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < hist.size(); ++i) {
      if (hist[i].result.failed || !std::isfinite(hist[i].result.fom)) continue;
      xs.push_back(state.unit_points()[i]);
      ys.push_back(std::log(hist[i].result.fom + kLogOffset));
    }
    const auto sel = training_indices(ys, cfg.gp_max_points);
    std::vector<Point> tx;
    std::vector<double> ty;
    for (auto i : sel) {
      tx.push_back(xs[i]);
      ty.push_back(ys[i]);
    }
    const auto [lo, hi] = std::minmax_element(ty.begin(), ty.end());
    const bool degenerate = d == 0 || ty.size() < 2 || *hi - *lo < 1e-12;

    std::vector<Point> batch;
    if (!degenerate) {
      GaussianProcess gp;
      GpOptions go;
      go.restarts = cfg.gp_restarts;
      go.max_evaluations = cfg.gp_max_evaluations;
      gp.fit(tx, ty, go, rng, have_hyper ? &hyper : nullptr);
      hyper = gp.hyper();
      have_hyper = true;

      const double best = *lo;
      const double kappa = lcb_kappa(d, it);
      const auto acqs = cfg.acquisitions;
      MultiObjective objective = [&](std::span<const double> u) {
        const auto p = gp.predict(u);
        const double s = std::sqrt(p.variance);
        std::vector<double> o;
        o.reserve(acqs.size());
        for (auto a : acqs) {
          switch (a) {
            case Acquisition::lcb: o.push_back(lower_confidence_bound(p.mean, s, kappa)); break;
            case Acquisition::ei: o.push_back(-std::log(expected_improvement(p.mean, s, best) + 1e-300)); break;
            case Acquisition::pi: o.push_back(-std::log(probability_of_improvement(p.mean, s, best) + 1e-300)); break;
          }
        }
        return o;
      };

      std::vector<std::size_t> order(ty.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return ty[a] < ty[b]; });
      std::vector<Point> seeds;
      for (std::size_t i = 0; i < std::min<std::size_t>(10, order.size()); ++i) seeds.push_back(tx[order[i]]);

      NsgaOptions no;
      no.population = cfg.inner_population;
      no.generations = cfg.inner_generations;
      const auto front = nsga2(objective, d, no, seeds, rng);
      for (auto i : kmeans_select(front.points, cfg.batch, rng)) batch.push_back(front.points[i]);
    }

    std::vector<Point> chosen;
    for (auto& u : batch) {
      Point p = state.repair(std::move(u), rng);
      if (d > 0 && (near_any(p, state.unit_points()) || near_any(p, chosen))) p = state.feasible_unit_point(rng);
      chosen.push_back(std::move(p));
    }
    while (chosen.size() < cfg.batch) chosen.push_back(state.feasible_unit_point(rng));
    state.evaluate(chosen, it);
    state.finish_iteration(it);
  }
  return state.finish();
}

RunRecord run(const space::PrunedSpace& ps, const eval::Evaluator& evaluator, const ObjectiveSpec& spec,
              const OptimizerConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::mace: return run_mace(ps, evaluator, spec, cfg);
    case Algorithm::random: return run_random(ps, evaluator, spec, cfg);
    case Algorithm::de: return run_de(ps, evaluator, spec, cfg);
  }
  throw ConfigError("unknown algorithm");
}

}  // namespace sizekit::opt
