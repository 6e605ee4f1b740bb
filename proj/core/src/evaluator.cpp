#include "sizekit/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "sizekit/errors.hpp"
#include "sizekit/text.hpp"

namespace sizekit::eval {

void check_metrics(const Evaluator& evaluator, const opt::ObjectiveSpec& spec) {
  const auto produced = evaluator.metric_names();
  const std::set<std::string> have(produced.begin(), produced.end());
  std::vector<std::string> missing;
  for (const auto& m : spec.metrics) {
    if (!have.count(m.name)) missing.push_back(m.name);
  }
  if (!missing.empty()) {
    throw ConfigError("evaluator '" + evaluator.name() + "' does not produce: " + text::join(missing, ", "));
  }
}

std::vector<opt::EvalResult> evaluate_batch(const Evaluator& evaluator, const opt::ObjectiveSpec& spec,
                                            const space::PrunedSpace& ps,
                                            const std::vector<std::vector<double>>& points, std::size_t workers) {
  std::vector<opt::EvalResult> results(points.size());
  auto run_one = [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    auto m = evaluator.evaluate(ps.expand(points[i]));
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    auto r = opt::score(spec, m, elapsed);
    if (!r.failed) {
      if (const double pen = ps.infeasibility(points[i]); pen > 0.0) {
        r.fom += pen;
        r.feasible = false;
      }
    }
    results[i] = std::move(r);
  };

  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(points.size(), 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < points.size(); ++i) run_one(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < points.size(); i = next++) {
        try {
          run_one(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
  return results;
}

}  // namespace sizekit::eval
