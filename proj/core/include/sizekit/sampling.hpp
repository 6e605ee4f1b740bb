#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace sizekit::opt {

using Point = std::vector<double>;

/// Seeded generator with platform-independent uniform and normal draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }
  double normal();
  Point unit_point(std::size_t dim);
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Latin hypercube sample of n points in [0,1]^dim.
std::vector<Point> latin_hypercube(std::size_t n, std::size_t dim, Rng& rng);

/// Objectives are minimized.
using MultiObjective = std::function<std::vector<double>(std::span<const double>)>;

struct NsgaOptions {
  std::size_t population = 100;
  std::size_t generations = 50;
  double eta_crossover = 20.0;
  double eta_mutation = 20.0;
  double crossover_probability = 0.9;
};

struct ParetoSet {
  std::vector<Point> points;
  std::vector<std::vector<double>> objectives;
};

/// Non-dominated sorting: rank of each objective vector (0 is the first front).
std::vector<std::size_t> pareto_ranks(const std::vector<std::vector<double>>& objectives);

/// NSGA-II over the unit cube. `seeds` (clamped) fill the initial population first.
/// Returns the first front of the final population with duplicate points removed.
ParetoSet nsga2(const MultiObjective& f, std::size_t dim, const NsgaOptions& options, const std::vector<Point>& seeds,
                Rng& rng);

/// Picks k diverse points: k-means (k-means++ seeding, Lloyd iterations) then the member nearest each centroid.
/// Returns indices into `points`; when points.size() <= k all indices are returned.
std::vector<std::size_t> kmeans_select(const std::vector<Point>& points, std::size_t k, Rng& rng);

double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace sizekit::opt
