#include "sizekit/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace sizekit::opt {

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Point Rng::unit_point(std::size_t dim) {
  Point p(dim);
  for (auto& v : p) v = uniform();
  return p;
}

std::vector<Point> latin_hypercube(std::size_t n, std::size_t dim, Rng& rng) {
  std::vector<Point> pts(n, Point(dim));
  std::vector<std::size_t> perm(n);
  for (std::size_t j = 0; j < dim; ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
    for (std::size_t i = 0; i < n; ++i) {
      pts[i][j] = (static_cast<double>(perm[i]) + rng.uniform()) / static_cast<double>(n);
    }
  }
  return pts;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

namespace {

bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
  bool strictly = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strictly = true;
  }
  return strictly;
}

std::vector<std::vector<std::size_t>> fronts_of(const std::vector<std::vector<double>>& obj) {
  const std::size_t n = obj.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> count(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      if (dominates(obj[p], obj[q])) {
        dominated[p].push_back(q);
        ++count[q];
      } else if (dominates(obj[q], obj[p])) {
        dominated[q].push_back(p);
        ++count[p];
      }
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (count[p] == 0) fronts[0].push_back(p);
  }
  for (std::size_t f = 0; !fronts[f].empty(); ++f) {
    std::vector<std::size_t> next;
    for (auto p : fronts[f]) {
      for (auto q : dominated[p]) {
        if (--count[q] == 0) next.push_back(q);
      }
    }
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();
  return fronts;
}

void crowding(const std::vector<std::vector<double>>& obj, const std::vector<std::size_t>& front,
              std::vector<double>& dist) {
  if (front.empty()) return;
  const std::size_t m = obj[front[0]].size();
  for (auto i : front) dist[i] = 0.0;
  std::vector<std::size_t> order = front;
  for (std::size_t k = 0; k < m; ++k) {
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return obj[a][k] < obj[b][k]; });
    const double span = obj[order.back()][k] - obj[order.front()][k];
    dist[order.front()] = dist[order.back()] = std::numeric_limits<double>::infinity();
    if (!(span > 0.0) || !std::isfinite(span)) continue;
    for (std::size_t i = 1; i + 1 < order.size(); ++i) {
      dist[order[i]] += (obj[order[i + 1]][k] - obj[order[i - 1]][k]) / span;
    }
  }
}

void sbx(Point& a, Point& b, double eta, Rng& rng) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (rng.uniform() > 0.5 || std::fabs(a[i] - b[i]) < 1e-14) continue;
    const double u = rng.uniform();
    const double beta = u <= 0.5 ? std::pow(2.0 * u, 1.0 / (eta + 1.0))
                                 : std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta + 1.0));
    const double c1 = 0.5 * ((1.0 + beta) * a[i] + (1.0 - beta) * b[i]);
    const double c2 = 0.5 * ((1.0 - beta) * a[i] + (1.0 + beta) * b[i]);
    a[i] = std::clamp(c1, 0.0, 1.0);
    b[i] = std::clamp(c2, 0.0, 1.0);
  }
}

void polynomial_mutation(Point& p, double eta, double rate, Rng& rng) {
  for (auto& v : p) {
    if (rng.uniform() >= rate) continue;
    const double u = rng.uniform();
    const double delta = u < 0.5 ? std::pow(2.0 * u, 1.0 / (eta + 1.0)) - 1.0
                                 : 1.0 - std::pow(2.0 * (1.0 - u), 1.0 / (eta + 1.0));
    v = std::clamp(v + delta, 0.0, 1.0);
  }
}

}  // namespace

std::vector<std::size_t> pareto_ranks(const std::vector<std::vector<double>>& objectives) {
  std::vector<std::size_t> rank(objectives.size(), 0);
  const auto fronts = fronts_of(objectives);
  for (std::size_t f = 0; f < fronts.size(); ++f) {
    for (auto i : fronts[f]) rank[i] = f;
  }
  return rank;
}

ParetoSet nsga2(const MultiObjective& f, std::size_t dim, const NsgaOptions& options, const std::vector<Point>& seeds,
                Rng& rng) {
  const std::size_t n = std::max<std::size_t>(options.population, 4);
  std::vector<Point> pop;
  for (const auto& s : seeds) {
    if (pop.size() >= n) break;
    Point p = s;
    for (auto& v : p) v = std::clamp(v, 0.0, 1.0);
    pop.push_back(std::move(p));
  }
  while (pop.size() < n) pop.push_back(rng.unit_point(dim));
  std::vector<std::vector<double>> obj;
  obj.reserve(2 * n);
  for (const auto& p : pop) obj.push_back(f(p));

  const double mutation_rate = dim > 0 ? 1.0 / static_cast<double>(dim) : 0.0;
  std::vector<std::size_t> rank(n);
  std::vector<double> dist(n);
  auto assign = [&](const std::vector<std::vector<double>>& o) {
    rank.assign(o.size(), 0);
    dist.assign(o.size(), 0.0);
    const auto fronts = fronts_of(o);
    for (std::size_t fi = 0; fi < fronts.size(); ++fi) {
      for (auto i : fronts[fi]) rank[i] = fi;
      crowding(o, fronts[fi], dist);
    }
    return fronts;
  };
  auto better = [&](std::size_t a, std::size_t b) {
    if (rank[a] != rank[b]) return rank[a] < rank[b];
    return dist[a] > dist[b];
  };
  assign(obj);

  for (std::size_t gen = 0; gen < options.generations; ++gen) {
    auto tournament = [&] {
      const std::size_t a = rng.index(n), b = rng.index(n);
      return better(a, b) ? a : b;
    };
    std::vector<Point> children;
    children.reserve(n);
    while (children.size() < n) {
      Point a = pop[tournament()], b = pop[tournament()];
      if (rng.uniform() < options.crossover_probability) sbx(a, b, options.eta_crossover, rng);
      polynomial_mutation(a, options.eta_mutation, mutation_rate, rng);
      polynomial_mutation(b, options.eta_mutation, mutation_rate, rng);
      children.push_back(std::move(a));
      if (children.size() < n) children.push_back(std::move(b));
    }
    for (auto& c : children) {
      obj.push_back(f(c));
      pop.push_back(std::move(c));
    }
    const auto fronts = assign(obj);
    std::vector<std::size_t> keep;
    keep.reserve(n);
    for (const auto& front : fronts) {
      if (keep.size() + front.size() <= n) {
        keep.insert(keep.end(), front.begin(), front.end());
        continue;
      }
      std::vector<std::size_t> rest = front;
      std::sort(rest.begin(), rest.end(), [&](auto a, auto b) { return dist[a] > dist[b]; });
      keep.insert(keep.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(n - keep.size()));
      break;
    }
    std::vector<Point> next_pop;
    std::vector<std::vector<double>> next_obj;
    next_pop.reserve(2 * n);
    next_obj.reserve(2 * n);
    for (auto i : keep) {
      next_pop.push_back(std::move(pop[i]));
      next_obj.push_back(std::move(obj[i]));
    }
    pop = std::move(next_pop);
    obj = std::move(next_obj);
    assign(obj);
  }

  ParetoSet out;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (rank[i] != 0) continue;
    const bool dup = std::any_of(out.points.begin(), out.points.end(),
                                 [&](const Point& q) { return squared_distance(q, pop[i]) < 1e-24; });
    if (dup) continue;
    out.points.push_back(pop[i]);
    out.objectives.push_back(obj[i]);
  }
  return out;
}

std::vector<std::size_t> kmeans_select(const std::vector<Point>& points, std::size_t k, Rng& rng) {
  std::vector<std::size_t> all(points.size());
  std::iota(all.begin(), all.end(), 0);
  if (points.size() <= k) return all;
  if (k == 0) return {};

  std::vector<Point> centers;
  centers.push_back(points[rng.index(points.size())]);
  std::vector<double> d2(points.size(), std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      d2[i] = std::min(d2[i], squared_distance(points[i], centers.back()));
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double r = rng.uniform() * total;
      for (pick = 0; pick + 1 < points.size(); ++pick) {
        r -= d2[pick];
        if (r < 0.0) break;
      }
    } else {
      pick = rng.index(points.size());
    }
    centers.push_back(points[pick]);
  }

  std::vector<std::size_t> label(points.size(), 0);
  for (int iter = 0; iter < 20; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      std::size_t best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = squared_distance(points[i], centers[c]);
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      if (label[i] != best) changed = true;
      label[i] = best;
    }
    if (!changed && iter > 0) break;
    for (std::size_t c = 0; c < k; ++c) {
      Point sum(points[0].size(), 0.0);
      std::size_t cnt = 0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (label[i] != c) continue;
        for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += points[i][j];
        ++cnt;
      }
      if (cnt == 0) continue;
      for (auto& v : sum) v /= static_cast<double>(cnt);
      centers[c] = std::move(sum);
    }
  }

  std::vector<std::size_t> chosen;
  std::vector<bool> used(points.size(), false);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t best = points.size();
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (used[i]) continue;
      const double d = squared_distance(points[i], centers[c]);
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    if (best == points.size()) break;
    used[best] = true;
    chosen.push_back(best);
  }
  return chosen;
}

}  // namespace sizekit::opt
