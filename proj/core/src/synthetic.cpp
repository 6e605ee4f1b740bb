#include "sizekit/synthetic.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "sizekit/errors.hpp"

namespace sizekit::eval {

namespace {

Handle var(std::size_t i) { return Handle{fmt::format("x{}", i + 1), "X"}; }

double branin(double x1, double x2) {
  const double pi = std::numbers::pi;
  const double b = 5.1 / (4.0 * pi * pi), c = 5.0 / pi, t = 1.0 / (8.0 * pi);
  const double u = x2 - b * x1 * x1 + c * x1 - 6.0;
  return u * u + 10.0 * (1.0 - t) * std::cos(x1) + 10.0;
}

double hartmann3(std::span<const double> x) {
  static constexpr double alpha[4] = {1.0, 1.2, 3.0, 3.2};
  static constexpr double A[4][3] = {{3.0, 10, 30}, {0.1, 10, 35}, {3.0, 10, 30}, {0.1, 10, 35}};
  static constexpr double P[4][3] = {
      {0.3689, 0.1170, 0.2673}, {0.4699, 0.4387, 0.7470}, {0.1091, 0.8732, 0.5547}, {0.0381, 0.5743, 0.8828}};
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    double e = 0.0;
    for (int j = 0; j < 3; ++j) e += A[i][j] * (x[j] - P[i][j]) * (x[j] - P[i][j]);
    s += alpha[i] * std::exp(-e);
  }
  return -s;
}

/// Each pair (a, b) contributes S (a - b)^2 + ((a + b)/2 - c_k)^2 with centres spread over (0.3, 0.7).
double symmetric_valley(std::span<const double> x) {
  const std::size_t pairs = x.size() / 2;
  double s = 0.0;
  for (std::size_t k = 0; k < pairs; ++k) {
    const double a = x[2 * k], b = x[2 * k + 1];
    const double centre = pairs > 1 ? 0.3 + 0.4 * static_cast<double>(k) / static_cast<double>(pairs - 1) : 0.35;
    const double mid = 0.5 * (a + b) - centre;
    s += kValleySteepness * (a - b) * (a - b) + mid * mid;
  }
  return s;
}

}  // namespace

std::vector<std::string> synthetic_names() { return {"sphere", "branin", "hartmann3", "symmetric-valley"}; }

void check_synthetic(const std::string& name, std::size_t dim) {
  if (name == "sphere") {
    if (dim < 1) throw ConfigError("sphere needs dimension >= 1");
  } else if (name == "branin") {
    if (dim != 2) throw ConfigError("branin is 2-dimensional, got " + std::to_string(dim));
  } else if (name == "hartmann3") {
    if (dim != 3) throw ConfigError("hartmann3 is 3-dimensional, got " + std::to_string(dim));
  } else if (name == "symmetric-valley") {
    if (dim < 2 || dim % 2) throw ConfigError("symmetric-valley needs an even dimension >= 2");
  } else {
    throw ConfigError("unknown synthetic function '" + name + "'");
  }
}

double synthetic_value(const std::string& name, std::span<const double> x) {
  check_synthetic(name, x.size());
  if (name == "sphere") {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
  }
  if (name == "branin") return branin(x[0], x[1]);
  if (name == "hartmann3") return hartmann3(x);
  return symmetric_valley(x);
}

std::vector<Interval> synthetic_domain(const std::string& name, std::size_t dim) {
  check_synthetic(name, dim);
  if (name == "sphere") return std::vector<Interval>(dim, Interval{-5.12, 5.12});
  if (name == "branin") return {Interval{-5.0, 10.0}, Interval{0.0, 15.0}};
  return std::vector<Interval>(dim, Interval{0.0, 1.0});
}

space::ParameterSpace synthetic_space(const std::string& name, std::size_t dim) {
  auto dom = synthetic_domain(name, dim);
  std::vector<Handle> handles;
  for (std::size_t i = 0; i < dim; ++i) handles.push_back(var(i));
  // ParameterSpace needs lo > 0 only for log scales; synthetic boxes are linear.
  return space::ParameterSpace(handles, dom, std::vector<space::Scale>(dim, space::Scale::linear));
}

opt::Measurement eval_synthetic(const std::string& name, std::span<const double> x) {
  opt::Measurement m;
  m.metrics["f"] = synthetic_value(name, x);
  return m;
}

SyntheticEvaluator::SyntheticEvaluator(std::string function, std::size_t dim, double cost)
    : function_(std::move(function)), dim_(dim), cost_(cost) {
  check_synthetic(function_, dim_);
}

opt::Measurement SyntheticEvaluator::evaluate(const space::Assignment& a) const {
  std::vector<double> x(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    auto it = a.find(var(i));
    if (it == a.end()) throw EvaluationError("missing variable " + var(i).str());
    x[i] = it->second;
  }
  return eval_synthetic(function_, x);
}

void SyntheticEvaluator::check_space(const space::ParameterSpace& space) const {
  for (std::size_t i = 0; i < dim_; ++i) {
    if (std::find(space.handles().begin(), space.handles().end(), var(i)) == space.handles().end()) {
      throw ConfigError(name() + ": space lacks " + var(i).str());
    }
  }
}

}  // namespace sizekit::eval
