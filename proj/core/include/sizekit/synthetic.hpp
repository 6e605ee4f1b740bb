#pragma once

#include <span>
#include <string>
#include <vector>

#include "sizekit/evaluator.hpp"

namespace sizekit::eval {

/// Synthetic test functions over named variables x1..xd (handle "X(xi)").
/// sphere: [-5.12, 5.12]^d, min 0 at the origin. branin: d = 2, min 0.397887.
/// hartmann3: d = 3, min -3.86278. symmetric-valley: [0, 1]^d with d even; coordinates pair up as
/// (x1,x2), (x3,x4), ... and the minimum 0 lies on x1 = x2, x3 = x4, ...
std::vector<std::string> synthetic_names();
/// Throws ConfigError for an unknown name or a dimension the function does not support.
void check_synthetic(const std::string& name, std::size_t dim);
double synthetic_value(const std::string& name, std::span<const double> x);
/// Native box of the function, per coordinate.
std::vector<Interval> synthetic_domain(const std::string& name, std::size_t dim);
/// Linear-scale space over the native box with handles X(x1)..X(xd).
space::ParameterSpace synthetic_space(const std::string& name, std::size_t dim);
/// Single-metric measurement {"f": value}.
opt::Measurement eval_synthetic(const std::string& name, std::span<const double> x);

/// Steepness of the symmetric valley across the x_{2k-1} = x_{2k} diagonal.
inline constexpr double kValleySteepness = 400.0;

class SyntheticEvaluator final : public Evaluator {
 public:
  SyntheticEvaluator(std::string function, std::size_t dim, double cost = 1.0);
  std::string name() const override { return "synthetic-" + function_; }
  std::vector<std::string> metric_names() const override { return {"f"}; }
  opt::Measurement evaluate(const space::Assignment& a) const override;
  double nominal_cost() const override { return cost_; }
  void check_space(const space::ParameterSpace& space) const override;

 private:
  std::string function_;
  std::size_t dim_;
  double cost_;
};

}  // namespace sizekit::eval
