#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace sizekit::opt {

/// Acquisition functions for minimization. Each takes the posterior mean and standard deviation.
enum class Acquisition { lcb, ei, pi };

std::string to_string(Acquisition a);
Acquisition acquisition_from_string(std::string_view s);

double normal_pdf(double z);
double normal_cdf(double z);

/// E[max(best - f, 0)] for f ~ N(mean, sigma^2); equals max(best - mean, 0) when sigma == 0.
double expected_improvement(double mean, double sigma, double best);
/// P(f < best); a step function of the mean when sigma == 0.
double probability_of_improvement(double mean, double sigma, double best);
double lower_confidence_bound(double mean, double sigma, double kappa);

/// Exploration weight sqrt(2 log(d t^2 pi^2 / (6 delta))) for iteration t >= 1.
double lcb_kappa(std::size_t dim, std::size_t iteration, double delta = 0.05);

}  // namespace sizekit::opt
