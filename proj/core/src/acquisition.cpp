#include "sizekit/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sizekit/errors.hpp"
#include "sizekit/text.hpp"

namespace sizekit::opt {

std::string to_string(Acquisition a) {
  switch (a) {
    case Acquisition::lcb: return "lcb";
    case Acquisition::ei: return "ei";
    case Acquisition::pi: return "pi";
  }
  return "?";
}

Acquisition acquisition_from_string(std::string_view s) {
  const auto l = text::to_lower(s);
  if (l == "lcb" || l == "ucb") return Acquisition::lcb;
  if (l == "ei") return Acquisition::ei;
  if (l == "pi") return Acquisition::pi;
  throw ConfigError("unknown acquisition '" + std::string(s) + "'");
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double expected_improvement(double mean, double sigma, double best) {
  if (!(sigma > 0.0)) return std::max(best - mean, 0.0);
  const double z = (best - mean) / sigma;
  return std::max(0.0, (best - mean) * normal_cdf(z) + sigma * normal_pdf(z));
}

double probability_of_improvement(double mean, double sigma, double best) {
  if (!(sigma > 0.0)) return mean < best ? 1.0 : 0.0;
  return normal_cdf((best - mean) / sigma);
}

double lower_confidence_bound(double mean, double sigma, double kappa) { return mean - kappa * sigma; }

double lcb_kappa(std::size_t dim, std::size_t iteration, double delta) {
  const double d = static_cast<double>(std::max<std::size_t>(dim, 1));
  const double t = static_cast<double>(std::max<std::size_t>(iteration, 1));
  const double arg = d * t * t * std::numbers::pi * std::numbers::pi / (6.0 * delta);
  return std::sqrt(2.0 * std::log(std::max(arg, 1.0)));
}

}  // namespace sizekit::opt
