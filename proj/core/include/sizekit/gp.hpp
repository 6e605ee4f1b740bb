#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "sizekit/sampling.hpp"

namespace sizekit::opt {

/// Squared-exponential ARD kernel hyperparameters (on standardized targets).
struct GpHyper {
  std::vector<double> lengthscales;
  double signal_variance = 1.0;
};

struct GpOptions {
  /// Diagonal jitter added to the kernel matrix, in standardized target units.
  double jitter = 1e-8;
  std::size_t restarts = 3;
  std::size_t max_evaluations = 60;
  double min_lengthscale = 1e-2;
  double max_lengthscale = 20.0;
  double min_signal = 1e-2;
  double max_signal = 1e2;
};

struct GpPrediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Gaussian-process regression with a constant mean (the target average) and SE-ARD kernel.
class GaussianProcess {
 public:
  GaussianProcess();
  ~GaussianProcess();
  GaussianProcess(GaussianProcess&&) noexcept;
  GaussianProcess& operator=(GaussianProcess&&) noexcept;

  /// Fits hyperparameters by maximizing the log marginal likelihood with restarted Nelder-Mead.
  /// `warm_start` (if non-empty) seeds the first restart.
  void fit(const std::vector<Point>& x, const std::vector<double>& y, const GpOptions& options, Rng& rng,
           const GpHyper* warm_start = nullptr);
  /// Conditions on data with fixed hyperparameters.
  void condition(const std::vector<Point>& x, const std::vector<double>& y, const GpHyper& hyper,
                 double jitter = 1e-8);

  GpPrediction predict(std::span<const double> x) const;
  /// Log marginal likelihood of the standardized targets under `hyper`.
  double log_marginal_likelihood(const GpHyper& hyper) const;

  const GpHyper& hyper() const;
  bool trained() const;
  std::size_t size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Nelder-Mead minimizer on R^n, exposed for testing.
struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
};
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> start,
                             double step, std::size_t max_evaluations);

}  // namespace sizekit::opt
