#include "sizekit/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "sizekit/errors.hpp"

namespace sizekit::opt {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> start,
                             double step, std::size_t max_evaluations) {
  const std::size_t n = start.size();
  NelderMeadResult res;
  std::vector<std::vector<double>> simplex(n + 1, start);
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
  for (std::size_t i = 0; i <= n; ++i) {
    values[i] = f(simplex[i]);
    ++res.evaluations;
  }
  std::vector<std::size_t> order(n + 1);
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    return f(x);
  };
  while (res.evaluations < max_evaluations && n > 0) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
    if (std::fabs(values[worst] - values[best]) < 1e-10) break;
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);
    }
    auto along = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j) x[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
      return x;
    };
    auto reflected = along(-1.0);
    const double fr = eval(reflected);
    if (fr < values[best]) {
      auto expanded = along(-2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[worst] = std::move(expanded);
        values[worst] = fe;
      } else {
        simplex[worst] = std::move(reflected);
        values[worst] = fr;
      }
    } else if (fr < values[second]) {
      simplex[worst] = std::move(reflected);
      values[worst] = fr;
    } else {
      auto contracted = along(fr < values[worst] ? -0.5 : 0.5);
      const double fc = eval(contracted);
      if (fc < std::min(fr, values[worst])) {
        simplex[worst] = std::move(contracted);
        values[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t j = 0; j < n; ++j) simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
          values[i] = eval(simplex[i]);
        }
      }
    }
  }
  const auto it = std::min_element(values.begin(), values.end());
  res.x = simplex[static_cast<std::size_t>(it - values.begin())];
  res.value = *it;
  return res;
}

struct GaussianProcess::Impl {
  Eigen::MatrixXd x;  // n x d
  Eigen::VectorXd y;  // standardized
  double y_mean = 0.0;
  double y_scale = 1.0;
  GpHyper hyper;
  double jitter = 1e-8;
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::VectorXd alpha;
  bool trained = false;

  Eigen::MatrixXd kernel(const GpHyper& h) const {
    const auto n = x.rows();
    Eigen::MatrixXd scaled = x;
    for (Eigen::Index j = 0; j < x.cols(); ++j) scaled.col(j) /= h.lengthscales[static_cast<std::size_t>(j)];
    const Eigen::VectorXd sq = scaled.rowwise().squaredNorm();
    Eigen::MatrixXd k = -2.0 * scaled * scaled.transpose();
    k.colwise() += sq;
    k.rowwise() += sq.transpose();
    k = (-0.5 * k.array().max(0.0)).exp() * h.signal_variance;
    (void)n;
    return k;
  }

  /// Factorizes K + jitter I, growing the jitter when the matrix is numerically indefinite.
  bool factor(const GpHyper& h, Eigen::LLT<Eigen::MatrixXd>& out, double& used_jitter) const {
    Eigen::MatrixXd k = kernel(h);
    double j = jitter;
    for (int attempt = 0; attempt < 6; ++attempt, j *= 10.0) {
      Eigen::MatrixXd kj = k;
      kj.diagonal().array() += j;
      out.compute(kj);
      if (out.info() == Eigen::Success) {
        used_jitter = j;
        return true;
      }
    }
    return false;
  }

  double lml(const GpHyper& h) const {
    Eigen::LLT<Eigen::MatrixXd> l;
    double j = 0.0;
    if (!factor(h, l, j)) return -std::numeric_limits<double>::infinity();
    const Eigen::VectorXd a = l.solve(y);
    const Eigen::MatrixXd& m = l.matrixLLT();
    const double logdet = 2.0 * m.diagonal().array().log().sum();
    return -0.5 * y.dot(a) - 0.5 * logdet - 0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi);
  }

  void set_data(const std::vector<Point>& xs, const std::vector<double>& ys) {
    if (xs.empty() || xs.size() != ys.size()) throw Error("gp: need matching non-empty x and y");
    const auto n = static_cast<Eigen::Index>(xs.size());
    const auto d = static_cast<Eigen::Index>(xs[0].size());
    x.resize(n, d);
    y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) x(i, j) = xs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    const double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double var = 0.0;
    for (double v : ys) var += (v - mean) * (v - mean);
    var /= static_cast<double>(ys.size());
    y_mean = mean;
    y_scale = var > 0.0 ? std::sqrt(var) : 1.0;
    for (Eigen::Index i = 0; i < n; ++i) y(i) = (ys[static_cast<std::size_t>(i)] - y_mean) / y_scale;
  }

  void finalize() {
    double used = jitter;
    if (!factor(hyper, llt, used)) throw Error("gp: kernel matrix is not positive definite");
    alpha = llt.solve(y);
    // Iterative refinement against the unjittered K so the mean interpolates the data;
    // the jittered factor is only the preconditioner.
    const Eigen::MatrixXd k = kernel(hyper);
    for (int it = 0; it < 10; ++it) {
      const Eigen::VectorXd r = y - k * alpha;
      if (r.cwiseAbs().maxCoeff() <= 1e-12) break;
      alpha += llt.solve(r);
    }
    trained = true;
  }
};

GaussianProcess::GaussianProcess() : impl_(std::make_unique<Impl>()) {}
GaussianProcess::~GaussianProcess() = default;
GaussianProcess::GaussianProcess(GaussianProcess&&) noexcept = default;
GaussianProcess& GaussianProcess::operator=(GaussianProcess&&) noexcept = default;

void GaussianProcess::condition(const std::vector<Point>& x, const std::vector<double>& y, const GpHyper& hyper,
                                double jitter) {
  impl_->set_data(x, y);
  if (hyper.lengthscales.size() != static_cast<std::size_t>(impl_->x.cols())) {
    throw Error("gp: lengthscale count does not match input dimension");
  }
  impl_->hyper = hyper;
  impl_->jitter = jitter;
  impl_->finalize();
}

void GaussianProcess::fit(const std::vector<Point>& x, const std::vector<double>& y, const GpOptions& options,
                          Rng& rng, const GpHyper* warm_start) {
  impl_->set_data(x, y);
  impl_->jitter = options.jitter;
  const std::size_t d = static_cast<std::size_t>(impl_->x.cols());
  const double lo_l = std::log(options.min_lengthscale), hi_l = std::log(options.max_lengthscale);
  const double lo_s = std::log(options.min_signal), hi_s = std::log(options.max_signal);

  auto decode = [&](const std::vector<double>& theta) {
    GpHyper h;
    h.lengthscales.resize(d);
    for (std::size_t j = 0; j < d; ++j) h.lengthscales[j] = std::exp(std::clamp(theta[j], lo_l, hi_l));
    h.signal_variance = std::exp(std::clamp(theta[d], lo_s, hi_s));
    return h;
  };
  auto objective = [&](const std::vector<double>& theta) {
    double penalty = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      penalty += std::pow(std::max(0.0, theta[j] - hi_l), 2) + std::pow(std::max(0.0, lo_l - theta[j]), 2);
    }
    penalty += std::pow(std::max(0.0, theta[d] - hi_s), 2) + std::pow(std::max(0.0, lo_s - theta[d]), 2);
    const double v = -impl_->lml(decode(theta));
    return std::isfinite(v) ? v + penalty : 1e300;
  };

  std::vector<double> best_theta;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < std::max<std::size_t>(options.restarts, 1); ++r) {
    std::vector<double> start(d + 1);
    if (r == 0 && warm_start && warm_start->lengthscales.size() == d) {
      for (std::size_t j = 0; j < d; ++j) start[j] = std::log(warm_start->lengthscales[j]);
      start[d] = std::log(warm_start->signal_variance);
    } else if (r == 0) {
      for (std::size_t j = 0; j < d; ++j) start[j] = std::log(0.5 * std::sqrt(static_cast<double>(std::max<std::size_t>(d, 1))));
      start[d] = 0.0;
    } else {
      for (std::size_t j = 0; j < d; ++j) start[j] = rng.uniform(std::log(0.05), std::log(5.0));
      start[d] = rng.uniform(-1.0, 1.0);
    }
    const auto res = nelder_mead(objective, start, 0.5, options.max_evaluations);
    if (res.value < best_value) {
      best_value = res.value;
      best_theta = res.x;
    }
  }
  impl_->hyper = decode(best_theta);
  impl_->finalize();
}

GpPrediction GaussianProcess::predict(std::span<const double> xq) const {
  if (!impl_->trained) throw Error("gp: predict before fit");
  const auto& m = *impl_;
  const auto n = m.x.rows();
  const auto d = m.x.cols();
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double t = (m.x(i, j) - xq[static_cast<std::size_t>(j)]) / m.hyper.lengthscales[static_cast<std::size_t>(j)];
      s += t * t;
    }
    k(i) = m.hyper.signal_variance * std::exp(-0.5 * s);
  }
  GpPrediction p;
  p.mean = m.y_mean + m.y_scale * k.dot(m.alpha);
  const Eigen::VectorXd v = m.llt.matrixL().solve(k);
  const double var = std::max(0.0, m.hyper.signal_variance - v.squaredNorm());
  p.variance = var * m.y_scale * m.y_scale;
  return p;
}

double GaussianProcess::log_marginal_likelihood(const GpHyper& hyper) const { return impl_->lml(hyper); }
const GpHyper& GaussianProcess::hyper() const { return impl_->hyper; }
bool GaussianProcess::trained() const { return impl_->trained; }
std::size_t GaussianProcess::size() const { return static_cast<std::size_t>(impl_->x.rows()); }

}  // namespace sizekit::opt
