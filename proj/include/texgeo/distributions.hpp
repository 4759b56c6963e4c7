#pragma once

// Gamma (scale-shape) and Weibull (scale-shape) families: densities,
// moments, seeded sampling and maximum-likelihood estimation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "texgeo/errors.hpp"
#include "texgeo/specfun.hpp"

namespace texgeo {

enum class Family { Gamma, Weibull };

inline const char* to_string(Family f) { return f == Family::Gamma ? "gamma" : "weibull"; }

inline Family family_from_string(const std::string& s) {
  if (s == "gamma" || s == "Gamma") return Family::Gamma;
  if (s == "weibull" || s == "Weibull") return Family::Weibull;
  throw ConfigError("unknown distribution family '" + s + "'");
}

namespace detail {
inline void require_param(double v, const char* what) {
  if (!std::isfinite(v) || v <= 0.0)
    throw DomainError(std::string(what) + " must be positive and finite, got " + std::to_string(v));
}
}  // namespace detail

/// Gamma distribution in the scale (alpha) / shape (beta) parametrization.
struct GammaParams {
  double alpha;
  double beta;

  GammaParams(double scale, double shape) : alpha(scale), beta(shape) {
    detail::require_param(alpha, "gamma scale");
    detail::require_param(beta, "gamma shape");
  }
  bool operator==(const GammaParams&) const = default;
};

/// Weibull distribution in the scale (lambda) / shape (mu) parametrization.
struct WeibullParams {
  double lambda;
  double mu;

  WeibullParams(double scale, double shape) : lambda(scale), mu(shape) {
    detail::require_param(lambda, "weibull scale");
    detail::require_param(mu, "weibull shape");
  }
  bool operator==(const WeibullParams&) const = default;
};

struct Moments {
  double mean;
  double variance;
};

/// Observed positive data. Zeros are rejected: ln(x) enters both likelihoods.
class Sample {
 public:
  explicit Sample(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw DomainError("sample must contain at least one value");
    for (double v : values_)
      if (!std::isfinite(v) || v <= 0.0)
        throw DomainError("sample values must be positive and finite, got " + std::to_string(v));
  }

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Densities and moments

inline double gamma_log_pdf(double x, const GammaParams& p) {
  if (!(x > 0.0)) throw DomainError("gamma_pdf: x must be positive");
  return (p.beta - 1.0) * std::log(x) - x / p.alpha - p.beta * std::log(p.alpha) - log_gamma(p.beta);
}

inline double gamma_pdf(double x, const GammaParams& p) { return std::exp(gamma_log_pdf(x, p)); }

inline double weibull_log_pdf(double x, const WeibullParams& p) {
  if (!(x > 0.0)) throw DomainError("weibull_pdf: x must be positive");
  const double z = x / p.lambda;
  return std::log(p.mu / p.lambda) + (p.mu - 1.0) * std::log(z) - std::pow(z, p.mu);
}

inline double weibull_pdf(double x, const WeibullParams& p) { return std::exp(weibull_log_pdf(x, p)); }

inline Moments gamma_moments(const GammaParams& p) {
  return {p.alpha * p.beta, p.beta * p.alpha * p.alpha};
}

inline Moments weibull_moments(const WeibullParams& p) {
  const double g1 = gamma_function(1.0 + 1.0 / p.mu);
  const double g2 = gamma_function(1.0 + 2.0 / p.mu);
  return {p.lambda * g1, p.lambda * p.lambda * (g2 - g1 * g1)};
}

// ---------------------------------------------------------------------------
// Sampling. The generator is always an explicit seed; no shared state.

inline Sample gamma_sample(const GammaParams& p, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DomainError("gamma_sample: n must be at least 1");
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> dist(p.beta, p.alpha);
  std::vector<double> out(n);
  for (auto& v : out) {
    do {
      v = dist(rng);
    } while (v <= 0.0);  // shape < 1 can underflow to exactly zero
  }
  return Sample(std::move(out));
}

/// Inverse CDF of the Weibull law evaluated at a survival probability u in (0, 1].
inline double weibull_from_uniform(double u, const WeibullParams& p) {
  return p.lambda * std::pow(-std::log(u), 1.0 / p.mu);
}

inline Sample weibull_sample(const WeibullParams& p, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DomainError("weibull_sample: n must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) {
    double x = 0.0;
    do {
      // 1 - canonical lies in (0, 1]; u = 1 yields x = 0 and is redrawn.
      const double u = 1.0 - std::generate_canonical<double, 53>(rng);
      x = weibull_from_uniform(u, p);
    } while (!(x > 0.0) || !std::isfinite(x));
    v = x;
  }
  return Sample(std::move(out));
}

// ---------------------------------------------------------------------------
// Maximum likelihood

struct MleOptions {
  int max_iterations = 200;
  double tolerance = 1e-10;
};

namespace detail {

struct LogStats {
  double mean_log;
  double var_log;
};

inline LogStats log_stats(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += std::log(x);
  mean /= n;
  double var = 0.0;
  for (double x : xs) {
    const double d = std::log(x) - mean;
    var += d * d;
  }
  return {mean, var / n};
}

inline constexpr double kDegenerateLogVariance = 1e-20;

inline void require_fit_size(const Sample& s) {
  if (s.size() < 2) throw DegenerateSample("maximum likelihood needs at least two observations");
}

}  // namespace detail

/// Residual of the Gamma shape equation ln b - ψ(b) = ln(mean) - mean(ln x).
inline double gamma_shape_residual(const Sample& s, double beta) {
  const auto xs = s.values();
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  const auto st = detail::log_stats(xs);
  return (std::log(beta) - digamma(beta)) - (std::log(mean) - st.mean_log);
}

inline GammaParams gamma_mle(const Sample& s, const MleOptions& opt = {}) {
  detail::require_fit_size(s);
  const auto xs = s.values();
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const auto st = detail::log_stats(xs);
  const double target = std::log(mean) - st.mean_log;
  if (st.var_log < detail::kDegenerateLogVariance || !(target > 0.0))
    throw DegenerateSample("gamma_mle: sample has (numerically) zero log-variance");

  // Closed-form starting point, then Newton on f(b) = ln b - ψ(b) - target.
  // f is convex and decreasing, so a step that would leave b > 0 is halved.
  double beta = (3.0 - target + std::sqrt((target - 3.0) * (target - 3.0) + 24.0 * target)) / (12.0 * target);
  bool converged = false;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const double f = std::log(beta) - digamma(beta) - target;
    const double df = 1.0 / beta - trigamma(beta);
    double step = f / df;
    double next = beta - step;
    while (next <= 0.0) {
      step *= 0.5;
      next = beta - step;
    }
    beta = next;
    if (std::abs(step) <= 1e-15 * beta ||
        (std::abs(f) <= opt.tolerance * 1e-3 && std::abs(step) <= 1e-12 * beta)) {
      converged = true;
      break;
    }
  }
  if (!converged || !std::isfinite(beta))
    throw ConvergenceError("gamma_mle: shape iteration did not converge");
  if (std::abs(std::log(beta) - digamma(beta) - target) > opt.tolerance)
    throw ConvergenceError("gamma_mle: shape residual above tolerance");
  return GammaParams(mean / beta, beta);
}

/// Residual of the Weibull shape equation
/// 1/mu = Σ x^mu ln x / Σ x^mu - mean(ln x), returned as rhs - 1/mu.
inline double weibull_shape_residual(const Sample& s, double mu) {
  const auto xs = s.values();
  const auto st = detail::log_stats(xs);
  double ymax = -INFINITY;
  for (double x : xs) ymax = std::max(ymax, std::log(x) - st.mean_log);
  double sw = 0.0, swy = 0.0;
  for (double x : xs) {
    const double y = std::log(x) - st.mean_log;
    const double w = std::exp(mu * (y - ymax));
    sw += w;
    swy += w * y;
  }
  return swy / sw - 1.0 / mu;
}

inline WeibullParams weibull_mle(const Sample& s, const MleOptions& opt = {}) {
  detail::require_fit_size(s);
  const auto xs = s.values();
  const auto st = detail::log_stats(xs);
  if (st.var_log < detail::kDegenerateLogVariance)
    throw DegenerateSample("weibull_mle: sample has (numerically) zero log-variance");

  // Centered logs y keep x^mu in range: weights exp(mu (y - ymax)).
  std::vector<double> y(xs.size());
  double ymax = -INFINITY;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    y[i] = std::log(xs[i]) - st.mean_log;
    ymax = std::max(ymax, y[i]);
  }

  // h(mu) = E_w[y] - 1/mu is strictly increasing; h' = Var_w[y] + 1/mu^2.
  struct Eval {
    double h, dh, log_mean_w;
  };
  auto eval = [&](double mu) {
    double sw = 0.0, swy = 0.0, swyy = 0.0;
    for (double yi : y) {
      const double w = std::exp(mu * (yi - ymax));
      sw += w;
      swy += w * yi;
      swyy += w * yi * yi;
    }
    const double m1 = swy / sw;
    const double var = std::max(0.0, swyy / sw - m1 * m1);
    return Eval{m1 - 1.0 / mu, var + 1.0 / (mu * mu),
                mu * ymax + std::log(sw / static_cast<double>(y.size()))};
  };

  double mu = std::numbers::pi / (std::sqrt(6.0) * std::sqrt(st.var_log));
  double lo = 0.0, hi = INFINITY;
  bool converged = false;
  Eval e = eval(mu);
  for (int it = 0; it < opt.max_iterations; ++it) {
    if (e.h < 0.0)
      lo = mu;
    else
      hi = mu;
    double next = mu - e.h / e.dh;
    // Bisection fallback whenever Newton leaves the bracket.
    if (!(next > lo && next < hi)) next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * mu;
    const double step = next - mu;
    mu = next;
    e = eval(mu);
    if (std::abs(step) <= 1e-15 * mu || (std::abs(e.h) <= opt.tolerance * 1e-3 && std::abs(step) <= 1e-12 * mu)) {
      converged = true;
      break;
    }
  }
  if (!converged || !std::isfinite(mu)) throw ConvergenceError("weibull_mle: shape iteration did not converge");
  if (std::abs(e.h) > opt.tolerance) throw ConvergenceError("weibull_mle: shape residual above tolerance");
  // lambda^mu = mean(x^mu)  =>  ln lambda = mean(ln x) + ln(mean(exp(mu y))) / mu
  const double lambda = std::exp(st.mean_log + e.log_mean_w / mu);
  return WeibullParams(lambda, mu);
}

}  // namespace texgeo
