#pragma once

// Kullback-Leibler divergences between members of one family: closed forms,
// a quadrature route that shares none of their algebra, and the symmetric
// divergence used for geodesic approximations.

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "texgeo/distributions.hpp"
#include "texgeo/manifold_point.hpp"
#include "texgeo/specfun.hpp"

namespace texgeo {

/// KL(p || q) for two Gamma laws, in nats.
inline double kld_gamma(const GammaParams& p, const GammaParams& q) {
  if (p == q) return 0.0;
  const double v = (p.beta - q.beta) * digamma(p.beta) - log_gamma(p.beta) + log_gamma(q.beta) +
                   q.beta * std::log(q.alpha / p.alpha) + p.beta * (p.alpha - q.alpha) / q.alpha;
  return std::max(v, 0.0);
}

/// KL(p || q) for two Weibull laws, in nats.
inline double kld_weibull(const WeibullParams& p, const WeibullParams& q) {
  if (p == q) return 0.0;
  const double v = std::log(p.mu) - p.mu * std::log(p.lambda) - std::log(q.mu) + q.mu * std::log(q.lambda) +
                   (p.mu - q.mu) * (std::log(p.lambda) - euler_gamma / p.mu) +
                   std::exp(q.mu * std::log(p.lambda / q.lambda) + log_gamma(q.mu / p.mu + 1.0)) - 1.0;
  return std::max(v, 0.0);
}

inline double kld(const ManifoldPoint& p, const ManifoldPoint& q) {
  require_same_family(p, q);
  return p.family == Family::Gamma ? kld_gamma(p.gamma(), q.gamma()) : kld_weibull(p.weibull(), q.weibull());
}

/// Symmetric KLD: the mean of both directions.
inline double skld(const ManifoldPoint& p, const ManifoldPoint& q) { return 0.5 * (kld(p, q) + kld(q, p)); }

struct QuadratureOptions {
  double abs_tolerance = 1e-9;
  // Large divergences (1e10 nats and beyond for far-apart shapes) cannot be
  // resolved to an absolute 1e-9 in double precision.
  double rel_tolerance = 1e-10;
  unsigned max_depth = 20;
};

namespace detail {

// Log-density of U = ln X where X follows the given law.
inline double log_density_of_log(const ManifoldPoint& p, double u) {
  const double a = p.theta[0], b = p.theta[1];
  if (p.family == Family::Gamma) return b * u - std::exp(u) / a - b * std::log(a) - log_gamma(b);
  const double z = b * (u - std::log(a));
  return std::log(b) + z - std::exp(z);
}

inline double log_mode(const ManifoldPoint& p) {
  return p.family == Family::Gamma ? std::log(p.theta[0] * p.theta[1]) : std::log(p.theta[0]);
}

}  // namespace detail

/// KL(p || q) by adaptive Gauss-Kronrod quadrature in u = ln x.
inline double kld_numeric(const ManifoldPoint& p, const ManifoldPoint& q, const QuadratureOptions& opt = {}) {
  require_same_family(p, q);
  const double mode = detail::log_mode(p);
  const double peak = detail::log_density_of_log(p, mode);
  constexpr double kWindowNats = 80.0;

  // The log-density in u is concave, so stepping out until it drops by the
  // window depth brackets all relevant mass.
  auto reach = [&](double dir) {
    double d = 1.0;
    while (detail::log_density_of_log(p, mode + dir * d) > peak - kWindowNats) d *= 2.0;
    return mode + dir * d;
  };
  const double lo = reach(-1.0), hi = reach(+1.0);

  auto integrand = [&](double u) {
    const double lp = detail::log_density_of_log(p, u);
    const double w = std::exp(lp);
    if (w == 0.0) return 0.0;
    return w * (lp - detail::log_density_of_log(q, u));
  };

  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, lo, hi, opt.max_depth, 1e-14, &error);
  if (!std::isfinite(value) || error > std::max(opt.abs_tolerance, opt.rel_tolerance * std::abs(value)))
    throw QuadratureFailure("kld_numeric: error estimate " + std::to_string(error) + " above tolerance");
  return value;
}

}  // namespace texgeo
