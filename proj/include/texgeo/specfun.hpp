#pragma once

// Log-gamma and the first three polygamma functions for positive real
// arguments. Each routine shifts the argument upward with the functional
// recurrence until an asymptotic series is accurate to double precision.

#include <cmath>
#include <numbers>
#include <string>

#include "texgeo/errors.hpp"

namespace texgeo {

/// Euler-Mascheroni constant.
inline constexpr double euler_gamma = std::numbers::egamma_v<double>;

namespace detail {

inline void require_positive(double x, const char* fn) {
  if (!std::isfinite(x) || x <= 0.0)
    throw DomainError(std::string(fn) + ": argument must be positive and finite, got " + std::to_string(x));
}

// Threshold above which the asymptotic series are used directly.
inline constexpr double kAsymptoticStart = 15.0;

// ζ(k) - 1 for k = 2, 3, ..., 40.
inline constexpr double kZetaMinusOne[] = {
    0.64493406684822643647, 0.2020569031595942854,   0.082323233711138191516, 0.036927755143369926331,
    0.017343061984449139715, 0.0083492773819228268398, 0.0040773561979443393787, 0.0020083928260822144179,
    0.00099457512781808533715, 0.0004941886041194645587, 0.00024608655330804829864, 0.00012271334757848914675,
    6.1248135058704829259e-5, 3.0588236307020493552e-5, 1.5282259408651871733e-5, 7.6371976378997622736e-6,
    3.8172932649998398565e-6, 1.9082127165539389257e-6, 9.5396203387279611315e-7, 4.7693298678780646312e-7,
    2.3845050272773299e-7,   1.1921992596531107307e-7, 5.9608189051259479612e-8, 2.9803503514652280186e-8,
    1.4901554828365041235e-8, 7.450711789835429492e-9, 3.7253340247884570548e-9, 1.8626597235130490064e-9,
    9.3132743241966818287e-10, 4.656629065033784073e-10, 2.328311833676505492e-10, 1.1641550172700519776e-10,
    5.8207720879027008892e-11, 2.9103850444970996869e-11, 1.4551921891041984236e-11, 7.2759598350574810145e-12,
    3.6379795473786511902e-12, 1.8189896503070659476e-12, 9.0949478402638892825e-13};

// ln Γ(2 + z) for |z| <= 0.5 by its Taylor series; exact zero at z = 0 keeps
// full relative accuracy near the zeros of ln Γ at 1 and 2.
inline double log_gamma_near_two(double z) {
  double acc = 0.0;
  double zk = z * z;
  for (int k = 2; k <= 40; ++k) {
    const double term = kZetaMinusOne[k - 2] * zk / k;
    acc += (k % 2 == 0) ? term : -term;
    zk *= z;
  }
  return (1.0 - euler_gamma) * z + acc;
}

// Positive zero of ψ as a double-double, and Taylor coefficients ψ^(k)(x0)/k!.
inline constexpr double kDigammaRootHi = 1.4616321449683622;
inline constexpr double kDigammaRootLo = 9.549995429965697e-17;
inline constexpr double kDigammaRootTaylor[] = {
    0.96767224544762117043,  -0.44276316898359210609,  0.25849976095565101062,  -0.1639427054424065275,
    0.10782405069126236576,  -0.072199561256454710926, 0.048804288164143107225, -0.033161126474847359292,
    0.02259764823221810466,  -0.015424765904948959139, 0.010538791616612175388, -0.007204534386356868241,
    0.0049267813957298534464, -0.0033698016554393280828, 0.0023051263267349278369, -0.0015769367714301972593};

}  // namespace detail

/// ln Γ(x) for x > 0.
inline double log_gamma(double x) {
  detail::require_positive(x, "log_gamma");
  if (x >= 1.5 && x <= 2.5) return detail::log_gamma_near_two(x - 2.0);
  if (x >= 0.5 && x < 1.5) return detail::log_gamma_near_two(x - 1.0) - std::log1p(x - 1.0);
  double shift = 0.0;
  if (x < detail::kAsymptoticStart) {
    double prod = 1.0;
    while (x < detail::kAsymptoticStart) {
      prod *= x;
      x += 1.0;
    }
    shift = std::log(prod);
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Stirling series with Bernoulli-number coefficients B_2k / (2k (2k-1)).
  const double series =
      inv * (1.0 / 12.0 +
             inv2 * (-1.0 / 360.0 +
                     inv2 * (1.0 / 1260.0 +
                             inv2 * (-1.0 / 1680.0 +
                                     inv2 * (1.0 / 1188.0 + inv2 * (-691.0 / 360360.0 + inv2 * (1.0 / 156.0)))))));
  constexpr double half_log_two_pi = 0.91893853320467274178;
  return (x - 0.5) * std::log(x) - x + half_log_two_pi + series - shift;
}

/// Γ(x) for x > 0; overflows to +inf past x ≈ 171.6.
inline double gamma_function(double x) { return std::exp(log_gamma(x)); }

/// ψ(x) = d/dx ln Γ(x).
inline double digamma(double x) {
  detail::require_positive(x, "digamma");
  if (std::abs(x - detail::kDigammaRootHi) <= 0.1) {
    const double d = (x - detail::kDigammaRootHi) - detail::kDigammaRootLo;
    double acc = 0.0;
    for (int k = 15; k >= 0; --k) acc = acc * d + detail::kDigammaRootTaylor[k];
    return acc * d;
  }
  double acc = 0.0;
  while (x < detail::kAsymptoticStart) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv2 = 1.0 / (x * x);
  const double series =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 -
                              inv2 * (1.0 / 240.0 -
                                      inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 * (1.0 / 12.0)))))));
  return acc + std::log(x) - 0.5 / x - series;
}

/// ψ'(x).
inline double trigamma(double x) {
  detail::require_positive(x, "trigamma");
  double acc = 0.0;
  while (x < detail::kAsymptoticStart) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv * (1.0 + inv * (0.5 + inv * (1.0 / 6.0 +
                                       inv2 * (-1.0 / 30.0 +
                                               inv2 * (1.0 / 42.0 +
                                                       inv2 * (-1.0 / 30.0 +
                                                               inv2 * (5.0 / 66.0 +
                                                                       inv2 * (-691.0 / 2730.0 + inv2 * (7.0 / 6.0)))))))));
  return acc + series;
}

/// ψ''(x), the third derivative of ln Γ.
inline double tetragamma(double x) {
  detail::require_positive(x, "tetragamma");
  double acc = 0.0;
  while (x < detail::kAsymptoticStart) {
    acc -= 2.0 / (x * x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv2 * (1.0 + inv * (1.0 + inv * (0.5 +
                                        inv2 * (-1.0 / 6.0 +
                                                inv2 * (1.0 / 6.0 +
                                                        inv2 * (-3.0 / 10.0 +
                                                                inv2 * (5.0 / 6.0 +
                                                                        inv2 * (-691.0 / 210.0 + inv2 * (35.0 / 2.0)))))))));
  return acc - series;
}

}  // namespace texgeo
