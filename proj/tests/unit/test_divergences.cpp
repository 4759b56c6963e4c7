#include "texgeo/divergences.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "texgeo/geometry.hpp"

namespace texgeo {
namespace {

const double kLn2MinusHalf = std::log(2.0) - 0.5;

ManifoldPoint random_point(Family f, std::mt19937_64& rng, double lo = 0.2, double hi = 5.0) {
  std::uniform_real_distribution<double> U(std::log(lo), std::log(hi));
  return ManifoldPoint(f, std::exp(U(rng)), std::exp(U(rng)));
}

TEST(KldGamma, ExamplesAndIdentity) {
  const GammaParams p{1.0, 1.0}, q{2.0, 1.0};
  EXPECT_EQ(kld_gamma(p, p), 0.0);
  EXPECT_NEAR(kld_gamma(p, q), kLn2MinusHalf, 1e-14);
  EXPECT_NEAR(kld_numeric(ManifoldPoint(p), ManifoldPoint(q)), kLn2MinusHalf, 1e-9);
}

TEST(KldWeibull, ExponentialReduction) {
  const WeibullParams p{1.0, 1.0}, q{2.0, 1.0};
  EXPECT_EQ(kld_weibull(p, p), 0.0);
  EXPECT_NEAR(kld_weibull(p, q), kLn2MinusHalf, 1e-14);
  EXPECT_NEAR(kld_numeric(ManifoldPoint(p), ManifoldPoint(q)), kLn2MinusHalf, 1e-9);
}

TEST(KldNumeric, AgreesWithPlainSimpsonOnHalfLine) {
  // Independent of the Gauss-Kronrod route: integrate f_p ln(f_p/f_q) in x.
  const GammaParams p{1.3, 2.2}, q{0.7, 3.1};
  const double ref = oracle::integrate_half_line(
      [&](double x) { return gamma_pdf(x, p) * (gamma_log_pdf(x, p) - gamma_log_pdf(x, q)); });
  EXPECT_NEAR(kld_numeric(ManifoldPoint(p), ManifoldPoint(q)), ref, 1e-8);
  const WeibullParams a{1.4, 1.8}, b{2.0, 0.9};
  const double refw = oracle::integrate_half_line(
      [&](double x) { return weibull_pdf(x, a) * (weibull_log_pdf(x, a) - weibull_log_pdf(x, b)); });
  EXPECT_NEAR(kld_numeric(ManifoldPoint(a), ManifoldPoint(b)), refw, 1e-8);
}

TEST(KldClosedForm, MatchesQuadratureOnRandomPairs) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    const auto p = random_point(Family::Gamma, rng), q = random_point(Family::Gamma, rng);
    EXPECT_NEAR(kld(p, q), kld_numeric(p, q), std::max(1e-7, 1e-10 * kld(p, q))) << p.theta[0] << "," << p.theta[1];
  }
  for (int i = 0; i < 200; ++i) {
    const auto p = random_point(Family::Weibull, rng), q = random_point(Family::Weibull, rng);
    EXPECT_NEAR(kld(p, q), kld_numeric(p, q), std::max(1e-6, 1e-10 * kld(p, q))) << p.theta[0] << "," << p.theta[1];
  }
}

TEST(KldNumeric, IdenticalPointsGiveZero) {
  for (Family f : {Family::Gamma, Family::Weibull}) {
    const ManifoldPoint p(f, 1.7, 0.6);
    EXPECT_LE(std::abs(kld_numeric(p, p)), 1e-9);
  }
}

TEST(KldNumeric, NonnegativeAndAsymmetric) {
  std::mt19937_64 rng(7);
  bool asymmetric = false;
  for (Family f : {Family::Gamma, Family::Weibull}) {
    for (int i = 0; i < 100; ++i) {
      const auto p = random_point(f, rng), q = random_point(f, rng);
      const double pq = kld_numeric(p, q), qp = kld_numeric(q, p);
      EXPECT_GE(pq, -1e-9);
      EXPECT_GE(qp, -1e-9);
      if (std::abs(pq - qp) > 0.01) asymmetric = true;
    }
  }
  EXPECT_TRUE(asymmetric);
}

TEST(Kld, ZeroOnlyForIdenticalPoints) {
  std::mt19937_64 rng(99);
  for (Family f : {Family::Gamma, Family::Weibull}) {
    for (int i = 0; i < 200; ++i) {
      const auto p = random_point(f, rng);
      std::normal_distribution<double> N(0.0, 1e-3);
      const ManifoldPoint q(f, p.theta[0] * std::exp(N(rng)), p.theta[1] * std::exp(N(rng)));
      if (kld(p, q) < 1e-12) EXPECT_LT(norm(p.theta - q.theta), 1e-6);
    }
  }
}

TEST(Kld, RejectsMixedFamilies) {
  EXPECT_THROW(kld(ManifoldPoint(Family::Gamma, 1.0, 1.0), ManifoldPoint(Family::Weibull, 1.0, 1.0)),
               StructureMismatch);
}

TEST(Skld, SymmetricMeanOfDirections) {
  const ManifoldPoint p(GammaParams{1.0, 1.0}), q(GammaParams{2.0, 1.0});
  EXPECT_EQ(skld(p, p), 0.0);
  EXPECT_EQ(skld(p, q), skld(q, p));
  // KL(q||p) for exponentials with means 2 and 1 is 2 - 1 - ln 2.
  const double reverse = 1.0 - std::log(2.0);
  EXPECT_NEAR(kld_numeric(q, p), reverse, 1e-9);
  const double expected = 0.5 * (kld_numeric(p, q) + kld_numeric(q, p));
  EXPECT_NEAR(skld(p, q), expected, 1e-9);
  EXPECT_NEAR(skld(p, q), 0.25, 0.01);
}

TEST(Kld, SecondOrderExpansionMatchesFisher) {
  const double eps = 1e-3;
  for (Family f : {Family::Gamma, Family::Weibull}) {
    for (const Vec2& theta : {Vec2{1.0, 1.0}, Vec2{2.0, 3.0}, Vec2{0.4, 0.7}}) {
      const ManifoldPoint p(f, theta);
      const Mat2 g = fisher(p);
      for (const Vec2& v : {Vec2{1.0, 0.0}, Vec2{0.0, 1.0}, Vec2{0.6, -0.8}}) {
        const Vec2 dv = eps * Vec2{v[0] * theta[0], v[1] * theta[1]};
        const ManifoldPoint q(f, theta + dv);
        const double ratio = kld(p, q) / (0.5 * g.quadratic(dv));
        EXPECT_NEAR(ratio, 1.0, 0.01) << to_string(f) << " " << theta[0] << "," << theta[1];
      }
    }
  }
}

}  // namespace
}  // namespace texgeo
