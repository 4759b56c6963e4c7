#pragma once

#include <cmath>
#include <string>

#include "texgeo/distributions.hpp"
#include "texgeo/errors.hpp"
#include "texgeo/linalg.hpp"

namespace texgeo {

/// A point on the Gamma or Weibull manifold in (scale, shape) coordinates.
struct ManifoldPoint {
  Family family;
  Vec2 theta;

  ManifoldPoint(Family f, Vec2 t) : family(f), theta(t) {
    if (!(std::isfinite(t[0]) && std::isfinite(t[1]) && t[0] > 0.0 && t[1] > 0.0))
      throw DomainError("manifold point coordinates must be positive and finite");
  }
  ManifoldPoint(Family f, double scale, double shape) : ManifoldPoint(f, Vec2{scale, shape}) {}
  explicit ManifoldPoint(const GammaParams& p) : ManifoldPoint(Family::Gamma, p.alpha, p.beta) {}
  explicit ManifoldPoint(const WeibullParams& p) : ManifoldPoint(Family::Weibull, p.lambda, p.mu) {}

  double scale() const { return theta[0]; }
  double shape() const { return theta[1]; }

  GammaParams gamma() const {
    if (family != Family::Gamma) throw DomainError("point is not on the Gamma manifold");
    return {theta[0], theta[1]};
  }
  WeibullParams weibull() const {
    if (family != Family::Weibull) throw DomainError("point is not on the Weibull manifold");
    return {theta[0], theta[1]};
  }

  bool operator==(const ManifoldPoint&) const = default;
};

inline void require_same_family(const ManifoldPoint& a, const ManifoldPoint& b) {
  if (a.family != b.family) throw StructureMismatch("points belong to different families");
}

}  // namespace texgeo
