#pragma once

// Riemannian structure of the Gamma and Weibull manifolds: Fisher metrics,
// connection coefficients, path lengths and numerically solved geodesics.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "texgeo/divergences.hpp"
#include "texgeo/errors.hpp"
#include "texgeo/linalg.hpp"
#include "texgeo/manifold_point.hpp"
#include "texgeo/specfun.hpp"

namespace texgeo {

using MetricTensor = Mat2;

/// Connection coefficients indexed [k][i][j]. `second` holds Γ^k_ij; `first`,
/// when present, holds Γ_ij,k stored as first[k][i][j].
struct ChristoffelSymbols {
  using Table = std::array<std::array<std::array<double, 2>, 2>, 2>;
  Table second{};
  std::optional<Table> first;

  double operator()(int k, int i, int j) const { return second[k][i][j]; }
};

/// Parameter of the alpha-connection family (not the Gamma scale).
struct ConnectionParam {
  double a;
};

namespace detail {
// (ξ - 1)^2 + π²/6, the numerator of the Weibull shape-shape entry.
inline constexpr double kWeibullShapeConst =
    euler_gamma * euler_gamma - 2.0 * euler_gamma + std::numbers::pi * std::numbers::pi / 6.0 + 1.0;
}  // namespace detail

// ---------------------------------------------------------------------------
// Fisher information

/// Fisher metric of the Gamma family in (scale, shape) coordinates.
inline MetricTensor fisher_gamma(const GammaParams& p) {
  return make_mat2(p.beta / (p.alpha * p.alpha), 1.0 / p.alpha, 1.0 / p.alpha, trigamma(p.beta));
}

/// The same metric written in (mean, shape) coordinates, where it is diagonal:
/// diag(shape / mean², ψ'(shape) - 1/shape).
inline MetricTensor fisher_gamma_mean_shape(double mean, double shape) {
  detail::require_param(mean, "gamma mean");
  detail::require_param(shape, "gamma shape");
  return make_mat2(shape / (mean * mean), 0.0, 0.0, trigamma(shape) - 1.0 / shape);
}

/// Fisher metric of the Weibull family in (scale, shape) coordinates.
inline MetricTensor fisher_weibull(const WeibullParams& p) {
  const double off = (euler_gamma - 1.0) / p.lambda;
  return make_mat2(p.mu * p.mu / (p.lambda * p.lambda), off, off, detail::kWeibullShapeConst / (p.mu * p.mu));
}

inline MetricTensor fisher(const ManifoldPoint& p) {
  return p.family == Family::Gamma ? fisher_gamma(p.gamma()) : fisher_weibull(p.weibull());
}

/// Coordinate derivatives of the metric: result[r] = ∂g/∂θ^r.
inline std::array<Mat2, 2> fisher_derivatives(const ManifoldPoint& p) {
  const double s = p.theta[0], k = p.theta[1];
  if (p.family == Family::Gamma) {
    return {make_mat2(-2.0 * k / (s * s * s), -1.0 / (s * s), -1.0 / (s * s), 0.0),
            make_mat2(1.0 / (s * s), 0.0, 0.0, tetragamma(k))};
  }
  const double off = -(euler_gamma - 1.0) / (s * s);
  return {make_mat2(-2.0 * k * k / (s * s * s), off, off, 0.0),
          make_mat2(2.0 * k / (s * s), 0.0, 0.0, -2.0 * detail::kWeibullShapeConst / (k * k * k))};
}

// ---------------------------------------------------------------------------
// Connections

namespace detail {

inline ChristoffelSymbols::Table levi_civita_from(const Mat2& g, const std::array<Mat2, 2>& dg) {
  const Mat2 gi = g.inverse();
  ChristoffelSymbols::Table out{};
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double acc = 0.0;
        for (int r = 0; r < 2; ++r) acc += gi(k, r) * (dg[i](j, r) + dg[j](i, r) - dg[r](i, j));
        out[k][i][j] = 0.5 * acc;
      }
  return out;
}

inline void require_well_conditioned(const Mat2& g) {
  const auto ev = g.symmetric_eigenvalues();
  if (!(ev[0] > 0.0) || ev[1] / ev[0] > 1e12)
    throw SingularMetric("metric is not numerically invertible (condition number above 1e12)");
}

}  // namespace detail

/// Levi-Civita symbols of the Fisher metric from its analytic derivatives.
inline ChristoffelSymbols levi_civita(const ManifoldPoint& p) {
  const Mat2 g = fisher(p);
  // Closed-form derivatives: only a truly non-invertible metric is an error.
  if (!(g.det() > 0.0) || !std::isfinite(g.det())) throw SingularMetric("Fisher metric is not positive definite");
  return {detail::levi_civita_from(g, fisher_derivatives(p)), std::nullopt};
}

/// Levi-Civita symbols of an arbitrary metric field, with metric derivatives
/// taken by central differences of relative step `rel_step`.
template <class MetricFn>
ChristoffelSymbols christoffel_from_metric(MetricFn&& metric, const Vec2& theta, double rel_step = 1e-6) {
  const Mat2 g = metric(theta);
  detail::require_well_conditioned(g);
  std::array<Mat2, 2> dg;
  for (int r = 0; r < 2; ++r) {
    const double h = rel_step * std::max(std::abs(theta[r]), 1e-300);
    Vec2 up = theta, dn = theta;
    up[r] += h;
    dn[r] -= h;
    const Mat2 gu = metric(up), gd = metric(dn);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) dg[r](i, j) = (gu(i, j) - gd(i, j)) / (up[r] - dn[r]);
  }
  return {detail::levi_civita_from(g, dg), std::nullopt};
}

inline ChristoffelSymbols christoffel_from_metric(const ManifoldPoint& p, double rel_step = 1e-6) {
  const Family f = p.family;
  return christoffel_from_metric([f](const Vec2& t) { return fisher(ManifoldPoint(f, t)); }, p.theta, rel_step);
}

/// Alpha-connection of the Gamma manifold generated by the potential
/// φ(α, β) = ln Γ(β) - β ln α:  Γ_ij,k = (1 - a)/2 ∂_i ∂_j ∂_k φ.
/// The second-kind table is raised with the Hessian metric ∂²φ.
inline ChristoffelSymbols christoffel_gamma_alpha(const GammaParams& p, ConnectionParam c) {
  const double al = p.alpha, be = p.beta;
  const double f = 0.5 * (1.0 - c.a);
  // Third partials of φ; only the (αα α), (αα β) and (ββ β) ones are nonzero.
  std::array<std::array<std::array<double, 2>, 2>, 2> d3{};
  d3[0][0][0] = -2.0 * be / (al * al * al);
  d3[0][0][1] = d3[0][1][0] = d3[1][0][0] = 1.0 / (al * al);
  d3[1][1][1] = tetragamma(be);

  ChristoffelSymbols out;
  ChristoffelSymbols::Table first{};
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) first[k][i][j] = f * d3[i][j][k];

  const Mat2 hess = make_mat2(be / (al * al), -1.0 / al, -1.0 / al, trigamma(be));
  const Mat2 hi = hess.inverse();
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out.second[k][i][j] = hi(k, 0) * first[0][i][j] + hi(k, 1) * first[1][i][j];
  out.first = first;
  return out;
}

/// Tabulated closed-form connection of the Weibull manifold.
///
/// Five of the six entries coincide with the Levi-Civita connection of
/// fisher_weibull; the Γ²₁₁ entry, -μ³/(π²λ²), is a factor six smaller than the
/// Levi-Civita value. Geodesics therefore use levi_civita() instead.
inline ChristoffelSymbols christoffel_weibull(const WeibullParams& p) {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  constexpr double xi = euler_gamma;
  constexpr double c = detail::kWeibullShapeConst;
  const double l = p.lambda, m = p.mu;
  ChristoffelSymbols out;
  auto& g = out.second;
  g[0][0][0] = 6.0 * (xi * m - m - pi2 / 6.0) / (pi2 * l);
  g[1][0][0] = -m * m * m / (pi2 * l * l);
  g[0][0][1] = g[0][1][0] = 6.0 * c / (pi2 * m);
  g[1][0][1] = g[1][1][0] = 6.0 * m * (1.0 - xi) / (pi2 * l);
  g[0][1][1] = -6.0 * l * (1.0 - xi) * c / (pi2 * m * m * m);
  g[1][1][1] = -6.0 * c / (pi2 * m);
  return out;
}

// ---------------------------------------------------------------------------
// Lengths

/// ds = sqrt(g_ij dθ^i dθ^j).
inline double line_element(const ManifoldPoint& p, const Vec2& dtheta) {
  return std::sqrt(std::max(0.0, fisher(p).quadratic(dtheta)));
}

/// Samples θ(t_i) of a curve at uniform parameter steps over [t0, t1].
/// `velocities`, if non-empty, holds dθ/dt at the same samples.
struct ParamPath {
  Family family = Family::Gamma;
  double t0 = 0.0;
  double t1 = 1.0;
  std::vector<Vec2> points;
  std::vector<Vec2> velocities;

  std::size_t size() const { return points.size(); }
  double dt() const { return (t1 - t0) / static_cast<double>(points.size() - 1); }
};

/// Straight coordinate segment from a to b with `samples` points on t ∈ [0, 1].
inline ParamPath straight_line_path(const ManifoldPoint& a, const ManifoldPoint& b, std::size_t samples) {
  require_same_family(a, b);
  if (samples < 2) throw DomainError("a path needs at least two samples");
  ParamPath path;
  path.family = a.family;
  const Vec2 d = b.theta - a.theta;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(samples - 1);
    path.points.push_back(a.theta + t * d);
    path.velocities.push_back(d);
  }
  return path;
}

namespace detail {

// Derivative of the sampled path: fourth-order central differences in the
// interior, fourth-order one-sided stencils at the two ends.
inline std::vector<Vec2> differentiate(const std::vector<Vec2>& x, double h) {
  const std::size_t n = x.size();
  std::vector<Vec2> d(n);
  if (n < 5) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = i == 0 ? 0 : i - 1, b = i + 1 == n ? n - 1 : i + 1;
      d[i] = (1.0 / (static_cast<double>(b - a) * h)) * (x[b] - x[a]);
    }
    return d;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 2; ++c) {
      double v;
      if (i >= 2 && i + 2 < n) {
        v = (x[i - 2][c] - 8.0 * x[i - 1][c] + 8.0 * x[i + 1][c] - x[i + 2][c]) / (12.0 * h);
      } else if (i < 2) {
        v = (-25.0 * x[i][c] + 48.0 * x[i + 1][c] - 36.0 * x[i + 2][c] + 16.0 * x[i + 3][c] - 3.0 * x[i + 4][c]) /
            (12.0 * h);
      } else {
        v = (25.0 * x[i][c] - 48.0 * x[i - 1][c] + 36.0 * x[i - 2][c] - 16.0 * x[i - 3][c] + 3.0 * x[i - 4][c]) /
            (12.0 * h);
      }
      d[i][c] = v;
    }
  }
  return d;
}

// Composite Simpson on uniform samples; an even sample count closes with a
// three-eighths panel.
inline double simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  if (n == 2) return 0.5 * h * (f[0] + f[1]);
  if (n == 3) return h / 3.0 * (f[0] + 4.0 * f[1] + f[2]);
  std::size_t end = n;
  double tail = 0.0;
  if (n % 2 == 0) {
    tail = 3.0 * h / 8.0 * (f[n - 4] + 3.0 * f[n - 3] + 3.0 * f[n - 2] + f[n - 1]);
    end = n - 3;
  }
  double acc = f[0] + f[end - 1];
  for (std::size_t i = 1; i + 1 < end; ++i) acc += (i % 2 ? 4.0 : 2.0) * f[i];
  return h / 3.0 * acc + tail;
}

}  // namespace detail

/// Riemannian length of a sampled path by composite quadrature of the speed.
inline double path_length(const ParamPath& path) {
  if (path.points.size() < 2) throw DomainError("path_length: need at least two samples");
  const double h = path.dt();
  const auto vel = path.velocities.size() == path.points.size() ? path.velocities
                                                                  : detail::differentiate(path.points, h);
  std::vector<double> speed(path.points.size());
  for (std::size_t i = 0; i < speed.size(); ++i)
    speed[i] = line_element(ManifoldPoint(path.family, path.points[i]), vel[i]);
  return std::abs(detail::simpson(speed, h));
}

// ---------------------------------------------------------------------------
// Geodesics

/// Coordinates below this value are treated as having left the manifold.
inline constexpr double kDomainFloor = 1e-12;

namespace detail {

struct GeodesicState {
  Vec2 x, v;
};

inline Vec2 geodesic_acceleration(Family f, const Vec2& x, const Vec2& v) {
  if (!(x[0] >= kDomainFloor && x[1] >= kDomainFloor && std::isfinite(x[0]) && std::isfinite(x[1])))
    throw LeftDomain("geodesic left the parameter domain");
  const auto cs = levi_civita(ManifoldPoint(f, x));
  Vec2 a{};
  for (int k = 0; k < 2; ++k) {
    double acc = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) acc += cs(k, i, j) * v[i] * v[j];
    a[k] = -acc;
  }
  return a;
}

}  // namespace detail

/// Integrates θ'' + Γ(θ', θ') = 0 from `start` with initial velocity over
/// t ∈ [0, T] using `steps` classical fourth-order Runge-Kutta steps.
inline ParamPath geodesic_shoot(const ManifoldPoint& start, const Vec2& velocity, double T, int steps) {
  if (steps < 16) throw DomainError("geodesic_shoot: at least 16 steps are required");
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("geodesic_shoot: T must be positive");
  const Family f = start.family;
  const double h = T / steps;
  ParamPath path;
  path.family = f;
  path.t0 = 0.0;
  path.t1 = T;
  path.points.reserve(steps + 1);
  path.velocities.reserve(steps + 1);

  detail::GeodesicState s{start.theta, velocity};
  path.points.push_back(s.x);
  path.velocities.push_back(s.v);
  for (int n = 0; n < steps; ++n) {
    const Vec2 k1x = s.v, k1v = detail::geodesic_acceleration(f, s.x, s.v);
    const Vec2 x2 = s.x + 0.5 * h * k1x, v2 = s.v + 0.5 * h * k1v;
    const Vec2 k2x = v2, k2v = detail::geodesic_acceleration(f, x2, v2);
    const Vec2 x3 = s.x + 0.5 * h * k2x, v3 = s.v + 0.5 * h * k2v;
    const Vec2 k3x = v3, k3v = detail::geodesic_acceleration(f, x3, v3);
    const Vec2 x4 = s.x + h * k3x, v4 = s.v + h * k3v;
    const Vec2 k4x = v4, k4v = detail::geodesic_acceleration(f, x4, v4);
    s.x = s.x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    s.v = s.v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    if (!(s.x[0] >= kDomainFloor && s.x[1] >= kDomainFloor)) throw LeftDomain("geodesic left the parameter domain");
    path.points.push_back(s.x);
    path.velocities.push_back(s.v);
  }
  return path;
}

struct GeodesicOptions {
  int steps = 256;
  double tolerance = 1e-10;  // endpoint miss, max-norm in coordinates
  int max_newton = 40;
};

struct GeodesicSolution {
  double distance = 0.0;
  Vec2 velocity{};  // initial velocity on t ∈ [0, 1]
  ParamPath path;
  double miss = 0.0;
};

namespace detail {

inline double max_abs(const Vec2& v) { return std::max(std::abs(v[0]), std::abs(v[1])); }

// Damped Newton on v ↦ θ(1; v) - target with a forward-difference Jacobian.
inline std::optional<Vec2> shoot_newton(const ManifoldPoint& a, const Vec2& target, Vec2 v,
                                        const GeodesicOptions& opt) {
  auto endpoint = [&](const Vec2& vel) -> std::optional<Vec2> {
    try {
      return geodesic_shoot(a, vel, 1.0, opt.steps).points.back();
    } catch (const LeftDomain&) {
      return std::nullopt;
    } catch (const SingularMetric&) {
      return std::nullopt;
    }
  };
  auto end = endpoint(v);
  if (!end) return std::nullopt;
  Vec2 r = *end - target;
  double rn = max_abs(r);
  for (int it = 0; it < opt.max_newton; ++it) {
    if (rn <= opt.tolerance) return v;
    Mat2 J;
    for (int c = 0; c < 2; ++c) {
      const double d = 1e-7 * std::max(1.0, max_abs(v));
      Vec2 vp = v;
      vp[c] += d;
      auto ep = endpoint(vp);
      if (!ep) return std::nullopt;
      for (int k = 0; k < 2; ++k) J(k, c) = ((*ep)[k] - (*end)[k]) / d;
    }
    if (std::abs(J.det()) < 1e-300) return std::nullopt;
    const Vec2 step = J.inverse() * r;
    double damp = 1.0;
    bool improved = false;
    for (int tries = 0; tries < 30; ++tries, damp *= 0.5) {
      const Vec2 vn = v - damp * step;
      auto en = endpoint(vn);
      if (!en) continue;
      const Vec2 rr = *en - target;
      if (max_abs(rr) < rn) {
        v = vn;
        end = en;
        r = rr;
        rn = max_abs(rr);
        improved = true;
        break;
      }
    }
    if (!improved) return rn <= opt.tolerance ? std::optional<Vec2>(v) : std::nullopt;
  }
  return rn <= opt.tolerance ? std::optional<Vec2>(v) : std::nullopt;
}

}  // namespace detail

/// Boundary-value geodesic between a and b by shooting on the initial
/// velocity; falls back to continuation along the coordinate segment.
inline GeodesicSolution solve_geodesic(const ManifoldPoint& a, const ManifoldPoint& b,
                                       const GeodesicOptions& opt = {}) {
  require_same_family(a, b);
  GeodesicSolution sol;
  if (a == b) {
    sol.path = straight_line_path(a, b, 2);
    return sol;
  }
  const Vec2 chord = b.theta - a.theta;
  auto v = detail::shoot_newton(a, b.theta, chord, opt);
  for (int pieces = 2; !v && pieces <= 256; pieces *= 2) {
    Vec2 guess = (1.0 / pieces) * chord;
    bool ok = true;
    for (int s = 1; s <= pieces && ok; ++s) {
      const double frac = static_cast<double>(s) / pieces;
      const Vec2 target = a.theta + frac * chord;
      auto vs = detail::shoot_newton(a, target, guess, opt);
      if (!vs) {
        ok = false;
        break;
      }
      // Extrapolate the next initial velocity linearly in the continuation parameter.
      guess = ((frac + 1.0 / pieces) / frac) * (*vs);
      if (s == pieces) v = vs;
    }
  }
  if (!v) throw NoConvergence("geodesic shooting did not reach the target point");
  sol.velocity = *v;
  sol.path = geodesic_shoot(a, *v, 1.0, opt.steps);
  sol.miss = detail::max_abs(sol.path.points.back() - b.theta);
  sol.distance = path_length(sol.path);
  return sol;
}

inline double geodesic_distance_bvp(const ManifoldPoint& a, const ManifoldPoint& b,
                                    const GeodesicOptions& opt = {}) {
  return solve_geodesic(a, b, opt).distance;
}

/// Local geodesic-distance approximation sqrt(2 * SKLD(a, b)).
inline double gd_skld(const ManifoldPoint& a, const ManifoldPoint& b) { return std::sqrt(2.0 * skld(a, b)); }

}  // namespace texgeo
