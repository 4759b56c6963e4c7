#pragma once

#include <array>
#include <cmath>

namespace texgeo {

using Vec2 = std::array<double, 2>;

inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator*(double s, const Vec2& a) { return {s * a[0], s * a[1]}; }
inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec2& a) { return std::hypot(a[0], a[1]); }

/// Dense 2x2 matrix, row-major.
struct Mat2 {
  std::array<std::array<double, 2>, 2> m{};

  double operator()(int i, int j) const { return m[i][j]; }
  double& operator()(int i, int j) { return m[i][j]; }

  double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
  double trace() const { return m[0][0] + m[1][1]; }

  Mat2 inverse() const {
    const double d = det();
    Mat2 r;
    r.m = {{{m[1][1] / d, -m[0][1] / d}, {-m[1][0] / d, m[0][0] / d}}};
    return r;
  }

  Vec2 operator*(const Vec2& v) const {
    return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
  }

  Mat2 operator*(const Mat2& o) const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j];
    return r;
  }

  Mat2 transpose() const {
    Mat2 r;
    r.m = {{{m[0][0], m[1][0]}, {m[0][1], m[1][1]}}};
    return r;
  }

  /// v^T M v
  double quadratic(const Vec2& v) const { return dot(v, (*this) * v); }

  /// Eigenvalues of the symmetric part, ascending.
  std::array<double, 2> symmetric_eigenvalues() const {
    const double a = m[0][0], d = m[1][1], b = 0.5 * (m[0][1] + m[1][0]);
    const double mean = 0.5 * (a + d);
    const double r = std::hypot(0.5 * (a - d), b);
    return {mean - r, mean + r};
  }
};

inline Mat2 make_mat2(double a00, double a01, double a10, double a11) {
  Mat2 r;
  r.m = {{{a00, a01}, {a10, a11}}};
  return r;
}

}  // namespace texgeo
