#pragma once

// Forward 2-D dual-tree complex wavelet transform.
// Level 1: near-symmetric (13,19)-tap biorthogonal pair; levels >= 2: 14-tap
// Q-shift pair. Symmetric extension with repeated end samples throughout.
// The image mean is taken out before filtering and returned through the
// lowpass only: the Q-shift highpass leaks about 1e-6 of DC.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "texgeo/errors.hpp"
#include "texgeo/image.hpp"

namespace texgeo {

namespace filters {

inline constexpr int kTableVersion = 1;

inline constexpr std::array<double, 13> h0o = {
    -0.0017578125, 0.0,         0.022265625, -0.046875,    -0.0482421875, 0.296875,     0.55546875,
    0.296875,      -0.0482421875, -0.046875, 0.022265625, 0.0,           -0.0017578125};

inline constexpr std::array<double, 19> h1o = {
    -7.062639508928571e-05, 0.0,
    0.0013419015066964285,  -0.0018833705357142855,
    -0.007156808035714285,  0.023856026785714284,
    0.05564313616071428,    -0.05168805803571428,
    -0.29975760323660716,   0.5594308035714286,
    -0.29975760323660716,   -0.05168805803571428,
    0.05564313616071428,    0.023856026785714284,
    -0.007156808035714285,  -0.0018833705357142855,
    0.0013419015066964285,  0.0,
    -7.062639508928571e-05};

inline constexpr std::array<double, 14> h0a = {
    0.003253142763653182,  -0.00388321199915849, 0.03466034684485349,   -0.03887280126882779,
    -0.11720388769911527,  0.27529538466888204,  0.7561456438925225,    0.5688104207121227,
    0.011866092033797,     -0.1067118046866654,  0.023825384794920298,  0.01702522388155399,
    -0.005439475937274115, -0.004556895628475491};

inline constexpr std::array<double, 14> h0b = {
    -0.004556895628475491, -0.005439475937274115, 0.01702522388155399,  0.023825384794920298,
    -0.1067118046866654,   0.011866092033797,     0.5688104207121227,   0.7561456438925225,
    0.27529538466888204,   -0.11720388769911527,  -0.03887280126882779, 0.03466034684485349,
    -0.00388321199915849,  0.003253142763653182};

inline constexpr std::array<double, 14> h1a = {
    -0.004556895628475491, 0.005439475937274115, 0.01702522388155399,  -0.023825384794920298,
    -0.1067118046866654,   -0.011866092033797,   0.5688104207121227,   -0.7561456438925225,
    0.27529538466888204,   0.11720388769911527,  -0.03887280126882779, -0.03466034684485349,
    -0.00388321199915849,  -0.003253142763653182};

inline constexpr std::array<double, 14> h1b = {
    -0.003253142763653182, -0.00388321199915849, -0.03466034684485349,  -0.03887280126882779,
    0.11720388769911527,   0.27529538466888204,  -0.7561456438925225,   0.5688104207121227,
    -0.011866092033797,    -0.1067118046866654,  -0.023825384794920298, 0.01702522388155399,
    0.005439475937274115,  -0.004556895628475491};

}  // namespace filters

/// Dense row-major matrix.
template <class T>
struct Grid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  Grid() = default;
  Grid(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

  T& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

using RealGrid = Grid<double>;
using ComplexGrid = Grid<std::complex<double>>;

/// Orientation index o in [0, 6) is centred near 15° + 30°·o.
struct SubbandSet {
  int levels = 0;
  std::vector<std::array<ComplexGrid, 6>> highpass;  // [level][orientation]
  RealGrid lowpass;

  const ComplexGrid& subband(int level, int orientation) const { return highpass.at(level).at(orientation); }
};

namespace detail {

// Symmetric extension with repeated end samples: maps any integer onto [0, n).
inline std::size_t reflect_index(long x, long n) {
  const long period = 2 * n;
  long p = x % period;
  if (p < 0) p += period;
  if (p >= n) p = period - 1 - p;
  return static_cast<std::size_t>(p);
}

inline RealGrid transpose(const RealGrid& a) {
  RealGrid t(a.cols, a.rows);
  for (std::size_t r = 0; r < a.rows; ++r)
    for (std::size_t c = 0; c < a.cols; ++c) t(c, r) = a(r, c);
  return t;
}

// Odd-length filtering down the columns, no decimation; output same size.
inline RealGrid colfilter(const RealGrid& x, std::span<const double> h) {
  const long r = static_cast<long>(x.rows);
  const long m = static_cast<long>(h.size());
  const long m2 = m / 2;
  RealGrid y(x.rows, x.cols);
  for (long k = 0; k < r; ++k) {
    double* out = &y.data[k * x.cols];
    for (long i = 0; i < m; ++i) {
      const double hi = h[i];
      if (hi == 0.0) continue;
      const std::size_t src = reflect_index(k + m - 1 - i - m2, r);
      const double* in = &x.data[src * x.cols];
      for (std::size_t c = 0; c < x.cols; ++c) out[c] += hi * in[c];
    }
  }
  return y;
}

// Even-length Q-shift filtering down the columns with decimation by two.
inline RealGrid coldfilt(const RealGrid& x, std::span<const double> ha, std::span<const double> hb) {
  const long r = static_cast<long>(x.rows);
  if (r % 4 != 0) throw DomainError("coldfilt needs a row count divisible by 4");
  const long m = static_cast<long>(ha.size());
  const long mh = m / 2;
  double dot = 0.0;
  for (long i = 0; i < m; ++i) dot += ha[i] * hb[i];
  const long first_a = dot > 0 ? 0 : 1;
  const long first_b = 1 - first_a;
  // position p in the extended sequence corresponds to original row p - m
  auto row_at = [&](long p) { return &x.data[reflect_index(p - m, r) * x.cols]; };
  RealGrid y(x.rows / 2, x.cols);
  const long quarter = r / 4;
  for (long k = 0; k < quarter; ++k) {
    double* ya = &y.data[(2 * k + first_a) * x.cols];
    double* yb = &y.data[(2 * k + first_b) * x.cols];
    for (long i = 0; i < mh; ++i) {
      const long t = 5 + 4 * (k + mh - 1 - i);
      const double* a1 = row_at(t - 1);
      const double* a2 = row_at(t - 3);
      const double* b1 = row_at(t);
      const double* b2 = row_at(t - 2);
      const double hao = ha[2 * i], hae = ha[2 * i + 1], hbo = hb[2 * i], hbe = hb[2 * i + 1];
      for (std::size_t c = 0; c < x.cols; ++c) {
        ya[c] += hao * a1[c] + hae * a2[c];
        yb[c] += hbo * b1[c] + hbe * b2[c];
      }
    }
  }
  return y;
}

// Quads of real samples to the two complex subbands (p - q, p + q).
inline std::array<ComplexGrid, 2> q2c(const RealGrid& y) {
  const std::size_t r = y.rows / 2, c = y.cols / 2;
  const double s = std::sqrt(0.5);
  std::array<ComplexGrid, 2> z{ComplexGrid(r, c), ComplexGrid(r, c)};
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      const std::complex<double> p(s * y(2 * i, 2 * j), s * y(2 * i, 2 * j + 1));
      const std::complex<double> q(s * y(2 * i + 1, 2 * j + 1), -s * y(2 * i + 1, 2 * j));
      z[0](i, j) = p - q;
      z[1](i, j) = p + q;
    }
  return z;
}

inline void assign_pairs(std::array<ComplexGrid, 6>& bands, const RealGrid& hh, const RealGrid& lh,
                         const RealGrid& hl) {
  auto horizontal = q2c(hh);
  auto vertical = q2c(lh);
  auto diagonal = q2c(hl);
  bands[0] = std::move(horizontal[0]);
  bands[5] = std::move(horizontal[1]);
  bands[2] = std::move(vertical[0]);
  bands[3] = std::move(vertical[1]);
  bands[1] = std::move(diagonal[0]);
  bands[4] = std::move(diagonal[1]);
}

inline double dc_sum(std::span<const double> h) {
  double s = 0.0;
  for (double v : h) s += v;
  return s;
}

inline RealGrid pad_to_multiple_of_four(const RealGrid& x) {
  const bool pr = x.rows % 4 != 0, pc = x.cols % 4 != 0;
  if (!pr && !pc) return x;
  RealGrid y(x.rows + (pr ? 2 : 0), x.cols + (pc ? 2 : 0));
  for (std::size_t r = 0; r < y.rows; ++r) {
    const std::size_t sr = pr ? std::clamp<long>(static_cast<long>(r) - 1, 0, static_cast<long>(x.rows) - 1) : r;
    for (std::size_t c = 0; c < y.cols; ++c) {
      const std::size_t sc = pc ? std::clamp<long>(static_cast<long>(c) - 1, 0, static_cast<long>(x.cols) - 1) : c;
      y(r, c) = x(sr, sc);
    }
  }
  return y;
}

}  // namespace detail

inline std::size_t min_image_side(int levels) { return std::max<std::size_t>(32, std::size_t{1} << (levels + 1)); }

inline SubbandSet dtcwt_forward(const GrayImage& img, int levels) {
  if (levels < 1 || levels > 5) throw DomainError("decomposition levels must be in [1, 5]");
  const std::size_t need = min_image_side(levels);
  if (img.width < need || img.height < need)
    throw ImageTooSmall("image " + std::to_string(img.width) + "x" + std::to_string(img.height) + " is below " +
                        std::to_string(need) + "x" + std::to_string(need) + " for " + std::to_string(levels) +
                        " levels");

  double mean = 0.0;
  for (double v : img.pixels) mean += v;
  mean /= static_cast<double>(img.pixels.size());

  // odd sizes: duplicate the last row / column
  RealGrid x(img.height + img.height % 2, img.width + img.width % 2);
  for (std::size_t r = 0; r < x.rows; ++r)
    for (std::size_t c = 0; c < x.cols; ++c)
      x(r, c) = img(std::min(r, img.height - 1), std::min(c, img.width - 1)) - mean;

  using detail::coldfilt;
  using detail::colfilter;
  using detail::dc_sum;
  using detail::transpose;
  namespace f = filters;

  SubbandSet out;
  out.levels = levels;
  out.highpass.resize(levels);

  RealGrid lo = transpose(colfilter(x, f::h0o));
  RealGrid hi = transpose(colfilter(x, f::h1o));
  RealGrid lolo = transpose(colfilter(lo, f::h0o));
  detail::assign_pairs(out.highpass[0], transpose(colfilter(hi, f::h0o)), transpose(colfilter(lo, f::h1o)),
                       transpose(colfilter(hi, f::h1o)));

  for (int level = 1; level < levels; ++level) {
    lolo = detail::pad_to_multiple_of_four(lolo);
    lo = transpose(coldfilt(lolo, f::h0b, f::h0a));
    hi = transpose(coldfilt(lolo, f::h1b, f::h1a));
    lolo = transpose(coldfilt(lo, f::h0b, f::h0a));
    detail::assign_pairs(out.highpass[level], transpose(coldfilt(hi, f::h0b, f::h0a)),
                         transpose(coldfilt(lo, f::h1b, f::h1a)), transpose(coldfilt(hi, f::h1b, f::h1a)));
  }
  double dc_gain = dc_sum(f::h0o) * dc_sum(f::h0o);
  for (int level = 1; level < levels; ++level) dc_gain *= dc_sum(f::h0a) * dc_sum(f::h0a);
  for (auto& v : lolo.data) v += mean * dc_gain;
  out.lowpass = std::move(lolo);
  return out;
}

}  // namespace texgeo
