#include "texgeo/dtcwt.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "dtcwt_reference.hpp"

namespace texgeo {
namespace {

GrayImage uniform_noise(std::size_t w, std::size_t h, std::uint64_t seed) {
  GrayImage img(w, h);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (auto& p : img.pixels) p = U(rng);
  return img;
}

// Separable Gaussian blur with circular boundaries.
GrayImage blurred_noise(std::size_t n, double sigma, std::uint64_t seed) {
  const auto src = uniform_noise(n, n, seed);
  const int rad = static_cast<int>(std::ceil(4 * sigma));
  std::vector<double> k(2 * rad + 1);
  for (int i = -rad; i <= rad; ++i) k[i + rad] = std::exp(-0.5 * i * i / (sigma * sigma));
  const double ks = std::accumulate(k.begin(), k.end(), 0.0);
  for (auto& v : k) v /= ks;
  GrayImage tmp(n, n), out(n, n);
  const long N = static_cast<long>(n);
  for (long r = 0; r < N; ++r)
    for (long c = 0; c < N; ++c) {
      double s = 0;
      for (int i = -rad; i <= rad; ++i) s += k[i + rad] * src(r, ((c + i) % N + N) % N);
      tmp(r, c) = s;
    }
  for (long r = 0; r < N; ++r)
    for (long c = 0; c < N; ++c) {
      double s = 0;
      for (int i = -rad; i <= rad; ++i) s += k[i + rad] * tmp(((r + i) % N + N) % N, c);
      out(r, c) = s;
    }
  return out;
}

double band_energy(const ComplexGrid& g) {
  double e = 0;
  for (const auto& z : g.data) e += std::norm(z);
  return e;
}

TEST(Dtcwt, MatchesReferenceImplementation) {
  GrayImage img(dtcwt_ref::kCols, dtcwt_ref::kRows);
  for (int r = 0; r < dtcwt_ref::kRows; ++r)
    for (int c = 0; c < dtcwt_ref::kCols; ++c) img(r, c) = ((73 * r + 151 * c + 7 * r * c) % 256) / 255.0;
  const auto s = dtcwt_forward(img, dtcwt_ref::kLevels);
  ASSERT_EQ(s.levels, dtcwt_ref::kLevels);
  for (int l = 0; l < dtcwt_ref::kLevels; ++l)
    for (int o = 0; o < 6; ++o) {
      const auto& b = s.subband(l, o);
      EXPECT_EQ(b.rows, static_cast<std::size_t>(dtcwt_ref::kShapes[l].rows));
      EXPECT_EQ(b.cols, static_cast<std::size_t>(dtcwt_ref::kShapes[l].cols));
      const double ref = dtcwt_ref::kEnergy[l][o];
      EXPECT_NEAR(band_energy(b), ref, 1e-12 * ref) << "level " << l << " orientation " << o;
    }
  for (const auto& c : dtcwt_ref::kCoefs) {
    const auto z = s.subband(c.level, c.orient)(c.row, c.col);
    EXPECT_NEAR(z.real(), c.re, 1e-13) << c.level << "/" << c.orient << " @" << c.row << "," << c.col;
    EXPECT_NEAR(z.imag(), c.im, 1e-13) << c.level << "/" << c.orient << " @" << c.row << "," << c.col;
  }
  EXPECT_EQ(s.lowpass.rows, static_cast<std::size_t>(dtcwt_ref::kLowpassShape.rows));
  EXPECT_EQ(s.lowpass.cols, static_cast<std::size_t>(dtcwt_ref::kLowpassShape.cols));
  // lowpass is the reference lowpass of the original image
  const double low = std::accumulate(s.lowpass.data.begin(), s.lowpass.data.end(), 0.0);
  EXPECT_NEAR(low, dtcwt_ref::kLowpassSum, 1e-11 * std::abs(dtcwt_ref::kLowpassSum));
}

TEST(Dtcwt, ConstantImageHasNoHighpass) {
  for (int levels = 1; levels <= 4; ++levels) {
    const auto s = dtcwt_forward(GrayImage(64, 64, 0.37), levels);
    ASSERT_EQ(s.highpass.size(), static_cast<std::size_t>(levels));
    for (int l = 0; l < levels; ++l)
      for (int o = 0; o < 6; ++o)
        for (const auto& z : s.subband(l, o).data) ASSERT_LE(std::abs(z), 1e-10);
  }
}

TEST(Dtcwt, DyadicShapes) {
  const auto s = dtcwt_forward(uniform_noise(64, 64, 1), 2);
  for (int o = 0; o < 6; ++o) {
    EXPECT_EQ(s.subband(0, o).rows, 32u);
    EXPECT_EQ(s.subband(0, o).cols, 32u);
    EXPECT_EQ(s.subband(1, o).rows, 16u);
    EXPECT_EQ(s.subband(1, o).cols, 16u);
  }
  // ceil(w / 2^l) once padded
  const auto t = dtcwt_forward(uniform_noise(96, 128, 2), 5);
  for (int l = 0; l < 5; ++l) {
    EXPECT_EQ(t.subband(l, 0).rows, 128u >> (l + 1));
    EXPECT_EQ(t.subband(l, 0).cols, (96u + (1u << (l + 1)) - 1) >> (l + 1));
  }
}

TEST(Dtcwt, OddSizesDuplicateEdge) {
  auto odd = uniform_noise(45, 51, 3);
  GrayImage even(46, 52);
  for (std::size_t r = 0; r < 52; ++r)
    for (std::size_t c = 0; c < 46; ++c) even(r, c) = odd(std::min<std::size_t>(r, 50), std::min<std::size_t>(c, 44));
  const auto a = dtcwt_forward(odd, 3), b = dtcwt_forward(even, 3);
  // the two means differ, which moves the highpass only through the DC leak
  for (int l = 0; l < 3; ++l)
    for (int o = 0; o < 6; ++o) {
      const auto& x = a.subband(l, o).data;
      const auto& y = b.subband(l, o).data;
      ASSERT_EQ(x.size(), y.size());
      for (std::size_t i = 0; i < x.size(); ++i) ASSERT_LE(std::abs(x[i] - y[i]), 1e-8);
    }
}

TEST(Dtcwt, NearShiftInvariance) {
  const std::size_t n = 256;
  const auto img = blurred_noise(n, 1.0, 2024);
  GrayImage shifted(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) shifted(r, (c + 1) % n) = img(r, c);
  const auto a = dtcwt_forward(img, 4), b = dtcwt_forward(shifted, 4);
  for (int l = 0; l < 4; ++l)
    for (int o = 0; o < 6; ++o) {
      const double ea = band_energy(a.subband(l, o)), eb = band_energy(b.subband(l, o));
      EXPECT_LE(std::abs(eb - ea) / ea, 0.05) << "level " << l << " orientation " << o;
    }
}

TEST(Dtcwt, EnergyIsPreserved) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto img = uniform_noise(128, 96, 100 + seed);
    const int levels = 1 + static_cast<int>(seed % 4);
    const auto s = dtcwt_forward(img, levels);
    double ex = 0, ec = 0;
    for (double v : img.pixels) ex += v * v;
    for (int l = 0; l < levels; ++l)
      for (int o = 0; o < 6; ++o) ec += band_energy(s.subband(l, o));
    for (double v : s.lowpass.data) ec += v * v;
    EXPECT_NEAR(ec / ex, 1.0, 0.01) << "seed " << seed;
  }
}

TEST(Dtcwt, OrientationSelectivity) {
  // vertical stripes: horizontal frequency only, which lands in the 75° / 105° pair
  GrayImage img(128, 128);
  for (std::size_t r = 0; r < 128; ++r)
    for (std::size_t c = 0; c < 128; ++c) img(r, c) = 0.5 + 0.5 * std::cos(2 * M_PI * c / 4.0);
  const auto s = dtcwt_forward(img, 1);
  const double e = band_energy(s.subband(0, 2)) + band_energy(s.subband(0, 3));
  EXPECT_GT(e, 100.0);
  for (int o : {0, 1, 4, 5}) EXPECT_LT(band_energy(s.subband(0, o)), 1e-20 * e) << o;
}

TEST(Dtcwt, Errors) {
  EXPECT_THROW(dtcwt_forward(GrayImage(31, 64), 1), ImageTooSmall);
  EXPECT_THROW(dtcwt_forward(GrayImage(64, 63), 5), ImageTooSmall);
  EXPECT_NO_THROW(dtcwt_forward(GrayImage(64, 64), 5));
  EXPECT_THROW(dtcwt_forward(GrayImage(64, 64), 0), DomainError);
  EXPECT_THROW(dtcwt_forward(GrayImage(64, 64), 6), DomainError);
}

TEST(Dtcwt, FilterTable) {
  namespace f = filters;
  // lowpass DC gains are 1; highpass filters reject DC
  auto sum = [](const auto& h) { return std::accumulate(h.begin(), h.end(), 0.0); };
  EXPECT_NEAR(sum(f::h0o), 1.0, 1e-15);
  EXPECT_NEAR(sum(f::h1o), 0.0, 1e-15);
  EXPECT_NEAR(sum(f::h0a), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(sum(f::h1a), 0.0, 1e-6);  // not exactly zero in the published table
  for (std::size_t i = 0; i < 14; ++i) {
    EXPECT_EQ(f::h0b[i], f::h0a[13 - i]);
    EXPECT_EQ(f::h1b[i], f::h1a[13 - i]);
  }
}

}  // namespace
}  // namespace texgeo
