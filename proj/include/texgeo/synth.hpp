#pragma once

// Synthetic texture datasets: seeded white noise shaped by a per-class Gabor
// filter, written as 8-bit PNG in one directory per class.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "texgeo/errors.hpp"
#include "texgeo/image.hpp"

namespace texgeo {

enum class SynthPreset { Separated, Overlapping };

inline const char* to_string(SynthPreset p) { return p == SynthPreset::Separated ? "separated" : "overlapping"; }

inline SynthPreset synth_preset_from_string(const std::string& s) {
  if (s == "separated") return SynthPreset::Separated;
  if (s == "overlapping") return SynthPreset::Overlapping;
  throw ConfigError("unknown synth preset '" + s + "' (expected separated or overlapping)");
}

struct SynthOptions {
  int classes = 5;
  int per_class = 8;
  std::size_t size = 128;
  std::uint64_t seed = 1;
  SynthPreset preset = SynthPreset::Separated;
};

/// Spectral shape of one class: orientation (radians), centre frequency
/// (cycles/pixel), envelope width (pixels) and output contrast.
struct TextureSpec {
  double theta = 0.0;
  double frequency = 0.1;
  double sigma = 3.0;
  double contrast = 0.1;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

}  // namespace detail

inline TextureSpec class_spec(const SynthOptions& opt, int cls) {
  const double n = std::max(1, opt.classes);
  const double u = opt.classes > 1 ? cls / (n - 1) : 0.0;
  TextureSpec s;
  if (opt.preset == SynthPreset::Separated) {
    s.theta = std::numbers::pi * cls / n;
    s.frequency = 0.05 + 0.25 * u;
    s.sigma = 2.5 + 2.0 * (1.0 - u);
    s.contrast = 0.04 + 0.08 * u;
  } else {
    s.theta = 0.5 * std::numbers::pi * cls / n;
    s.frequency = 0.12 + 0.04 * u;
    s.sigma = 3.0;
    s.contrast = 0.09 + 0.02 * u;
  }
  return s;
}

/// Per-image jitter around the class spec; larger for the overlapping preset.
inline TextureSpec image_spec(const SynthOptions& opt, int cls, int img) {
  TextureSpec s = class_spec(opt, cls);
  std::mt19937_64 rng(detail::derive_seed(opt.seed, 0x5eed0000u + cls, img));
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double j = opt.preset == SynthPreset::Separated ? 0.02 : 0.15;
  s.theta += j * 0.5 * U(rng);
  s.frequency *= 1.0 + j * U(rng);
  s.contrast *= 1.0 + j * U(rng);
  return s;
}

/// Unit-variance white noise convolved (circularly) with a Gabor kernel, then
/// scaled so the pixel standard deviation is spec.contrast around 0.5.
inline GrayImage gabor_texture(const TextureSpec& spec, std::size_t size, std::uint64_t seed) {
  const long n = static_cast<long>(size);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  std::vector<double> noise(size * size);
  for (auto& v : noise) v = N(rng);

  const int rad = static_cast<int>(std::ceil(3.0 * spec.sigma));
  const int w = 2 * rad + 1;
  std::vector<double> k(static_cast<std::size_t>(w * w));
  const double c = std::cos(spec.theta), s = std::sin(spec.theta);
  double energy = 0.0;
  for (int y = -rad; y <= rad; ++y)
    for (int x = -rad; x <= rad; ++x) {
      const double env = std::exp(-(x * x + y * y) / (2.0 * spec.sigma * spec.sigma));
      const double v = env * std::cos(2.0 * std::numbers::pi * spec.frequency * (x * c + y * s));
      k[(y + rad) * w + (x + rad)] = v;
      energy += v * v;
    }
  const double scale = spec.contrast / std::sqrt(energy);

  GrayImage img(size, size);
  for (long r = 0; r < n; ++r)
    for (long col = 0; col < n; ++col) {
      double acc = 0.0;
      for (int y = -rad; y <= rad; ++y) {
        const long rr = ((r + y) % n + n) % n;
        const double* row = &noise[rr * n];
        const double* kr = &k[(y + rad) * w];
        for (int x = -rad; x <= rad; ++x) acc += kr[x + rad] * row[((col + x) % n + n) % n];
      }
      img(r, col) = std::clamp(0.5 + scale * acc, 0.0, 1.0);
    }
  return img;
}

inline GrayImage synth_image(const SynthOptions& opt, int cls, int img) {
  return gabor_texture(image_spec(opt, cls, img), opt.size, detail::derive_seed(opt.seed, cls, img));
}

inline std::string synth_class_name(int cls) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "class%02d", cls);
  return buf;
}

/// Writes root/classNN/imgNN.png; returns the written paths in order.
inline std::vector<std::string> write_synth_dataset(const std::string& root, const SynthOptions& opt) {
  namespace fs = std::filesystem;
  if (opt.classes < 1 || opt.per_class < 1) throw ConfigError("synth needs at least one class and one image");
  if (opt.size < 32) throw ConfigError("synth image size must be at least 32");
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw IoError("cannot create " + root + ": " + ec.message());
  std::vector<std::string> out;
  for (int c = 0; c < opt.classes; ++c) {
    const fs::path dir = fs::path(root) / synth_class_name(c);
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    for (int i = 0; i < opt.per_class; ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "img%02d.png", i);
      const auto path = (dir / name).string();
      save_png(synth_image(opt, c, i), path);
      out.push_back(path);
    }
  }
  return out;
}

}  // namespace texgeo
