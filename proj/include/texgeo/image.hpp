#pragma once

// Grayscale images: PNG (through libpng) and PGM (P2/P5) input, 8-bit PNG
// and PGM output.

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "texgeo/errors.hpp"

namespace texgeo {

/// Row-major pixels in [0, 1].
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> pixels;

  GrayImage() = default;
  GrayImage(std::size_t w, std::size_t h, double fill = 0.0) : width(w), height(h), pixels(w * h, fill) {}

  double& operator()(std::size_t row, std::size_t col) { return pixels[row * width + col]; }
  double operator()(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
  bool operator==(const GrayImage&) const = default;
};

inline double luma(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

namespace detail {

inline std::vector<unsigned char> read_bytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

inline GrayImage decode_png(const std::vector<unsigned char>& bytes, const std::string& what) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()))
    throw DecodeError(what + ": " + img.message);
  const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<unsigned char> buf(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw DecodeError(what + ": " + msg);
  }
  GrayImage out(img.width, img.height);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    if (color)
      out.pixels[i] = luma(buf[3 * i] / 255.0, buf[3 * i + 1] / 255.0, buf[3 * i + 2] / 255.0);
    else
      out.pixels[i] = buf[i] / 255.0;
  }
  png_image_free(&img);
  return out;
}

// Whitespace- and comment-separated header token of a PNM file.
inline std::string pnm_token(const std::vector<unsigned char>& b, std::size_t& pos) {
  for (;;) {
    while (pos < b.size() && std::isspace(b[pos])) ++pos;
    if (pos < b.size() && b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  std::string tok;
  while (pos < b.size() && !std::isspace(b[pos]) && b[pos] != '#') tok += static_cast<char>(b[pos++]);
  return tok;
}

inline std::size_t pnm_number(const std::vector<unsigned char>& b, std::size_t& pos, const std::string& what) {
  const std::string t = pnm_token(b, pos);
  if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    throw DecodeError(what + ": malformed PGM header");
  return std::stoul(t);
}

inline GrayImage decode_pgm(const std::vector<unsigned char>& b, const std::string& what) {
  std::size_t pos = 0;
  const std::string magic = pnm_token(b, pos);
  const std::size_t w = pnm_number(b, pos, what), h = pnm_number(b, pos, what), maxval = pnm_number(b, pos, what);
  if (w == 0 || h == 0 || maxval == 0 || maxval > 65535) throw DecodeError(what + ": invalid PGM dimensions");
  GrayImage out(w, h);
  if (magic == "P2") {
    for (auto& p : out.pixels) {
      const std::size_t v = pnm_number(b, pos, what);
      if (v > maxval) throw DecodeError(what + ": sample above maxval");
      p = static_cast<double>(v) / maxval;
    }
    return out;
  }
  ++pos;  // single whitespace byte before the raster
  const std::size_t bps = maxval < 256 ? 1 : 2;
  if (b.size() < pos + w * h * bps) throw DecodeError(what + ": truncated PGM raster");
  for (std::size_t i = 0; i < w * h; ++i) {
    const std::size_t v = bps == 1 ? b[pos + i] : (std::size_t{b[pos + 2 * i]} << 8) | b[pos + 2 * i + 1];
    if (v > maxval) throw DecodeError(what + ": sample above maxval");
    out.pixels[i] = static_cast<double>(v) / maxval;
  }
  return out;
}

inline unsigned char to_byte(double v) {
  return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace detail

/// Decodes PNG or PGM by content; colour is reduced with the luma weights.
inline GrayImage load_image(const std::string& path) {
  const auto bytes = detail::read_bytes(path);
  static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), png_sig, 8) == 0) return detail::decode_png(bytes, path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5'))
    return detail::decode_pgm(bytes, path);
  if (bytes.empty()) throw DecodeError(path + ": empty file");
  throw UnsupportedFormat(path + ": not a PNG or PGM (P2/P5) image");
}

inline void save_png(const GrayImage& img, const std::string& path) {
  std::vector<unsigned char> buf(img.pixels.size());
  std::transform(img.pixels.begin(), img.pixels.end(), buf.begin(), detail::to_byte);
  png_image out;
  std::memset(&out, 0, sizeof out);
  out.version = PNG_IMAGE_VERSION;
  out.width = static_cast<png_uint_32>(img.width);
  out.height = static_cast<png_uint_32>(img.height);
  out.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&out, path.c_str(), 0, buf.data(), 0, nullptr))
    throw IoError("cannot write " + path + ": " + out.message);
}

/// 8-bit binary PGM (P5).
inline void save_pgm(const GrayImage& img, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  os << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  for (double v : img.pixels) os.put(static_cast<char>(detail::to_byte(v)));
  if (!os) throw IoError("write failed for " + path);
}

}  // namespace texgeo
