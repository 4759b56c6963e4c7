#pragma once

// Distance-matrix files.
//   CSV:    header row of labels, then n rows of n values (17 significant digits).
//   Binary: "DMAT", version byte, n as u64 little-endian, n*n f64 little-endian, row-major.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "texgeo/errors.hpp"
#include "texgeo/graph.hpp"

namespace texgeo {

inline constexpr std::uint8_t kDmatVersion = 1;

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  out.push_back(cell);
  return out;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string format_double(double v, int digits) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline double parse_double(const std::string& s) {
  if (s == "inf" || s == "Inf" || s == "INF") return kNoEdge;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw DecodeError("bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw DecodeError("bad number '" + s + "'");
  }
}

inline void put_u64_le(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint64_t get_u64_le(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw DecodeError("DMAT file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace detail

inline void write_matrix_csv(const DistanceMatrix& D, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  const std::size_t n = D.size();
  for (std::size_t j = 0; j < n; ++j) os << (j ? "," : "") << detail::csv_escape(D.labels()[j]);
  os << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) os << (j ? "," : "") << detail::format_double(D(i, j), 17);
    os << '\n';
  }
  if (!os) throw IoError("write failed for " + path);
}

inline DistanceMatrix read_matrix_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path);
  std::string line;
  if (!std::getline(is, line)) throw DecodeError(path + ": empty matrix file");
  auto labels = detail::split_csv_line(line);
  const std::size_t n = labels.size();
  std::vector<double> values;
  values.reserve(n * n);
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != n) throw DecodeError(path + ": row " + std::to_string(rows + 1) + " has wrong length");
    for (const auto& c : cells) values.push_back(detail::parse_double(c));
    ++rows;
  }
  if (rows != n) throw DecodeError(path + ": expected " + std::to_string(n) + " rows");
  DistanceMatrix D(n, std::move(values), std::move(labels));
  D.validate(true);
  return D;
}

inline void write_matrix_binary(const DistanceMatrix& D, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  os.write("DMAT", 4);
  os.put(static_cast<char>(kDmatVersion));
  detail::put_u64_le(os, D.size());
  for (double v : D.values()) detail::put_u64_le(os, std::bit_cast<std::uint64_t>(v));
  if (!os) throw IoError("write failed for " + path);
}

inline DistanceMatrix read_matrix_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "DMAT", 4) != 0) throw DecodeError(path + ": not a DMAT file");
  const int version = is.get();
  if (version == EOF) throw DecodeError(path + ": DMAT file truncated");
  if (version != kDmatVersion) throw VersionMismatch(path + ": unsupported DMAT version " + std::to_string(version));
  const std::uint64_t n = detail::get_u64_le(is);
  if (n > (1u << 20)) throw DecodeError(path + ": implausible matrix size");
  std::vector<double> values(n * n);
  for (auto& v : values) v = std::bit_cast<double>(detail::get_u64_le(is));
  if (is.peek() != EOF) throw DecodeError(path + ": trailing bytes after matrix");
  DistanceMatrix D(n, std::move(values), {});
  D.validate(true);
  return D;
}

/// Dispatches on the file's first bytes rather than its extension.
inline DistanceMatrix read_matrix(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path);
  char magic[4] = {};
  is.read(magic, 4);
  if (is.gcount() == 4 && std::memcmp(magic, "DMAT", 4) == 0) return read_matrix_binary(path);
  return read_matrix_csv(path);
}

inline void write_matrix(const DistanceMatrix& D, const std::string& path) {
  const bool binary = path.size() >= 5 && (path.ends_with(".dmat") || path.ends_with(".bin"));
  binary ? write_matrix_binary(D, path) : write_matrix_csv(D, path);
}

}  // namespace texgeo
