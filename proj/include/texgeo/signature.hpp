#pragma once

// Image signatures: one fitted (scale, shape) pair per DTCWT subband, and the
// subband-aggregated distance between two signatures.

#include <cmath>
#include <string>
#include <vector>

#include "texgeo/divergences.hpp"
#include "texgeo/errors.hpp"
#include "texgeo/geometry.hpp"
#include "texgeo/manifold_point.hpp"

namespace texgeo {

inline constexpr int kOrientations = 6;
inline constexpr int kMaxLevels = 5;

/// Per-subband parameters, level-major then orientation.
class Signature {
 public:
  Signature(Family family, int levels, std::vector<Vec2> params)
      : family_(family), levels_(levels), params_(std::move(params)) {
    if (levels_ < 1 || levels_ > kMaxLevels) throw DomainError("signature levels must be in [1, 5]");
    if (params_.size() != static_cast<std::size_t>(kOrientations * levels_))
      throw StructureMismatch("signature needs 6 parameter pairs per level, got " + std::to_string(params_.size()));
    for (const auto& p : params_) (void)ManifoldPoint(family_, p);  // validates
  }

  Family family() const { return family_; }
  int levels() const { return levels_; }
  std::size_t size() const { return params_.size(); }
  const std::vector<Vec2>& params() const { return params_; }
  ManifoldPoint point(std::size_t j) const { return ManifoldPoint(family_, params_[j]); }
  static std::size_t index(int level, int orientation) {
    return static_cast<std::size_t>(level * kOrientations + orientation);
  }

  bool operator==(const Signature&) const = default;

 private:
  Family family_;
  int levels_;
  std::vector<Vec2> params_;
};

enum class Measure { KLD, SKLD, GDSKLD };
enum class Aggregation { Sum, L2 };

inline const char* to_string(Measure m) {
  switch (m) {
    case Measure::KLD: return "KLD";
    case Measure::SKLD: return "SKLD";
    case Measure::GDSKLD: return "GDSKLD";
  }
  return "?";
}

inline const char* to_string(Aggregation a) { return a == Aggregation::Sum ? "sum" : "l2"; }

inline Measure measure_from_string(const std::string& s) {
  if (s == "KLD" || s == "kld") return Measure::KLD;
  if (s == "SKLD" || s == "skld") return Measure::SKLD;
  if (s == "GDSKLD" || s == "gdskld") return Measure::GDSKLD;
  throw ConfigError("unknown measure '" + s + "'");
}

inline Aggregation aggregation_from_string(const std::string& s) {
  if (s == "sum" || s == "Sum") return Aggregation::Sum;
  if (s == "l2" || s == "L2") return Aggregation::L2;
  throw ConfigError("unknown aggregation '" + s + "'");
}

inline void require_same_structure(const Signature& a, const Signature& b) {
  if (a.family() != b.family() || a.levels() != b.levels())
    throw StructureMismatch("signatures differ in family or decomposition levels");
}

inline double point_measure(const ManifoldPoint& p, const ManifoldPoint& q, Measure m) {
  switch (m) {
    case Measure::KLD: return kld(p, q);
    case Measure::SKLD: return skld(p, q);
    case Measure::GDSKLD: return gd_skld(p, q);
  }
  return 0.0;
}

/// Σ_j m(a_j, b_j) over subbands (Sum) or its Euclidean counterpart (L2).
inline double signature_distance(const Signature& a, const Signature& b, Measure m = Measure::GDSKLD,
                                 Aggregation agg = Aggregation::Sum) {
  require_same_structure(a, b);
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double v = point_measure(a.point(j), b.point(j), m);
    acc += agg == Aggregation::Sum ? v : v * v;
  }
  return agg == Aggregation::Sum ? acc : std::sqrt(acc);
}

}  // namespace texgeo
