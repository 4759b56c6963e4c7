#pragma once

// Signature sets as weighted complete graphs. Shortest paths over the
// divergence-initialised edges approximate geodesic distances.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "texgeo/errors.hpp"
#include "texgeo/parallel.hpp"
#include "texgeo/signature.hpp"

namespace texgeo {

inline constexpr double kNoEdge = std::numeric_limits<double>::infinity();

/// Square row-major matrix with one label per row. +inf marks a missing edge
/// (only produced by sparsification).
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n, std::vector<std::string> labels = {})
      : n_(n), d_(n * n, 0.0), labels_(std::move(labels)) {
    if (labels_.empty()) {
      labels_.reserve(n);
      for (std::size_t i = 0; i < n; ++i) labels_.push_back(std::to_string(i));
    }
    if (labels_.size() != n) throw StructureMismatch("label count does not match matrix size");
  }
  DistanceMatrix(std::size_t n, std::vector<double> values, std::vector<std::string> labels)
      : DistanceMatrix(n, std::move(labels)) {
    if (values.size() != n * n) throw StructureMismatch("matrix needs n*n values");
    d_ = std::move(values);
  }

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return d_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  double* row(std::size_t i) { return d_.data() + i * n_; }
  const double* row(std::size_t i) const { return d_.data() + i * n_; }
  const std::vector<double>& values() const { return d_; }
  const std::vector<std::string>& labels() const { return labels_; }

  bool is_symmetric() const {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }

  /// Zero diagonal, no NaN, no negative entries; `allow_missing` admits +inf.
  void validate(bool allow_missing = false) const {
    for (std::size_t i = 0; i < n_; ++i) {
      if ((*this)(i, i) != 0.0) throw DomainError("distance matrix diagonal must be zero");
      for (std::size_t j = 0; j < n_; ++j) {
        const double v = (*this)(i, j);
        if (std::isnan(v) || v < 0.0) throw DomainError("distance matrix entries must be nonnegative");
        if (!allow_missing && !std::isfinite(v)) throw DomainError("distance matrix entries must be finite");
      }
    }
  }

  bool operator==(const DistanceMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
  std::vector<std::string> labels_;
};

enum class EdgeWeight { SKLD, SqrtTwoSKLD, KLDDirected };

inline const char* to_string(EdgeWeight w) {
  switch (w) {
    case EdgeWeight::SKLD: return "skld";
    case EdgeWeight::SqrtTwoSKLD: return "sqrt2skld";
    case EdgeWeight::KLDDirected: return "kld";
  }
  return "?";
}

inline EdgeWeight edge_weight_from_string(const std::string& s) {
  if (s == "skld" || s == "SKLD") return EdgeWeight::SKLD;
  if (s == "sqrt2skld" || s == "SqrtTwoSKLD" || s == "gdskld") return EdgeWeight::SqrtTwoSKLD;
  if (s == "kld" || s == "KLD" || s == "KLDDirected") return EdgeWeight::KLDDirected;
  throw ConfigError("unknown edge weight '" + s + "'");
}

inline Measure edge_measure(EdgeWeight w) {
  switch (w) {
    case EdgeWeight::SKLD: return Measure::SKLD;
    case EdgeWeight::SqrtTwoSKLD: return Measure::GDSKLD;
    case EdgeWeight::KLDDirected: return Measure::KLD;
  }
  return Measure::GDSKLD;
}

/// d[i][j] = aggregated per-subband weight between signatures i and j.
inline DistanceMatrix build_distance_matrix(std::span<const Signature> sigs,
                                            EdgeWeight weight = EdgeWeight::SqrtTwoSKLD,
                                            Aggregation agg = Aggregation::Sum, std::vector<std::string> labels = {},
                                            unsigned workers = 1) {
  if (sigs.size() < 2) throw DomainError("a distance matrix needs at least two signatures");
  for (const auto& s : sigs) require_same_structure(sigs[0], s);
  const std::size_t n = sigs.size();
  DistanceMatrix D(n, std::move(labels));
  const Measure m = edge_measure(weight);
  const bool symmetric = weight != EdgeWeight::KLDDirected;
  parallel_for(n, workers, [&](std::size_t i) {
    for (std::size_t j = symmetric ? i + 1 : 0; j < n; ++j) {
      if (i == j) continue;
      const double v = signature_distance(sigs[i], sigs[j], m, agg);
      D(i, j) = v;
      if (symmetric) D(j, i) = v;
    }
  });
  return D;
}

/// Same construction for bare manifold points (one subband per item).
inline DistanceMatrix build_point_matrix(std::span<const ManifoldPoint> pts,
                                         EdgeWeight weight = EdgeWeight::SqrtTwoSKLD) {
  if (pts.size() < 2) throw DomainError("a distance matrix needs at least two points");
  const std::size_t n = pts.size();
  DistanceMatrix D(n);
  const Measure m = edge_measure(weight);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) D(i, j) = point_measure(pts[i], pts[j], m);
  return D;
}

/// Keeps edge (i, j) only if j is among the k nearest neighbours of i or vice versa.
inline DistanceMatrix knn_sparsify(const DistanceMatrix& D, std::size_t k) {
  const std::size_t n = D.size();
  if (k == 0) throw DomainError("knn_sparsify: k must be at least 1");
  std::vector<char> keep(n * n, 0);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return D(i, a) < D(i, b); });
    std::size_t taken = 0;
    for (std::size_t j : order) {
      if (j == i) continue;
      if (taken++ == k) break;
      keep[i * n + j] = keep[j * n + i] = 1;
    }
  }
  DistanceMatrix out = D;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && !keep[i * n + j]) out(i, j) = kNoEdge;
  return out;
}

// ---------------------------------------------------------------------------
// All-pairs shortest paths

struct ShortestPathResult {
  DistanceMatrix dist;
  /// next[i*n + j]: first vertex after i on a shortest path to j, -1 if unreachable.
  std::optional<std::vector<long>> next;

  std::vector<std::size_t> path(std::size_t i, std::size_t j) const {
    if (!next) throw DomainError("path reconstruction was not requested");
    const std::size_t n = dist.size();
    std::vector<std::size_t> out;
    if ((*next)[i * n + j] < 0) return out;
    out.push_back(i);
    while (i != j) {
      i = static_cast<std::size_t>((*next)[i * n + j]);
      out.push_back(i);
    }
    return out;
  }
};

struct FloydWarshallOptions {
  bool record_paths = false;
  unsigned workers = 1;
  bool exact_closure = true;  // re-sweep until no entry changes (rounding)
};

/// Floyd-Warshall with the k loop outermost. A relaxation only happens on a
/// strict improvement, so ties keep the earliest (lowest-k) route.
inline ShortestPathResult floyd_warshall(const DistanceMatrix& D, const FloydWarshallOptions& opt = {}) {
  const std::size_t n = D.size();
  for (double v : D.values())
    if (std::isnan(v)) throw DomainError("floyd_warshall: NaN edge weight");
  ShortestPathResult r{D, std::nullopt};
  DistanceMatrix& d = r.dist;
  std::vector<long> next;
  if (opt.record_paths) {
    next.assign(n * n, -1);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i == j || std::isfinite(d(i, j))) next[i * n + j] = static_cast<long>(j);
  }

  std::vector<char> changed(n, 0);
  auto relax_row = [&](std::size_t k, std::size_t i) {
    double* ri = d.row(i);
    const double* rk = d.row(k);
    const double dik = ri[k];
    if (!std::isfinite(dik)) return;
    bool any = false;
    if (opt.record_paths) {
      long* ni = next.data() + i * n;
      const long via = ni[k];
      for (std::size_t j = 0; j < n; ++j) {
        const double cand = dik + rk[j];
        if (cand < ri[j]) {
          ri[j] = cand;
          ni[j] = via;
          any = true;
        }
      }
    } else {
      for (std::size_t j = 0; j < n; ++j) {
        const double cand = dik + rk[j];
        if (cand < ri[j]) {
          ri[j] = cand;
          any = true;
        }
      }
    }
    if (any) changed[i] = 1;
  };

  // Row k and column k are fixed during phase k, so rows can be split across workers.
  const unsigned workers = resolve_workers(opt.workers);
  auto sweep = [&] {
    std::fill(changed.begin(), changed.end(), 0);
    for (std::size_t k = 0; k < n; ++k) {
      if (workers <= 1 || n < 64)
        for (std::size_t i = 0; i < n; ++i) relax_row(k, i);
      else
        parallel_for(n, workers, [&](std::size_t i) { relax_row(k, i); });
    }
    return std::find(changed.begin(), changed.end(), 1) != changed.end();
  };
  bool more = sweep();
  for (std::size_t pass = 0; opt.exact_closure && more && pass < n; ++pass) more = sweep();

  for (std::size_t i = 0; i < n; ++i)
    if (d(i, i) < 0.0) throw NegativeCycle("negative cycle through vertex " + std::to_string(i));
  if (opt.record_paths) r.next = std::move(next);
  return r;
}

/// Shortest-path distances from a new vertex with the given edge weights to
/// every existing vertex, reusing the closure S.
inline std::vector<double> insert_query(const ShortestPathResult& S, std::span<const double> query_edges) {
  const std::size_t n = S.dist.size();
  if (query_edges.size() != n) throw StructureMismatch("query edge count does not match the graph");
  for (double q : query_edges)
    if (std::isnan(q) || q < 0.0) throw DomainError("query edges must be nonnegative");
  std::vector<double> out(n, kNoEdge);
  for (std::size_t k = 0; k < n; ++k) {
    const double qk = query_edges[k];
    if (!std::isfinite(qk)) continue;
    const double* rk = S.dist.row(k);
    for (std::size_t j = 0; j < n; ++j) out[j] = std::min(out[j], qk + rk[j]);
  }
  return out;
}

struct MetricityReport {
  double max_triangle_violation = 0.0;  // max of d[i][j] - d[i][k] - d[k][j], clamped at 0
  std::size_t triangle_violations = 0;  // triples above 1e-12 relative slack
  double symmetry_defect = 0.0;         // max |d[i][j] - d[j][i]|
  std::size_t identity_violations = 0;  // nonzero diagonal entries
  std::size_t zero_off_diagonal = 0;    // i != j with d = 0 (duplicate items)

  bool ok() const { return triangle_violations == 0 && symmetry_defect == 0.0 && identity_violations == 0; }
};

inline MetricityReport validate_metricity(const DistanceMatrix& d) {
  MetricityReport rep;
  const std::size_t n = d.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (d(i, i) != 0.0) ++rep.identity_violations;
    for (std::size_t j = 0; j < n; ++j) {
      const double dij = d(i, j);
      if (i != j && dij == 0.0) ++rep.zero_off_diagonal;
      if (std::isfinite(dij) && std::isfinite(d(j, i)))
        rep.symmetry_defect = std::max(rep.symmetry_defect, std::abs(dij - d(j, i)));
      else if (std::isfinite(dij) != std::isfinite(d(j, i)))
        rep.symmetry_defect = kNoEdge;
      for (std::size_t k = 0; k < n; ++k) {
        const double via = d(i, k) + d(k, j);
        const double excess = dij - via;
        if (excess > 0.0) {
          rep.max_triangle_violation = std::max(rep.max_triangle_violation, excess);
          if (excess > 1e-12 * std::max(1.0, via)) ++rep.triangle_violations;
        }
      }
    }
  }
  return rep;
}

inline MetricityReport validate_metricity(const ShortestPathResult& S) { return validate_metricity(S.dist); }

}  // namespace texgeo
