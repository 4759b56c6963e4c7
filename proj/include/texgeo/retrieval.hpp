#pragma once

// Dataset ingestion, leave-one-in query evaluation, average retrieval rate and
// precision/recall curves.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "texgeo/database.hpp"
#include "texgeo/errors.hpp"
#include "texgeo/graph.hpp"
#include "texgeo/parallel.hpp"
#include "texgeo/signature.hpp"

namespace texgeo {

// ---------------------------------------------------------------------------
// Datasets

enum class Layout { DirPerClass, PrefixMap };

inline Layout layout_from_string(const std::string& s) {
  if (s == "dir" || s == "dir-per-class" || s == "DirPerClass") return Layout::DirPerClass;
  if (s == "prefix" || s == "prefix-map" || s == "PrefixMap") return Layout::PrefixMap;
  throw ConfigError("unknown dataset layout '" + s + "'");
}

struct DatasetItem {
  std::string id;
  std::string path;
  std::string label;
};

struct DatasetIndex {
  std::vector<DatasetItem> items;  // sorted by id
  std::vector<std::string> warnings;

  std::size_t size() const { return items.size(); }

  std::map<std::string, std::size_t> class_sizes() const {
    std::map<std::string, std::size_t> out;
    for (const auto& it : items) ++out[it.label];
    return out;
  }

  std::size_t class_size(const std::string& label) const {
    std::size_t n = 0;
    for (const auto& it : items) n += it.label == label;
    return n;
  }

  /// Common class size, or nullopt when classes differ in size.
  std::optional<std::size_t> uniform_class_size() const {
    const auto sizes = class_sizes();
    if (sizes.empty()) return std::nullopt;
    const std::size_t first = sizes.begin()->second;
    for (const auto& [label, n] : sizes)
      if (n != first) return std::nullopt;
    return first;
  }
};

inline bool is_image_file(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".pgm";
}

namespace detail {

inline void finish_index(DatasetIndex& idx, const std::string& root) {
  if (idx.items.empty()) throw EmptyDataset("no PNG/PGM images found under " + root);
  std::sort(idx.items.begin(), idx.items.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (const auto& [label, n] : idx.class_sizes())
    if (n == 1) idx.warnings.push_back("class '" + label + "' has a single member; it is not used as a query");
  if (idx.class_sizes().size() < 2) idx.warnings.push_back("dataset has a single class");
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline constexpr const char* kManifestName = "classes.txt";

/// DirPerClass: every subdirectory of root is a class; ids are "class/file".
/// PrefixMap: images sit directly in root and a manifest (default
/// root/classes.txt) holds "prefix,class" lines; the longest matching prefix
/// wins and ids are file names.
inline DatasetIndex ingest_dataset(const std::string& root, Layout layout, const std::string& manifest = {}) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IoError("dataset root '" + root + "' is not a readable directory");
  DatasetIndex idx;
  if (layout == Layout::DirPerClass) {
    for (const auto& dir : fs::directory_iterator(root)) {
      if (!dir.is_directory()) continue;
      const std::string label = dir.path().filename().string();
      for (const auto& f : fs::directory_iterator(dir.path())) {
        if (!f.is_regular_file() || !is_image_file(f.path())) continue;
        idx.items.push_back({label + "/" + f.path().filename().string(), f.path().string(), label});
      }
    }
  } else {
    const std::string mpath = manifest.empty() ? (fs::path(root) / kManifestName).string() : manifest;
    std::ifstream is(mpath);
    if (!is) throw IoError("cannot read class manifest " + mpath);
    std::vector<std::pair<std::string, std::string>> prefixes;
    std::string line;
    while (std::getline(is, line)) {
      line = detail::trim(line);
      if (line.empty() || line[0] == '#') continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw ConfigError(mpath + ": expected 'prefix,class' in '" + line + "'");
      prefixes.emplace_back(detail::trim(line.substr(0, comma)), detail::trim(line.substr(comma + 1)));
    }
    std::sort(prefixes.begin(), prefixes.end(),
              [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
    for (const auto& f : fs::directory_iterator(root)) {
      if (!f.is_regular_file() || !is_image_file(f.path())) continue;
      const std::string name = f.path().filename().string();
      const auto hit = std::find_if(prefixes.begin(), prefixes.end(),
                                    [&](const auto& p) { return name.starts_with(p.first); });
      if (hit == prefixes.end()) {
        idx.warnings.push_back("no class prefix matches '" + name + "'; skipped");
        continue;
      }
      idx.items.push_back({name, f.path().string(), hit->second});
    }
  }
  detail::finish_index(idx, root);
  return idx;
}

/// Index built from a database's own ids and class labels.
inline DatasetIndex index_from_db(const SignatureDB& db) {
  DatasetIndex idx;
  for (const auto& e : db.entries()) idx.items.push_back({e.id, {}, e.label});
  detail::finish_index(idx, "database");
  return idx;
}

// ---------------------------------------------------------------------------
// Evaluation

enum class Method { KLD, SKLD, GDSKLD, GDFloyd };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::KLD: return "KLD";
    case Method::SKLD: return "SKLD";
    case Method::GDSKLD: return "GDSKLD";
    case Method::GDFloyd: return "GDFloyd";
  }
  return "?";
}

inline Method method_from_string(const std::string& s) {
  std::string u = s;
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return std::toupper(c); });
  if (u == "KLD") return Method::KLD;
  if (u == "SKLD") return Method::SKLD;
  if (u == "GDSKLD") return Method::GDSKLD;
  if (u == "GDFLOYD") return Method::GDFloyd;
  throw ConfigError("unknown method '" + s + "'");
}

struct EvalOptions {
  bool include_query = true;
  unsigned workers = 1;
  std::optional<Family> expected_family;
  std::optional<int> expected_levels;
};

struct QueryResult {
  std::string id;
  std::string label;
  std::size_t relevant = 0;          // N_R for this query
  std::vector<std::size_t> ranking;  // item positions, best first
};

/// Rankings for every query of an evaluation run.
struct RankingSet {
  Method method = Method::GDSKLD;
  std::size_t depth = 0;  // length of each ranking
  std::vector<QueryResult> queries;
  std::vector<std::string> labels;  // class label per item position
};

struct RetrievalReport {
  std::string method;
  std::size_t K = 0;
  double arr = 0.0;
  std::vector<std::string> query_ids;
  std::vector<std::size_t> hits;      // n_q(K)
  std::vector<std::size_t> relevant;  // N_R per query
};

struct PrPoint {
  std::size_t N = 0;
  double precision = 0.0;
  double recall = 0.0;
};

struct PrCurve {
  std::string method;
  std::vector<PrPoint> points;
};

/// (1/Q) Σ_q n_q / N_R(q); with a common N_R this is Σ n_q / (N_t N_R).
inline double arr_from_hits(std::span<const std::size_t> hits, std::span<const std::size_t> relevant) {
  if (hits.size() != relevant.size()) throw DomainError("hits and relevant counts differ in length");
  if (hits.empty()) throw EmptyDataset("no queries to average");
  double acc = 0.0;
  for (std::size_t q = 0; q < hits.size(); ++q) {
    if (relevant[q] == 0) throw DomainError("query without relevant items");
    acc += static_cast<double>(hits[q]) / static_cast<double>(relevant[q]);
  }
  return acc / static_cast<double>(hits.size());
}

inline double arr_from_hits(std::span<const std::size_t> hits, std::size_t relevant) {
  return arr_from_hits(hits, std::vector<std::size_t>(hits.size(), relevant));
}

namespace detail {

inline EdgeWeight direct_weight(Method m) {
  switch (m) {
    case Method::KLD: return EdgeWeight::KLDDirected;
    case Method::SKLD: return EdgeWeight::SKLD;
    default: return EdgeWeight::SqrtTwoSKLD;
  }
}

}  // namespace detail

/// Query q against target t uses d(q, t); KLD is taken from the query.
inline DistanceMatrix method_matrix(const SignatureDB& db, const DatasetIndex& index, Method method,
                                    const EvalOptions& opt = {}) {
  const auto& cfg = db.config();
  if ((opt.expected_family && *opt.expected_family != cfg.family) ||
      (opt.expected_levels && *opt.expected_levels != cfg.levels))
    throw VersionMismatch("database holds " + std::string(to_string(cfg.family)) + " signatures with " +
                          std::to_string(cfg.levels) + " levels, run expects " +
                          (opt.expected_family ? to_string(*opt.expected_family) : to_string(cfg.family)) +
                          " with " + std::to_string(opt.expected_levels.value_or(cfg.levels)) + " levels");
  std::vector<Signature> sigs;
  std::vector<std::string> ids;
  std::size_t missing = 0;
  std::string first_missing;
  for (const auto& it : index.items) {
    if (!db.contains(it.id)) {
      if (missing++ == 0) first_missing = it.id;
      continue;
    }
    sigs.push_back(db.at(it.id).signature);
    ids.push_back(it.id);
  }
  if (missing)
    throw MissingSignatures(std::to_string(missing) + " dataset item(s) have no signature, first '" + first_missing +
                            "'");
  if (method != Method::GDFloyd)
    return build_distance_matrix(sigs, detail::direct_weight(method), cfg.aggregation, ids, opt.workers);
  const bool same_order = db.size() == ids.size() &&
                          std::equal(ids.begin(), ids.end(), db.entries().begin(),
                                     [](const std::string& id, const DbEntry& e) { return id == e.id; });
  if (same_order) return db.closure(opt.workers)->dist;
  FloydWarshallOptions fw;
  fw.workers = opt.workers;
  return floyd_warshall(build_distance_matrix(sigs, cfg.edge_weight, cfg.aggregation, ids, opt.workers), fw).dist;
}

/// Sorts every row: with include_query the query comes first, the rest by
/// (distance, position), position being id order.
inline RankingSet rank_all(const DistanceMatrix& D, const DatasetIndex& index, Method method, bool include_query) {
  const std::size_t n = D.size();
  if (n != index.size()) throw DomainError("distance matrix and dataset differ in size");
  const auto sizes = index.class_sizes();
  RankingSet out;
  out.method = method;
  out.depth = include_query ? n : n - 1;
  for (const auto& it : index.items) out.labels.push_back(it.label);
  for (std::size_t q = 0; q < n; ++q) {
    const std::size_t cls = sizes.at(index.items[q].label);
    if (cls < 2) continue;  // singleton classes are not queries
    QueryResult r;
    r.id = index.items[q].id;
    r.label = index.items[q].label;
    r.relevant = include_query ? cls : cls - 1;
    for (std::size_t t = 0; t < n; ++t)
      if (t != q) r.ranking.push_back(t);
    std::stable_sort(r.ranking.begin(), r.ranking.end(), [&](std::size_t a, std::size_t b) { return D(q, a) < D(q, b); });
    if (include_query) r.ranking.insert(r.ranking.begin(), q);
    out.queries.push_back(std::move(r));
  }
  if (out.queries.empty()) throw EmptyDataset("no class has two or more members; nothing to evaluate");
  return out;
}

/// n_q(K): same-class items among the first K of the ranking.
inline std::size_t hits_at(const RankingSet& R, const QueryResult& q, std::size_t K) {
  const std::size_t depth = std::min(K, q.ranking.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < depth; ++i) hits += R.labels[q.ranking[i]] == q.label;
  return hits;
}

inline RetrievalReport report_at(const RankingSet& R, std::size_t K) {
  if (K == 0) throw DomainError("K must be at least 1");
  if (K > R.depth) throw DomainError("K = " + std::to_string(K) + " exceeds the ranking depth " + std::to_string(R.depth));
  RetrievalReport rep;
  rep.method = to_string(R.method);
  rep.K = K;
  for (const auto& q : R.queries) {
    if (K < q.relevant)
      throw DomainError("K = " + std::to_string(K) + " is below N_R = " + std::to_string(q.relevant) + " for query '" +
                        q.id + "'");
    rep.query_ids.push_back(q.id);
    rep.hits.push_back(hits_at(R, q, K));
    rep.relevant.push_back(q.relevant);
  }
  rep.arr = arr_from_hits(rep.hits, rep.relevant);
  return rep;
}

/// precision(N) = mean n_q(N) / N, recall(N) = mean n_q(N) / N_R(q), N = 1..depth.
inline PrCurve pr_curve(const RankingSet& R) {
  PrCurve c;
  c.method = to_string(R.method);
  std::vector<double> prec(R.depth, 0.0), rec(R.depth, 0.0);
  for (const auto& q : R.queries) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < R.depth; ++i) {
      hits += R.labels[q.ranking[i]] == q.label;
      prec[i] += static_cast<double>(hits) / static_cast<double>(i + 1);
      rec[i] += static_cast<double>(hits) / static_cast<double>(q.relevant);
    }
  }
  const double nq = static_cast<double>(R.queries.size());
  for (std::size_t i = 0; i < R.depth; ++i) c.points.push_back({i + 1, prec[i] / nq, rec[i] / nq});
  return c;
}

inline RankingSet rank_dataset(const SignatureDB& db, const DatasetIndex& index, Method method,
                               const EvalOptions& opt = {}) {
  return rank_all(method_matrix(db, index, method, opt), index, method, opt.include_query);
}

/// K = 0 selects the largest per-query N_R.
inline RetrievalReport evaluate(const SignatureDB& db, const DatasetIndex& index, Method method, std::size_t K = 0,
                                const EvalOptions& opt = {}) {
  const auto R = rank_dataset(db, index, method, opt);
  if (K == 0)
    for (const auto& q : R.queries) K = std::max(K, q.relevant);
  return report_at(R, K);
}

inline PrCurve precision_recall(const SignatureDB& db, const DatasetIndex& index, Method method,
                                const EvalOptions& opt = {}) {
  return pr_curve(rank_dataset(db, index, method, opt));
}

}  // namespace texgeo
