#pragma once

// Signature database and its versioned JSON file.
//
// {"format": "texgeo-signature-db", "version": 1,
//  "config": {"family": ..., "levels": ..., "edge_weight": ..., "aggregation": ...},
//  "signatures": [{"id": ..., "class": ..., "params": [[scale, shape], ...]}, ...],
//  "checksum": "crc32:xxxxxxxx"}
//
// Floats are written with 17 significant digits. The checksum covers the
// canonical text of "config" and "signatures", regenerated on load.

#include <zlib.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "texgeo/errors.hpp"
#include "texgeo/graph.hpp"
#include "texgeo/signature.hpp"

namespace texgeo {

inline constexpr int kDbVersion = 1;
inline constexpr const char* kDbFormat = "texgeo-signature-db";

struct DbConfig {
  Family family = Family::Gamma;
  int levels = 3;
  EdgeWeight edge_weight = EdgeWeight::SqrtTwoSKLD;
  Aggregation aggregation = Aggregation::Sum;

  bool operator==(const DbConfig&) const = default;
};

struct DbEntry {
  std::string id;
  std::string label;
  Signature signature;
};

class SignatureDB {
 public:
  explicit SignatureDB(DbConfig config = {}) : config_(config) {}

  SignatureDB(const SignatureDB& o) : config_(o.config_), entries_(o.entries_), pos_(o.pos_) {}
  SignatureDB& operator=(const SignatureDB& o) {
    if (this != &o) {
      config_ = o.config_;
      entries_ = o.entries_;
      pos_ = o.pos_;
      invalidate();
    }
    return *this;
  }

  const DbConfig& config() const { return config_; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<DbEntry>& entries() const { return entries_; }

  /// Inserts or replaces; the signature must match the configured structure.
  void put(const std::string& id, const std::string& label, Signature sig) {
    if (sig.family() != config_.family || sig.levels() != config_.levels)
      throw StructureMismatch("signature for '" + id + "' is " + to_string(sig.family()) + "/" +
                              std::to_string(sig.levels()) + " levels; database expects " +
                              to_string(config_.family) + "/" + std::to_string(config_.levels));
    invalidate();
    if (auto it = pos_.find(id); it != pos_.end()) {
      entries_[it->second] = DbEntry{id, label, std::move(sig)};
      return;
    }
    pos_.emplace(id, entries_.size());
    entries_.push_back(DbEntry{id, label, std::move(sig)});
  }

  bool contains(const std::string& id) const { return pos_.contains(id); }
  const DbEntry& at(const std::string& id) const {
    const auto it = pos_.find(id);
    if (it == pos_.end()) throw MissingSignatures("no signature for '" + id + "'");
    return entries_[it->second];
  }

  /// Graph over all entries in insertion order, closed by Floyd-Warshall once.
  std::shared_ptr<const ShortestPathResult> closure(unsigned workers = 1) const {
    std::lock_guard lock(cache_mutex_);
    if (!closure_) {
      std::vector<Signature> sigs;
      std::vector<std::string> ids;
      for (const auto& e : entries_) {
        sigs.push_back(e.signature);
        ids.push_back(e.id);
      }
      FloydWarshallOptions opt;
      opt.workers = workers;
      const auto D = build_distance_matrix(sigs, config_.edge_weight, config_.aggregation, ids, workers);
      closure_ = std::make_shared<const ShortestPathResult>(floyd_warshall(D, opt));
    }
    return closure_;
  }

  bool has_cached_closure() const {
    std::lock_guard lock(cache_mutex_);
    return closure_ != nullptr;
  }

  bool operator==(const SignatureDB& o) const {
    if (!(config_ == o.config_) || entries_.size() != o.entries_.size()) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto &a = entries_[i], &b = o.entries_[i];
      if (a.id != b.id || a.label != b.label || !(a.signature == b.signature)) return false;
    }
    return true;
  }

 private:
  void invalidate() {
    std::lock_guard lock(cache_mutex_);
    closure_.reset();
  }

  DbConfig config_;
  std::vector<DbEntry> entries_;
  std::map<std::string, std::size_t> pos_;
  mutable std::mutex cache_mutex_;
  mutable std::shared_ptr<const ShortestPathResult> closure_;
};

namespace detail {

inline std::string json_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

inline std::string canonical_config(const DbConfig& c) {
  return "{\"family\": " + json_string(to_string(c.family)) + ", \"levels\": " + std::to_string(c.levels) +
         ", \"edge_weight\": " + json_string(to_string(c.edge_weight)) +
         ", \"aggregation\": " + json_string(to_string(c.aggregation)) + "}";
}

inline std::string canonical_signatures(const SignatureDB& db) {
  std::string out = "[";
  for (std::size_t i = 0; i < db.size(); ++i) {
    const auto& e = db.entries()[i];
    out += i ? ",\n    " : "\n    ";
    out += "{\"id\": " + json_string(e.id) + ", \"class\": " + json_string(e.label) + ", \"params\": [";
    const auto& p = e.signature.params();
    for (std::size_t j = 0; j < p.size(); ++j)
      out += (j ? ", [" : "[") + json_double(p[j][0]) + ", " + json_double(p[j][1]) + "]";
    out += "]}";
  }
  out += db.size() ? "\n  ]" : "]";
  return out;
}

inline std::string db_checksum(const std::string& config, const std::string& sigs) {
  const std::string body = config + "\n" + sigs;
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()));
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08lx", static_cast<unsigned long>(crc));
  return std::string("crc32:") + buf;
}

}  // namespace detail

inline std::string serialize_db(const SignatureDB& db) {
  const std::string config = detail::canonical_config(db.config());
  const std::string sigs = detail::canonical_signatures(db);
  std::string out = "{\n";
  out += "  \"format\": " + detail::json_string(kDbFormat) + ",\n";
  out += "  \"version\": " + std::to_string(kDbVersion) + ",\n";
  out += "  \"config\": " + config + ",\n";
  out += "  \"signatures\": " + sigs + ",\n";
  out += "  \"checksum\": " + detail::json_string(detail::db_checksum(config, sigs)) + "\n}\n";
  return out;
}

inline SignatureDB parse_db(const std::string& text, const std::string& what = "database") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw CorruptFile(what + ": not valid JSON (" + e.what() + ")");
  }
  try {
    if (!j.is_object() || j.value("format", "") != kDbFormat) throw CorruptFile(what + ": not a signature database");
    if (!j.contains("version") || !j["version"].is_number_integer())
      throw CorruptFile(what + ": missing version");
    const int version = j["version"].get<int>();
    if (version != kDbVersion)
      throw VersionMismatch(what + ": database version " + std::to_string(version) + ", expected " +
                            std::to_string(kDbVersion));
    const auto& c = j.at("config");
    DbConfig cfg;
    cfg.family = family_from_string(c.at("family").get<std::string>());
    cfg.levels = c.at("levels").get<int>();
    cfg.edge_weight = edge_weight_from_string(c.at("edge_weight").get<std::string>());
    cfg.aggregation = aggregation_from_string(c.at("aggregation").get<std::string>());
    SignatureDB db(cfg);
    for (const auto& s : j.at("signatures")) {
      std::vector<Vec2> params;
      for (const auto& p : s.at("params")) {
        if (!p.is_array() || p.size() != 2) throw CorruptFile(what + ": parameter entries must be pairs");
        params.push_back({p[0].get<double>(), p[1].get<double>()});
      }
      const auto id = s.at("id").get<std::string>();
      if (db.contains(id)) throw CorruptFile(what + ": duplicate id '" + id + "'");
      db.put(id, s.at("class").get<std::string>(), Signature(cfg.family, cfg.levels, std::move(params)));
    }
    const auto stored = j.at("checksum").get<std::string>();
    const auto expect = detail::db_checksum(detail::canonical_config(cfg), detail::canonical_signatures(db));
    if (stored != expect) throw CorruptFile(what + ": checksum mismatch (stored " + stored + ", computed " + expect + ")");
    return db;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptFile(what + ": malformed database (" + e.what() + ")");
  } catch (const VersionMismatch&) {
    throw;
  } catch (const CorruptFile&) {
    throw;
  } catch (const Error& e) {
    throw CorruptFile(what + ": invalid content (" + e.what() + ")");
  }
}

inline void save_db(const SignatureDB& db, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  os << serialize_db(db);
  if (!os) throw IoError("write failed for " + path);
}

inline SignatureDB load_db(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_db(ss.str(), path);
}

}  // namespace texgeo
