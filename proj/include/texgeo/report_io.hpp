#pragma once

// Retrieval reports on disk.
//   ARR CSV: method,K,ARR
//   PR CSV:  method,N,precision,recall
// Reals carry 9 significant digits. The JSON mirror adds per-query n_q and N_R.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "texgeo/errors.hpp"
#include "texgeo/matrix_io.hpp"
#include "texgeo/retrieval.hpp"

namespace texgeo {

inline constexpr int kReportDigits = 9;

namespace detail {

inline std::ofstream open_report(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  return os;
}

inline double round_sig(double v, int digits) { return std::stod(format_double(v, digits)); }

}  // namespace detail

inline void write_arr_csv(const std::vector<RetrievalReport>& reports, const std::string& path) {
  auto os = detail::open_report(path);
  os << "method,K,ARR\n";
  for (const auto& r : reports)
    os << detail::csv_escape(r.method) << ',' << r.K << ',' << detail::format_double(r.arr, kReportDigits) << '\n';
  if (!os) throw IoError("write failed for " + path);
}

inline void write_pr_csv(const std::vector<PrCurve>& curves, const std::string& path) {
  auto os = detail::open_report(path);
  os << "method,N,precision,recall\n";
  for (const auto& c : curves)
    for (const auto& p : c.points)
      os << detail::csv_escape(c.method) << ',' << p.N << ',' << detail::format_double(p.precision, kReportDigits)
         << ',' << detail::format_double(p.recall, kReportDigits) << '\n';
  if (!os) throw IoError("write failed for " + path);
}

inline nlohmann::ordered_json report_json(const std::vector<RetrievalReport>& reports,
                                          const std::vector<PrCurve>& curves) {
  using nlohmann::ordered_json;
  ordered_json out;
  out["reports"] = ordered_json::array();
  for (const auto& r : reports) {
    ordered_json q = ordered_json::array();
    for (std::size_t i = 0; i < r.hits.size(); ++i)
      q.push_back({{"id", r.query_ids[i]}, {"n_q", r.hits[i]}, {"N_R", r.relevant[i]}});
    out["reports"].push_back(
        {{"method", r.method}, {"K", r.K}, {"ARR", detail::round_sig(r.arr, kReportDigits)}, {"queries", q}});
  }
  out["pr_curves"] = ordered_json::array();
  for (const auto& c : curves) {
    ordered_json n = ordered_json::array(), p = ordered_json::array(), rc = ordered_json::array();
    for (const auto& pt : c.points) {
      n.push_back(pt.N);
      p.push_back(detail::round_sig(pt.precision, kReportDigits));
      rc.push_back(detail::round_sig(pt.recall, kReportDigits));
    }
    out["pr_curves"].push_back({{"method", c.method}, {"N", n}, {"precision", p}, {"recall", rc}});
  }
  return out;
}

inline void write_report_json(const std::vector<RetrievalReport>& reports, const std::vector<PrCurve>& curves,
                              const std::string& path) {
  auto os = detail::open_report(path);
  os << report_json(reports, curves).dump(2) << '\n';
  if (!os) throw IoError("write failed for " + path);
}

}  // namespace texgeo
