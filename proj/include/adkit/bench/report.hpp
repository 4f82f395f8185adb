#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "adkit/bench/cases.hpp"
#include "adkit/error.hpp"

namespace adkit::bench {

struct ReportRow {
  std::string bench;
  std::string engine;
  std::size_t n{};
  std::uint64_t iterations{};
  double mean_ns{};
  double rel_to_static{};
  double grad_max_rel_err{};
};

namespace detail {
inline int engine_rank(const std::string& e) {
  if (e == "static") return 0;
  if (e == "tape") return 1;
  return 2;
}
}  // namespace detail

/// Writes the CSV report: fixed header, one row per (case, engine, size),
/// ordered by (case, size, engine). Timing columns are formatted with fixed
/// precision; everything else is deterministic given the seed.
inline void emit_report(std::vector<ReportRow> rows, const std::string& path) {
  if (rows.empty()) throw ConfigError("refusing to write an empty report");

  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    const int ca = case_index(a.bench), cb = case_index(b.bench);
    if (ca != cb) return ca < cb;
    if (a.n != b.n) return a.n < b.n;
    return detail::engine_rank(a.engine) < detail::engine_rank(b.engine);
  });

  std::ofstream out(path);
  if (!out) throw IoError("cannot open report path: " + path);
  out << "bench,engine,n,iterations,mean_ns,rel_to_static,grad_max_rel_err\n";
  char buf[320];
  for (const ReportRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%zu,%llu,%.3f,%.6f,%.6e\n", r.bench.c_str(),
                  r.engine.c_str(), r.n,
                  static_cast<unsigned long long>(r.iterations), r.mean_ns,
                  r.rel_to_static, r.grad_max_rel_err);
    out << buf;
  }
  if (!out.good()) throw IoError("failed while writing report: " + path);
}

}  // namespace adkit::bench
