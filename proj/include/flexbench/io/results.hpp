#pragma once

#include <boost/tokenizer.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "flexbench/errors.hpp"
#include "flexbench/evaluator/batch.hpp"
#include "flexbench/io/history_csv.hpp"

namespace flexbench {

/// One line of results.csv.
struct ResultRow {
  std::string config_hash;
  std::size_t run = 0;
  std::string planner;
  std::string mode = "online";
  int quality_q = 1;
  std::string case_id;
  std::uint64_t seed = 0;
  double operation_cost = 0.0;
  double penalty = 0.0;
  double total_cost = 0.0;
  double unmet_pct = 0.0;
  double overflow_pct = 0.0;
  int planner_calls = 0;
  int flagged_calls = 0;
  bool failed = false;
  std::string error;
  double runtime = 0.0;  // from timing.csv when present, else 0

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

inline constexpr const char* kResultsHeader =
    "config_hash,run,planner,mode,quality_q,case_id,seed,operation_cost,penalty,total_cost,unmet_pct,overflow_pct,"
    "planner_calls,flagged_calls,status,error";
inline constexpr const char* kTimingHeader = "run,planner,mode,quality_q,case_id,runtime_s,max_call_s";

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\\") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

inline std::vector<std::string> csv_split(const std::string& line) {
  boost::tokenizer<boost::escaped_list_separator<char>> tok(line, boost::escaped_list_separator<char>('\\', ',', '"'));
  return {tok.begin(), tok.end()};
}

}  // namespace detail

inline ResultRow make_row(const std::string& hash, std::size_t run, const RunRecord& rec) {
  ResultRow r;
  r.config_hash = hash;
  r.run = run;
  r.planner = rec.spec.planner.name();
  r.mode = rec.spec.online ? "online" : "offline";
  r.quality_q = rec.spec.forecast.quality_q;
  r.case_id = rec.case_id;
  r.seed = rec.spec.forecast.rng_seed;
  const auto& s = rec.result;
  r.operation_cost = s.operation_cost;
  r.penalty = s.penalty;
  r.total_cost = s.total_cost();
  r.unmet_pct = s.unmet_demand_pct;
  r.overflow_pct = s.exceeded_capacity_pct;
  r.planner_calls = s.planner_calls;
  r.flagged_calls = s.flagged_calls;
  r.failed = s.failed;
  r.error = s.error;
  r.runtime = s.runtime;
  return r;
}

inline void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows)
    out << r.config_hash << ',' << r.run << ',' << r.planner << ',' << r.mode << ',' << r.quality_q << ','
        << detail::csv_field(r.case_id) << ',' << r.seed << ',' << format_double(r.operation_cost) << ','
        << format_double(r.penalty) << ',' << format_double(r.total_cost) << ',' << format_double(r.unmet_pct) << ','
        << format_double(r.overflow_pct) << ',' << r.planner_calls << ',' << r.flagged_calls << ','
        << (r.failed ? "failed" : "ok") << ',' << detail::csv_field(r.error) << '\n';
}

inline void write_timing_csv(const std::vector<ResultRow>& rows, const std::vector<RunRecord>& recs, std::ostream& out) {
  out << kTimingHeader << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i)
    out << rows[i].run << ',' << rows[i].planner << ',' << rows[i].mode << ',' << rows[i].quality_q << ','
        << detail::csv_field(rows[i].case_id) << ',' << format_double(recs[i].result.runtime) << ','
        << format_double(recs[i].result.max_call_seconds) << '\n';
}

/// Reads results.csv, and timing.csv next to it when it exists.
inline std::vector<ResultRow> read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open results file " + path);
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || line != kResultsHeader) throw DataError("not a results file (header mismatch)", 1);
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    try {
      f = detail::csv_split(line);
    } catch (const boost::escaped_list_error&) {
      throw DataError("malformed CSV row", lineno);
    }
    if (f.size() != 16) throw DataError("expected 16 columns", lineno);
    ResultRow r;
    try {
      r.config_hash = f[0];
      r.run = std::stoull(f[1]);
      r.planner = f[2];
      r.mode = f[3];
      r.quality_q = std::stoi(f[4]);
      r.case_id = f[5];
      r.seed = std::stoull(f[6]);
      r.operation_cost = parse_double(f[7], lineno, "operation_cost");
      r.penalty = parse_double(f[8], lineno, "penalty");
      r.total_cost = parse_double(f[9], lineno, "total_cost");
      r.unmet_pct = parse_double(f[10], lineno, "unmet_pct");
      r.overflow_pct = parse_double(f[11], lineno, "overflow_pct");
      r.planner_calls = std::stoi(f[12]);
      r.flagged_calls = std::stoi(f[13]);
      r.failed = f[14] == "failed";
      r.error = f[15];
    } catch (const std::logic_error&) {
      throw DataError("bad integer field", lineno);
    }
    rows.push_back(std::move(r));
  }
  const auto timing = std::filesystem::path(path).parent_path() / "timing.csv";
  std::ifstream tin(timing);
  if (tin && std::getline(tin, line) && line == kTimingHeader) {
    std::map<std::size_t, double> rt;
    while (std::getline(tin, line)) {
      if (line.empty()) continue;
      const auto f = detail::csv_split(line);
      if (f.size() == 7) rt[std::stoull(f[0])] = std::stod(f[5]);
    }
    for (auto& r : rows)
      if (auto it = rt.find(r.run); it != rt.end()) r.runtime = it->second;
  }
  return rows;
}

/// Mean cost-to-go per (planner, mode, quality, PTU offset from arrival),
/// accumulated in run order.
struct SnapshotSeries {
  std::string planner, mode;
  int quality_q = 1;
  std::vector<double> mean;
  int runs = 0;
};

inline std::vector<SnapshotSeries> aggregate_snapshots(const std::vector<RunRecord>& recs) {
  std::map<std::tuple<std::string, std::string, int>, SnapshotSeries> acc;
  std::vector<std::tuple<std::string, std::string, int>> order;
  for (const auto& r : recs) {
    if (r.result.failed || r.result.cost_to_go.empty()) continue;
    const auto key = std::make_tuple(r.spec.planner.name(), std::string(r.spec.online ? "online" : "offline"),
                                     r.spec.forecast.quality_q);
    auto [it, fresh] = acc.try_emplace(key);
    auto& s = it->second;
    if (fresh) {
      order.push_back(key);
      s.planner = std::get<0>(key);
      s.mode = std::get<1>(key);
      s.quality_q = std::get<2>(key);
    }
    if (s.mean.size() < r.result.cost_to_go.size()) s.mean.resize(r.result.cost_to_go.size(), 0.0);
    for (std::size_t t = 0; t < r.result.cost_to_go.size(); ++t) s.mean[t] += r.result.cost_to_go[t];
    ++s.runs;
  }
  std::vector<SnapshotSeries> out;
  for (const auto& k : order) {
    auto s = acc[k];
    for (double& v : s.mean) v /= s.runs;
    out.push_back(std::move(s));
  }
  return out;
}

inline constexpr const char* kSnapshotHeader = "planner,mode,quality_q,ptu,mean_cost_to_go,runs";

inline void write_snapshots_csv(const std::vector<SnapshotSeries>& series, std::ostream& out) {
  out << kSnapshotHeader << '\n';
  for (const auto& s : series)
    for (std::size_t t = 0; t < s.mean.size(); ++t)
      out << s.planner << ',' << s.mode << ',' << s.quality_q << ',' << t << ',' << format_double(s.mean[t]) << ','
          << s.runs << '\n';
}

inline std::vector<SnapshotSeries> read_snapshots_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open snapshot file " + path);
  std::string line;
  if (!std::getline(in, line) || line != kSnapshotHeader) throw DataError("not a snapshot file (header mismatch)", 1);
  std::vector<SnapshotSeries> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = detail::csv_split(line);
    if (f.size() != 6) throw DataError("expected 6 columns", lineno);
    const int q = std::stoi(f[2]);
    if (out.empty() || out.back().planner != f[0] || out.back().mode != f[1] || out.back().quality_q != q)
      out.push_back({f[0], f[1], q, {}, std::stoi(f[5])});
    out.back().mean.push_back(parse_double(f[4], lineno, "mean_cost_to_go"));
  }
  return out;
}

}  // namespace flexbench
