#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "flexbench/core/market.hpp"
#include "flexbench/core/market_history.hpp"
#include "flexbench/errors.hpp"

namespace flexbench {

inline constexpr const char* kHistoryHeader = "timestamp,da_price,up_price,down_price,imbalance_price,up_usage,down_usage";

/// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s, std::size_t line, const char* field) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size() || !std::isfinite(v))
    throw DataError(std::string("bad number in column ") + field + ": '" + std::string(s) + "'", line);
  return v;
}

/// Reads the canonical history CSV. The PTU length is taken from the first two
/// rows (15 minutes for a single row). Out-of-range usages are clamped and counted.
inline MarketHistory read_history_csv(std::istream& in) {
  static const char* kCols[] = {"timestamp", "da_price", "up_price", "down_price", "imbalance_price", "up_usage", "down_usage"};
  MarketHistory h;
  std::string text;
  std::size_t line = 0;
  if (!std::getline(in, text)) throw DataError("empty history file", 1);
  ++line;
  if (!text.empty() && text.back() == '\r') text.pop_back();
  if (text != kHistoryHeader) throw DataError(std::string("expected header '") + kHistoryHeader + "'", line);
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(text);
    for (;;) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 7) throw DataError("expected 7 columns, got " + std::to_string(f.size()), line);
    Timestamp ts;
    try {
      ts = parse_iso8601(f[0]);
    } catch (const DataError& e) {
      throw DataError(e.what(), line);
    }
    double v[6];
    for (int c = 0; c < 6; ++c) v[c] = parse_double(f[static_cast<std::size_t>(c + 1)], line, kCols[c + 1]);
    if (!h.time.empty()) {
      const Timestamp prev = h.time.back();
      if (ts == prev) throw DataError("duplicated timestamp " + format_iso8601(ts), line);
      if (ts < prev) throw DataError("timestamps not increasing at " + format_iso8601(ts), line);
      if (h.size() == 1) {
        const auto step = (ts - prev).count();
        if (step <= 0 || 60 % step != 0) throw DataError("PTU length must divide an hour", line);
        h.ptu_minutes = static_cast<int>(step);
      } else if (ts != prev + std::chrono::minutes{h.ptu_minutes}) {
        throw DataError("missing PTU at " + format_iso8601(prev + std::chrono::minutes{h.ptu_minutes}), line);
      }
    }
    if (ts.time_since_epoch().count() % h.ptu_minutes != 0 && h.size() > 0)
      throw DataError("timestamp off the PTU lattice", line);
    const double up_use = clamp_usage(v[4], h.clamped_usages);
    const double down_use = clamp_usage(v[5], h.clamped_usages);
    h.push_back(ts, v[0], v[1], v[2], v[3], up_use, down_use);
  }
  if (h.size() == 0) throw DataError("history has no rows", line);
  return h;
}

inline MarketHistory read_history_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open history file " + path);
  return read_history_csv(f);
}

inline void write_history_csv(const MarketHistory& h, std::ostream& out) {
  out << kHistoryHeader << '\n';
  for (std::size_t k = 0; k < h.size(); ++k)
    out << format_iso8601(h.time[k]) << ',' << format_double(h.da_price[k]) << ',' << format_double(h.up_price[k]) << ','
        << format_double(h.down_price[k]) << ',' << format_double(h.imbalance_price[k]) << ','
        << format_double(h.up_usage[k]) << ',' << format_double(h.down_usage[k]) << '\n';
}

inline void write_history_csv(const MarketHistory& h, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path);
  write_history_csv(h, f);
  if (!f) throw DataError("write failed for " + path);
}

}  // namespace flexbench
