#pragma once

#include <chrono>
#include <cstdio>
#include <string>
#include <string_view>

#include "flexbench/errors.hpp"

namespace flexbench {

/// Absolute wall-clock time at minute resolution (UTC, no time zones).
using Timestamp = std::chrono::sys_time<std::chrono::minutes>;

enum class Season : int { Winter = 0, Spring = 1, Summer = 2, Autumn = 3 };

inline constexpr int kSeasons = 4;
inline constexpr int kTimeOfDayBuckets = 6;  // 4-hour buckets

inline int hour_of_day(Timestamp ts) {
  const auto day = std::chrono::floor<std::chrono::days>(ts);
  return static_cast<int>(std::chrono::duration_cast<std::chrono::hours>(ts - day).count());
}

/// Meteorological season: DJF, MAM, JJA, SON.
inline Season season_of(Timestamp ts) {
  const std::chrono::year_month_day ymd{std::chrono::floor<std::chrono::days>(ts)};
  const unsigned m = static_cast<unsigned>(ymd.month());
  return static_cast<Season>((m % 12) / 3);
}

inline int time_of_day_bucket(Timestamp ts) { return hour_of_day(ts) / 4; }

inline std::string format_iso8601(Timestamp ts) {
  using namespace std::chrono;
  const auto day = floor<days>(ts);
  const year_month_day ymd{day};
  const hh_mm_ss<minutes> hms{ts - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:00", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()));
  return buf;
}

/// Accepts YYYY-MM-DDTHH:MM[:SS][Z]; a space may replace the 'T'. Seconds must be zero.
inline Timestamp parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  std::string s(text);
  if (!s.empty() && s.back() == 'Z') s.pop_back();
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  char sep = 0;
  int consumed = 0;
  const int n = std::sscanf(s.c_str(), "%4d-%2d-%2d%c%2d:%2d%n", &y, &mo, &d, &sep, &h, &mi, &consumed);
  if (n < 6 || (sep != 'T' && sep != ' ')) throw DataError("malformed timestamp '" + s + "'");
  if (static_cast<std::size_t>(consumed) < s.size()) {
    int c2 = 0;
    if (std::sscanf(s.c_str() + consumed, ":%2d%n", &sec, &c2) != 1 ||
        static_cast<std::size_t>(consumed + c2) != s.size() || sec != 0)
      throw DataError("malformed timestamp '" + s + "'");
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59) throw DataError("invalid timestamp '" + s + "'");
  return sys_days{ymd} + hours{h} + minutes{mi};
}

}  // namespace flexbench
