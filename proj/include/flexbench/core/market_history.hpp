#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "flexbench/core/calendar.hpp"

namespace flexbench {

/// Historic market data on a PTU lattice. The DA price is repeated on every
/// PTU of its hour.
struct MarketHistory {
  int ptu_minutes = 15;
  std::vector<Timestamp> time;
  std::vector<double> da_price;
  std::vector<double> up_price;
  std::vector<double> down_price;
  std::vector<double> imbalance_price;
  std::vector<double> up_usage;
  std::vector<double> down_usage;
  std::size_t clamped_usages = 0;

  std::size_t size() const noexcept { return time.size(); }

  void push_back(Timestamp ts, double da, double up, double down, double imb, double up_use, double down_use) {
    time.push_back(ts);
    da_price.push_back(da);
    up_price.push_back(up);
    down_price.push_back(down);
    imbalance_price.push_back(imb);
    up_usage.push_back(up_use);
    down_usage.push_back(down_use);
  }

  /// Rows [begin, end).
  MarketHistory slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > size()) throw std::out_of_range("history slice out of range");
    MarketHistory out;
    out.ptu_minutes = ptu_minutes;
    auto cut = [&](const auto& v) { return std::vector(v.begin() + static_cast<std::ptrdiff_t>(begin), v.begin() + static_cast<std::ptrdiff_t>(end)); };
    out.time = cut(time);
    out.da_price = cut(da_price);
    out.up_price = cut(up_price);
    out.down_price = cut(down_price);
    out.imbalance_price = cut(imbalance_price);
    out.up_usage = cut(up_usage);
    out.down_usage = cut(down_usage);
    return out;
  }

  /// Index of the row at `ts`, or size() when absent.
  std::size_t index_of(Timestamp ts) const {
    if (time.empty() || ts < time.front()) return size();
    const auto step = std::chrono::minutes{ptu_minutes};
    const auto k = static_cast<std::size_t>((ts - time.front()) / step);
    return k < size() && time[k] == ts ? k : size();
  }

  friend bool operator==(const MarketHistory& a, const MarketHistory& b) {
    return a.ptu_minutes == b.ptu_minutes && a.time == b.time && a.da_price == b.da_price &&
           a.up_price == b.up_price && a.down_price == b.down_price && a.imbalance_price == b.imbalance_price &&
           a.up_usage == b.up_usage && a.down_usage == b.down_usage;
  }
};

}  // namespace flexbench
