#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "flexbench/core/time_grid.hpp"

namespace flexbench {

/// One concrete price and reserve-deployment trajectory over a TimeGrid.
/// Prices in EUR/MWh, usages are the deployed fraction of offered reserve.
struct MarketRealization {
  std::vector<double> da_price;         // per hour
  std::vector<double> up_price;         // per PTU
  std::vector<double> down_price;       // per PTU
  std::vector<double> imbalance_price;  // per PTU
  std::vector<double> up_usage;         // per PTU, [0,1]
  std::vector<double> down_usage;       // per PTU, [0,1]

  static MarketRealization constant(const TimeGrid& grid, double da, double up, double down,
                                    double imbalance, double up_use, double down_use) {
    const auto n = static_cast<std::size_t>(grid.horizon_ptus());
    return {std::vector<double>(static_cast<std::size_t>(grid.hours()), da),
            std::vector<double>(n, up),
            std::vector<double>(n, down),
            std::vector<double>(n, imbalance),
            std::vector<double>(n, up_use),
            std::vector<double>(n, down_use)};
  }

  void validate(const TimeGrid& grid) const {
    const auto n = static_cast<std::size_t>(grid.horizon_ptus());
    if (da_price.size() != static_cast<std::size_t>(grid.hours()))
      throw std::invalid_argument("DA price array must span the grid hours");
    for (const auto* v : {&up_price, &down_price, &imbalance_price, &up_usage, &down_usage})
      if (v->size() != n) throw std::invalid_argument("PTU array must span the grid");
    for (const auto* v : {&da_price, &up_price, &down_price, &imbalance_price})
      for (double x : *v)
        if (!std::isfinite(x)) throw std::invalid_argument("prices must be finite");
    for (const auto* v : {&up_usage, &down_usage})
      for (double x : *v)
        if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("usage fraction outside [0,1]");
  }

  friend bool operator==(const MarketRealization&, const MarketRealization&) = default;
};

/// Clamps a usage value into [0,1]; bumps `clamped` when it had to.
inline double clamp_usage(double u, std::size_t& clamped) {
  if (u < 0.0 || u > 1.0) {
    ++clamped;
    return std::clamp(u, 0.0, 1.0);
  }
  return u;
}

/// Weighted bundle of realizations sharing one grid.
struct ScenarioSet {
  std::vector<MarketRealization> scenarios;
  std::vector<double> weights;

  static ScenarioSet uniform(std::vector<MarketRealization> s) {
    ScenarioSet set;
    const double w = s.empty() ? 0.0 : 1.0 / static_cast<double>(s.size());
    set.weights.assign(s.size(), w);
    set.scenarios = std::move(s);
    return set;
  }

  std::size_t size() const noexcept { return scenarios.size(); }

  void validate(const TimeGrid& grid) const {
    if (scenarios.empty()) throw std::invalid_argument("scenario set is empty");
    if (weights.size() != scenarios.size()) throw std::invalid_argument("one weight per scenario");
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw std::invalid_argument("negative scenario weight");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("scenario weights must sum to 1");
    for (const auto& s : scenarios) s.validate(grid);
  }

  /// The first `n` scenarios, renormalised.
  ScenarioSet head(std::size_t n) const {
    if (n == 0 || n > scenarios.size()) throw std::invalid_argument("head size out of range");
    ScenarioSet out;
    out.scenarios.assign(scenarios.begin(), scenarios.begin() + static_cast<std::ptrdiff_t>(n));
    out.weights.assign(weights.begin(), weights.begin() + static_cast<std::ptrdiff_t>(n));
    const double total = std::accumulate(out.weights.begin(), out.weights.end(), 0.0);
    for (double& w : out.weights) w = total > 0 ? w / total : 1.0 / static_cast<double>(n);
    return out;
  }
};

/// Settlement rules of the market the load trades in.
struct MarketRules {
  int reserve_deadline_ptus = 7;
  bool asymmetric_bids = true;
  double min_bid_size = 0.0;  // kW; 0 disables the minimum
  bool allow_discharge = false;
  double unmet_penalty = 60.0;      // EUR/MWh
  double overflow_penalty = 200.0;  // EUR/MWh
  double mip_gap = 0.01;

  void validate() const {
    if (reserve_deadline_ptus < 0) throw std::invalid_argument("reserve deadline must be >= 0");
    if (unmet_penalty < 0 || overflow_penalty < 0) throw std::invalid_argument("penalties must be >= 0");
    if (!(mip_gap > 0 && mip_gap < 1)) throw std::invalid_argument("MIP gap must lie in (0,1)");
    if (min_bid_size < 0) throw std::invalid_argument("minimum bid size must be >= 0");
    if (allow_discharge) throw std::invalid_argument("discharging (vehicle-to-grid) is not supported");
  }
};

}  // namespace flexbench
