#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "flexbench/core/market.hpp"
#include "flexbench/load/ev_session.hpp"
#include "flexbench/planners/plan.hpp"

namespace flexbench {

/// Everything a planner sees at one planning call.
struct PlanningInput {
  const EvSession& session;
  const TimeGrid& grid;
  const MarketRules& rules;
  const std::vector<double>& da_prices;  // per hour
  const ScenarioSet& forecasts;
  const CommitmentState& state;
  int t_now;

  void validate() const {
    if (t_now < session.arrival_ptu || t_now >= session.departure_ptu)
      throw std::invalid_argument("t_now outside the session window");
    if (da_prices.size() != static_cast<std::size_t>(grid.hours())) throw std::invalid_argument("one DA price per hour");
    if (state.consumption.size() != static_cast<std::size_t>(grid.horizon_ptus()))
      throw std::invalid_argument("commitment state does not span the grid");
  }
};

inline constexpr double kEnergyEps = 1e-9;  // kWh below which energy counts as zero

/// A plan holding everything already fixed: past consumption, frozen reserves
/// and bids, and the DA position once it is frozen.
inline Plan committed_plan(const PlanningInput& in) {
  Plan p = Plan::zero(in.grid);
  const auto& s = in.state;
  for (int t = 0; t < in.t_now; ++t) p.consumption[static_cast<std::size_t>(t)] = s.consumption[static_cast<std::size_t>(t)];
  for (int t = 0; t < s.reserves_frozen_until && t < in.grid.horizon_ptus(); ++t) {
    const auto k = static_cast<std::size_t>(t);
    p.up_reserve[k] = s.up_reserve[k];
    p.down_reserve[k] = s.down_reserve[k];
    p.up_bid[k] = s.up_bid[k];
    p.down_bid[k] = s.down_bid[k];
  }
  if (s.da_frozen) p.da_purchase = s.da_purchase;
  return p;
}

/// Hourly DA position equal to the average planned consumption of each hour.
inline void da_from_consumption(Plan& p, const TimeGrid& grid) {
  const int pph = grid.ptus_per_hour();
  for (int h = 0; h < grid.hours(); ++h) {
    double sum = 0.0;
    for (int k = 0; k < pph; ++k) sum += p.consumption[static_cast<std::size_t>(h * pph + k)];
    p.da_purchase[static_cast<std::size_t>(h)] = sum / pph;
  }
}

/// Pulls free entries of PTUs >= t_now back inside the plan invariants,
/// leaving frozen values untouched.
inline void tidy_plan(Plan& p, const PlanningInput& in) {
  const double pmax = in.session.max_power;
  for (int t = in.t_now; t < in.grid.horizon_ptus(); ++t) {
    const auto k = static_cast<std::size_t>(t);
    if (!in.session.active(t)) {
      p.consumption[k] = p.up_reserve[k] = p.down_reserve[k] = 0.0;
      continue;
    }
    const bool frozen = in.state.reserve_frozen(t);
    if (!frozen) {
      if (p.up_reserve[k] < 1e-9) p.up_reserve[k] = 0.0;
      if (p.down_reserve[k] < 1e-9) p.down_reserve[k] = 0.0;
    }
    const double lo = frozen ? p.up_reserve[k] : 0.0;
    const double hi = frozen ? pmax - p.down_reserve[k] : pmax;
    double c = std::clamp(p.consumption[k], lo, hi);
    if (std::abs(c) < 1e-12) c = 0.0;
    p.consumption[k] = c;
    if (!frozen) {
      p.up_reserve[k] = std::clamp(p.up_reserve[k], 0.0, c);
      p.down_reserve[k] = std::clamp(p.down_reserve[k], 0.0, pmax - c);
      if (p.up_reserve[k] + p.down_reserve[k] > pmax) p.down_reserve[k] = std::max(0.0, pmax - p.up_reserve[k]);
      if (p.up_reserve[k] + p.down_reserve[k] > pmax) p.up_reserve[k] = pmax - p.down_reserve[k];
      if (p.up_reserve[k] == 0.0) p.up_bid[k] = std::nullopt;
      if (p.down_reserve[k] == 0.0) p.down_bid[k] = std::nullopt;
    }
  }
  for (double& d : p.da_purchase)
    if (d < 1e-9) d = 0.0;
}

/// Weighted mean of one PTU channel across the forecast bundle.
template <typename Get>
double expected(const ScenarioSet& f, Get get) {
  double v = 0.0;
  for (std::size_t s = 0; s < f.size(); ++s) v += f.weights[s] * get(f.scenarios[s]);
  return v;
}

}  // namespace flexbench
