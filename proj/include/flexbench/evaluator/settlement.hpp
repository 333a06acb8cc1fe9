#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "flexbench/core/market.hpp"
#include "flexbench/load/ev_session.hpp"
#include "flexbench/planners/plan.hpp"

namespace flexbench {

/// Money and energy of one settled PTU. Costs in EUR, energies in kWh.
struct LedgerRow {
  int ptu = 0;
  double da_purchase = 0.0;  // kW, of the PTU's hour
  double consumption = 0.0;  // kW scheduled
  double up_reserve = 0.0, down_reserve = 0.0;
  std::optional<double> up_bid, down_bid;
  bool accepted_up = false, accepted_down = false;
  double deployed_up_kwh = 0.0, deployed_down_kwh = 0.0;
  double actual_power = 0.0;  // kW drawn from the grid
  double da_cost = 0.0;
  double imbalance_cost = 0.0;
  double up_revenue = 0.0;
  double down_cost = 0.0;

  double total() const noexcept { return da_cost + imbalance_cost - up_revenue + down_cost; }
};

/// Settles PTU t of a plan against a realization. Imbalance is charged on
/// scheduled consumption against the DA position; deployed reserves are paid
/// at the regulation prices. Grid power outside [0, max_power] is clipped and
/// the clipped energy is charged as extra imbalance.
inline LedgerRow settle_ptu(const Plan& p, int t, const MarketRealization& r, const EvSession& session,
                            const TimeGrid& grid) {
  const auto k = static_cast<std::size_t>(t);
  const auto h = static_cast<std::size_t>(grid.hour_of(t));
  const double dt = grid.ptu_hours();
  LedgerRow row;
  row.ptu = t;
  row.da_purchase = p.da_purchase[h];
  row.consumption = p.consumption[k];
  row.up_reserve = p.up_reserve[k];
  row.down_reserve = p.down_reserve[k];
  row.up_bid = p.up_bid[k];
  row.down_bid = p.down_bid[k];
  row.accepted_up = row.up_reserve > 0.0 && up_offer_clears(row.up_bid, r.up_price[k]);
  row.accepted_down = row.down_reserve > 0.0 && down_offer_clears(row.down_bid, r.down_price[k]);
  const double up_kw = row.accepted_up ? row.up_reserve * r.up_usage[k] : 0.0;
  const double down_kw = row.accepted_down ? row.down_reserve * r.down_usage[k] : 0.0;
  row.deployed_up_kwh = up_kw * dt;
  row.deployed_down_kwh = down_kw * dt;
  const double wanted = row.consumption - up_kw + down_kw;
  const double limit = session.active(t) ? session.max_power : 0.0;
  row.actual_power = std::clamp(wanted, 0.0, limit);
  row.da_cost = row.da_purchase * dt * r.da_price[h] / 1000.0;
  row.imbalance_cost = (row.consumption - row.da_purchase + (row.actual_power - wanted)) * dt * r.imbalance_price[k] / 1000.0;
  row.up_revenue = row.deployed_up_kwh * r.up_price[k] / 1000.0;
  row.down_cost = row.deployed_down_kwh * r.down_price[k] / 1000.0;
  return row;
}

/// Penalty in EUR for the given unmet and overflow energies.
inline double soc_penalty(double unmet_kwh, double overflow_kwh, const MarketRules& rules) {
  return unmet_kwh * rules.unmet_penalty / 1000.0 + overflow_kwh * rules.overflow_penalty / 1000.0;
}

/// Expected cost of settling every PTU not in `settled` under the plan, over a
/// forecast bundle, plus the expected end-of-session penalty. `soc` and
/// `peak` describe the battery after the settled PTUs.
inline double expected_plan_cost(const Plan& p, const std::vector<char>& settled, double soc, double peak,
                                 const ScenarioSet& f, const EvSession& session, const TimeGrid& grid,
                                 const MarketRules& rules) {
  double total = 0.0;
  for (std::size_t s = 0; s < f.size(); ++s) {
    double cost = 0.0, e = soc, top = peak;
    for (int t = 0; t < grid.horizon_ptus(); ++t) {
      if (settled[static_cast<std::size_t>(t)]) continue;
      const auto row = settle_ptu(p, t, f.scenarios[s], session, grid);
      cost += row.total();
      if (session.active(t)) {
        e += session.efficiency * row.actual_power * grid.ptu_hours();
        top = std::max(top, e);
      }
    }
    cost += soc_penalty(std::max(0.0, session.target_soc - e), std::max(0.0, top - session.capacity), rules);
    total += f.weights[s] * cost;
  }
  return total;
}

}  // namespace flexbench
