#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "flexbench/planners/common.hpp"

namespace flexbench {

namespace detail {

/// Fills the PTUs in `order` at max power until `need` kWh (battery side) is met.
inline void fill_in_order(Plan& p, const PlanningInput& in, const std::vector<int>& order, double need) {
  const double per_ptu = in.session.efficiency * in.session.max_power * in.grid.ptu_hours();
  for (int t : order) {
    if (need <= kEnergyEps) break;
    const double e = std::min(need, per_ptu);
    p.consumption[static_cast<std::size_t>(t)] = e < per_ptu ? e / (in.session.efficiency * in.grid.ptu_hours())
                                                             : in.session.max_power;
    need -= e;
  }
}

inline std::vector<int> remaining_ptus(const PlanningInput& in) {
  std::vector<int> v(static_cast<std::size_t>(in.session.departure_ptu - in.t_now));
  std::iota(v.begin(), v.end(), in.t_now);
  return v;
}

}  // namespace detail

/// DI: charge at full power from now until the target is reached.
inline Plan plan_direct(const PlanningInput& in) {
  Plan p = committed_plan(in);
  detail::fill_in_order(p, in, detail::remaining_ptus(in), in.session.target_soc - in.state.soc);
  if (!in.state.da_frozen) da_from_consumption(p, in.grid);
  tidy_plan(p, in);
  return p;
}

/// OP: charge in the cheapest PTUs. The first call ranks by DA price (and buys
/// that profile); later calls rank by expected imbalance price. Ties go to the
/// earlier PTU.
inline Plan plan_optimal_price(const PlanningInput& in) {
  Plan p = committed_plan(in);
  auto order = detail::remaining_ptus(in);
  std::vector<double> price(static_cast<std::size_t>(in.grid.horizon_ptus()), 0.0);
  for (int t : order) {
    const auto k = static_cast<std::size_t>(t);
    price[k] = in.state.da_frozen ? expected(in.forecasts, [&](const MarketRealization& r) { return r.imbalance_price[k]; })
                                  : in.da_prices[static_cast<std::size_t>(in.grid.hour_of(t))];
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return price[static_cast<std::size_t>(a)] < price[static_cast<std::size_t>(b)]; });
  detail::fill_in_order(p, in, order, in.session.target_soc - in.state.soc);
  if (!in.state.da_frozen) da_from_consumption(p, in.grid);
  tidy_plan(p, in);
  return p;
}

namespace detail {

/// SOC band [lo[t], hi[t]] (t from t_now to departure) from which the target
/// is reached without overflow whatever share of the offered reserves gets
/// deployed, with consumption re-chosen each PTU. `ok` is false when some
/// PTU's reserves alone exceed the remaining band width.
struct RobustBand {
  std::vector<double> lo, hi;
  bool ok = true;
};

inline RobustBand robust_band(const PlanningInput& in, const std::vector<double>& up, const std::vector<double>& dn,
                              double margin) {
  const auto& ses = in.session;
  const double k = ses.efficiency * in.grid.ptu_hours();
  const int n = ses.departure_ptu - in.t_now;
  RobustBand b;
  b.lo.assign(static_cast<std::size_t>(n + 1), 0.0);
  b.hi.assign(static_cast<std::size_t>(n + 1), 0.0);
  b.lo[static_cast<std::size_t>(n)] = ses.target_soc + margin;
  b.hi[static_cast<std::size_t>(n)] = ses.capacity - margin;
  for (int i = n - 1; i >= 0; --i) {
    const auto t = static_cast<std::size_t>(in.t_now + i);
    const auto ii = static_cast<std::size_t>(i);
    if (k * (up[t] + dn[t]) > b.hi[ii + 1] - b.lo[ii + 1]) b.ok = false;
    b.lo[ii] = b.lo[ii + 1] - k * (ses.max_power - dn[t] - up[t]);
    b.hi[ii] = b.hi[ii + 1] - k * (up[t] + dn[t]);
  }
  return b;
}

inline bool robust_ok(const PlanningInput& in, const std::vector<double>& up, const std::vector<double>& dn,
                      double margin) {
  const auto b = robust_band(in, up, dn, margin);
  return b.ok && in.state.soc >= b.lo[0] && in.state.soc <= b.hi[0];
}

}  // namespace detail

/// MR: uniform preferred operating point with the largest quantity-only
/// reserve offers that stay safe even if every offer is fully deployed in the
/// worst direction. Forecasts are not used.
inline Plan plan_maxreg(const PlanningInput& in) {
  constexpr double kMargin = 1e-7;  // kWh of slack kept against rounding
  const auto& ses = in.session;
  Plan p = committed_plan(in);
  const int left = ses.departure_ptu - in.t_now;
  const double need = std::max(0.0, ses.target_soc - in.state.soc);
  const double pop = std::clamp(need / ses.efficiency / (left * in.grid.ptu_hours()), 0.0, ses.max_power);

  std::vector<double> up = p.up_reserve, dn = p.down_reserve;
  const bool safe = detail::robust_ok(in, up, dn, -1e-9);
  if (safe) {
    for (int t = in.t_now; t < ses.departure_ptu; ++t) {
      if (in.state.reserve_frozen(t)) continue;
      const auto k = static_cast<std::size_t>(t);
      auto largest = [&](std::vector<double>& v, double cap) {
        double lo = 0.0, hi = cap;
        v[k] = hi;
        if (detail::robust_ok(in, up, dn, kMargin)) return;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          v[k] = mid;
          (detail::robust_ok(in, up, dn, kMargin) ? lo : hi) = mid;
        }
        v[k] = lo;
      };
      largest(up, pop);
      largest(dn, ses.max_power - pop);
    }
  } else {
    p.flagged = true;
    p.note = "commitments leave no robust operating band";
  }
  for (int t = in.t_now; t < ses.departure_ptu; ++t) {
    const auto k = static_cast<std::size_t>(t);
    p.up_reserve[k] = up[k];
    p.down_reserve[k] = dn[k];
    p.consumption[k] = std::clamp(pop, up[k], ses.max_power - dn[k]);
  }
  // Current PTU: stay inside the band for the next boundary.
  const auto band = detail::robust_band(in, up, dn, safe ? kMargin : 0.0);
  const auto k0 = static_cast<std::size_t>(in.t_now);
  const double kk = ses.efficiency * in.grid.ptu_hours();
  const double c_lo = std::max(up[k0], (band.lo[1] - in.state.soc) / kk + up[k0]);
  const double c_hi = std::min(ses.max_power - dn[k0], (band.hi[1] - in.state.soc) / kk - dn[k0]);
  p.consumption[k0] = c_lo <= c_hi ? std::clamp(pop, c_lo, c_hi) : std::clamp(c_lo, up[k0], ses.max_power - dn[k0]);
  if (!in.state.da_frozen) da_from_consumption(p, in.grid);
  tidy_plan(p, in);
  return p;
}

}  // namespace flexbench
