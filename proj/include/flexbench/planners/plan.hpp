#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "flexbench/core/market.hpp"
#include "flexbench/core/time_grid.hpp"
#include "flexbench/load/ev_session.hpp"

namespace flexbench {

/// All market decisions over the grid. Powers in kW, bids in EUR/MWh.
/// A missing bid means a quantity-only offer, which is always accepted.
struct Plan {
  std::vector<double> da_purchase;  // per hour
  std::vector<double> consumption;  // per PTU
  std::vector<double> up_reserve;
  std::vector<double> down_reserve;
  std::vector<std::optional<double>> up_bid;
  std::vector<std::optional<double>> down_bid;
  bool flagged = false;  // planner could not fully honour its model (limit hit, infeasible commitments)
  std::string note;

  static Plan zero(const TimeGrid& grid) {
    const auto n = static_cast<std::size_t>(grid.horizon_ptus());
    Plan p;
    p.da_purchase.assign(static_cast<std::size_t>(grid.hours()), 0.0);
    p.consumption.assign(n, 0.0);
    p.up_reserve.assign(n, 0.0);
    p.down_reserve.assign(n, 0.0);
    p.up_bid.assign(n, std::nullopt);
    p.down_bid.assign(n, std::nullopt);
    return p;
  }

  /// Violated invariants as text; empty when the plan is well formed.
  std::vector<std::string> violations(const EvSession& session, const TimeGrid& grid, double tol = 1e-9) const {
    std::vector<std::string> bad;
    const auto n = static_cast<std::size_t>(grid.horizon_ptus());
    if (da_purchase.size() != static_cast<std::size_t>(grid.hours()) || consumption.size() != n ||
        up_reserve.size() != n || down_reserve.size() != n || up_bid.size() != n || down_bid.size() != n) {
      bad.push_back("plan arrays do not span the grid");
      return bad;
    }
    for (std::size_t h = 0; h < da_purchase.size(); ++h)
      if (da_purchase[h] < -tol) bad.push_back("negative DA purchase in hour " + std::to_string(h));
    for (std::size_t t = 0; t < n; ++t) {
      const double c = consumption[t], u = up_reserve[t], d = down_reserve[t];
      const std::string at = " at PTU " + std::to_string(t);
      if (c < -tol || c > session.max_power + tol) bad.push_back("consumption outside [0, max power]" + at);
      if (u < -tol || u > c + tol) bad.push_back("up reserve outside [0, consumption]" + at);
      if (d < -tol || d > session.max_power - c + tol) bad.push_back("down reserve outside [0, headroom]" + at);
      if (!session.active(static_cast<int>(t)) && (c != 0.0 || u != 0.0 || d != 0.0))
        bad.push_back("activity outside the session" + at);
    }
    return bad;
  }

  friend bool operator==(const Plan&, const Plan&) = default;
};

/// What earlier planning calls and past PTUs have fixed.
struct CommitmentState {
  bool da_frozen = false;
  std::vector<double> da_purchase;  // per hour, valid once frozen
  int reserves_frozen_until = 0;    // reserves and bids of PTUs t < this are fixed
  std::vector<double> up_reserve, down_reserve;
  std::vector<std::optional<double>> up_bid, down_bid;
  std::vector<double> consumption;  // settled consumption of PTUs before t_now
  double soc = 0.0;                 // battery energy at the start of t_now

  static CommitmentState initial(const EvSession& session, const TimeGrid& grid) {
    const auto n = static_cast<std::size_t>(grid.horizon_ptus());
    CommitmentState s;
    s.da_purchase.assign(static_cast<std::size_t>(grid.hours()), 0.0);
    s.reserves_frozen_until = session.arrival_ptu;
    s.up_reserve.assign(n, 0.0);
    s.down_reserve.assign(n, 0.0);
    s.up_bid.assign(n, std::nullopt);
    s.down_bid.assign(n, std::nullopt);
    s.consumption.assign(n, 0.0);
    s.soc = session.initial_soc;
    return s;
  }

  bool reserve_frozen(int t) const noexcept { return t < reserves_frozen_until; }

  /// Fixes reserves and bids of PTUs [reserves_frozen_until, until) from `plan`.
  void freeze_reserves(const Plan& plan, int until) {
    until = std::min(until, static_cast<int>(up_reserve.size()));
    for (int t = reserves_frozen_until; t < until; ++t) {
      const auto k = static_cast<std::size_t>(t);
      up_reserve[k] = plan.up_reserve[k];
      down_reserve[k] = plan.down_reserve[k];
      up_bid[k] = plan.up_bid[k];
      down_bid[k] = plan.down_bid[k];
    }
    reserves_frozen_until = std::max(reserves_frozen_until, until);
  }

  void freeze_da(const Plan& plan) {
    da_purchase = plan.da_purchase;
    da_frozen = true;
  }
};

/// Up offers sell reduced consumption: they clear when the bid is at or below
/// the up price. Down offers buy extra energy: they clear when the bid is at or
/// above the down price. Quantity-only offers always clear.
inline bool up_offer_clears(const std::optional<double>& bid, double up_price) { return !bid || *bid <= up_price; }
inline bool down_offer_clears(const std::optional<double>& bid, double down_price) {
  return !bid || *bid >= down_price;
}

enum class PlannerKind { DI, OP, MR, QO, DT, SO1, SO2, PI };

inline const char* to_string(PlannerKind k) {
  switch (k) {
    case PlannerKind::DI: return "DI";
    case PlannerKind::OP: return "OP";
    case PlannerKind::MR: return "MR";
    case PlannerKind::QO: return "QO";
    case PlannerKind::DT: return "DT";
    case PlannerKind::SO1: return "SO1";
    case PlannerKind::SO2: return "SO2";
    case PlannerKind::PI: return "PI";
  }
  return "?";
}

inline PlannerKind parse_planner_kind(const std::string& s) {
  for (auto k : {PlannerKind::DI, PlannerKind::OP, PlannerKind::MR, PlannerKind::QO, PlannerKind::DT,
                 PlannerKind::SO1, PlannerKind::SO2, PlannerKind::PI})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown planner '" + s + "'");
}

struct PlannerConfig {
  PlannerKind kind = PlannerKind::DI;
  double alpha = 1.0;            // desired acceptance probability of price bids
  int n_scenarios_used = 0;      // 0 = all provided forecasts
  double time_limit = 300.0;     // seconds per solver call
  std::string solver_cmd;        // external solver command template; empty = built-in

  static PlannerConfig defaults(PlannerKind kind) {
    PlannerConfig c;
    c.kind = kind;
    if (kind == PlannerKind::DT) c.alpha = 0.5;
    if (kind == PlannerKind::SO1) c.alpha = 0.8;
    if (kind == PlannerKind::SO2) c.n_scenarios_used = 20;
    return c;
  }

  std::string name() const { return to_string(kind); }

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("acceptance probability must lie in (0,1]");
    if (kind == PlannerKind::QO && alpha != 1.0) throw std::invalid_argument("QO uses acceptance probability 1");
    if (n_scenarios_used < 0) throw std::invalid_argument("n_scenarios_used must be >= 0");
    if (!(time_limit > 0)) throw std::invalid_argument("time limit must be positive");
  }
};

}  // namespace flexbench
