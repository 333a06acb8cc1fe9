#pragma once

#include "flexbench/planners/heuristics.hpp"
#include "flexbench/planners/milp_planner.hpp"

namespace flexbench {

/// One planning call. PI expects the forecasts to hold the real realization only.
inline Plan plan(const PlannerConfig& cfg, const PlanningInput& in) {
  cfg.validate();
  in.validate();
  switch (cfg.kind) {
    case PlannerKind::DI: return plan_direct(in);
    case PlannerKind::OP: return plan_optimal_price(in);
    case PlannerKind::MR: return plan_maxreg(in);
    default: return plan_milp(cfg, in);
  }
}

inline Plan plan(const PlannerConfig& cfg, const EvSession& session, const TimeGrid& grid, const MarketRules& rules,
                 const std::vector<double>& da_prices, const ScenarioSet& forecasts, const CommitmentState& state,
                 int t_now) {
  return plan(cfg, PlanningInput{session, grid, rules, da_prices, forecasts, state, t_now});
}

}  // namespace flexbench
