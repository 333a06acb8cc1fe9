#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "flexbench/evaluator/settlement.hpp"
#include "flexbench/planners/planner.hpp"
#include "flexbench/scenario/generator.hpp"

namespace flexbench {

/// Where planners get their forecasts from at each step.
struct ForecastSource {
  const ScenarioModels& models;
  const MarketHistory& history;  // ends right before the grid starts
  ForecastConfig config;
};

struct SimulationOptions {
  bool keep_plans = false;  // store the plan of every call (audits, tests)
};

struct SimulationResult {
  std::string planner;
  double operation_cost = 0.0;  // EUR, sum of the ledger
  double penalty = 0.0;         // EUR
  double unmet_energy = 0.0;    // kWh
  double overflow_energy = 0.0;
  double unmet_demand_pct = 0.0;       // of requested load
  double exceeded_capacity_pct = 0.0;  // of capacity
  double runtime = 0.0;                // planner seconds
  double max_call_seconds = 0.0;
  int planner_calls = 0;
  int flagged_calls = 0;
  bool failed = false;
  std::string error;
  SocTrajectory trajectory;
  std::vector<LedgerRow> ledger;   // one per grid PTU, in order
  std::vector<double> cost_to_go;  // one per session PTU
  std::vector<Plan> plans;         // per call, with SimulationOptions::keep_plans

  double total_cost() const noexcept { return operation_cost + penalty; }
};

namespace detail {

inline void finish_result(SimulationResult& res, const EvSession& session, const MarketRules& rules) {
  res.trajectory.finalize(session);
  res.unmet_energy = res.trajectory.unmet_energy < kEnergyEps ? 0.0 : res.trajectory.unmet_energy;
  res.overflow_energy = res.trajectory.overflow_energy < kEnergyEps ? 0.0 : res.trajectory.overflow_energy;
  res.operation_cost = 0.0;
  for (const auto& row : res.ledger) res.operation_cost += row.total();
  res.penalty = soc_penalty(res.unmet_energy, res.overflow_energy, rules);
  const double req = session.requested_load();
  res.unmet_demand_pct = req > 0 ? 100.0 * res.unmet_energy / req : 0.0;
  res.exceeded_capacity_pct = 100.0 * res.overflow_energy / session.capacity;
}

/// Shared rolling loop; `replan` false plans once at arrival.
inline SimulationResult simulate(const PlannerConfig& cfg, const EvSession& session, const MarketRules& rules,
                                 const TimeGrid& grid, const MarketRealization& real, const ForecastSource& source,
                                 bool replan, const SimulationOptions& opt) {
  using clock = std::chrono::steady_clock;
  cfg.validate();
  rules.validate();
  session.validate(grid);
  real.validate(grid);
  SimulationResult res;
  res.planner = cfg.name();
  const auto n = static_cast<std::size_t>(grid.horizon_ptus());
  const int deadline = rules.reserve_deadline_ptus;
  CommitmentState state = CommitmentState::initial(session, grid);
  std::vector<char> settled(n, 0);
  std::vector<LedgerRow> rows(n);
  res.trajectory.soc.push_back(session.initial_soc);
  double peak = session.initial_soc, realized = 0.0;
  Plan current;

  for (int t = session.arrival_ptu; t < session.departure_ptu; ++t) {
    const bool call = replan || t == session.arrival_ptu;
    if (call) {
      ScenarioSet forecasts = cfg.kind == PlannerKind::PI
                                  ? ScenarioSet::uniform({real})
                                  : generate_forecasts(real, source.history, t, source.config, source.models, grid);
      const auto t0 = clock::now();
      try {
        current = plan(cfg, session, grid, rules, real.da_price, forecasts, state, t);
      } catch (const std::exception& e) {
        res.failed = true;
        res.error = std::string("planner failed at PTU ") + std::to_string(t) + ": " + e.what();
        return res;
      }
      const double sec = std::chrono::duration<double>(clock::now() - t0).count();
      res.runtime += sec;
      res.max_call_seconds = std::max(res.max_call_seconds, sec);
      ++res.planner_calls;
      res.flagged_calls += current.flagged;
      if (opt.keep_plans) res.plans.push_back(current);
      if (!state.da_frozen) state.freeze_da(current);
      state.freeze_reserves(current, replan ? t + deadline + 1 : grid.horizon_ptus());
      res.cost_to_go.push_back(realized + expected_plan_cost(current, settled, state.soc, peak, forecasts, session, grid, rules));
    } else {
      res.cost_to_go.push_back(res.cost_to_go.back());
    }
    // Settle with the frozen reserves, whatever the plan says now.
    Plan applied = current;
    const auto k = static_cast<std::size_t>(t);
    applied.da_purchase = state.da_purchase;
    applied.up_reserve[k] = state.up_reserve[k];
    applied.down_reserve[k] = state.down_reserve[k];
    applied.up_bid[k] = state.up_bid[k];
    applied.down_bid[k] = state.down_bid[k];
    applied.consumption[k] = std::clamp(applied.consumption[k], 0.0, session.max_power);
    rows[k] = settle_ptu(applied, t, real, session, grid);
    settled[k] = 1;
    realized += rows[k].total();
    state.consumption[k] = rows[k].consumption;
    state.soc = soc_step(state.soc, rows[k].actual_power, session, grid.ptu_hours());
    peak = std::max(peak, state.soc);
    res.trajectory.soc.push_back(state.soc);
  }
  // PTUs outside the session still settle their DA position.
  for (int t = 0; t < grid.horizon_ptus(); ++t) {
    if (settled[static_cast<std::size_t>(t)]) continue;
    Plan idle = Plan::zero(grid);
    idle.da_purchase = state.da_purchase;
    rows[static_cast<std::size_t>(t)] = settle_ptu(idle, t, real, session, grid);
  }
  res.ledger = std::move(rows);
  finish_result(res, session, rules);
  return res;
}

}  // namespace detail

/// Rolling-horizon run: replans at every PTU of the session.
inline SimulationResult simulate_online(const PlannerConfig& cfg, const EvSession& session, const MarketRules& rules,
                                        const TimeGrid& grid, const MarketRealization& real,
                                        const ForecastSource& source, const SimulationOptions& opt = {}) {
  return detail::simulate(cfg, session, rules, grid, real, source, true, opt);
}

/// Plans once at arrival and commits everything.
inline SimulationResult simulate_offline(const PlannerConfig& cfg, const EvSession& session, const MarketRules& rules,
                                         const TimeGrid& grid, const MarketRealization& real,
                                         const ForecastSource& source, const SimulationOptions& opt = {}) {
  return detail::simulate(cfg, session, rules, grid, real, source, false, opt);
}

}  // namespace flexbench
