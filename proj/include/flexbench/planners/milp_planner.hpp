#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "flexbench/mathprog/branch_and_bound.hpp"
#include "flexbench/mathprog/external.hpp"
#include "flexbench/planners/common.hpp"

namespace flexbench {

/// Up bid reaching acceptance probability alpha: the largest forecast up price
/// that at least alpha of the (weighted) scenarios meet or exceed.
inline double up_bid_for_acceptance(const ScenarioSet& f, std::size_t t, double alpha) {
  std::vector<std::pair<double, double>> pw;
  for (std::size_t s = 0; s < f.size(); ++s) pw.emplace_back(f.scenarios[s].up_price[t], f.weights[s]);
  std::sort(pw.begin(), pw.end(), [](auto& a, auto& b) { return a.first > b.first; });
  double mass = 0.0;
  for (const auto& [price, w] : pw) {
    mass += w;
    if (mass >= alpha - 1e-12) return price;
  }
  return pw.back().first;
}

/// Down bid reaching acceptance probability alpha: the weighted alpha-quantile
/// of forecast down prices.
inline double down_bid_for_acceptance(const ScenarioSet& f, std::size_t t, double alpha) {
  std::vector<std::pair<double, double>> pw;
  for (std::size_t s = 0; s < f.size(); ++s) pw.emplace_back(f.scenarios[s].down_price[t], f.weights[s]);
  std::sort(pw.begin(), pw.end(), [](auto& a, auto& b) { return a.first < b.first; });
  double mass = 0.0;
  for (const auto& [price, w] : pw) {
    mass += w;
    if (mass >= alpha - 1e-12) return price;
  }
  return pw.back().first;
}

namespace detail {

struct ReserveOption {
  std::optional<double> bid;
  std::vector<double> factor;  // per model scenario: cleared x deployed fraction
};

/// The market as the program sees it: weighted model scenarios with prices,
/// and the reserve offers open at each PTU.
struct SettlementModel {
  std::vector<double> weight;
  std::vector<std::vector<double>> imbalance, up_price, down_price;  // [s][t]
  std::vector<std::vector<ReserveOption>> up, down;                  // [t], free PTUs only
  std::vector<std::vector<double>> frozen_up, frozen_down;            // [t][s] factors of frozen offers
};

enum class BidMode { Quantile, QuantityOnly, Candidates };

/// Builds the settlement model. With `collapse` the forecasts become one mean
/// scenario whose reserve factors are expected acceptance x deployment.
inline SettlementModel settlement_model(const PlanningInput& in, const ScenarioSet& f, BidMode mode, double alpha,
                                        bool collapse) {
  const auto n = static_cast<std::size_t>(in.grid.horizon_ptus());
  const std::size_t S = f.size();
  SettlementModel m;
  auto scenario_factor = [&](bool up, const std::optional<double>& bid, std::size_t t) {
    std::vector<double> per(S);
    for (std::size_t s = 0; s < S; ++s) {
      const auto& r = f.scenarios[s];
      per[s] = up ? (up_offer_clears(bid, r.up_price[t]) ? r.up_usage[t] : 0.0)
                  : (down_offer_clears(bid, r.down_price[t]) ? r.down_usage[t] : 0.0);
    }
    if (!collapse) return per;
    double e = 0.0;
    for (std::size_t s = 0; s < S; ++s) e += f.weights[s] * per[s];
    return std::vector<double>{e};
  };
  if (collapse) {
    m.weight = {1.0};
    m.imbalance.assign(1, std::vector<double>(n));
    m.up_price.assign(1, std::vector<double>(n));
    m.down_price.assign(1, std::vector<double>(n));
    for (std::size_t t = 0; t < n; ++t) {
      m.imbalance[0][t] = expected(f, [&](const MarketRealization& r) { return r.imbalance_price[t]; });
      m.up_price[0][t] = expected(f, [&](const MarketRealization& r) { return r.up_price[t]; });
      m.down_price[0][t] = expected(f, [&](const MarketRealization& r) { return r.down_price[t]; });
    }
  } else {
    m.weight = f.weights;
    for (const auto& r : f.scenarios) {
      m.imbalance.push_back(r.imbalance_price);
      m.up_price.push_back(r.up_price);
      m.down_price.push_back(r.down_price);
    }
  }
  m.up.assign(n, {});
  m.down.assign(n, {});
  m.frozen_up.assign(n, {});
  m.frozen_down.assign(n, {});
  for (int ti = in.t_now; ti < in.session.departure_ptu; ++ti) {
    const auto t = static_cast<std::size_t>(ti);
    if (in.state.reserve_frozen(ti)) {
      m.frozen_up[t] = scenario_factor(true, in.state.up_bid[t], t);
      m.frozen_down[t] = scenario_factor(false, in.state.down_bid[t], t);
      continue;
    }
    if (mode == BidMode::Candidates) {
      std::vector<double> ups, downs;
      for (const auto& r : f.scenarios) {
        ups.push_back(r.up_price[t]);
        downs.push_back(r.down_price[t]);
      }
      std::sort(ups.begin(), ups.end());
      ups.erase(std::unique(ups.begin(), ups.end()), ups.end());
      std::sort(downs.begin(), downs.end());
      downs.erase(std::unique(downs.begin(), downs.end()), downs.end());
      // Candidates that never deploy add nothing; equal deployment patterns
      // keep the bid clearing most often (first in this order).
      auto add_distinct = [](std::vector<ReserveOption>& out, ReserveOption o) {
        if (std::all_of(o.factor.begin(), o.factor.end(), [](double v) { return v == 0.0; })) return;
        for (const auto& e : out)
          if (e.factor == o.factor) return;
        out.push_back(std::move(o));
      };
      for (double c : ups) add_distinct(m.up[t], {c, scenario_factor(true, c, t)});
      for (auto it = downs.rbegin(); it != downs.rend(); ++it) add_distinct(m.down[t], {*it, scenario_factor(false, *it, t)});
    } else {
      std::optional<double> ub, db;
      if (mode == BidMode::Quantile) {
        ub = up_bid_for_acceptance(f, t, alpha);
        db = down_bid_for_acceptance(f, t, alpha);
      }
      m.up[t].push_back({ub, scenario_factor(true, ub, t)});
      m.down[t].push_back({db, scenario_factor(false, db, t)});
    }
  }
  return m;
}

struct PlanningProgram {
  mathprog::LinearProgram lp;
  std::vector<int> da;    // per hour, -1 when fixed
  std::vector<int> cons;  // per PTU, -1 when not decided here
  std::vector<std::vector<int>> up_q, down_q;  // per PTU, one quantity per option
};

/// Expected settlement cost of PTUs from t_now on (plus all PTUs of open DA
/// hours) with soft penalties on the final SOC of every model scenario.
inline PlanningProgram build_program(const PlanningInput& in, const SettlementModel& m) {
  using namespace mathprog;
  const auto& ses = in.session;
  const auto n = static_cast<std::size_t>(in.grid.horizon_ptus());
  const std::size_t S = m.weight.size();
  const double dt = in.grid.ptu_hours();
  const double k = ses.efficiency * dt;
  const double pmax = ses.max_power;
  const int pph = in.grid.ptus_per_hour();

  PlanningProgram P;
  auto& lp = P.lp;
  P.da.assign(static_cast<std::size_t>(in.grid.hours()), -1);
  P.cons.assign(n, -1);
  P.up_q.assign(n, {});
  P.down_q.assign(n, {});

  auto e_imb = [&](std::size_t t) {
    double v = 0.0;
    for (std::size_t s = 0; s < S; ++s) v += m.weight[s] * m.imbalance[s][t];
    return v;
  };

  // DA: open only at the first call, for hours touching the session.
  for (int h = 0; h < in.grid.hours(); ++h) {
    const int first = h * pph, last = first + pph;  // [first, last)
    double price_term = 0.0;
    for (int t = first; t < last; ++t)
      price_term += dt * (in.da_prices[static_cast<std::size_t>(h)] - e_imb(static_cast<std::size_t>(t))) / 1000.0;
    const bool touches = last > ses.arrival_ptu && first < ses.departure_ptu;
    if (!in.state.da_frozen && touches) {
      P.da[static_cast<std::size_t>(h)] = lp.add_continuous("da_" + std::to_string(h), 0.0, pmax, price_term);
    } else if (in.state.da_frozen) {
      double from_now = 0.0;
      for (int t = std::max(first, in.t_now); t < last; ++t)
        from_now += dt * (in.da_prices[static_cast<std::size_t>(h)] - e_imb(static_cast<std::size_t>(t))) / 1000.0;
      lp.add_objective_offset(in.state.da_purchase[static_cast<std::size_t>(h)] * from_now);
    }
  }

  // energy_s = sum of linear terms + constant, per model scenario
  std::vector<std::vector<Term>> energy(S);
  std::vector<double> energy_const(S, 0.0);

  for (int ti = in.t_now; ti < ses.departure_ptu; ++ti) {
    const auto t = static_cast<std::size_t>(ti);
    const std::string ts = std::to_string(ti);
    const bool frozen = in.state.reserve_frozen(ti);
    double lo = 0.0, hi = pmax;
    if (frozen) {
      lo = in.state.up_reserve[t];
      hi = pmax - in.state.down_reserve[t];
      if (lo > hi) lo = hi = 0.5 * (lo + hi);  // rounding in earlier plans
    }
    P.cons[t] = lp.add_continuous("c_" + ts, lo, hi, dt * e_imb(t) / 1000.0);
    for (std::size_t s = 0; s < S; ++s) energy[s].push_back({P.cons[t], k});

    if (frozen) {
      const double qu = in.state.up_reserve[t], qd = in.state.down_reserve[t];
      for (std::size_t s = 0; s < S; ++s) {
        const double fu = m.frozen_up[t][s], fd = m.frozen_down[t][s];
        energy_const[s] += k * (fd * qd - fu * qu);
        lp.add_objective_offset(m.weight[s] * dt / 1000.0 * (fd * qd * m.down_price[s][t] - fu * qu * m.up_price[s][t]));
      }
      continue;
    }

    auto add_direction = [&](const std::vector<ReserveOption>& opts, bool up, std::vector<int>& qs) {
      const char* tag = up ? "u" : "d";
      std::vector<Term> link, choose;
      for (std::size_t o = 0; o < opts.size(); ++o) {
        double cost = 0.0;
        for (std::size_t s = 0; s < S; ++s) {
          const double price = up ? m.up_price[s][t] : m.down_price[s][t];
          cost += m.weight[s] * opts[o].factor[s] * price * dt / 1000.0 * (up ? -1.0 : 1.0);
        }
        const std::string name = std::string(tag) + "_" + ts + "_" + std::to_string(o);
        const int q = lp.add_continuous(name, 0.0, pmax, cost);
        qs.push_back(q);
        link.push_back({q, 1.0});
        for (std::size_t s = 0; s < S; ++s)
          if (opts[o].factor[s] != 0.0) energy[s].push_back({q, (up ? -k : k) * opts[o].factor[s]});
        if (opts.size() > 1) {
          const int y = lp.add_binary("y" + name);
          lp.add_constraint("pick_" + name, {{q, 1.0}, {y, -pmax}}, Comparator::LessEqual, 0.0);
          choose.push_back({y, 1.0});
        }
      }
      if (opts.size() > 1) lp.add_constraint(std::string("one_") + tag + "_" + ts, choose, Comparator::LessEqual, 1.0);
      if (up) {
        link.push_back({P.cons[t], -1.0});
        lp.add_constraint("upcap_" + ts, link, Comparator::LessEqual, 0.0);
      } else {
        link.push_back({P.cons[t], 1.0});
        lp.add_constraint("downcap_" + ts, link, Comparator::LessEqual, pmax);
      }
    };
    add_direction(m.up[t], true, P.up_q[t]);
    add_direction(m.down[t], false, P.down_q[t]);
  }

  for (std::size_t s = 0; s < S; ++s) {
    const std::string ss = std::to_string(s);
    const int unmet = lp.add_continuous("unmet_" + ss, 0.0, kInf, m.weight[s] * in.rules.unmet_penalty / 1000.0);
    const int over = lp.add_continuous("over_" + ss, 0.0, kInf, m.weight[s] * in.rules.overflow_penalty / 1000.0);
    auto lower = energy[s];
    lower.push_back({unmet, 1.0});
    lp.add_constraint("reach_" + ss, lower, Comparator::GreaterEqual, ses.target_soc - in.state.soc - energy_const[s]);
    auto upper = energy[s];
    upper.push_back({over, -1.0});
    lp.add_constraint("fit_" + ss, upper, Comparator::LessEqual, ses.capacity - in.state.soc - energy_const[s]);
  }
  return P;
}

inline ScenarioSet planning_scenarios(const PlannerConfig& cfg, const ScenarioSet& f) {
  // a cap larger than the bundle just means all of it
  if (cfg.n_scenarios_used == 0 || static_cast<std::size_t>(cfg.n_scenarios_used) >= f.size()) return f;
  return f.head(static_cast<std::size_t>(cfg.n_scenarios_used));
}

inline BidMode bid_mode(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::QO: return BidMode::QuantityOnly;
    case PlannerKind::SO2:
    case PlannerKind::PI: return BidMode::Candidates;
    default: return BidMode::Quantile;
  }
}

inline bool collapses(PlannerKind kind) { return kind == PlannerKind::DT || kind == PlannerKind::QO; }

}  // namespace detail

/// The program a MILP planner (DT, QO, SO1, SO2, PI) solves at this call.
inline detail::PlanningProgram milp_program(const PlannerConfig& cfg, const PlanningInput& in) {
  const ScenarioSet f = detail::planning_scenarios(cfg, in.forecasts);
  const auto model = detail::settlement_model(in, f, detail::bid_mode(cfg.kind), cfg.alpha, detail::collapses(cfg.kind));
  return detail::build_program(in, model);
}

struct MilpPlanResult {
  Plan plan;
  mathprog::Solution solution;
};

/// DT, QO, SO1, SO2 and PI share one program shape; they differ in how the
/// forecasts become model scenarios and which bids are on offer.
inline MilpPlanResult plan_milp_detailed(const PlannerConfig& cfg, const PlanningInput& in) {
  const ScenarioSet f = detail::planning_scenarios(cfg, in.forecasts);
  const auto mode = detail::bid_mode(cfg.kind);
  const auto model = detail::settlement_model(in, f, mode, cfg.alpha, detail::collapses(cfg.kind));
  auto P = detail::build_program(in, model);
  MilpPlanResult out;
  out.solution = cfg.solver_cmd.empty()
                     ? mathprog::solve(P.lp, {.gap = in.rules.mip_gap, .time_limit = cfg.time_limit})
                     : mathprog::solve_external(P.lp, {cfg.solver_cmd}, in.rules.mip_gap, cfg.time_limit);
  Plan p = committed_plan(in);
  if (!out.solution.has_assignment()) {
    p.flagged = true;
    p.note = std::string("solver returned ") + mathprog::to_string(out.solution.status) + " without a plan";
    // Keep charging safely: direct charging, no new reserves.
    const double per = in.session.efficiency * in.session.max_power * in.grid.ptu_hours();
    double need = in.session.target_soc - in.state.soc;
    for (int t = in.t_now; t < in.session.departure_ptu && need > kEnergyEps; ++t) {
      const double e = std::min(need, per);
      p.consumption[static_cast<std::size_t>(t)] = e / (in.session.efficiency * in.grid.ptu_hours());
      need -= e;
    }
    if (!in.state.da_frozen) da_from_consumption(p, in.grid);
    tidy_plan(p, in);
    out.plan = std::move(p);
    return out;
  }
  const auto& x = out.solution.values;
  if (out.solution.status == mathprog::SolveStatus::Limit) {
    p.flagged = true;
    p.note = "solver limit reached; best incumbent used";
  }
  for (std::size_t h = 0; h < P.da.size(); ++h)
    if (P.da[h] >= 0) p.da_purchase[h] = x[static_cast<std::size_t>(P.da[h])];
  for (std::size_t t = 0; t < P.cons.size(); ++t) {
    if (P.cons[t] < 0) continue;
    p.consumption[t] = x[static_cast<std::size_t>(P.cons[t])];
    auto pick = [&](const std::vector<int>& qs, const std::vector<detail::ReserveOption>& opts, double& qty,
                    std::optional<double>& bid) {
      if (qs.empty()) return;
      qty = 0.0;
      std::size_t best = 0;
      for (std::size_t o = 0; o < qs.size(); ++o) {
        const double v = x[static_cast<std::size_t>(qs[o])];
        qty += v;
        if (v > x[static_cast<std::size_t>(qs[best])]) best = o;
      }
      bid = opts[best].bid;
    };
    pick(P.up_q[t], model.up[t], p.up_reserve[t], p.up_bid[t]);
    pick(P.down_q[t], model.down[t], p.down_reserve[t], p.down_bid[t]);
  }
  tidy_plan(p, in);
  out.plan = std::move(p);
  return out;
}

inline Plan plan_milp(const PlannerConfig& cfg, const PlanningInput& in) { return plan_milp_detailed(cfg, in).plan; }

}  // namespace flexbench
