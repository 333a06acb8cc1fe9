#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "flexbench/evaluator/settlement.hpp"
#include "flexbench/planners/planner.hpp"

namespace flexbench {

// Brute-force checks on tiny instances, small enough for CI. Each check
// compares an optimizer or the settlement code against exhaustive
// enumeration or an independent reimplementation.

struct OracleCheck {
  std::string name;
  int instances = 0;
  int failures = 0;
  double worst = 0.0;  // largest violation seen, EUR
};

namespace oracle {

inline MarketRealization random_realization(const TimeGrid& g, std::mt19937_64& rng, bool binary_usage) {
  std::uniform_real_distribution<double> price(10.0, 80.0), use(0.0, 1.0);
  auto r = MarketRealization::constant(g, 0, 0, 0, 0, 0, 0);
  for (auto& v : r.da_price) v = price(rng);
  for (std::size_t t = 0; t < r.up_price.size(); ++t) {
    r.imbalance_price[t] = price(rng);
    r.up_price[t] = r.imbalance_price[t] + price(rng) / 2;
    r.down_price[t] = r.imbalance_price[t] - price(rng) / 2;
    r.up_usage[t] = use(rng) < 0.3 ? 0.0 : use(rng);
    r.down_usage[t] = use(rng) < 0.3 ? 0.0 : use(rng);
    if (binary_usage) {
      r.up_usage[t] = std::round(r.up_usage[t]);
      r.down_usage[t] = std::round(r.down_usage[t]);
    }
  }
  return r;
}

/// Cost of a plan written out longhand, penalty included.
inline double reference_cost(const Plan& p, const MarketRealization& r, const EvSession& s, const TimeGrid& g,
                             const MarketRules& rules) {
  const double dt = g.ptu_hours();
  double cost = 0.0, soc = s.initial_soc, peak = soc;
  for (int t = 0; t < g.horizon_ptus(); ++t) {
    const auto k = static_cast<std::size_t>(t);
    const auto h = static_cast<std::size_t>(g.hour_of(t));
    const bool up = p.up_reserve[k] > 0 && (!p.up_bid[k] || *p.up_bid[k] <= r.up_price[k]);
    const bool dn = p.down_reserve[k] > 0 && (!p.down_bid[k] || *p.down_bid[k] >= r.down_price[k]);
    const double u = up ? p.up_reserve[k] * r.up_usage[k] : 0.0;
    const double d = dn ? p.down_reserve[k] * r.down_usage[k] : 0.0;
    cost += p.da_purchase[h] * r.da_price[h] * dt / 1000.0;
    cost += (p.consumption[k] - p.da_purchase[h]) * r.imbalance_price[k] * dt / 1000.0;
    cost += (d * r.down_price[k] - u * r.up_price[k]) * dt / 1000.0;
    soc += s.efficiency * dt * (p.consumption[k] - u + d);
    peak = std::max(peak, soc);
  }
  return cost + std::max(0.0, s.target_soc - soc) * rules.unmet_penalty / 1000.0 +
         std::max(0.0, peak - s.capacity) * rules.overflow_penalty / 1000.0;
}

inline double expected_reference(const Plan& p, const ScenarioSet& f, const EvSession& s, const TimeGrid& g,
                                 const MarketRules& rules) {
  double c = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) c += f.weights[i] * reference_cost(p, f.scenarios[i], s, g, rules);
  return c;
}

}  // namespace oracle

/// PI on two one-hour PTUs with 0/1 deployment equals the best plan on a
/// 0.5 kW lattice (the lattice contains an optimum for these instances).
inline OracleCheck oracle_perfect_information(std::uint64_t seed, int instances) {
  OracleCheck chk{"pi_vs_lattice"};
  const TimeGrid g(60, 2);
  const EvSession s{0, 2, 3.0, 0.0, 2.0, 2.0, 1.0};
  MarketRules rules;
  rules.mip_gap = 1e-6;
  const std::vector<double> lat = {0, 0.5, 1, 1.5, 2};
  for (int i = 0; i < instances; ++i) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(i));
    const auto r = oracle::random_realization(g, rng, true);
    const auto f = ScenarioSet::uniform({r});
    const auto st = CommitmentState::initial(s, g);
    const PlanningInput in{s, g, rules, r.da_price, f, st, 0};
    const double pi = oracle::reference_cost(plan_milp(PlannerConfig::defaults(PlannerKind::PI), in), r, s, g, rules);
    double best = 1e300;
    Plan p = Plan::zero(g);
    for (int code = 0; code < 390625; ++code) {  // 5^8
      int c = code;
      for (std::size_t t = 0; t < 2; ++t) {
        for (double* v : {&p.da_purchase[t], &p.consumption[t], &p.up_reserve[t], &p.down_reserve[t]}) {
          *v = lat[static_cast<std::size_t>(c % 5)];
          c /= 5;
        }
        p.up_bid[t] = r.up_price[t];
        p.down_bid[t] = r.down_price[t];
      }
      if (p.violations(s, g).empty()) best = std::min(best, oracle::reference_cost(p, r, s, g, rules));
    }
    const double gap = std::abs(pi - best);
    chk.worst = std::max(chk.worst, gap);
    ++chk.instances;
    if (gap > 1e-7) ++chk.failures;
  }
  return chk;
}

/// SO2 on one PTU and three scenarios is no worse than every lattice plan
/// bidding at one of the scenario prices.
inline OracleCheck oracle_bid_choice(std::uint64_t seed, int instances) {
  OracleCheck chk{"so2_vs_bid_enumeration"};
  const TimeGrid g(60, 1);
  const EvSession s{0, 1, 3.0, 0.0, 1.0, 2.0, 1.0};
  MarketRules rules;
  rules.mip_gap = 1e-6;
  const std::vector<double> lat = {0, 0.5, 1, 1.5, 2};
  for (int i = 0; i < instances; ++i) {
    std::mt19937_64 rng(seed + 1000 + static_cast<std::uint64_t>(i));
    std::vector<MarketRealization> v;
    for (int k = 0; k < 3; ++k) v.push_back(oracle::random_realization(g, rng, true));
    for (auto& r : v) r.da_price = v[0].da_price;
    const auto f = ScenarioSet::uniform(v);
    const auto st = CommitmentState::initial(s, g);
    const PlanningInput in{s, g, rules, v[0].da_price, f, st, 0};
    const double so2 =
        oracle::expected_reference(plan_milp(PlannerConfig::defaults(PlannerKind::SO2), in), f, s, g, rules);
    double best = 1e300;
    Plan p = Plan::zero(g);
    for (double da : lat)
      for (double c : lat)
        for (double u : lat)
          for (double d : lat)
            for (const auto& ru : v)
              for (const auto& rd : v) {
                p.da_purchase[0] = da;
                p.consumption[0] = c;
                p.up_reserve[0] = u;
                p.down_reserve[0] = d;
                p.up_bid[0] = ru.up_price[0];
                p.down_bid[0] = rd.down_price[0];
                if (p.violations(s, g).empty()) best = std::min(best, oracle::expected_reference(p, f, s, g, rules));
              }
    const double excess = std::max(0.0, so2 - best);
    chk.worst = std::max(chk.worst, excess);
    ++chk.instances;
    if (excess > 1e-7) ++chk.failures;
  }
  return chk;
}

/// The evaluator's per-PTU settlement plus penalty matches the longhand cost
/// for planner output on random eight-PTU instances.
inline OracleCheck oracle_settlement(std::uint64_t seed, int instances) {
  OracleCheck chk{"settlement_vs_reference"};
  const TimeGrid g(15, 8);
  const EvSession s{1, 7, 12.0, 1.0, 6.0, 7.0, 0.9};
  MarketRules rules;
  for (int i = 0; i < instances; ++i) {
    std::mt19937_64 rng(seed + 2000 + static_cast<std::uint64_t>(i));
    std::vector<MarketRealization> v;
    for (int k = 0; k < 4; ++k) v.push_back(oracle::random_realization(g, rng, false));
    for (auto& r : v) r.da_price = v[0].da_price;
    const auto f = ScenarioSet::uniform(v);
    const auto st = CommitmentState::initial(s, g);
    const PlanningInput in{s, g, rules, v[0].da_price, f, st, s.arrival_ptu};
    for (auto kind : {PlannerKind::MR, PlannerKind::SO1, PlannerKind::SO2}) {
      const Plan p = plan(PlannerConfig::defaults(kind), in);
      for (const auto& r : v) {
        double cost = 0.0, soc = s.initial_soc, peak = soc;
        for (int t = 0; t < g.horizon_ptus(); ++t) {
          const auto row = settle_ptu(p, t, r, s, g);
          cost += row.total();
          soc += s.efficiency * g.ptu_hours() * row.actual_power;
          peak = std::max(peak, soc);
        }
        cost += soc_penalty(std::max(0.0, s.target_soc - soc), std::max(0.0, peak - s.capacity), rules);
        const double gap = std::abs(cost - oracle::reference_cost(p, r, s, g, rules));
        chk.worst = std::max(chk.worst, gap);
        ++chk.instances;
        if (gap > 1e-9) ++chk.failures;
      }
    }
  }
  return chk;
}

inline std::vector<OracleCheck> run_oracle_checks(std::uint64_t seed, int instances) {
  return {oracle_perfect_information(seed, instances), oracle_bid_choice(seed, instances),
          oracle_settlement(seed, instances)};
}

}  // namespace flexbench
