#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "flexbench/mathprog/lp_format.hpp"
#include "flexbench/planners/planner.hpp"

using namespace flexbench;

namespace {

// Independent settlement of one plan against one realization, in EUR.
// Imbalance is priced on scheduled consumption minus DA; reserves pay or cost
// their deployed energy at the reserve price; SOC shortfalls are penalised.
double realized_cost(const Plan& p, const MarketRealization& r, const EvSession& s, const TimeGrid& g,
                     const MarketRules& rules) {
  const double dt = g.ptu_hours();
  double cost = 0.0, soc = s.initial_soc, peak = soc;
  for (int t = 0; t < g.horizon_ptus(); ++t) {
    const auto k = static_cast<std::size_t>(t);
    const auto h = static_cast<std::size_t>(g.hour_of(t));
    cost += p.da_purchase[h] * r.da_price[h] * dt / 1000.0;
    cost += (p.consumption[k] - p.da_purchase[h]) * r.imbalance_price[k] * dt / 1000.0;
    const double uu = up_offer_clears(p.up_bid[k], r.up_price[k]) ? r.up_usage[k] : 0.0;
    const double du = down_offer_clears(p.down_bid[k], r.down_price[k]) ? r.down_usage[k] : 0.0;
    cost -= p.up_reserve[k] * uu * r.up_price[k] * dt / 1000.0;
    cost += p.down_reserve[k] * du * r.down_price[k] * dt / 1000.0;
    soc += s.efficiency * dt * (p.consumption[k] - uu * p.up_reserve[k] + du * p.down_reserve[k]);
    peak = std::max(peak, soc);
  }
  cost += std::max(0.0, s.target_soc - soc) * rules.unmet_penalty / 1000.0;
  cost += std::max(0.0, peak - s.capacity) * rules.overflow_penalty / 1000.0;
  return cost;
}

double expected_cost(const Plan& p, const ScenarioSet& f, const EvSession& s, const TimeGrid& g,
                     const MarketRules& rules) {
  double c = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) c += f.weights[i] * realized_cost(p, f.scenarios[i], s, g, rules);
  return c;
}

MarketRealization random_realization(const TimeGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> price(10.0, 80.0), use(0.0, 1.0);
  auto r = MarketRealization::constant(g, 0, 0, 0, 0, 0, 0);
  for (auto& v : r.da_price) v = price(rng);
  for (std::size_t t = 0; t < r.up_price.size(); ++t) {
    r.imbalance_price[t] = price(rng);
    r.up_price[t] = r.imbalance_price[t] + price(rng) / 2;
    r.down_price[t] = r.imbalance_price[t] - price(rng) / 2;
    r.up_usage[t] = use(rng) < 0.3 ? 0.0 : use(rng);
    r.down_usage[t] = use(rng) < 0.3 ? 0.0 : use(rng);
  }
  return r;
}

ScenarioSet random_set(const TimeGrid& g, std::size_t n, std::mt19937_64& rng) {
  std::vector<MarketRealization> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(random_realization(g, rng));
  return ScenarioSet::uniform(std::move(v));
}

struct Instance {
  EvSession session;
  TimeGrid grid;
  MarketRules rules;
  std::vector<double> da;
  ScenarioSet forecasts;
  CommitmentState state;
};

Instance small_instance(std::uint64_t seed, int horizon = 8, std::size_t scenarios = 4) {
  std::mt19937_64 rng(seed);
  Instance I;
  I.grid = TimeGrid(15, horizon);
  I.session.arrival_ptu = 1;
  I.session.departure_ptu = horizon - 1;
  I.session.capacity = 12.0;
  I.session.initial_soc = 1.0;
  I.session.target_soc = 6.0;
  I.rules.mip_gap = 1e-6;
  I.forecasts = random_set(I.grid, scenarios, rng);
  I.da = I.forecasts.scenarios[0].da_price;
  for (auto& s : I.forecasts.scenarios) s.da_price = I.da;
  I.state = CommitmentState::initial(I.session, I.grid);
  return I;
}

Plan run(const PlannerConfig& cfg, const Instance& I, int t_now) {
  return plan(cfg, I.session, I.grid, I.rules, I.da, I.forecasts, I.state, t_now);
}

PlannerConfig config(PlannerKind k) { return PlannerConfig::defaults(k); }

const std::vector<PlannerKind> kAll = {PlannerKind::DI, PlannerKind::OP, PlannerKind::MR, PlannerKind::QO,
                                       PlannerKind::DT, PlannerKind::SO1, PlannerKind::SO2, PlannerKind::PI};

}  // namespace

TEST(Direct, FullPowerThenRemainder) {
  Instance I = small_instance(1, 48, 1);
  I.session = EvSession{};  // 0..48, 1 -> 27 kWh, 7 kW, 0.9
  I.state = CommitmentState::initial(I.session, I.grid);
  const Plan p = run(config(PlannerKind::DI), I, 0);
  for (int t = 0; t < 16; ++t) EXPECT_DOUBLE_EQ(p.consumption[static_cast<std::size_t>(t)], 7.0);
  EXPECT_NEAR(p.consumption[16], 0.8 / (0.9 * 0.25), 1e-12);
  EXPECT_NEAR(p.consumption[16], 3.5556, 1e-4);
  for (int t = 17; t < 48; ++t) EXPECT_EQ(p.consumption[static_cast<std::size_t>(t)], 0.0);
  for (int h = 0; h < 4; ++h) EXPECT_DOUBLE_EQ(p.da_purchase[static_cast<std::size_t>(h)], 7.0);
  EXPECT_NEAR(p.da_purchase[4], 3.5556 / 4, 1e-4);
  EXPECT_TRUE(p.violations(I.session, I.grid).empty());
}

TEST(OptimalPrice, PicksCheapestHours) {
  Instance I;
  I.grid = TimeGrid(60, 3);
  I.session = EvSession{0, 3, 14.0, 0.0, 14.0, 7.0, 1.0};
  I.da = {30.0, 10.0, 20.0};
  I.forecasts = ScenarioSet::uniform({MarketRealization::constant(I.grid, 0, 0, 0, 25, 0, 0)});
  I.state = CommitmentState::initial(I.session, I.grid);
  const Plan p = run(config(PlannerKind::OP), I, 0);
  EXPECT_EQ(p.consumption, (std::vector<double>{0.0, 7.0, 7.0}));
  EXPECT_EQ(p.da_purchase, (std::vector<double>{0.0, 7.0, 7.0}));
}

TEST(OptimalPrice, LaterCallsRankByExpectedImbalance) {
  Instance I;
  I.grid = TimeGrid(60, 4);
  I.session = EvSession{0, 4, 14.0, 0.0, 7.0, 7.0, 1.0};
  I.da = {30.0, 10.0, 20.0, 40.0};
  auto a = MarketRealization::constant(I.grid, 0, 0, 0, 0, 0, 0);
  a.imbalance_price = {0, 50, 10, 30};
  auto b = a;
  b.imbalance_price = {0, 50, 30, 0};
  I.forecasts = ScenarioSet::uniform({a, b});
  I.state = CommitmentState::initial(I.session, I.grid);
  I.state.da_frozen = true;
  I.state.da_purchase = {0, 7, 0, 0};
  I.state.reserves_frozen_until = 1;
  const Plan p = run(config(PlannerKind::OP), I, 1);
  EXPECT_EQ(p.consumption, (std::vector<double>{0.0, 0.0, 0.0, 7.0}));  // E = 50, 20, 15
  EXPECT_EQ(p.da_purchase, I.state.da_purchase);
}

TEST(MaxReg, IgnoresForecasts) {
  Instance I = small_instance(3, 48, 3);
  I.session = EvSession{};
  I.state = CommitmentState::initial(I.session, I.grid);
  const Plan a = run(config(PlannerKind::MR), I, 0);
  std::mt19937_64 rng(99);
  I.forecasts = random_set(I.grid, 7, rng);
  const Plan b = run(config(PlannerKind::MR), I, 0);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(a.violations(I.session, I.grid).empty());
}

// Rolls MR forward, deploying every offer fully in one direction (0 none,
// 1 up, 2 down), and returns the SOC at departure plus the peak.
std::pair<double, double> roll_maxreg(const Instance& base, int mode) {
  Instance I = base;
  I.state = CommitmentState::initial(I.session, I.grid);
  double peak = I.state.soc;
  for (int t = I.session.arrival_ptu; t < I.session.departure_ptu; ++t) {
    const Plan p = run(config(PlannerKind::MR), I, t);
    if (!I.state.da_frozen) I.state.freeze_da(p);
    I.state.freeze_reserves(p, t + I.rules.reserve_deadline_ptus + 1);
    const auto k = static_cast<std::size_t>(t);
    const double c = p.consumption[k];
    const double actual = c - (mode == 1 ? I.state.up_reserve[k] : 0.0) + (mode == 2 ? I.state.down_reserve[k] : 0.0);
    I.state.consumption[k] = c;
    I.state.soc += I.session.efficiency * I.grid.ptu_hours() * actual;
    peak = std::max(peak, I.state.soc);
  }
  return {I.state.soc, peak};
}

TEST(MaxReg, RobustToExtremeDeployment) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Instance I = small_instance(seed, 48, 2);
    I.session = EvSession{};
    I.session.arrival_ptu = static_cast<int>(seed) * 3;
    I.session.initial_soc = 1.0 + static_cast<double>(seed);
    I.state = CommitmentState::initial(I.session, I.grid);
    const Plan first = run(config(PlannerKind::MR), I, I.session.arrival_ptu);
    double offered = 0.0;
    for (std::size_t t = 0; t < 48; ++t) offered += first.up_reserve[t] + first.down_reserve[t];
    EXPECT_GT(offered, 1.0);
    for (int mode = 0; mode < 3; ++mode) {
      const auto [final_soc, peak] = roll_maxreg(I, mode);
      EXPECT_GE(final_soc, I.session.target_soc - 1e-6) << "seed " << seed << " mode " << mode;
      EXPECT_LE(peak, I.session.capacity + 1e-6) << "seed " << seed << " mode " << mode;
    }
  }
}

TEST(MaxReg, ReserveLimitedBySlack) {
  Instance I = small_instance(4, 48, 1);
  I.session = EvSession{};
  I.session.arrival_ptu = 31;  // 17 PTUs: 26.775 kWh reachable for 26 needed
  I.state = CommitmentState::initial(I.session, I.grid);
  const Plan p = run(config(PlannerKind::MR), I, 31);
  double up = 0.0;
  for (std::size_t t = 31; t < 48; ++t) up += p.up_reserve[t];
  EXPECT_LE(up * 0.9 * 0.25, 0.775 + 1e-9);
  EXPECT_GT(up, 0.0);
  EXPECT_TRUE(p.violations(I.session, I.grid).empty());
}

TEST(MaxReg, FullPowerSessionOffersNothing) {
  Instance I = small_instance(4, 48, 1);
  I.session = EvSession{};
  I.session.arrival_ptu = 28;
  I.session.target_soc = 1.0 + 20 * 0.9 * 7 * 0.25;  // exactly all 20 PTUs at full power
  I.state = CommitmentState::initial(I.session, I.grid);
  const Plan p = run(config(PlannerKind::MR), I, 28);
  for (std::size_t t = 28; t < 48; ++t) {
    EXPECT_NEAR(p.consumption[t], 7.0, 1e-9);
    EXPECT_LT(p.up_reserve[t], 1e-6);
    EXPECT_EQ(p.down_reserve[t], 0.0);
  }
}

TEST(Milp, QuantityOnlyMatchesFullAcceptanceThreshold) {
  Instance I = small_instance(5);
  PlanningInput in{I.session, I.grid, I.rules, I.da, I.forecasts, I.state, 1};
  PlannerConfig qo = config(PlannerKind::QO);
  PlannerConfig dt = config(PlannerKind::DT);
  dt.alpha = 1.0;
  EXPECT_EQ(mathprog::export_lp(milp_program(qo, in).lp), mathprog::export_lp(milp_program(dt, in).lp));
  dt.alpha = 0.5;
  EXPECT_NE(mathprog::export_lp(milp_program(qo, in).lp), mathprog::export_lp(milp_program(dt, in).lp));
}

TEST(Milp, AcceptanceQuantileBids) {
  TimeGrid g(60, 1);
  std::vector<MarketRealization> v;
  for (double p : {10.0, 20.0, 30.0, 40.0}) {
    auto r = MarketRealization::constant(g, 0, p, p, 0, 0, 0);
    v.push_back(r);
  }
  auto f = ScenarioSet::uniform(v);
  EXPECT_EQ(up_bid_for_acceptance(f, 0, 1.0), 10.0);
  EXPECT_EQ(up_bid_for_acceptance(f, 0, 0.75), 20.0);
  EXPECT_EQ(up_bid_for_acceptance(f, 0, 0.5), 30.0);
  EXPECT_EQ(up_bid_for_acceptance(f, 0, 0.1), 40.0);
  EXPECT_EQ(down_bid_for_acceptance(f, 0, 1.0), 40.0);
  EXPECT_EQ(down_bid_for_acceptance(f, 0, 0.5), 20.0);
  EXPECT_EQ(down_bid_for_acceptance(f, 0, 0.1), 10.0);
}

TEST(Milp, WithoutDeploymentMatchesPriceOrdering) {
  // No reserve revenue and imbalance equal to DA: cheapest-hours charging.
  Instance I;
  I.grid = TimeGrid(60, 4);
  I.session = EvSession{0, 4, 14.0, 0.0, 14.0, 7.0, 1.0};
  I.da = {30.0, 10.0, 20.0, 40.0};
  auto r = MarketRealization::constant(I.grid, 0, 50, 5, 0, 0, 0);
  r.da_price = I.da;
  r.imbalance_price = I.da;
  I.forecasts = ScenarioSet::uniform({r});
  I.state = CommitmentState::initial(I.session, I.grid);
  const Plan op = run(config(PlannerKind::OP), I, 0);
  for (auto k : {PlannerKind::QO, PlannerKind::DT, PlannerKind::SO1, PlannerKind::SO2, PlannerKind::PI}) {
    const Plan p = run(config(k), I, 0);
    EXPECT_NEAR(expected_cost(p, I.forecasts, I.session, I.grid, I.rules),
                expected_cost(op, I.forecasts, I.session, I.grid, I.rules), 1e-9)
        << to_string(k);
    EXPECT_NEAR(p.consumption[1], 7.0, 1e-7) << to_string(k);
    EXPECT_NEAR(p.consumption[2], 7.0, 1e-7) << to_string(k);
  }
}

TEST(Milp, ObjectiveIsExpectedCost) {
  for (std::uint64_t seed = 10; seed < 16; ++seed) {
    Instance I = small_instance(seed);
    PlanningInput in{I.session, I.grid, I.rules, I.da, I.forecasts, I.state, 1};
    for (auto k : {PlannerKind::SO1, PlannerKind::SO2}) {
      const auto r = plan_milp_detailed(config(k), in);
      ASSERT_TRUE(r.solution.proven());
      EXPECT_NEAR(r.solution.objective, expected_cost(r.plan, I.forecasts, I.session, I.grid, I.rules), 1e-7)
          << to_string(k) << " seed " << seed;
    }
  }
}

TEST(Milp, PerfectInformationBeatsBruteForce) {
  // Two one-hour PTUs, one scenario, all decisions on a 0.5 kW lattice.
  TimeGrid g(60, 2);
  EvSession s{0, 2, 3.0, 0.0, 2.0, 2.0, 1.0};
  MarketRules rules;
  rules.mip_gap = 1e-6;
  const std::vector<double> lat = {0, 0.5, 1, 1.5, 2};
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    std::mt19937_64 rng(seed);
    auto r = random_realization(g, rng);
    for (auto& u : r.up_usage) u = std::round(u);
    for (auto& u : r.down_usage) u = std::round(u);
    auto f = ScenarioSet::uniform({r});
    auto st = CommitmentState::initial(s, g);
    PlanningInput in{s, g, rules, r.da_price, f, st, 0};
    const auto res = plan_milp_detailed(config(PlannerKind::PI), in);
    ASSERT_TRUE(res.solution.proven());
    const double pi = realized_cost(res.plan, r, s, g, rules);
    EXPECT_NEAR(pi, res.solution.objective, 1e-9);
    double best = 1e300;
    Plan p = Plan::zero(g);
    for (int i = 0; i < 5 * 5 * 5 * 5 * 5 * 5 * 5 * 5; ++i) {
      int c = i;
      auto next = [&] {
        const double v = lat[static_cast<std::size_t>(c % 5)];
        c /= 5;
        return v;
      };
      for (std::size_t t = 0; t < 2; ++t) {
        p.da_purchase[t] = next();
        p.consumption[t] = next();
        p.up_reserve[t] = next();
        p.down_reserve[t] = next();
        p.up_bid[t] = r.up_price[t];
        p.down_bid[t] = r.down_price[t];
      }
      if (!p.violations(s, g).empty()) continue;
      best = std::min(best, realized_cost(p, r, s, g, rules));
    }
    EXPECT_LE(pi, best + 1e-9) << "seed " << seed;
    EXPECT_NEAR(pi, best, 1e-9) << "lattice optimum expected for 0/1 usage, seed " << seed;
  }
}

TEST(Milp, BidChoiceMatchesEnumeration) {
  // One hour PTU, three scenarios: enumerate bids over the candidate prices.
  TimeGrid g(60, 1);
  EvSession s{0, 1, 3.0, 0.0, 1.0, 2.0, 1.0};
  MarketRules rules;
  rules.mip_gap = 1e-6;
  const std::vector<double> lat = {0, 0.5, 1, 1.5, 2};
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    std::mt19937_64 rng(100 + seed);
    auto f = random_set(g, 3, rng);
    for (auto& r : f.scenarios) {
      r.da_price = f.scenarios[0].da_price;
      for (auto& u : r.up_usage) u = std::round(u);
      for (auto& u : r.down_usage) u = std::round(u);
    }
    auto st = CommitmentState::initial(s, g);
    PlanningInput in{s, g, rules, f.scenarios[0].da_price, f, st, 0};
    const auto res = plan_milp_detailed(config(PlannerKind::SO2), in);
    ASSERT_TRUE(res.solution.proven());
    const double so2 = expected_cost(res.plan, f, s, g, rules);
    double best = 1e300;
    Plan p = Plan::zero(g);
    for (double da : lat)
      for (double c : lat)
        for (double u : lat)
          for (double d : lat)
            for (const auto& ru : f.scenarios)
              for (const auto& rd : f.scenarios) {
                p.da_purchase[0] = da;
                p.consumption[0] = c;
                p.up_reserve[0] = u;
                p.down_reserve[0] = d;
                p.up_bid[0] = ru.up_price[0];
                p.down_bid[0] = rd.down_price[0];
                if (!p.violations(s, g).empty()) continue;
                best = std::min(best, expected_cost(p, f, s, g, rules));
              }
    EXPECT_LE(so2, best + 1e-9) << "seed " << seed;
  }
}

TEST(Milp, ScenarioOrderDoesNotMatter) {
  Instance I = small_instance(21, 8, 5);
  for (auto k : {PlannerKind::DT, PlannerKind::SO1, PlannerKind::SO2}) {
    PlanningInput in{I.session, I.grid, I.rules, I.da, I.forecasts, I.state, 1};
    const auto a = plan_milp_detailed(config(k), in);
    ScenarioSet rev = I.forecasts;
    std::reverse(rev.scenarios.begin(), rev.scenarios.end());
    PlanningInput in2{I.session, I.grid, I.rules, I.da, rev, I.state, 1};
    const auto b = plan_milp_detailed(config(k), in2);
    EXPECT_NEAR(a.solution.objective, b.solution.objective, 1e-7) << to_string(k);
  }
}

TEST(Planners, HonourCommitments) {
  for (auto k : kAll) {
    Instance I = small_instance(31, 16, 3);
    I.session.departure_ptu = 15;
    Plan first = run(config(k), I, 1);
    I.state.freeze_da(first);
    I.state.freeze_reserves(first, 1 + 7 + 1);
    I.state.consumption[1] = first.consumption[1];
    I.state.soc += 0.9 * 0.25 * first.consumption[1];
    const Plan p = run(config(k), I, 2);
    EXPECT_EQ(p.da_purchase, first.da_purchase) << to_string(k);
    EXPECT_EQ(p.consumption[1], first.consumption[1]) << to_string(k);
    for (std::size_t t = 0; t < 9; ++t) {
      EXPECT_EQ(p.up_reserve[t], first.up_reserve[t]) << to_string(k) << " t=" << t;
      EXPECT_EQ(p.down_reserve[t], first.down_reserve[t]) << to_string(k) << " t=" << t;
      EXPECT_EQ(p.up_bid[t], first.up_bid[t]) << to_string(k) << " t=" << t;
      EXPECT_EQ(p.down_bid[t], first.down_bid[t]) << to_string(k) << " t=" << t;
    }
    EXPECT_TRUE(p.violations(I.session, I.grid).empty()) << to_string(k);
  }
}

TEST(Planners, PlansAreWellFormed) {
  for (std::uint64_t seed = 40; seed < 46; ++seed) {
    Instance I = small_instance(seed, 12, 3);
    std::mt19937_64 rng(seed);
    I.session.initial_soc = std::uniform_real_distribution<double>(0.0, 5.0)(rng);
    I.state = CommitmentState::initial(I.session, I.grid);
    for (auto k : kAll) {
      const Plan p = run(config(k), I, 1);
      const auto bad = p.violations(I.session, I.grid, 1e-7);
      EXPECT_TRUE(bad.empty()) << to_string(k) << ": " << (bad.empty() ? "" : bad.front());
      EXPECT_FALSE(p.flagged) << to_string(k);
      for (std::size_t t = 0; t < p.up_bid.size(); ++t) {
        if (p.up_reserve[t] == 0.0) EXPECT_FALSE(p.up_bid[t].has_value());
        if (p.down_reserve[t] == 0.0) EXPECT_FALSE(p.down_bid[t].has_value());
      }
    }
  }
}

TEST(Planners, RejectBadConfig) {
  PlannerConfig c = config(PlannerKind::QO);
  c.alpha = 0.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_THROW(parse_planner_kind("XX"), std::invalid_argument);
  EXPECT_EQ(parse_planner_kind("SO2"), PlannerKind::SO2);
}
