// Acceptance checks, one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "flexbench/flexbench.hpp"

using namespace flexbench;
using namespace flexbench::mathprog;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------- 1. Box-Cox round trip

Outcome boxcox_round_trip() {
  const auto t0 = Clock::now();
  Rng rng(2024);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const BoxCoxTransform tf{kBoxCoxLambdaGrid[static_cast<std::size_t>(k % 5)], 10.0 * rng.uniform()};
    const double x = std::exp(10.0 * rng.uniform() - 5.0) - tf.shift;  // admissible: x + shift > 0
    const double back = boxcox_inverse(boxcox_forward(x, tf), tf);
    worst = std::max(worst, std::abs(back - x) / std::max(std::abs(x), 1.0));
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-9 && secs < 1.0, fmt("max relative error %.3g over 10^4 points, %.3f s", worst, secs)};
}

// ---------- 2. Model recovery

Outcome model_recovery() {
  double worst_phi = 0.0, worst_p = 0.0, t_ar = 0.0, t_mk = 0.0;
  for (std::uint64_t seed : {1, 2, 3}) {
    auto t0 = Clock::now();
    Rng rng(seed);
    const std::size_t n = 10000;
    std::vector<double> x(n);
    std::vector<int> hours(n);
    double z = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      hours[t] = static_cast<int>((t / 4) % 24);
      z = 0.8 * z + rng.normal();
      x[t] = 50.0 + z + 3.0 * std::sin(hours[t] / 24.0 * 2 * std::numbers::pi);
    }
    const auto m = fit_armax(x, hours, 1, 0);
    worst_phi = std::max(worst_phi, std::abs(m.ar[0] - 0.8));
    t_ar = std::max(t_ar, seconds_since(t0));

    t0 = Clock::now();
    const std::vector<double> truth{0.7, 0.2, 0.1, 0.3, 0.5, 0.2, 0.25, 0.25, 0.5};
    const auto model = MarkovDeploymentModel::uniform_contexts(3, truth);
    std::vector<int> ctx(100000, 0);
    const auto path = simulate_markov(model, 0, ctx, rng);
    const auto fit = fit_markov(path, ctx, 3, {0});
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        worst_p = std::max(worst_p, std::abs(fit.prob(0, i, j) - truth[static_cast<std::size_t>(i * 3 + j)]));
    t_mk = std::max(t_mk, seconds_since(t0));
  }
  return {worst_phi <= 0.05 && worst_p <= 0.02 && t_ar < 30 && t_mk < 30,
          fmt("AR(1) |phi-0.8| <= %.4f, Markov max entry error %.4f (3 seeds), fit times %.2f s / %.2f s", worst_phi,
              worst_p, t_ar, t_mk)};
}

// ---------- 3. Solver oracle

// Continuous remainder solved by vertex enumeration with Eigen: every choice
// of n tight constraints among rows and bounds, kept when feasible.
double vertex_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const std::vector<int>& sense,
                 const Eigen::VectorXd& c, double ub) {
  const int n = static_cast<int>(c.size()), m = static_cast<int>(a.rows());
  // tight-candidate rows: A rows, x_j = 0, x_j = ub
  Eigen::MatrixXd g(m + 2 * n, n);
  Eigen::VectorXd h(m + 2 * n);
  g.topRows(m) = a;
  h.head(m) = b;
  for (int j = 0; j < n; ++j) {
    g.row(m + j).setZero();
    g(m + j, j) = 1.0;
    h(m + j) = 0.0;
    g.row(m + n + j).setZero();
    g(m + n + j, j) = 1.0;
    h(m + n + j) = ub;
  }
  const int rows = m + 2 * n;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(n));
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Eigen::MatrixXd s(n, n);
      Eigen::VectorXd r(n);
      for (int k = 0; k < n; ++k) s.row(k) = g.row(pick[static_cast<std::size_t>(k)]), r(k) = h(pick[static_cast<std::size_t>(k)]);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(s);
      if (lu.rank() < n) return;
      const Eigen::VectorXd x = lu.solve(r);
      for (int j = 0; j < n; ++j)
        if (x(j) < -1e-9 || x(j) > ub + 1e-9) return;
      const Eigen::VectorXd ax = a * x;
      for (int i = 0; i < m; ++i)
        if ((sense[static_cast<std::size_t>(i)] < 0 && ax(i) > b(i) + 1e-9) ||
            (sense[static_cast<std::size_t>(i)] > 0 && ax(i) < b(i) - 1e-9))
          return;
      best = std::min(best, c.dot(x));
      return;
    }
    for (int k = start; k < rows; ++k) {
      pick[static_cast<std::size_t>(depth)] = k;
      rec(k + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

Outcome solver_oracle() {
  const auto t0 = Clock::now();
  Rng rng(77);
  int feasible = 0, bad = 0, unchecked = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const int nbin = 1 + rep % 12, ncont = 3, nrows = 5;
    LinearProgram lp;
    for (int j = 0; j < nbin; ++j) lp.add_binary("b" + std::to_string(j), std::round(10 * rng.normal()));
    for (int j = 0; j < ncont; ++j) lp.add_continuous("x" + std::to_string(j), 0, 5, std::round(10 * rng.normal()));
    Eigen::MatrixXd ab(nrows, nbin), ac(nrows, ncont);
    ab.setZero();
    ac.setZero();
    Eigen::VectorXd rhs(nrows);
    std::vector<int> sense;
    for (int i = 0; i < nrows; ++i) {
      std::vector<Term> t;
      for (int j = 0; j < nbin + ncont; ++j)
        if (rng.uniform() < 0.6) {
          const double v = std::round(8 * rng.normal());
          t.push_back({j, v});
          (j < nbin ? ab(i, j) : ac(i, j - nbin)) = v;
        }
      const bool le = rng.uniform() < 0.8;
      rhs(i) = le ? 4 + 6 * rng.uniform() : -3 * rng.uniform();
      sense.push_back(le ? -1 : 1);
      lp.add_constraint("r" + std::to_string(i), t, le ? Comparator::LessEqual : Comparator::GreaterEqual, rhs(i));
    }
    Eigen::VectorXd cb(nbin), cc(ncont);
    for (int j = 0; j < nbin; ++j) cb(j) = lp.variable(j).objective;
    for (int j = 0; j < ncont; ++j) cc(j) = lp.variable(nbin + j).objective;
    double truth = std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < (1u << nbin); ++mask) {
      Eigen::VectorXd y(nbin);
      for (int j = 0; j < nbin; ++j) y(j) = (mask >> j) & 1u;
      const double v = vertex_lp(ac, rhs - ab * y, sense, cc, 5.0);
      truth = std::min(truth, cb.dot(y) + v);
    }
    const auto sol = solve(lp, {.gap = 0.01});
    if (std::isinf(truth)) {
      if (sol.status != SolveStatus::Infeasible) ++bad;
      continue;
    }
    ++feasible;
    if (!sol.proven() || sol.values.empty()) {
      ++bad;
      continue;
    }
    if (!check_assignment(lp, sol.values, 1e-6).empty()) ++unchecked;
    const double rel = std::abs(sol.objective - truth) / std::max(std::abs(truth), 1e-9);
    worst = std::max(worst, std::abs(sol.objective - truth) < 1e-6 ? 0.0 : rel);
    if (sol.objective > truth + 0.01 * std::abs(truth) + 1e-6 || sol.objective < truth - 1e-6) ++bad;
  }
  const double secs = seconds_since(t0);
  return {bad == 0 && unchecked == 0 && secs < 60,
          fmt("50 MIPs (%d feasible, 1..12 binaries): %d objective mismatches, worst relative gap %.2g, %d "
              "assignments failing the checker, %.1f s",
              feasible, bad, worst, unchecked, secs)};
}

// ---------- 4. Planner brute-force oracle

struct TinyInstance {
  TimeGrid grid{60, 2};
  EvSession session{0, 2, 3.0, 0.0, 2.0, 2.0, 1.0};
  MarketRules rules;
  std::vector<MarketRealization> scen;
};

TinyInstance tiny_instance() {
  TinyInstance I;
  I.rules.mip_gap = 1e-6;
  auto a = MarketRealization::constant(I.grid, 0, 0, 0, 0, 0, 0);
  a.da_price = {40, 30};
  auto b = a;
  a.imbalance_price = {45, 25};
  a.up_price = {70, 60};
  a.down_price = {20, 5};
  a.up_usage = {1, 0};
  a.down_usage = {0, 1};
  b.imbalance_price = {35, 50};
  b.up_price = {55, 90};
  b.down_price = {30, 15};
  b.up_usage = {1, 1};
  b.down_usage = {1, 0};
  I.scen = {a, b};
  return I;
}

// Best expected cost over a 0.5 kW lattice of DA, consumption and reserves
// and, per PTU and direction, a bid at one of the scenario prices.
double enumerate_tiny(const TinyInstance& I, const ScenarioSet& f) {
  const std::vector<double> lat = {0, 0.5, 1, 1.5, 2};
  double best = 1e300;
  Plan p = Plan::zero(I.grid);
  for (int code = 0; code < 390625; ++code) {
    int c = code;
    for (std::size_t t = 0; t < 2; ++t)
      for (double* v : {&p.da_purchase[t], &p.consumption[t], &p.up_reserve[t], &p.down_reserve[t]}) {
        *v = lat[static_cast<std::size_t>(c % 5)];
        c /= 5;
      }
    if (!p.violations(I.session, I.grid).empty()) continue;
    const auto ns = f.size();
    for (std::size_t bid = 0; bid < ns * ns * ns * ns; ++bid) {
      std::size_t q = bid;
      for (std::size_t t = 0; t < 2; ++t) {
        p.up_bid[t] = f.scenarios[q % ns].up_price[t];
        q /= ns;
        p.down_bid[t] = f.scenarios[q % ns].down_price[t];
        q /= ns;
      }
      best = std::min(best, oracle::expected_reference(p, f, I.session, I.grid, I.rules));
    }
  }
  return best;
}

Outcome planner_oracle() {
  const auto t0 = Clock::now();
  const auto I = tiny_instance();
  const auto st = CommitmentState::initial(I.session, I.grid);
  std::ostringstream d;
  bool ok = true;
  auto check = [&](const char* name, PlannerKind kind, const ScenarioSet& f) {
    const PlanningInput in{I.session, I.grid, I.rules, I.scen[0].da_price, f, st, 0};
    const auto r = plan_milp_detailed(PlannerConfig::defaults(kind), in);
    const double realized = oracle::expected_reference(r.plan, f, I.session, I.grid, I.rules);
    const double brute = enumerate_tiny(I, f);
    const double tol = 0.01 * std::abs(brute) + 1e-9;
    ok = ok && r.solution.proven() && std::abs(r.solution.objective - brute) <= tol &&
         std::abs(realized - r.solution.objective) <= 1e-9;
    d << name << " " << fmt("%.6f", r.solution.objective) << " vs enumeration " << fmt("%.6f", brute) << "; ";
  };
  check("SO2", PlannerKind::SO2, ScenarioSet::uniform(I.scen));
  check("PI(a)", PlannerKind::PI, ScenarioSet::uniform({I.scen[0]}));
  check("PI(b)", PlannerKind::PI, ScenarioSet::uniform({I.scen[1]}));
  const double secs = seconds_since(t0);
  d << fmt("%.2f s", secs);
  return {ok && secs < 10, d.str()};
}

// ---------- batches shared by 5-9

struct BatchData {
  std::vector<EvalCase> cases;
  ScenarioModels models;
  MarketRules rules;
  ForecastConfig forecast;
  std::uint64_t seed = 20240601;
  // planner/mode/q -> results per case
  std::map<std::string, std::vector<SimulationResult>> runs;
  double seconds = 0.0;

  std::vector<double> totals(const std::string& key) const {
    std::vector<double> v;
    for (const auto& r : runs.at(key)) v.push_back(r.total_cost());
    return v;
  }

  void run(const std::vector<PlannerKind>& kinds, bool online, int q) {
    std::vector<RunSpec> specs;
    for (std::size_t c = 0; c < cases.size(); ++c)
      for (auto k : kinds) {
        RunSpec s;
        s.case_index = c;
        s.planner = PlannerConfig::defaults(k);
        s.forecast = forecast;
        s.forecast.quality_q = q;
        s.forecast.rng_seed = derive_seed(seed, c);
        s.online = online;
        specs.push_back(s);
      }
    const auto t0 = Clock::now();
    const auto recs = run_batch(cases, specs, models, rules, 1);
    seconds += seconds_since(t0);
    for (const auto& r : recs)
      runs[key(r.spec.planner.kind, online, q)].push_back(r.result);
  }

  static std::string key(PlannerKind k, bool online, int q) {
    return std::string(to_string(k)) + (online ? "/online/q" : "/offline/q") + std::to_string(q);
  }
};

BatchData& batch() {
  static BatchData b = [] {
    BatchData d;
    const auto h = synth_history(SynthProfile{});
    d.models = fit_scenario_models(h);
    CaseSpec cs;
    cs.windows = 20;
    cs.realizations_per_window = 10;
    cs.seed = derive_seed(d.seed, 0x5eed);
    d.cases = make_cases(h, d.models, cs);
    return d;
  }();
  return b;
}

const std::vector<PlannerKind> kAll = {PlannerKind::DI, PlannerKind::OP, PlannerKind::MR, PlannerKind::QO,
                                       PlannerKind::DT, PlannerKind::SO1, PlannerKind::SO2, PlannerKind::PI};

std::string failures(const BatchData& b) {
  int n = 0;
  std::string first;
  for (const auto& [k, v] : b.runs)
    for (const auto& r : v)
      if (r.failed) {
        if (!n++) first = k + ": " + r.error;
      }
  return n ? fmt("%d failed runs (first: %s)", n, first.c_str()) : "";
}

// ---------- 5. PI dominance

Outcome pi_dominance() {
  auto& b = batch();
  if (!b.runs.count(BatchData::key(PlannerKind::PI, true, 1))) b.run(kAll, true, 1);
  if (const auto f = failures(b); !f.empty()) return {false, f};
  const auto& pi = b.runs.at(BatchData::key(PlannerKind::PI, true, 1));
  int violations = 0, checked = 0;
  double closest = 1e300;
  for (auto k : kAll) {
    if (k == PlannerKind::PI) continue;
    const auto& v = b.runs.at(BatchData::key(k, true, 1));
    for (std::size_t c = 0; c < v.size(); ++c) {
      const double p = pi[c].total_cost();
      const double slack = v[c].total_cost() - (p - (0.01 * std::abs(p) + 1e-6));
      closest = std::min(closest, slack);
      ++checked;
      if (slack < 0) ++violations;
    }
  }
  return {violations == 0, fmt("%zu cases x 7 planners (%d comparisons): %d violations, smallest margin %.3g EUR",
                               b.cases.size(), checked, violations, closest)};
}

// ---------- 6. zero-risk planners

Outcome zero_risk() {
  auto& b = batch();
  std::ostringstream d;
  bool ok = true;
  for (auto k : {PlannerKind::DI, PlannerKind::OP, PlannerKind::MR}) {
    int bad = 0;
    double worst = 0.0;
    for (const auto& r : b.runs.at(BatchData::key(k, true, 1))) {
      if (r.failed || r.unmet_energy != 0.0 || r.overflow_energy != 0.0) ++bad;
      worst = std::max({worst, r.unmet_energy, r.overflow_energy});
    }
    ok = ok && bad == 0;
    d << to_string(k) << ": " << bad << " runs with unmet or overflow (max " << worst << " kWh); ";
  }
  d << b.cases.size() << " runs each";
  return {ok, d.str()};
}

// ---------- 7. cost ordering

Outcome cost_ordering() {
  auto& b = batch();
  std::ostringstream d;
  bool ok = true;
  auto mean = [&](PlannerKind k) { return mean_of(b.totals(BatchData::key(k, true, 1))); };
  for (auto k : kAll) d << to_string(k) << fmt(" %.4f", mean(k)) << ", ";
  auto less = [&](PlannerKind lo, PlannerKind hi) {
    const auto t = welch_t_test(b.totals(BatchData::key(lo, true, 1)), b.totals(BatchData::key(hi, true, 1)));
    const bool pass = t.t < 0 && t.p_two_sided < 0.05;
    ok = ok && pass;
    d << to_string(lo) << "<" << to_string(hi) << fmt(" p=%.3g%s; ", t.p_two_sided, pass ? "" : " (not met)");
  };
  d << "mean EUR; ";
  less(PlannerKind::SO2, PlannerKind::DT);
  less(PlannerKind::SO2, PlannerKind::OP);
  less(PlannerKind::OP, PlannerKind::DI);
  d << fmt("batch time %.0f s", b.seconds);
  return {ok && b.seconds <= 1800, d.str()};
}

// ---------- 8. information quality

Outcome information_quality() {
  auto& b = batch();
  const double before = b.seconds;
  b.run({PlannerKind::MR, PlannerKind::QO, PlannerKind::SO2}, true, 2);
  if (const auto f = failures(b); !f.empty()) return {false, f};
  std::ostringstream d;
  bool ok = true;
  for (auto k : {PlannerKind::SO2, PlannerKind::QO}) {
    const auto q1 = b.totals(BatchData::key(k, true, 1)), q2 = b.totals(BatchData::key(k, true, 2));
    const auto t = paired_t_test(q2, q1);  // H1: q2 < q1
    const bool pass = mean_of(q2) < mean_of(q1) && t.p_less < 0.05;
    ok = ok && pass;
    d << to_string(k) << fmt(" q1 %.4f -> q2 %.4f (one-sided paired p=%.3g%s); ", mean_of(q1), mean_of(q2), t.p_less,
                             pass ? "" : ", not met");
  }
  const auto& m1 = b.runs.at(BatchData::key(PlannerKind::MR, true, 1));
  const auto& m2 = b.runs.at(BatchData::key(PlannerKind::MR, true, 2));
  int differ = 0;
  for (std::size_t c = 0; c < m1.size(); ++c) {
    const bool same = m1[c].operation_cost == m2[c].operation_cost && m1[c].penalty == m2[c].penalty &&
                      m1[c].trajectory.soc == m2[c].trajectory.soc && m1[c].ledger.size() == m2[c].ledger.size() &&
                      std::equal(m1[c].ledger.begin(), m1[c].ledger.end(), m2[c].ledger.begin(),
                                 [](const LedgerRow& x, const LedgerRow& y) {
                                   return x.consumption == y.consumption && x.up_reserve == y.up_reserve &&
                                          x.down_reserve == y.down_reserve && x.total() == y.total();
                                 });
    differ += !same;
  }
  ok = ok && differ == 0;
  d << "MR differs across q in " << differ << " of " << m1.size() << fmt(" runs; %.0f s", b.seconds - before);
  return {ok, d.str()};
}

// ---------- 9. online vs offline

Outcome online_offline() {
  auto& b = batch();
  const double before = b.seconds;
  b.run({PlannerKind::SO2}, false, 1);
  if (const auto f = failures(b); !f.empty()) return {false, f};
  const auto on = b.totals(BatchData::key(PlannerKind::SO2, true, 1));
  const auto off = b.totals(BatchData::key(PlannerKind::SO2, false, 1));
  const auto t = paired_t_test(on, off);
  const bool pass = mean_of(on) <= mean_of(off) && t.p_less < 0.05;
  return {pass, fmt("SO2 online %.4f vs offline %.4f EUR, one-sided paired p=%.3g over %zu runs; %.0f s", mean_of(on),
                    mean_of(off), t.p_less, on.size(), b.seconds - before)};
}

// ---------- 10. determinism

Outcome determinism() {
  const auto t0 = Clock::now();
  std::istringstream text(R"([planners]
list = DI, MR, DT, SO2, PI
[forecast]
n_forecasts = 10
quality_q = 1, 2
[batch]
modes = online, offline
windows = 2
realizations_per_window = 2
seed = 99
)");
  const auto cfg = parse_config(text);
  auto csv = [&](int jobs) {
    const auto out = run_experiment(cfg, jobs);
    std::ostringstream s;
    write_results_csv(out.rows, s);
    return s.str();
  };
  auto lines = [](const std::string& s) {
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto a = csv(1), b = csv(1), c = csv(3);
  const bool same = a == b, same_rows = lines(a) == lines(c);
  return {same && same_rows, fmt("repeat run %s, --jobs 3 rows %s (%zu bytes); %.1f s", same ? "byte-identical" : "DIFFERS",
                                 same_rows ? "identical" : "DIFFER", a.size(), seconds_since(t0))};
}

// ---------- 11. SO2 runtime on the default instance

Outcome so2_runtime() {
  auto& b = batch();
  std::ostringstream d;
  bool ok = true;
  double worst = 0.0;
  for (std::size_t c : {std::size_t{0}, b.cases.size() / 2, b.cases.size() - 1}) {
    const auto& ec = b.cases[c];
    ForecastConfig fc;
    fc.rng_seed = derive_seed(b.seed, c);
    const auto f = generate_forecasts(ec.real, ec.history, ec.session.arrival_ptu, fc, b.models, ec.grid);
    const auto st = CommitmentState::initial(ec.session, ec.grid);
    const PlanningInput in{ec.session, ec.grid, b.rules, ec.real.da_price, f, st, ec.session.arrival_ptu};
    const auto cfg = PlannerConfig::defaults(PlannerKind::SO2);
    const auto t0 = Clock::now();
    const auto r = plan_milp_detailed(cfg, in);
    const double secs = seconds_since(t0);
    worst = std::max(worst, secs);
    const bool pass = secs < 300.0 && !r.plan.flagged && r.solution.proven();
    ok = ok && pass;
    const auto prog = milp_program(cfg, in);
    int bins = 0;
    for (int j = 0; j < prog.lp.num_variables(); ++j) bins += prog.lp.variable(j).type == VarType::Binary;
    d << fmt("case %zu: %.1f s %s, %d binaries / %d variables; ", c, secs, to_string(r.solution.status), bins,
             prog.lp.num_variables());
  }
  d << fmt("48 PTUs, 20 of 25 scenarios, worst %.1f s", worst);
  if (const auto it = b.runs.find(BatchData::key(PlannerKind::SO2, true, 1)); it != b.runs.end()) {
    double slowest = 0.0;
    for (const auto& r : it->second) slowest = std::max(slowest, r.max_call_seconds);
    ok = ok && slowest < 300.0;
    d << fmt("; slowest of all %zu x 48 online calls %.1f s", it->second.size(), slowest);
  }
  return {ok, d.str()};
}

}  // namespace

// Optional arguments select criteria by number; default is all of them.
int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"Box-Cox round trip", boxcox_round_trip},
      {"model recovery", model_recovery},
      {"solver oracle", solver_oracle},
      {"planner brute-force oracle", planner_oracle},
      {"PI dominance", pi_dominance},
      {"zero-risk planners", zero_risk},
      {"cost ordering", cost_ordering},
      {"information quality", information_quality},
      {"online vs offline", online_offline},
      {"determinism", determinism},
      {"SO2 runtime", so2_runtime},
  };
  int failed = 0;
  std::vector<bool> want(criteria.size(), argc <= 1);
  for (int a = 1; a < argc; ++a) {
    const auto n = static_cast<std::size_t>(std::atoi(argv[a]));
    if (n >= 1 && n <= criteria.size()) want[n - 1] = true;
  }
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!want[i]) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed;
}
