#pragma once

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "flexbench/io/results.hpp"

namespace flexbench {

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("mean of an empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Sample standard deviation (n - 1); NaN for fewer than two values.
inline double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

struct TTest {
  double t = 0.0;
  double df = 0.0;
  double p_two_sided = 1.0;
  double p_less = 0.5;  // H1: mean(a) < mean(b)
};

namespace detail {

inline TTest t_result(double diff, double se, double df) {
  TTest r;
  r.df = df;
  if (se == 0.0) {
    // no spread: the difference is either exactly zero or certain
    r.t = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    r.p_two_sided = diff == 0.0 ? 1.0 : 0.0;
    r.p_less = diff < 0.0 ? 0.0 : (diff == 0.0 ? 0.5 : 1.0);
    return r;
  }
  r.t = diff / se;
  const boost::math::students_t dist(df);
  r.p_two_sided = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
  r.p_less = boost::math::cdf(dist, r.t);
  return r;
}

}  // namespace detail

/// Welch's unequal-variance two-sample t-test.
inline TTest welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("Welch test needs two values per sample");
  const double va = std::pow(std_of(a), 2) / static_cast<double>(a.size());
  const double vb = std::pow(std_of(b), 2) / static_cast<double>(b.size());
  const double se = std::sqrt(va + vb);
  const double df = se == 0.0 ? static_cast<double>(a.size() + b.size() - 2)
                              : (va + vb) * (va + vb) /
                                    (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
  return detail::t_result(mean_of(a) - mean_of(b), se, df);
}

/// Paired t-test on a[i] - b[i].
inline TTest paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("paired test needs equal samples of size >= 2");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double se = std_of(d) / std::sqrt(static_cast<double>(d.size()));
  return detail::t_result(mean_of(d), se, static_cast<double>(d.size() - 1));
}

/// Left-continuous empirical inverse CDF: smallest x with F(x) >= p.
inline double quantile(std::vector<double> v, double p) {
  if (v.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level outside [0,1]");
  std::sort(v.begin(), v.end());
  if (p == 0.0) return v.front();
  const auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(v.size()) - 1e-12));
  return v[std::max<std::size_t>(k, 1) - 1];
}

struct MetricSummary {
  double mean = 0.0;
  double std = std::numeric_limits<double>::quiet_NaN();
};

struct PlannerSummary {
  std::string planner, mode;
  int quality_q = 1;
  int runs = 0;
  int failed = 0;
  bool single_run = false;  // no spread or p-values available
  MetricSummary total_cost, operation_cost, penalty, unmet_pct, overflow_pct, runtime;
  std::vector<double> totals;  // per successful run, in run order
};

struct PairwiseTest {
  std::string a, b;  // group labels
  TTest test;
};

struct Summary {
  std::vector<PlannerSummary> groups;
  std::vector<PairwiseTest> pairs;  // Welch on total cost, within each (mode, quality)
};

inline std::string group_label(const PlannerSummary& g) {
  return g.planner + "/" + g.mode + "/q" + std::to_string(g.quality_q);
}

inline Summary summarize(const std::vector<ResultRow>& rows) {
  std::map<std::tuple<std::string, std::string, int>, std::size_t> index;
  Summary s;
  std::vector<std::vector<const ResultRow*>> members;
  for (const auto& r : rows) {
    const auto key = std::make_tuple(r.planner, r.mode, r.quality_q);
    auto [it, fresh] = index.try_emplace(key, s.groups.size());
    if (fresh) {
      PlannerSummary g;
      g.planner = r.planner;
      g.mode = r.mode;
      g.quality_q = r.quality_q;
      s.groups.push_back(g);
      members.emplace_back();
    }
    members[it->second].push_back(&r);
  }
  for (std::size_t g = 0; g < s.groups.size(); ++g) {
    auto& G = s.groups[g];
    std::vector<double> tot, op, pen, un, ov, rt;
    for (const auto* r : members[g]) {
      ++G.runs;
      if (r->failed) {
        ++G.failed;
        continue;
      }
      tot.push_back(r->total_cost);
      op.push_back(r->operation_cost);
      pen.push_back(r->penalty);
      un.push_back(r->unmet_pct);
      ov.push_back(r->overflow_pct);
      rt.push_back(r->runtime);
    }
    if (tot.empty()) continue;
    auto m = [](const std::vector<double>& v) { return MetricSummary{mean_of(v), std_of(v)}; };
    G.total_cost = m(tot);
    G.operation_cost = m(op);
    G.penalty = m(pen);
    G.unmet_pct = m(un);
    G.overflow_pct = m(ov);
    G.runtime = m(rt);
    G.single_run = tot.size() < 2;
    G.totals = tot;
  }
  for (std::size_t i = 0; i < s.groups.size(); ++i)
    for (std::size_t j = i + 1; j < s.groups.size(); ++j) {
      const auto& A = s.groups[i];
      const auto& B = s.groups[j];
      if (A.mode != B.mode || A.quality_q != B.quality_q || A.totals.size() < 2 || B.totals.size() < 2) continue;
      s.pairs.push_back({group_label(A), group_label(B), welch_t_test(A.totals, B.totals)});
    }
  return s;
}

}  // namespace flexbench
