#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "flexbench/core/calendar.hpp"
#include "flexbench/errors.hpp"
#include "flexbench/rng.hpp"

namespace flexbench {

inline constexpr int kMarkovContexts = kSeasons * kTimeOfDayBuckets;

/// Context label of a PTU: season-major, then 4-hour time-of-day bucket.
inline int markov_context(Timestamp ts) {
  return static_cast<int>(season_of(ts)) * kTimeOfDayBuckets + time_of_day_bucket(ts);
}

inline std::string describe_context(int c) {
  static const char* names[] = {"winter", "spring", "summer", "autumn"};
  const int s = c / kTimeOfDayBuckets, b = c % kTimeOfDayBuckets;
  return std::string(names[s]) + " " + std::to_string(4 * b) + "-" + std::to_string(4 * b + 4) + "h";
}

/// Discretised deployment-fraction chain with one transition matrix per
/// calendar context. States are the midpoints of equal-width bins of [0,1].
struct MarkovDeploymentModel {
  int levels = 5;
  std::vector<std::vector<double>> transition;  // [context] row-major levels x levels; empty if absent

  double state_value(int i) const { return (i + 0.5) / levels; }
  int state_of(double u) const {
    return std::clamp(static_cast<int>(std::floor(u * levels)), 0, levels - 1);
  }
  bool has_context(int c) const {
    return c >= 0 && c < static_cast<int>(transition.size()) && !transition[static_cast<std::size_t>(c)].empty();
  }
  double prob(int c, int i, int j) const {
    return transition[static_cast<std::size_t>(c)][static_cast<std::size_t>(i * levels + j)];
  }

  /// Same matrix for every context.
  static MarkovDeploymentModel uniform_contexts(int levels, std::vector<double> matrix) {
    if (levels < 1 || matrix.size() != static_cast<std::size_t>(levels * levels))
      throw std::invalid_argument("transition matrix must be levels x levels");
    MarkovDeploymentModel m;
    m.levels = levels;
    m.transition.assign(kMarkovContexts, matrix);
    return m;
  }

  friend bool operator==(const MarkovDeploymentModel&, const MarkovDeploymentModel&) = default;
};

/// Counts transitions per context (labelled by the destination step), adds a
/// pseudo-count of one to every cell and normalises rows. Every context in
/// `required` must hold at least 100 x levels transitions.
inline MarkovDeploymentModel fit_markov(std::span<const double> usage, std::span<const int> contexts, int levels,
                                        const std::set<int>& required) {
  if (levels < 1) throw std::invalid_argument("levels must be >= 1");
  if (usage.size() != contexts.size()) throw std::invalid_argument("one context label per observation");
  MarkovDeploymentModel m;
  m.levels = levels;
  const auto cells = static_cast<std::size_t>(levels * levels);
  std::vector<std::vector<double>> counts(kMarkovContexts, std::vector<double>(cells, 0.0));
  std::vector<long> total(kMarkovContexts, 0);
  for (std::size_t t = 1; t < usage.size(); ++t) {
    const int c = contexts[t];
    if (c < 0 || c >= kMarkovContexts) throw std::invalid_argument("context label out of range");
    const int i = m.state_of(usage[t - 1]), j = m.state_of(usage[t]);
    counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(i * levels + j)] += 1.0;
    ++total[static_cast<std::size_t>(c)];
  }
  std::string missing, thin;
  for (int c : required) {
    if (total[static_cast<std::size_t>(c)] == 0) missing += (missing.empty() ? "" : ", ") + describe_context(c);
    else if (total[static_cast<std::size_t>(c)] < 100L * levels)
      thin += (thin.empty() ? "" : ", ") + describe_context(c);
  }
  if (!missing.empty()) throw FitError("no deployment data for contexts: " + missing);
  if (!thin.empty())
    throw FitError("fewer than " + std::to_string(100 * levels) + " transitions for contexts: " + thin);

  m.transition.assign(kMarkovContexts, {});
  for (int c = 0; c < kMarkovContexts; ++c) {
    if (total[static_cast<std::size_t>(c)] == 0 && !required.count(c)) continue;
    auto& row = counts[static_cast<std::size_t>(c)];
    for (int i = 0; i < levels; ++i) {
      double s = 0.0;
      for (int j = 0; j < levels; ++j) s += row[static_cast<std::size_t>(i * levels + j)] += 1.0;
      for (int j = 0; j < levels; ++j) row[static_cast<std::size_t>(i * levels + j)] /= s;
    }
    m.transition[static_cast<std::size_t>(c)] = std::move(row);
  }
  return m;
}

/// Calendar version: contexts come from the timestamps and every time-of-day
/// bucket of each season present in the data is required.
inline MarkovDeploymentModel fit_markov(std::span<const double> usage, std::span<const Timestamp> times, int levels) {
  std::vector<int> ctx(times.size());
  std::set<int> required;
  for (std::size_t t = 0; t < times.size(); ++t) {
    ctx[t] = markov_context(times[t]);
    const int season = ctx[t] / kTimeOfDayBuckets;
    for (int b = 0; b < kTimeOfDayBuckets; ++b) required.insert(season * kTimeOfDayBuckets + b);
  }
  return fit_markov(usage, ctx, levels, required);
}

/// Samples one step per context label; returns state values (bin midpoints).
inline std::vector<double> simulate_markov(const MarkovDeploymentModel& m, int start_state,
                                           std::span<const int> contexts, Rng& rng) {
  if (start_state < 0 || start_state >= m.levels) throw std::invalid_argument("invalid start state");
  std::vector<double> out;
  out.reserve(contexts.size());
  int s = start_state;
  for (int c : contexts) {
    if (!m.has_context(c)) throw Error("deployment model has no transitions for context " + describe_context(c));
    const double u = rng.uniform();
    double cum = 0.0;
    int next = m.levels - 1;
    for (int j = 0; j < m.levels; ++j) {
      cum += m.prob(c, s, j);
      if (u < cum) {
        next = j;
        break;
      }
    }
    s = next;
    out.push_back(m.state_value(s));
  }
  return out;
}

/// Calendar version: step k is the PTU starting at first + k * ptu.
inline std::vector<double> simulate_markov(const MarkovDeploymentModel& m, int start_state, Timestamp first,
                                           int ptu_minutes, int horizon, Rng& rng) {
  std::vector<int> ctx(static_cast<std::size_t>(horizon));
  for (int k = 0; k < horizon; ++k) ctx[static_cast<std::size_t>(k)] = markov_context(first + std::chrono::minutes{k * ptu_minutes});
  return simulate_markov(m, start_state, ctx, rng);
}

}  // namespace flexbench
