#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "flexbench/core/market.hpp"
#include "flexbench/core/market_history.hpp"
#include "flexbench/core/time_grid.hpp"
#include "flexbench/rng.hpp"
#include "flexbench/scenario/armax.hpp"
#include "flexbench/scenario/markov.hpp"

namespace flexbench {

/// Everything needed to sample market continuations. Channels are independent.
struct ScenarioModels {
  int ptu_minutes = 15;
  ArmaxModel up_price;
  ArmaxModel down_price;
  ArmaxModel imbalance_price;
  MarkovDeploymentModel up_usage;
  MarkovDeploymentModel down_usage;

  friend bool operator==(const ScenarioModels&, const ScenarioModels&) = default;
};

struct ForecastConfig {
  int n_forecasts = 25;
  int quality_q = 1;
  double error_decay = 0.95;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (n_forecasts < 1) throw std::invalid_argument("n_forecasts must be >= 1");
    if (quality_q < 1) throw std::invalid_argument("quality_q must be >= 1");
    if (!(error_decay > 0.0 && error_decay < 1.0)) throw std::invalid_argument("error_decay must lie in (0,1)");
  }
};

inline ScenarioModels fit_scenario_models(const MarketHistory& h, int p = 2, int q = 1, int levels = 5) {
  std::vector<int> hours(h.size());
  for (std::size_t t = 0; t < h.size(); ++t) hours[t] = hour_of_day(h.time[t]);
  ScenarioModels m;
  m.ptu_minutes = h.ptu_minutes;
  m.up_price = fit_armax(h.up_price, hours, p, q);
  m.down_price = fit_armax(h.down_price, hours, p, q);
  m.imbalance_price = fit_armax(h.imbalance_price, hours, p, q);
  m.up_usage = fit_markov(h.up_usage, h.time, levels);
  m.down_usage = fit_markov(h.down_usage, h.time, levels);
  return m;
}

namespace detail {

inline constexpr std::size_t kConditioningRows = 672;  // one week of 15-minute PTUs

/// Filtered model states at a given moment, shared by all candidates drawn there.
struct ContinuationState {
  ArmaxState up, down, imbalance;
  int up_state = 0, down_state = 0;
  std::vector<int> hours;     // hour of day for each PTU to simulate
  std::vector<int> contexts;  // Markov context for each PTU to simulate
};

/// Conditions on the tail of `history` followed by PTUs [0, t_now) of `real`
/// (when given), and prepares to simulate PTUs [t_now, horizon).
inline ContinuationState prepare(const ScenarioModels& m, const MarketHistory& history, const MarketRealization* real,
                                 int t_now, const TimeGrid& grid) {
  if (grid.ptu_minutes() != m.ptu_minutes || history.ptu_minutes != m.ptu_minutes)
    throw std::invalid_argument("models, history and grid must share the PTU length");
  if (history.size() == 0 || history.time.back() + std::chrono::minutes{grid.ptu_minutes()} != grid.session_start())
    throw std::invalid_argument("conditioning history must end right before the session start");
  const std::size_t from = history.size() > kConditioningRows ? history.size() - kConditioningRows : 0;
  ContinuationState s;
  auto series = [&](const std::vector<double>& hist, const std::vector<double>* prefix) {
    std::vector<double> v(hist.begin() + static_cast<std::ptrdiff_t>(from), hist.end());
    if (prefix) v.insert(v.end(), prefix->begin(), prefix->begin() + t_now);
    return v;
  };
  std::vector<int> hours;
  for (std::size_t k = from; k < history.size(); ++k) hours.push_back(hour_of_day(history.time[k]));
  for (int t = 0; t < (real ? t_now : 0); ++t) hours.push_back(hour_of_day(grid.time_of(t)));
  s.up = armax_state(m.up_price, series(history.up_price, real ? &real->up_price : nullptr), hours);
  s.down = armax_state(m.down_price, series(history.down_price, real ? &real->down_price : nullptr), hours);
  s.imbalance = armax_state(m.imbalance_price, series(history.imbalance_price, real ? &real->imbalance_price : nullptr), hours);
  const bool from_real = real && t_now > 0;
  s.up_state = m.up_usage.state_of(from_real ? real->up_usage[static_cast<std::size_t>(t_now - 1)] : history.up_usage.back());
  s.down_state = m.down_usage.state_of(from_real ? real->down_usage[static_cast<std::size_t>(t_now - 1)] : history.down_usage.back());
  for (int t = t_now; t < grid.horizon_ptus(); ++t) {
    s.hours.push_back(hour_of_day(grid.time_of(t)));
    s.contexts.push_back(markov_context(grid.time_of(t)));
  }
  return s;
}

/// Fills PTUs [t_now, horizon) of `out` from one seeded draw.
inline void draw(const ScenarioModels& m, const ContinuationState& s, int t_now, std::uint64_t seed,
                 MarketRealization& out) {
  Rng up_rng(derive_seed(seed, 1)), down_rng(derive_seed(seed, 2)), imb_rng(derive_seed(seed, 3)),
      up_use_rng(derive_seed(seed, 4)), down_use_rng(derive_seed(seed, 5));
  auto place = [&](std::vector<double>& dst, const std::vector<double>& src) {
    std::copy(src.begin(), src.end(), dst.begin() + t_now);
  };
  place(out.up_price, simulate_armax(m.up_price, s.up, s.hours, up_rng));
  place(out.down_price, simulate_armax(m.down_price, s.down, s.hours, down_rng));
  place(out.imbalance_price, simulate_armax(m.imbalance_price, s.imbalance, s.hours, imb_rng));
  place(out.up_usage, simulate_markov(m.up_usage, s.up_state, s.contexts, up_use_rng));
  place(out.down_usage, simulate_markov(m.down_usage, s.down_state, s.contexts, down_use_rng));
}

}  // namespace detail

/// One evaluation realization over the grid, conditioned on the history that
/// ends right before the session. DA prices are taken as given.
inline MarketRealization generate_realization(const ScenarioModels& m, const MarketHistory& history,
                                              const std::vector<double>& da_prices, const TimeGrid& grid,
                                              std::uint64_t seed) {
  if (da_prices.size() != static_cast<std::size_t>(grid.hours()))
    throw std::invalid_argument("one DA price per grid hour");
  auto state = detail::prepare(m, history, nullptr, 0, grid);
  MarketRealization r = MarketRealization::constant(grid, 0, 0, 0, 0, 0, 0);
  r.da_price = da_prices;
  detail::draw(m, state, 0, seed, r);
  return r;
}

/// Weighted absolute difference over PTUs t >= t_now, discounted by
/// decay^(t - t_now); price channels are divided by their historic std.
inline double scenario_error(const MarketRealization& candidate, const MarketRealization& real, int t_now, double decay,
                             const double (&price_scales)[3]) {
  if (candidate.up_price.size() != real.up_price.size()) throw std::invalid_argument("realizations differ in length");
  double err = 0.0, w = 1.0;
  for (std::size_t t = static_cast<std::size_t>(t_now); t < real.up_price.size(); ++t, w *= decay) {
    const double d = std::abs(candidate.up_price[t] - real.up_price[t]) / price_scales[0] +
                     std::abs(candidate.down_price[t] - real.down_price[t]) / price_scales[1] +
                     std::abs(candidate.imbalance_price[t] - real.imbalance_price[t]) / price_scales[2] +
                     std::abs(candidate.up_usage[t] - real.up_usage[t]) +
                     std::abs(candidate.down_usage[t] - real.down_usage[t]);
    err += w * d;
  }
  return err;
}

inline double scenario_error(const MarketRealization& candidate, const MarketRealization& real, int t_now, double decay,
                             const ScenarioModels& m) {
  const double scales[3] = {m.up_price.scale, m.down_price.scale, m.imbalance_price.scale};
  return scenario_error(candidate, real, t_now, decay, scales);
}

/// Keeps the `n` candidates with the smallest error, best first (stable on ties).
inline ScenarioSet select_best(std::vector<MarketRealization> candidates, const std::vector<double>& errors,
                               std::size_t n) {
  if (errors.size() != candidates.size() || n == 0 || n > candidates.size())
    throw std::invalid_argument("invalid candidate selection");
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return errors[a] < errors[b]; });
  std::vector<MarketRealization> kept;
  kept.reserve(n);
  for (std::size_t k = 0; k < n; ++k) kept.push_back(std::move(candidates[order[k]]));
  return ScenarioSet::uniform(std::move(kept));
}

/// Forecast bundle at t_now. Candidate i is drawn from sub-seed (seed, t_now, i)
/// so a larger quality factor only adds candidates to the pool.
inline ScenarioSet generate_forecasts(const MarketRealization& real, const MarketHistory& history, int t_now,
                                      const ForecastConfig& cfg, const ScenarioModels& m, const TimeGrid& grid) {
  cfg.validate();
  if (t_now < 0 || t_now >= grid.horizon_ptus()) throw std::out_of_range("t_now outside horizon");
  auto state = detail::prepare(m, history, &real, t_now, grid);
  const auto pool = static_cast<std::size_t>(cfg.n_forecasts) * static_cast<std::size_t>(cfg.quality_q);
  std::vector<MarketRealization> candidates;
  candidates.reserve(pool);
  for (std::size_t i = 0; i < pool; ++i) {
    MarketRealization c = real;  // prefix and DA prices are known
    detail::draw(m, state, t_now, derive_seed(cfg.rng_seed, static_cast<std::uint64_t>(t_now), i), c);
    candidates.push_back(std::move(c));
  }
  if (cfg.quality_q == 1) return ScenarioSet::uniform(std::move(candidates));
  std::vector<double> errors;
  errors.reserve(pool);
  for (const auto& c : candidates) errors.push_back(scenario_error(c, real, t_now, cfg.error_decay, m));
  return select_best(std::move(candidates), errors, static_cast<std::size_t>(cfg.n_forecasts));
}

}  // namespace flexbench
