#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flexbench/errors.hpp"
#include "flexbench/evaluator/batch.hpp"

namespace flexbench {

struct CaseSpec {
  int windows = 95;                 // historic session windows
  int realizations_per_window = 10;
  int start_hour = 19;              // local hour the grid starts
  int horizon_ptus = 48;
  EvSession session;
  std::uint64_t seed = 0;
};

/// Evenly spread windows over the history, each with its own realizations
/// drawn from the models conditioned on the week before the window. DA
/// prices come from the history itself.
inline std::vector<EvalCase> make_cases(const MarketHistory& h, const ScenarioModels& models, const CaseSpec& spec) {
  if (spec.windows <= 0 || spec.realizations_per_window <= 0) throw ConfigError("need at least one window and realization");
  if (h.ptu_minutes != models.ptu_minutes) throw ConfigError("history and models use different PTU lengths");
  std::vector<std::size_t> starts;
  for (std::size_t k = detail::kConditioningRows; k + static_cast<std::size_t>(spec.horizon_ptus) <= h.size(); ++k) {
    const auto since_midnight = h.time[k] - std::chrono::floor<std::chrono::days>(h.time[k]);
    if (since_midnight == std::chrono::hours{spec.start_hour}) starts.push_back(k);
  }
  if (starts.size() < static_cast<std::size_t>(spec.windows))
    throw ConfigError("history holds " + std::to_string(starts.size()) + " usable windows, " +
                      std::to_string(spec.windows) + " requested");
  std::vector<EvalCase> out;
  for (int w = 0; w < spec.windows; ++w) {
    const std::size_t k = starts[static_cast<std::size_t>(w) * starts.size() / static_cast<std::size_t>(spec.windows)];
    const TimeGrid grid(h.ptu_minutes, spec.horizon_ptus, h.time[k]);
    std::vector<double> da(static_cast<std::size_t>(grid.hours()));
    for (int hr = 0; hr < grid.hours(); ++hr)
      da[static_cast<std::size_t>(hr)] = h.da_price[k + static_cast<std::size_t>(hr * grid.ptus_per_hour())];
    MarketHistory cond = h.slice(k - detail::kConditioningRows, k);
    for (int r = 0; r < spec.realizations_per_window; ++r) {
      EvalCase c;
      c.id = format_iso8601(h.time[k]).substr(0, 10) + "/" + std::to_string(r);
      c.session = spec.session;
      c.grid = grid;
      c.real = generate_realization(models, cond, da, grid,
                                    derive_seed(spec.seed, static_cast<std::uint64_t>(w), static_cast<std::uint64_t>(r)));
      c.history = cond;
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace flexbench
