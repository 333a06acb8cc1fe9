#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "flexbench/evaluator/simulator.hpp"

namespace flexbench {

/// One evaluation case: a session on a grid, its real market, and the history
/// that conditions forecasts (ending right before the grid starts).
struct EvalCase {
  std::string id;
  EvSession session;
  TimeGrid grid;
  MarketRealization real;
  MarketHistory history;
};

struct RunSpec {
  std::size_t case_index = 0;
  PlannerConfig planner;
  ForecastConfig forecast;  // rng_seed is the run seed
  bool online = true;
};

struct RunRecord {
  RunSpec spec;
  std::string case_id;
  SimulationResult result;
};

inline SimulationResult run_one(const EvalCase& c, const RunSpec& spec, const ScenarioModels& models,
                                const MarketRules& rules) {
  ForecastSource src{models, c.history, spec.forecast};
  return spec.online ? simulate_online(spec.planner, c.session, rules, c.grid, c.real, src)
                     : simulate_offline(spec.planner, c.session, rules, c.grid, c.real, src);
}

/// Runs every spec; output order follows `specs` whatever `jobs` is. A run that
/// throws is returned as a failed result instead of stopping the batch.
inline std::vector<RunRecord> run_batch(const std::vector<EvalCase>& cases, const std::vector<RunSpec>& specs,
                                        const ScenarioModels& models, const MarketRules& rules, int jobs = 1) {
  std::vector<RunRecord> out(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      auto& rec = out[i];
      rec.spec = specs[i];
      try {
        const auto& c = cases.at(specs[i].case_index);
        rec.case_id = c.id;
        rec.result = run_one(c, specs[i], models, rules);
      } catch (const std::exception& e) {
        rec.result.planner = specs[i].planner.name();
        rec.result.failed = true;
        rec.result.error = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(specs.size())));
  if (n == 1) {
    worker();
    return out;
  }
  std::vector<std::thread> pool;
  for (int k = 0; k < n; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace flexbench
