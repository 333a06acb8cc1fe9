#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "flexbench/io/config.hpp"
#include "flexbench/io/history_csv.hpp"
#include "flexbench/io/results.hpp"
#include "flexbench/scenario/model_io.hpp"

namespace flexbench {

inline MarketHistory experiment_history(const ExperimentConfig& cfg) {
  if (cfg.history_path.empty()) {
    SynthProfile p = cfg.synth;
    p.ptu_minutes = cfg.ptu_minutes;
    return synth_history(p);
  }
  auto h = read_history_csv(cfg.history_path);
  if (h.ptu_minutes != cfg.ptu_minutes)
    throw ConfigError("history PTU length " + std::to_string(h.ptu_minutes) + " differs from grid.ptu_minutes");
  return h;
}

inline ScenarioModels experiment_models(const ExperimentConfig& cfg, const MarketHistory& h) {
  if (cfg.models_path.empty()) return fit_scenario_models(h, cfg.ar_order, cfg.ma_order, cfg.levels);
  std::ifstream in(cfg.models_path);
  if (!in) throw DataError("cannot open model file " + cfg.models_path);
  return read_models(in);
}

/// Runs ordered by mode, quality, case, planner. The forecast seed depends on
/// the case only, so planners, qualities and modes see paired draws.
inline std::vector<RunSpec> experiment_specs(const ExperimentConfig& cfg, std::size_t n_cases,
                                             const std::string& solver_cmd = "") {
  std::vector<RunSpec> specs;
  for (bool online : cfg.modes)
    for (int q : cfg.qualities)
      for (std::size_t c = 0; c < n_cases; ++c)
        for (const auto& p : cfg.planners) {
          RunSpec s;
          s.case_index = c;
          s.planner = p;
          s.planner.solver_cmd = solver_cmd;
          s.forecast = cfg.forecast;
          s.forecast.quality_q = q;
          s.forecast.rng_seed = derive_seed(cfg.seed, c);
          s.online = online;
          specs.push_back(s);
        }
  return specs;
}

struct ExperimentOutput {
  std::string config_hash;
  std::vector<RunRecord> records;
  std::vector<ResultRow> rows;
};

inline ExperimentOutput run_experiment(const ExperimentConfig& cfg, int jobs = 1, const std::string& solver_cmd = "") {
  const auto history = experiment_history(cfg);
  const auto models = experiment_models(cfg, history);
  CaseSpec cs;
  cs.windows = cfg.windows;
  cs.realizations_per_window = cfg.realizations_per_window;
  cs.start_hour = cfg.start_hour;
  cs.horizon_ptus = cfg.horizon_ptus;
  cs.session = cfg.session;
  cs.seed = derive_seed(cfg.seed, 0x5eed);
  const auto cases = make_cases(history, models, cs);
  ExperimentOutput out;
  out.config_hash = cfg.hash();
  out.records = run_batch(cases, experiment_specs(cfg, cases.size(), solver_cmd), models, cfg.rules, jobs);
  for (std::size_t i = 0; i < out.records.size(); ++i) out.rows.push_back(make_row(out.config_hash, i, out.records[i]));
  return out;
}

/// results.csv, timing.csv, snapshots.csv and the effective config.
inline void write_experiment(const ExperimentConfig& cfg, const ExperimentOutput& out, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path d(dir);
  auto open = [&](const char* name) {
    std::ofstream f(d / name);
    if (!f) throw DataError("cannot write " + (d / name).string());
    return f;
  };
  {
    auto f = open("results.csv");
    write_results_csv(out.rows, f);
  }
  {
    auto f = open("timing.csv");
    write_timing_csv(out.rows, out.records, f);
  }
  {
    auto f = open("snapshots.csv");
    write_snapshots_csv(aggregate_snapshots(out.records), f);
  }
  {
    auto f = open("effective_config.txt");
    f << "# config hash " << out.config_hash << '\n' << cfg.canonical();
  }
}

}  // namespace flexbench
