#pragma once

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "flexbench/evaluator/oracle.hpp"
#include "flexbench/io/experiment.hpp"
#include "flexbench/io/plots.hpp"
#include "flexbench/io/stats.hpp"

namespace flexbench {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitSolver = 3 };

namespace detail {

struct CliOptions {
  std::string config, out, solver_cmd, history, results;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::optional<int> days;
  int oracle_instances = 4;
};

inline std::ofstream open_out(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p);
  if (!f) throw DataError("cannot write " + p.string());
  return f;
}

inline ExperimentConfig cli_config(const CliOptions& o, bool required) {
  if (o.config.empty()) {
    if (required) throw CLI::RequiredError("--config");
    std::istringstream empty;
    return parse_config(empty);
  }
  if (!std::filesystem::exists(o.config)) throw CLI::ValidationError("--config", "file not found: " + o.config);
  return load_config(o.config);
}

inline void check_solver(const std::string& cmd) {
  if (cmd.empty()) return;
  if (cmd.find("{lp}") == std::string::npos || cmd.find("{sol}") == std::string::npos)
    throw ConfigError("--solver-cmd must contain {lp} and {sol}");
  std::istringstream words(cmd);
  std::string program;
  words >> program;
  if (!mathprog::detail::executable_exists(program)) throw SolverNotFound("solver executable not found: " + program);
}

inline int cmd_synth(const CliOptions& o, std::ostream& out) {
  auto cfg = cli_config(o, false);
  SynthProfile p = cfg.synth;
  p.ptu_minutes = cfg.ptu_minutes;
  if (o.seed) p.seed = *o.seed;
  if (o.days) p.days = *o.days;
  const std::string path = o.out.empty() ? "history.csv" : o.out;
  const auto h = synth_history(p);
  auto f = open_out(path);
  write_history_csv(h, f);
  out << "wrote " << h.size() << " PTUs to " << path << '\n';
  return kExitOk;
}

inline int cmd_fit(const CliOptions& o, std::ostream& out) {
  auto cfg = cli_config(o, false);
  if (!o.history.empty()) cfg.history_path = o.history;
  if (o.seed) cfg.synth.seed = *o.seed;
  const auto h = experiment_history(cfg);
  if (h.clamped_usages > 0) out << "clamped " << h.clamped_usages << " usage values into [0,1]\n";
  const auto m = fit_scenario_models(h, cfg.ar_order, cfg.ma_order, cfg.levels);
  const std::string path = o.out.empty() ? "models.txt" : o.out;
  auto f = open_out(path);
  write_models(f, m);
  out << "wrote models fitted on " << h.size() << " PTUs to " << path << '\n';
  return kExitOk;
}

inline int cmd_run(const CliOptions& o, std::ostream& out, std::ostream& err) {
  auto cfg = cli_config(o, true);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.output_dir = o.out;
  check_solver(o.solver_cmd);
  const auto res = run_experiment(cfg, o.jobs, o.solver_cmd);
  write_experiment(cfg, res, cfg.output_dir);
  int failed = 0;
  for (const auto& r : res.rows) failed += r.failed;
  out << "wrote " << res.rows.size() << " runs (config " << res.config_hash << ") to " << cfg.output_dir << '\n';
  if (failed) err << failed << " runs failed; see the status and error columns\n";
  return kExitOk;
}

inline int ptus_per_hour_from(const std::filesystem::path& dir) {
  std::ifstream f(dir / "effective_config.txt");
  std::string line;
  while (std::getline(f, line))
    if (line.rfind("grid.ptu_minutes=", 0) == 0) return 60 / std::stoi(line.substr(17));
  return 4;
}

inline std::string pm(const MetricSummary& m, bool single) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(3);
  s << m.mean;
  if (!single) s << " ± " << m.std;
  return s.str();
}

inline int cmd_report(const CliOptions& o, std::ostream& out) {
  std::filesystem::path in = o.results;
  if (in.empty()) in = o.config.empty() ? std::filesystem::path("results") : std::filesystem::path(cli_config(o, true).output_dir);
  const std::filesystem::path dir = o.out.empty() ? in / "report" : std::filesystem::path(o.out);
  const auto rows = read_results_csv((in / "results.csv").string());
  if (rows.empty()) throw DataError("no runs in " + (in / "results.csv").string());
  const auto sum = summarize(rows);
  std::filesystem::create_directories(dir);

  {
    auto f = open_out(dir / "summary.csv");
    f << "planner,mode,quality_q,runs,failed,single_run";
    for (const char* m : {"total_cost", "operation_cost", "penalty", "unmet_pct", "overflow_pct", "runtime_s"})
      f << ',' << m << "_mean," << m << "_std";
    f << '\n';
    for (const auto& g : sum.groups) {
      f << g.planner << ',' << g.mode << ',' << g.quality_q << ',' << g.runs << ',' << g.failed << ','
        << (g.single_run ? 1 : 0);
      for (const auto* m : {&g.total_cost, &g.operation_cost, &g.penalty, &g.unmet_pct, &g.overflow_pct, &g.runtime})
        f << ',' << format_double(m->mean) << ',' << (std::isnan(m->std) ? "" : format_double(m->std));
      f << '\n';
    }
  }
  {
    auto f = open_out(dir / "pairwise.csv");
    f << "a,b,t,df,p_two_sided\n";
    for (const auto& p : sum.pairs)
      f << p.a << ',' << p.b << ',' << format_double(p.test.t) << ',' << format_double(p.test.df) << ','
        << format_double(p.test.p_two_sided) << '\n';
  }
  {
    auto f = open_out(dir / "summary.md");
    f << "| planner | mode | q | runs | total cost (EUR) | operation (EUR) | penalty (EUR) | unmet % | overflow % | "
         "runtime (s) |\n|---|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& g : sum.groups) {
      f << "| " << g.planner << " | " << g.mode << " | " << g.quality_q << " | " << g.runs - g.failed;
      if (g.failed) f << " (+" << g.failed << " failed)";
      for (const auto* m : {&g.total_cost, &g.operation_cost, &g.penalty, &g.unmet_pct, &g.overflow_pct, &g.runtime})
        f << " | " << pm(*m, g.single_run);
      f << " |\n";
    }
    if (std::any_of(sum.groups.begin(), sum.groups.end(), [](const auto& g) { return g.single_run; }))
      f << "\nGroups with a single run have no spread and no significance test.\n";
  }

  // One plot set per (mode, quality).
  std::map<std::pair<std::string, int>, std::vector<const PlannerSummary*>> panels;
  for (const auto& g : sum.groups)
    if (!g.totals.empty()) panels[{g.mode, g.quality_q}].push_back(&g);
  int files = 4;
  for (const auto& [key, groups] : panels) {
    const std::string tag = key.first + "_q" + std::to_string(key.second);
    std::vector<NamedSeries> cost, unmet;
    for (const auto* g : groups) {
      cost.push_back({g->planner, g->totals});
      NamedSeries u{g->planner, {}};
      for (const auto& r : rows)
        if (!r.failed && r.planner == g->planner && r.mode == g->mode && r.quality_q == g->quality_q)
          u.values.push_back(r.unmet_pct);
      unmet.push_back(u);
    }
    auto svg = open_out(dir / ("quantile_total_cost_" + tag + ".svg"));
    auto csv = open_out(dir / ("quantile_total_cost_" + tag + ".csv"));
    emit_quantile_plot(cost, AxisScale::Symlog, "Total cost (EUR), " + tag, svg, csv);
    auto svg2 = open_out(dir / ("quantile_unmet_pct_" + tag + ".svg"));
    auto csv2 = open_out(dir / ("quantile_unmet_pct_" + tag + ".csv"));
    emit_quantile_plot(unmet, AxisScale::Symlog, "Unmet energy (%), " + tag, svg2, csv2);
    files += 4;
  }
  if (std::filesystem::exists(in / "snapshots.csv")) {
    std::map<std::pair<std::string, int>, std::vector<NamedSeries>> ts;
    for (const auto& s : read_snapshots_csv((in / "snapshots.csv").string()))
      ts[{s.mode, s.quality_q}].push_back({s.planner, s.mean});
    const int pph = ptus_per_hour_from(in);
    for (const auto& [key, series] : ts) {
      const std::string tag = key.first + "_q" + std::to_string(key.second);
      auto svg = open_out(dir / ("cost_to_go_" + tag + ".svg"));
      auto csv = open_out(dir / ("cost_to_go_" + tag + ".csv"));
      emit_timeseries_plot(series, pph, "Expected cost to go (EUR), hourly mean, " + tag, svg, csv);
      files += 2;
    }
  }
  out << "wrote " << files << " report files to " << dir.string() << '\n';
  return kExitOk;
}

inline int cmd_oracle(const CliOptions& o, std::ostream& out, std::ostream& err) {
  int failures = 0;
  for (const auto& c : run_oracle_checks(o.seed.value_or(1), o.oracle_instances)) {
    out << (c.failures ? "FAIL " : "ok   ") << c.name << ": " << c.instances << " instances, " << c.failures
        << " failures, worst deviation " << c.worst << " EUR\n";
    failures += c.failures;
  }
  if (failures) err << failures << " oracle mismatches\n";
  return failures ? kExitSolver : kExitOk;
}

}  // namespace detail

/// Command-line entry point. Exit codes: 0 ok, 1 usage or configuration
/// error, 2 data error, 3 solver error (including oracle mismatches).
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"flexbench: EV charging strategies on energy and reserve markets"};
  app.fallthrough();
  app.require_subcommand(1);
  detail::CliOptions o;
  app.add_option("--config", o.config, "experiment config file");
  app.add_option("--seed", o.seed, "override the base seed");
  app.add_option("--jobs", o.jobs, "parallel runs")->check(CLI::PositiveNumber);
  app.add_option("--solver-cmd", o.solver_cmd, "external solver command with {lp} {sol} {gap} {time}");
  app.add_option("--out", o.out, "output file or directory");

  auto* synth = app.add_subcommand("synth", "write a synthetic market history CSV");
  synth->add_option("--days", o.days, "history length in days")->check(CLI::PositiveNumber);
  auto* fit = app.add_subcommand("fit", "fit scenario models to a history");
  fit->add_option("--history", o.history, "history CSV (default: config or synthetic)")->check(CLI::ExistingFile);
  auto* run = app.add_subcommand("run", "run the configured experiment");
  auto* report = app.add_subcommand("report", "summary tables and plots from a results directory");
  report->add_option("--results", o.results, "directory holding results.csv")->check(CLI::ExistingDirectory);
  auto* oracle = app.add_subcommand("oracle", "brute-force checks on tiny instances");
  oracle->add_option("--instances", o.oracle_instances, "instances per check")->check(CLI::PositiveNumber);

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kExitOk : kExitUsage;
    }
    if (*synth) return detail::cmd_synth(o, out);
    if (*fit) return detail::cmd_fit(o, out);
    if (*run) return detail::cmd_run(o, out, err);
    if (*report) return detail::cmd_report(o, out);
    if (*oracle) return detail::cmd_oracle(o, out, err);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n"
        << app.help() << "Global options: --config FILE --seed N --jobs N --solver-cmd CMD --out PATH\n";
    return kExitUsage;
  } catch (const SolverNotFound& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const FitError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace flexbench
