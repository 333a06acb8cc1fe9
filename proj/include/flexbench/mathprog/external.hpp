#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "flexbench/errors.hpp"
#include "flexbench/mathprog/linear_program.hpp"
#include "flexbench/mathprog/lp_format.hpp"

namespace flexbench::mathprog {

/// Command template for an external solver. Placeholders: {lp} input file,
/// {sol} solution file to write, {gap} relative gap, {time} limit in seconds.
/// The solution file holds a status line ("status optimal" etc.), an optional
/// "objective v" line and then one "name value" pair per line.
struct ExternalSolver {
  std::string command;
};

namespace detail {

inline std::string replace_all(std::string s, const std::string& key, const std::string& value) {
  for (std::size_t pos = s.find(key); pos != std::string::npos; pos = s.find(key, pos + value.size()))
    s.replace(pos, key.size(), value);
  return s;
}

inline std::string quote_path(const std::filesystem::path& p) {
  std::string out = "'";
  for (char c : p.string()) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

inline bool executable_exists(const std::string& program) {
  if (program.find('/') != std::string::npos) return ::access(program.c_str(), X_OK) == 0;
  const char* path = std::getenv("PATH");
  if (!path) return false;
  std::stringstream dirs(path);
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    if (dir.empty()) dir = ".";
    if (::access((std::filesystem::path(dir) / program).c_str(), X_OK) == 0) return true;
  }
  return false;
}

inline SolveStatus parse_status(const std::string& word) {
  if (word == "optimal") return SolveStatus::Optimal;
  if (word == "gap-feasible" || word == "feasible") return SolveStatus::GapFeasible;
  if (word == "infeasible") return SolveStatus::Infeasible;
  if (word == "unbounded") return SolveStatus::Unbounded;
  if (word == "limit") return SolveStatus::Limit;
  throw SolverOutputError("unknown solver status '" + word + "'");
}

}  // namespace detail

/// Parses a solution file written by an external solver for `lp`.
inline Solution parse_solution(const LinearProgram& lp, std::istream& in) {
  std::unordered_map<std::string, int> index;
  for (int j = 0; j < lp.num_variables(); ++j) index.emplace(lp.variable(j).name, j);
  Solution sol;
  std::string line, key;
  bool have_status = false;
  std::vector<double> values(static_cast<std::size_t>(lp.num_variables()), 0.0);
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    if (!(ls >> key) || key[0] == '#') continue;
    std::string value;
    if (!(ls >> value)) throw SolverOutputError("solution line without value: '" + line + "'");
    if (key == "status") {
      sol.status = detail::parse_status(value);
      have_status = true;
      continue;
    }
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0') throw SolverOutputError("unparseable number in line: '" + line + "'");
    if (key == "objective") continue;
    auto it = index.find(key);
    if (it == index.end()) throw SolverOutputError("unknown variable in solution: " + key);
    values[static_cast<std::size_t>(it->second)] = v;
  }
  if (!have_status) throw SolverOutputError("solution file has no status line");
  if (sol.status == SolveStatus::Optimal || sol.status == SolveStatus::GapFeasible ||
      sol.status == SolveStatus::Limit) {
    sol.values = std::move(values);
    auto bad = check_assignment(lp, sol.values);
    if (!bad.empty()) throw SolverOutputError("external solution violates the program: " + bad.front());
    sol.objective = lp.evaluate_objective(sol.values);
  }
  return sol;
}

/// Writes the program, runs the configured solver and reads back its answer.
/// Never falls back to the internal solver.
inline Solution solve_external(const LinearProgram& lp, const ExternalSolver& solver, double gap, double time_limit) {
  if (solver.command.find("{lp}") == std::string::npos || solver.command.find("{sol}") == std::string::npos)
    throw ConfigError("solver command must contain {lp} and {sol}: '" + solver.command + "'");
  std::istringstream words(solver.command);
  std::string program;
  words >> program;
  if (!detail::executable_exists(program)) throw SolverNotFound("solver executable not found: " + program);

  static std::atomic<unsigned long> counter{0};
  const auto dir = std::filesystem::temp_directory_path();
  const std::string stem = "flexbench_" + std::to_string(::getpid()) + "_" + std::to_string(counter++);
  const auto lp_path = dir / (stem + ".lp");
  const auto sol_path = dir / (stem + ".sol");
  {
    std::ofstream out(lp_path, std::ios::binary);
    out << export_lp(lp);
    if (!out) throw SolverError("cannot write " + lp_path.string());
  }
  std::string cmd = detail::replace_all(solver.command, "{lp}", detail::quote_path(lp_path));
  cmd = detail::replace_all(cmd, "{sol}", detail::quote_path(sol_path));
  cmd = detail::replace_all(cmd, "{gap}", format_coef(gap));
  cmd = detail::replace_all(cmd, "{time}", format_coef(time_limit));

  const auto t0 = std::chrono::steady_clock::now();
  const int raw = std::system(cmd.c_str());
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::error_code ec;
  std::filesystem::remove(lp_path, ec);
  const int code = raw == -1 ? -1 : (WIFEXITED(raw) ? WEXITSTATUS(raw) : 128 + WTERMSIG(raw));
  if (code != 0) {
    std::filesystem::remove(sol_path, ec);
    throw SolverExitError("solver exited with status " + std::to_string(code) + ": " + cmd, code);
  }
  std::ifstream in(sol_path);
  if (!in) throw SolverOutputError("solver wrote no solution file " + sol_path.string());
  Solution sol;
  try {
    sol = parse_solution(lp, in);
  } catch (...) {
    in.close();
    std::filesystem::remove(sol_path, ec);
    throw;
  }
  in.close();
  std::filesystem::remove(sol_path, ec);
  sol.seconds = seconds;
  return sol;
}

}  // namespace flexbench::mathprog
