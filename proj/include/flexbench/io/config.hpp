#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "flexbench/core/market.hpp"
#include "flexbench/errors.hpp"
#include "flexbench/evaluator/cases.hpp"
#include "flexbench/io/synth.hpp"

namespace flexbench {

/// Everything a `run` needs. Paths are absolute once loaded.
struct ExperimentConfig {
  int ptu_minutes = 15;
  int horizon_ptus = 48;
  int start_hour = 19;
  EvSession session;
  MarketRules rules;
  std::string history_path;  // empty: synthesise with `synth`
  std::string models_path;   // empty: fit from the history
  SynthProfile synth;
  int ar_order = 2, ma_order = 1, levels = 5;
  std::vector<PlannerConfig> planners;
  ForecastConfig forecast;
  std::vector<int> qualities = {1};
  std::vector<bool> modes = {true};  // true = online
  int windows = 95;
  int realizations_per_window = 10;
  std::uint64_t seed = 1;
  std::string output_dir = "results";

  /// Every effective setting as sorted "section.key=value" lines.
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;
};

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace detail {

inline std::string fmt_num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);  // shortest exact form
  return std::string(buf, r.ptr);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      while (!cur.empty() && std::isspace(static_cast<unsigned char>(cur.back()))) cur.pop_back();
      std::size_t b = 0;
      while (b < cur.size() && std::isspace(static_cast<unsigned char>(cur[b]))) ++b;
      if (b < cur.size()) out.push_back(cur.substr(b));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

class ConfigReader {
 public:
  explicit ConfigReader(const boost::property_tree::ptree& t) : tree_(t) {}

  template <typename T>
  T get(const std::string& section, const std::string& key, T fallback) {
    const std::string path = section + "." + key;
    used_.insert(path);
    // section names may contain dots (planner.SO1), so no path splitting
    using P = boost::property_tree::ptree::path_type;
    const auto sec = tree_.get_child_optional(P(section, '\0'));
    const auto node = sec ? sec->get_child_optional(P(key, '\0')) : boost::none;
    if (!node) return fallback;
    const std::string text = node->data();
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (text == "true" || text == "1" || text == "yes") return true;
        if (text == "false" || text == "0" || text == "no") return false;
        throw std::invalid_argument("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        return text;
      } else if constexpr (std::is_floating_point_v<T>) {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("");
        return v;
      } else {
        std::size_t pos = 0;
        const long long v = std::stoll(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("");
        return static_cast<T>(v);
      }
    } catch (const std::logic_error&) {
      throw ConfigError("bad value for " + path + ": '" + text + "'");
    }
  }

  bool has_section(const std::string& s) const { return tree_.get_child_optional(boost::property_tree::ptree::path_type(s, '\0')).has_value(); }

  /// Keys present in the file that no getter asked for.
  std::vector<std::string> unknown() const {
    std::vector<std::string> out;
    for (const auto& [sec, body] : tree_) {
      if (body.empty()) {
        out.push_back(sec);
        continue;
      }
      for (const auto& [key, v] : body)
        if (!used_.count(sec + "." + key)) out.push_back(sec + "." + key);
    }
    return out;
  }

 private:
  const boost::property_tree::ptree& tree_;
  std::set<std::string> used_;
};

}  // namespace detail

inline std::string ExperimentConfig::canonical() const {
  std::map<std::string, std::string> kv;
  using detail::fmt_num;
  kv["grid.ptu_minutes"] = std::to_string(ptu_minutes);
  kv["grid.horizon_ptus"] = std::to_string(horizon_ptus);
  kv["grid.start_hour"] = std::to_string(start_hour);
  kv["session.arrival_ptu"] = std::to_string(session.arrival_ptu);
  kv["session.departure_ptu"] = std::to_string(session.departure_ptu);
  kv["session.capacity"] = fmt_num(session.capacity);
  kv["session.initial_soc"] = fmt_num(session.initial_soc);
  kv["session.target_soc"] = fmt_num(session.target_soc);
  kv["session.max_power"] = fmt_num(session.max_power);
  kv["session.efficiency"] = fmt_num(session.efficiency);
  kv["market.reserve_deadline_ptus"] = std::to_string(rules.reserve_deadline_ptus);
  kv["market.asymmetric_bids"] = rules.asymmetric_bids ? "true" : "false";
  kv["market.min_bid_size"] = fmt_num(rules.min_bid_size);
  kv["market.allow_discharge"] = rules.allow_discharge ? "true" : "false";
  kv["market.unmet_penalty"] = fmt_num(rules.unmet_penalty);
  kv["market.overflow_penalty"] = fmt_num(rules.overflow_penalty);
  kv["market.mip_gap"] = fmt_num(rules.mip_gap);
  kv["models.history"] = history_path;
  kv["models.models"] = models_path;
  if (history_path.empty()) {
    kv["synth.days"] = std::to_string(synth.days);
    kv["synth.start"] = format_iso8601(synth.start);
    kv["synth.seed"] = std::to_string(synth.seed);
    kv["synth.mean_da_price"] = fmt_num(synth.mean_da_price);
  }
  kv["models.ar_order"] = std::to_string(ar_order);
  kv["models.ma_order"] = std::to_string(ma_order);
  kv["models.levels"] = std::to_string(levels);
  std::string names;
  for (const auto& p : planners) {
    names += (names.empty() ? "" : ",") + p.name();
    kv["planner." + p.name() + ".alpha"] = fmt_num(p.alpha);
    kv["planner." + p.name() + ".n_scenarios_used"] = std::to_string(p.n_scenarios_used);
    kv["planner." + p.name() + ".time_limit"] = fmt_num(p.time_limit);
  }
  kv["planners.list"] = names;
  kv["forecast.n_forecasts"] = std::to_string(forecast.n_forecasts);
  kv["forecast.error_decay"] = fmt_num(forecast.error_decay);
  std::string q;
  for (int x : qualities) q += (q.empty() ? "" : ",") + std::to_string(x);
  kv["forecast.quality_q"] = q;
  std::string m;
  for (bool b : modes) m += (m.empty() ? "" : ",") + std::string(b ? "online" : "offline");
  kv["batch.modes"] = m;
  kv["batch.windows"] = std::to_string(windows);
  kv["batch.realizations_per_window"] = std::to_string(realizations_per_window);
  kv["batch.seed"] = std::to_string(seed);
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

inline std::string ExperimentConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical())));
  return buf;
}

/// Parses the INI-style experiment file. Relative paths resolve against the
/// file's directory. Unknown keys are errors, so typos do not pass silently.
inline ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = ".") {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  detail::ConfigReader r(tree);
  ExperimentConfig c;
  c.ptu_minutes = r.get("grid", "ptu_minutes", c.ptu_minutes);
  c.horizon_ptus = r.get("grid", "horizon_ptus", c.horizon_ptus);
  c.start_hour = r.get("grid", "start_hour", c.start_hour);
  auto& s = c.session;
  s.arrival_ptu = r.get("session", "arrival_ptu", s.arrival_ptu);
  s.departure_ptu = r.get("session", "departure_ptu", c.horizon_ptus);
  s.capacity = r.get("session", "capacity", s.capacity);
  s.initial_soc = r.get("session", "initial_soc", s.initial_soc);
  s.target_soc = r.get("session", "target_soc", s.target_soc);
  s.max_power = r.get("session", "max_power", s.max_power);
  s.efficiency = r.get("session", "efficiency", s.efficiency);
  auto& m = c.rules;
  m.reserve_deadline_ptus = r.get("market", "reserve_deadline_ptus", m.reserve_deadline_ptus);
  m.asymmetric_bids = r.get("market", "asymmetric_bids", m.asymmetric_bids);
  m.min_bid_size = r.get("market", "min_bid_size", m.min_bid_size);
  m.allow_discharge = r.get("market", "allow_discharge", m.allow_discharge);
  m.unmet_penalty = r.get("market", "unmet_penalty", m.unmet_penalty);
  m.overflow_penalty = r.get("market", "overflow_penalty", m.overflow_penalty);
  m.mip_gap = r.get("market", "mip_gap", m.mip_gap);

  auto resolve = [&](const std::string& p) -> std::string {
    if (p.empty()) return p;
    std::filesystem::path path(p);
    if (path.is_relative()) path = base_dir / path;
    if (!std::filesystem::exists(path)) throw ConfigError("referenced file does not exist: " + path.string());
    return std::filesystem::weakly_canonical(path).string();
  };
  c.history_path = resolve(r.get<std::string>("models", "history", ""));
  c.models_path = resolve(r.get<std::string>("models", "models", ""));
  c.ar_order = r.get("models", "ar_order", c.ar_order);
  c.ma_order = r.get("models", "ma_order", c.ma_order);
  c.levels = r.get("models", "levels", c.levels);
  c.synth.days = r.get("synth", "days", c.synth.days);
  c.synth.seed = r.get<std::uint64_t>("synth", "seed", c.synth.seed);
  c.synth.mean_da_price = r.get("synth", "mean_da_price", c.synth.mean_da_price);
  {
    const auto start = r.get<std::string>("synth", "start", "");
    if (!start.empty()) {
      try {
        c.synth.start = parse_iso8601(start);
      } catch (const DataError& e) {
        throw ConfigError(std::string("synth.start: ") + e.what());
      }
    }
  }

  const auto names = detail::split_list(r.get<std::string>("planners", "list", "DI,OP,MR,QO,DT,SO1,SO2,PI"));
  if (names.empty()) throw ConfigError("planners.list is empty");
  for (const auto& n : names) {
    PlannerConfig p;
    try {
      p = PlannerConfig::defaults(parse_planner_kind(n));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    const std::string sec = "planner." + n;
    p.alpha = r.get(sec, "alpha", p.alpha);
    p.n_scenarios_used = r.get(sec, "n_scenarios_used", p.n_scenarios_used);
    p.time_limit = r.get(sec, "time_limit", p.time_limit);
    c.planners.push_back(p);
  }
  c.forecast.n_forecasts = r.get("forecast", "n_forecasts", c.forecast.n_forecasts);
  c.forecast.error_decay = r.get("forecast", "error_decay", c.forecast.error_decay);
  c.qualities.clear();
  for (const auto& q : detail::split_list(r.get<std::string>("forecast", "quality_q", "1"))) {
    try {
      c.qualities.push_back(std::stoi(q));
    } catch (const std::logic_error&) {
      throw ConfigError("bad value for forecast.quality_q: '" + q + "'");
    }
  }
  c.modes.clear();
  for (const auto& mode : detail::split_list(r.get<std::string>("batch", "modes", "online"))) {
    if (mode != "online" && mode != "offline") throw ConfigError("batch.modes entries must be online or offline");
    c.modes.push_back(mode == "online");
  }
  c.windows = r.get("batch", "windows", c.windows);
  c.realizations_per_window = r.get("batch", "realizations_per_window", c.realizations_per_window);
  c.seed = r.get<std::uint64_t>("batch", "seed", c.seed);
  c.output_dir = r.get<std::string>("output", "dir", c.output_dir);
  if (std::filesystem::path(c.output_dir).is_relative()) c.output_dir = (base_dir / c.output_dir).lexically_normal().string();

  if (const auto bad = r.unknown(); !bad.empty()) throw ConfigError("unknown config key: " + bad.front());
  try {
    const TimeGrid grid(c.ptu_minutes, c.horizon_ptus);
    c.session.validate(grid);
    c.rules.validate();
    for (const auto& p : c.planners) p.validate();
    for (int q : c.qualities) {
      ForecastConfig f = c.forecast;
      f.quality_q = q;
      f.validate();
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.start_hour < 0 || c.start_hour > 23) throw ConfigError("grid.start_hour must be 0..23");
  if (c.windows <= 0 || c.realizations_per_window <= 0) throw ConfigError("batch sizes must be positive");
  if (c.qualities.empty() || c.modes.empty()) throw ConfigError("need at least one quality and one mode");
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path);
  return parse_config(f, std::filesystem::path(path).parent_path().empty() ? std::filesystem::path(".")
                                                                           : std::filesystem::path(path).parent_path());
}

}  // namespace flexbench
