#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "flexbench/errors.hpp"
#include "flexbench/scenario/generator.hpp"

namespace flexbench {

// Model file layout (whitespace separated, one key per line):
//
//   flexbench-model 1
//   ptu_minutes 15
//   armax <channel>            channel = up_price | down_price | imbalance_price
//     lambda <v>  shift <v>  noise_std <v>  scale <v>
//     ar <p> <v...>  ma <q> <v...>  exo 24 <v...>
//   end
//   markov <channel>           channel = up_usage | down_usage
//     levels <n>
//     context <c> <n*n row-major probabilities>    one line per fitted context
//   end
//
// Reals are printed with 17 significant digits so reading is exact.

inline constexpr int kModelFormatVersion = 1;

namespace detail {

inline std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_list(std::ostream& out, const char* key, const std::vector<double>& v) {
  out << "  " << key << ' ' << v.size();
  for (double x : v) out << ' ' << real(x);
  out << '\n';
}

inline void write_armax(std::ostream& out, const char* name, const ArmaxModel& m) {
  out << "armax " << name << '\n';
  out << "  lambda " << real(m.boxcox.lambda) << "\n  shift " << real(m.boxcox.shift) << "\n  noise_std "
      << real(m.noise_std) << "\n  scale " << real(m.scale) << '\n';
  write_list(out, "ar", m.ar);
  write_list(out, "ma", m.ma);
  write_list(out, "exo", m.exo);
  out << "end\n";
}

inline void write_markov(std::ostream& out, const char* name, const MarkovDeploymentModel& m) {
  out << "markov " << name << "\n  levels " << m.levels << '\n';
  for (int c = 0; c < static_cast<int>(m.transition.size()); ++c) {
    if (!m.has_context(c)) continue;
    out << "  context " << c;
    for (double p : m.transition[static_cast<std::size_t>(c)]) out << ' ' << real(p);
    out << '\n';
  }
  out << "end\n";
}

class ModelReader {
 public:
  explicit ModelReader(std::istream& in) : in_(in) {}

  std::string word() {
    std::string w;
    while (!(line_ >> w)) {
      std::string text;
      if (!std::getline(in_, text)) throw DataError("unexpected end of model file", lineno_);
      ++lineno_;
      line_.clear();
      line_.str(text);
    }
    return w;
  }

  double number() {
    const std::string w = word();
    char* end = nullptr;
    const double v = std::strtod(w.c_str(), &end);
    if (end == w.c_str() || *end != '\0') fail("expected a number, got '" + w + "'");
    return v;
  }

  int integer() {
    const double v = number();
    if (v != static_cast<double>(static_cast<int>(v))) fail("expected an integer");
    return static_cast<int>(v);
  }

  void expect(const std::string& w) {
    const std::string got = word();
    if (got != w) fail("expected '" + w + "', got '" + got + "'");
  }

  std::vector<double> list(std::size_t max) {
    const int n = integer();
    if (n < 0 || static_cast<std::size_t>(n) > max) fail("list length out of range");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = number();
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const { throw DataError("model file: " + what, lineno_); }

 private:
  std::istream& in_;
  std::istringstream line_;
  std::size_t lineno_ = 0;
};

inline ArmaxModel read_armax(ModelReader& r) {
  ArmaxModel m;
  for (std::string key = r.word(); key != "end"; key = r.word()) {
    if (key == "lambda") m.boxcox.lambda = r.number();
    else if (key == "shift") m.boxcox.shift = r.number();
    else if (key == "noise_std") m.noise_std = r.number();
    else if (key == "scale") m.scale = r.number();
    else if (key == "ar") m.ar = r.list(4);
    else if (key == "ma") m.ma = r.list(4);
    else if (key == "exo") m.exo = r.list(kHoursPerDay);
    else r.fail("unknown ARMAX key '" + key + "'");
  }
  if (m.ar.empty() || m.exo.size() != kHoursPerDay || !(m.noise_std > 0) || !(m.scale > 0))
    r.fail("incomplete ARMAX section");
  return m;
}

inline MarkovDeploymentModel read_markov(ModelReader& r) {
  MarkovDeploymentModel m;
  r.expect("levels");
  m.levels = r.integer();
  if (m.levels < 1 || m.levels > 100) r.fail("levels out of range");
  m.transition.assign(kMarkovContexts, {});
  for (std::string key = r.word(); key != "end"; key = r.word()) {
    if (key != "context") r.fail("unknown Markov key '" + key + "'");
    const int c = r.integer();
    if (c < 0 || c >= kMarkovContexts) r.fail("context out of range");
    auto& row = m.transition[static_cast<std::size_t>(c)];
    row.resize(static_cast<std::size_t>(m.levels * m.levels));
    for (double& p : row) p = r.number();
    for (int i = 0; i < m.levels; ++i) {
      double s = 0.0;
      for (int j = 0; j < m.levels; ++j) s += row[static_cast<std::size_t>(i * m.levels + j)];
      if (std::abs(s - 1.0) > 1e-9) r.fail("transition row does not sum to 1");
    }
  }
  return m;
}

}  // namespace detail

inline void write_models(std::ostream& out, const ScenarioModels& m) {
  out << "flexbench-model " << kModelFormatVersion << "\nptu_minutes " << m.ptu_minutes << '\n';
  detail::write_armax(out, "up_price", m.up_price);
  detail::write_armax(out, "down_price", m.down_price);
  detail::write_armax(out, "imbalance_price", m.imbalance_price);
  detail::write_markov(out, "up_usage", m.up_usage);
  detail::write_markov(out, "down_usage", m.down_usage);
}

inline ScenarioModels read_models(std::istream& in) {
  detail::ModelReader r(in);
  r.expect("flexbench-model");
  if (r.integer() != kModelFormatVersion) r.fail("unsupported model format version");
  ScenarioModels m;
  r.expect("ptu_minutes");
  m.ptu_minutes = r.integer();
  unsigned seen = 0;
  for (int k = 0; k < 5; ++k) {
    const std::string kind = r.word(), name = r.word();
    if (kind == "armax" && name == "up_price") m.up_price = detail::read_armax(r), seen |= 1;
    else if (kind == "armax" && name == "down_price") m.down_price = detail::read_armax(r), seen |= 2;
    else if (kind == "armax" && name == "imbalance_price") m.imbalance_price = detail::read_armax(r), seen |= 4;
    else if (kind == "markov" && name == "up_usage") m.up_usage = detail::read_markov(r), seen |= 8;
    else if (kind == "markov" && name == "down_usage") m.down_usage = detail::read_markov(r), seen |= 16;
    else r.fail("unknown section '" + kind + " " + name + "'");
  }
  if (seen != 31) r.fail("model file is missing sections");
  return m;
}

}  // namespace flexbench
