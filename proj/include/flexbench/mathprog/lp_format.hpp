#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "flexbench/mathprog/linear_program.hpp"

namespace flexbench::mathprog {

inline std::string format_coef(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline bool valid_lp_name(const std::string& name) {
  if (name.empty() || name.size() > 255) return false;
  if (std::isdigit(static_cast<unsigned char>(name[0])) || name[0] == '.' || name[0] == 'e' || name[0] == 'E')
    return false;
  for (char c : name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '[' || c == ']' || c == '#'))
      return false;
  return true;
}

namespace detail {

inline void append_terms(std::string& out, const std::vector<Term>& terms, const LinearProgram& lp) {
  int on_line = 0;
  bool first = true;
  for (const auto& t : terms) {
    if (on_line == 8) {
      out += "\n   ";
      on_line = 0;
    }
    const double c = t.coef;
    if (first) out += c < 0 ? " - " : " ";
    else out += c < 0 ? " - " : " + ";
    out += format_coef(std::abs(c));
    out += ' ';
    out += lp.variable(t.var).name;
    first = false;
    ++on_line;
  }
}

}  // namespace detail

/// Writes the program in CPLEX LP text format. The output depends only on the
/// program, so identical programs give byte-identical files.
inline std::string export_lp(const LinearProgram& lp) {
  lp.validate();
  std::unordered_set<std::string> seen;
  for (const auto& v : lp.variables()) {
    if (!valid_lp_name(v.name)) throw std::invalid_argument("variable name not usable in LP format: '" + v.name + "'");
    if (!seen.insert(v.name).second) throw std::invalid_argument("duplicate variable name: " + v.name);
  }
  for (const auto& c : lp.constraints())
    if (!valid_lp_name(c.name)) throw std::invalid_argument("constraint name not usable in LP format: '" + c.name + "'");

  std::string out = "\\ flexbench linear program\nMinimize\n obj:";
  std::vector<Term> obj;
  for (int j = 0; j < lp.num_variables(); ++j)
    if (lp.variable(j).objective != 0.0) obj.push_back({j, lp.variable(j).objective});
  detail::append_terms(out, obj, lp);
  if (lp.objective_offset() != 0.0) {
    out += lp.objective_offset() < 0 ? " - " : (obj.empty() ? " " : " + ");
    out += format_coef(std::abs(lp.objective_offset()));
  }
  out += "\nSubject To\n";
  for (const auto& c : lp.constraints()) {
    out += ' ';
    out += c.name;
    out += ':';
    if (c.terms.empty() && lp.num_variables() > 0) detail::append_terms(out, {{0, 0.0}}, lp);
    else detail::append_terms(out, c.terms, lp);
    out += c.cmp == Comparator::LessEqual ? " <= " : c.cmp == Comparator::GreaterEqual ? " >= " : " = ";
    out += format_coef(c.rhs);
    out += '\n';
  }
  out += "Bounds\n";
  for (const auto& v : lp.variables()) {
    if (v.type == VarType::Binary && v.lower == 0.0 && v.upper == 1.0) continue;
    out += ' ';
    if (std::isinf(v.lower) && std::isinf(v.upper)) {
      out += v.name + " free";
    } else if (v.lower == v.upper) {
      out += v.name + " = " + format_coef(v.lower);
    } else if (std::isinf(v.upper)) {
      out += v.name + " >= " + format_coef(v.lower);
    } else {
      out += (std::isinf(v.lower) ? std::string("-inf") : format_coef(v.lower)) + " <= " + v.name + " <= " +
             format_coef(v.upper);
    }
    out += '\n';
  }
  if (lp.num_binaries() > 0) {
    out += "Binaries\n";
    for (const auto& v : lp.variables())
      if (v.type == VarType::Binary) out += ' ' + v.name + '\n';
  }
  out += "End\n";
  return out;
}

}  // namespace flexbench::mathprog
