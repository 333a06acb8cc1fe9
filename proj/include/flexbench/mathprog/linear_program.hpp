#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace flexbench::mathprog {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kFeasibilityTol = 1e-6;
inline constexpr double kIntegralityTol = 1e-6;

enum class VarType { Continuous, Binary };
enum class Comparator { LessEqual, Equal, GreaterEqual };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  VarType type = VarType::Continuous;
  double objective = 0.0;
};

struct Term {
  int var;
  double coef;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Comparator cmp = Comparator::LessEqual;
  double rhs = 0.0;
};

/// Minimisation program over continuous and binary variables.
class LinearProgram {
 public:
  int add_variable(std::string name, double lower, double upper, VarType type = VarType::Continuous,
                   double objective = 0.0) {
    if (type == VarType::Binary) {
      lower = std::max(lower, 0.0);
      upper = std::min(upper, 1.0);
    }
    vars_.push_back({std::move(name), lower, upper, type, objective});
    return static_cast<int>(vars_.size()) - 1;
  }

  int add_continuous(std::string name, double lower, double upper, double objective = 0.0) {
    return add_variable(std::move(name), lower, upper, VarType::Continuous, objective);
  }

  int add_binary(std::string name, double objective = 0.0) {
    return add_variable(std::move(name), 0.0, 1.0, VarType::Binary, objective);
  }

  /// Duplicate terms are merged, zero coefficients dropped; first-appearance order is kept.
  int add_constraint(std::string name, const std::vector<Term>& terms, Comparator cmp, double rhs) {
    Constraint c{std::move(name), {}, cmp, rhs};
    c.terms.reserve(terms.size());
    for (const Term& t : terms) {
      bool merged = false;
      for (Term& e : c.terms)
        if (e.var == t.var) {
          e.coef += t.coef;
          merged = true;
          break;
        }
      if (!merged) c.terms.push_back(t);
    }
    std::erase_if(c.terms, [](const Term& t) { return t.coef == 0.0; });
    cons_.push_back(std::move(c));
    return static_cast<int>(cons_.size()) - 1;
  }

  void set_objective(int var, double coef) { vars_.at(static_cast<std::size_t>(var)).objective = coef; }
  void add_objective(int var, double coef) { vars_.at(static_cast<std::size_t>(var)).objective += coef; }
  void set_objective_offset(double offset) { offset_ = offset; }
  void add_objective_offset(double offset) { offset_ += offset; }

  const std::vector<Variable>& variables() const noexcept { return vars_; }
  const std::vector<Constraint>& constraints() const noexcept { return cons_; }
  const Variable& variable(int j) const { return vars_.at(static_cast<std::size_t>(j)); }
  double objective_offset() const noexcept { return offset_; }
  int num_variables() const noexcept { return static_cast<int>(vars_.size()); }
  int num_constraints() const noexcept { return static_cast<int>(cons_.size()); }

  int num_binaries() const noexcept {
    int n = 0;
    for (const auto& v : vars_) n += v.type == VarType::Binary;
    return n;
  }

  void validate() const {
    for (const auto& v : vars_) {
      if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper)
        throw std::invalid_argument("variable '" + v.name + "' has lower > upper");
      if (v.type == VarType::Binary && (v.lower < 0.0 || v.upper > 1.0))
        throw std::invalid_argument("binary '" + v.name + "' bounds outside [0,1]");
      if (!std::isfinite(v.objective)) throw std::invalid_argument("non-finite objective on '" + v.name + "'");
    }
    for (const auto& c : cons_) {
      if (!std::isfinite(c.rhs)) throw std::invalid_argument("non-finite rhs in '" + c.name + "'");
      for (const auto& t : c.terms) {
        if (t.var < 0 || t.var >= num_variables())
          throw std::invalid_argument("constraint '" + c.name + "' references an undeclared variable");
        if (!std::isfinite(t.coef)) throw std::invalid_argument("non-finite coefficient in '" + c.name + "'");
      }
    }
  }

  double evaluate_objective(std::span<const double> x) const {
    double z = offset_;
    for (std::size_t j = 0; j < vars_.size(); ++j) z += vars_[j].objective * x[j];
    return z;
  }

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> cons_;
  double offset_ = 0.0;
};

enum class SolveStatus { Optimal, GapFeasible, Infeasible, Unbounded, Limit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::GapFeasible: return "gap-feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::Limit: return "limit";
  }
  return "unknown";
}

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = kInf;
  std::vector<double> values;
  double gap = 0.0;
  double seconds = 0.0;
  long nodes = 0;
  long iterations = 0;

  bool has_assignment() const noexcept { return !values.empty(); }
  bool proven() const noexcept { return status == SolveStatus::Optimal || status == SolveStatus::GapFeasible; }
};

/// Independent feasibility audit: every violated bound, integrality or row, as text.
inline std::vector<std::string> check_assignment(const LinearProgram& lp, std::span<const double> x,
                                                 double tol = kFeasibilityTol) {
  std::vector<std::string> bad;
  if (x.size() != lp.variables().size()) {
    bad.push_back("assignment size mismatch");
    return bad;
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto& v = lp.variables()[j];
    if (!std::isfinite(x[j])) bad.push_back(v.name + " is not finite");
    if (x[j] < v.lower - tol || x[j] > v.upper + tol) bad.push_back(v.name + " outside bounds");
    if (v.type == VarType::Binary && std::abs(x[j] - std::round(x[j])) > kIntegralityTol)
      bad.push_back(v.name + " not integral");
  }
  for (const auto& c : lp.constraints()) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coef * x[static_cast<std::size_t>(t.var)];
    const bool ok = c.cmp == Comparator::LessEqual      ? lhs <= c.rhs + tol
                    : c.cmp == Comparator::GreaterEqual ? lhs >= c.rhs - tol
                                                        : std::abs(lhs - c.rhs) <= tol;
    if (!ok) bad.push_back("constraint " + c.name + " violated");
  }
  return bad;
}

}  // namespace flexbench::mathprog
