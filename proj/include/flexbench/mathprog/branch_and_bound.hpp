#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <queue>
#include <vector>

#include "flexbench/mathprog/linear_program.hpp"
#include "flexbench/mathprog/simplex.hpp"

namespace flexbench::mathprog {

struct SolveOptions {
  double gap = 0.01;          // relative MIP gap
  double abs_gap = 1e-6;      // absolute gap floor, for objectives near zero
  double time_limit = 300.0;  // seconds
  long node_limit = 2'000'000;
};

namespace detail {

/// An indicator binary y that only gates one continuous x through  x <= U y.
/// Inside relaxations y is replaced by x / U: with a nonnegative objective
/// coefficient and only packing-type appearances elsewhere, the smallest
/// admissible y is optimal, so the substitution preserves the relaxation bound
/// while removing one row and one column per indicator.
struct Indicator {
  int binary = -1;
  int partner = -1;
  double bound = 0.0;
  int vub_row = -1;
};

struct NodeLp {
  SparseMatrix matrix;
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  double offset = 0.0;
  bool trivially_infeasible = false;
};

class Relaxation {
 public:
  explicit Relaxation(const LinearProgram& lp) : lp_(lp) {
    const int nv = lp.num_variables();
    const auto& cons = lp.constraints();
    indicator_of_.assign(static_cast<std::size_t>(nv), -1);
    std::vector<std::vector<int>> rows_of(static_cast<std::size_t>(nv));
    for (int r = 0; r < static_cast<int>(cons.size()); ++r)
      for (const auto& t : cons[static_cast<std::size_t>(r)].terms) rows_of[static_cast<std::size_t>(t.var)].push_back(r);

    std::vector<char> is_partner(static_cast<std::size_t>(nv), 0);
    for (int y = 0; y < nv; ++y) {
      const auto& v = lp.variable(y);
      if (v.type != VarType::Binary || v.lower != 0.0 || v.upper != 1.0 || v.objective < 0.0) continue;
      Indicator ind;
      ind.binary = y;
      bool ok = true;
      for (int r : rows_of[static_cast<std::size_t>(y)]) {
        const auto& c = cons[static_cast<std::size_t>(r)];
        const double a = coef_in(c, y);
        if (c.terms.size() == 2 && c.rhs == 0.0 && c.cmp != Comparator::Equal && ind.vub_row < 0) {
          const Term& other = c.terms[0].var == y ? c.terms[1] : c.terms[0];
          const double sign = c.cmp == Comparator::LessEqual ? 1.0 : -1.0;
          const double ax = sign * other.coef, ay = sign * a;
          const auto& xv = lp.variable(other.var);
          if (ax > 0 && ay < 0 && xv.type == VarType::Continuous && xv.lower >= 0.0 &&
              !is_partner[static_cast<std::size_t>(other.var)]) {
            ind.partner = other.var;
            ind.bound = -ay / ax;
            ind.vub_row = r;
            continue;
          }
        }
        const bool packing = (c.cmp == Comparator::LessEqual && a >= 0) || (c.cmp == Comparator::GreaterEqual && a <= 0);
        if (!packing) ok = false;
      }
      if (!ok || ind.vub_row < 0) continue;
      is_partner[static_cast<std::size_t>(ind.partner)] = 1;
      indicator_of_[static_cast<std::size_t>(y)] = static_cast<int>(indicators_.size());
      indicators_.push_back(ind);
    }

    col_of_.assign(static_cast<std::size_t>(nv), -1);
    for (int j = 0; j < nv; ++j)
      if (indicator_of_[static_cast<std::size_t>(j)] < 0) col_of_[static_cast<std::size_t>(j)] = ncols_++;
    std::vector<char> dropped(cons.size(), 0);
    for (const auto& ind : indicators_) dropped[static_cast<std::size_t>(ind.vub_row)] = 1;
    row_of_.assign(cons.size(), -1);
    for (std::size_t r = 0; r < cons.size(); ++r)
      if (!dropped[r]) row_of_[r] = nrows_++;
    for (int j = 0; j < nv; ++j)
      if (lp.variable(j).type == VarType::Binary) binaries_.push_back(j);
    // at-most-one rows over binaries, kept in term order
    for (const auto& c : cons) {
      if (c.cmp != Comparator::LessEqual || c.rhs != 1.0 || c.terms.size() < 2) continue;
      std::vector<int> g;
      for (const auto& t : c.terms)
        if (t.coef == 1.0 && lp.variable(t.var).type == VarType::Binary) g.push_back(t.var);
      if (g.size() == c.terms.size()) groups_.push_back(std::move(g));
    }
  }

  int rows() const noexcept { return nrows_; }
  int cols() const noexcept { return ncols_; }
  const std::vector<int>& binaries() const noexcept { return binaries_; }
  const std::vector<std::vector<int>>& groups() const noexcept { return groups_; }
  std::size_t num_indicators() const noexcept { return indicators_.size(); }

  /// fix[var] in {-1 free, 0, 1}; only binaries are ever fixed.
  NodeLp build(const std::vector<std::int8_t>& fix) const {
    const auto& vars = lp_.variables();
    const auto& cons = lp_.constraints();
    NodeLp node;
    node.cost.assign(static_cast<std::size_t>(ncols_), 0.0);
    node.lower.assign(static_cast<std::size_t>(ncols_ + nrows_), 0.0);
    node.upper.assign(static_cast<std::size_t>(ncols_ + nrows_), 0.0);
    node.offset = lp_.objective_offset();

    for (std::size_t j = 0; j < vars.size(); ++j) {
      const int c = col_of_[j];
      if (c < 0) continue;
      double lo = vars[j].lower, hi = vars[j].upper;
      if (vars[j].type == VarType::Binary && fix[j] >= 0) lo = hi = fix[j];
      node.lower[static_cast<std::size_t>(c)] = lo;
      node.upper[static_cast<std::size_t>(c)] = hi;
      node.cost[static_cast<std::size_t>(c)] += vars[j].objective;
    }
    for (const auto& ind : indicators_) {
      const auto pc = static_cast<std::size_t>(col_of_[static_cast<std::size_t>(ind.partner)]);
      const int f = fix[static_cast<std::size_t>(ind.binary)];
      const double cy = vars[static_cast<std::size_t>(ind.binary)].objective;
      if (f == 0) {
        node.upper[pc] = std::min(node.upper[pc], 0.0);
      } else {
        node.upper[pc] = std::min(node.upper[pc], ind.bound);
        if (f == 1) node.offset += cy;
        else node.cost[pc] += cy / ind.bound;
      }
    }

    std::vector<std::vector<std::pair<int, double>>> columns(static_cast<std::size_t>(ncols_));
    for (std::size_t r = 0; r < cons.size(); ++r) {
      const int row = row_of_[r];
      if (row < 0) continue;
      double shift = 0.0;
      for (const auto& t : cons[r].terms) {
        const int ii = indicator_of_[static_cast<std::size_t>(t.var)];
        if (ii < 0) {
          add_entry(columns[static_cast<std::size_t>(col_of_[static_cast<std::size_t>(t.var)])], row, t.coef);
          continue;
        }
        const auto& ind = indicators_[static_cast<std::size_t>(ii)];
        const int f = fix[static_cast<std::size_t>(ind.binary)];
        if (f == 1) shift += t.coef;
        else if (f < 0)
          add_entry(columns[static_cast<std::size_t>(col_of_[static_cast<std::size_t>(ind.partner)])], row,
                    t.coef / ind.bound);
      }
      const double rhs = cons[r].rhs - shift;
      const auto li = static_cast<std::size_t>(ncols_ + row);
      node.lower[li] = cons[r].cmp == Comparator::LessEqual ? -kInf : rhs;
      node.upper[li] = cons[r].cmp == Comparator::GreaterEqual ? kInf : rhs;
    }
    node.matrix.rows = nrows_;
    for (auto& col : columns) node.matrix.push_column(col);
    for (std::size_t j = 0; j < node.lower.size(); ++j)
      if (node.lower[j] > node.upper[j] + 1e-12) node.trivially_infeasible = true;
    return node;
  }

  /// Maps a node solution back to the original variables; free indicators round up.
  std::vector<double> lift(std::span<const double> xs, const std::vector<std::int8_t>& fix) const {
    std::vector<double> x(lp_.variables().size(), 0.0);
    for (std::size_t j = 0; j < x.size(); ++j)
      if (col_of_[j] >= 0) x[j] = xs[static_cast<std::size_t>(col_of_[j])];
    for (const auto& ind : indicators_) {
      const auto y = static_cast<std::size_t>(ind.binary);
      x[y] = fix[y] >= 0 ? fix[y] : (x[static_cast<std::size_t>(ind.partner)] > 1e-9 ? 1.0 : 0.0);
    }
    return x;
  }

  /// Relaxation value of a binary: its column value, or x / U for an indicator.
  double relaxed_value(int var, std::span<const double> xs, const std::vector<std::int8_t>& fix) const {
    const auto v = static_cast<std::size_t>(var);
    if (fix[v] >= 0) return fix[v];
    const int ii = indicator_of_[v];
    if (ii < 0) return xs[static_cast<std::size_t>(col_of_[v])];
    const auto& ind = indicators_[static_cast<std::size_t>(ii)];
    return xs[static_cast<std::size_t>(col_of_[static_cast<std::size_t>(ind.partner)])] / ind.bound;
  }

 private:
  static double coef_in(const Constraint& c, int var) {
    for (const auto& t : c.terms)
      if (t.var == var) return t.coef;
    return 0.0;
  }

  static void add_entry(std::vector<std::pair<int, double>>& col, int row, double v) {
    if (!col.empty() && col.back().first == row) col.back().second += v;
    else col.emplace_back(row, v);
  }

  const LinearProgram& lp_;
  std::vector<Indicator> indicators_;
  std::vector<int> indicator_of_;
  std::vector<int> col_of_;
  std::vector<int> row_of_;
  std::vector<int> binaries_;
  std::vector<std::vector<int>> groups_;
  int ncols_ = 0;
  int nrows_ = 0;
};

struct NodeResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = kInf;
  std::vector<double> x;
  std::shared_ptr<const Basis> basis;
  long iterations = 0;
};

inline NodeResult solve_node(const Relaxation& rel, const std::vector<std::int8_t>& fix, const Basis* warm,
                             std::chrono::steady_clock::time_point deadline) {
  NodeLp node = rel.build(fix);
  NodeResult out;
  if (node.trivially_infeasible) return out;
  const double offset = node.offset;
  BoundedSimplex simplex(std::move(node.matrix), std::move(node.cost));
  simplex.set_bounds(std::move(node.lower), std::move(node.upper));
  out.status = simplex.solve(warm, deadline);
  out.iterations = simplex.iterations();
  if (out.status == LpStatus::Optimal) {
    out.objective = simplex.objective() + offset;
    auto v = simplex.values();
    out.x.assign(v.begin(), v.begin() + rel.cols());
    out.basis = std::make_shared<Basis>(simplex.basis());
  }
  return out;
}

struct OpenNode {
  double bound;
  long id;
  std::vector<std::int8_t> fix;
  std::shared_ptr<const Basis> basis;
};

struct WorseBound {
  bool operator()(const OpenNode& a, const OpenNode& b) const {
    return a.bound != b.bound ? a.bound > b.bound : a.id > b.id;
  }
};

}  // namespace detail

/// Exact simplex for pure LPs; best-first branch-and-bound on LP relaxations
/// (at-most-one groups split in halves, else most fractional binary) for mixed programs, stopping at the requested gap.
/// Deterministic for identical input, up to the time limit.
inline Solution solve(const LinearProgram& lp, const SolveOptions& opt = {}) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const auto deadline = t0 + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(opt.time_limit));
  lp.validate();

  detail::Relaxation rel(lp);
  const auto& binaries = rel.binaries();
  std::vector<std::int8_t> root_fix(static_cast<std::size_t>(lp.num_variables()), -1);
  for (int b : binaries) {
    const auto& v = lp.variable(b);
    if (v.upper < 0.5) root_fix[static_cast<std::size_t>(b)] = 0;
    else if (v.lower > 0.5) root_fix[static_cast<std::size_t>(b)] = 1;
  }

  Solution sol;
  auto finish = [&](Solution& s) -> Solution& {
    s.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    if (s.has_assignment() && !check_assignment(lp, s.values).empty() && s.proven()) s.status = SolveStatus::Limit;
    return s;
  };

  auto root = detail::solve_node(rel, root_fix, nullptr, deadline);
  sol.iterations += root.iterations;
  sol.nodes = 1;
  if (root.status == LpStatus::Infeasible) {
    sol.status = SolveStatus::Infeasible;
    return finish(sol);
  }
  if (root.status == LpStatus::Unbounded) {
    sol.status = SolveStatus::Unbounded;
    return finish(sol);
  }
  if (root.status != LpStatus::Optimal) {
    sol.status = SolveStatus::Limit;
    return finish(sol);
  }

  double incumbent = kInf;
  std::vector<double> best;
  auto tolerance = [&](double inc) { return std::isfinite(inc) ? std::max(opt.gap * std::abs(inc), opt.abs_gap) : 0.0; };

  // Returns true when the node needs no branching.
  auto try_incumbent = [&](const detail::NodeResult& r, const std::vector<std::int8_t>& fix) {
    auto x = rel.lift(r.x, fix);
    for (int b : binaries) {
      const auto bs = static_cast<std::size_t>(b);
      if (std::abs(x[bs] - std::round(x[bs])) > kIntegralityTol) return false;
      x[bs] = std::round(x[bs]);
    }
    if (!check_assignment(lp, x).empty()) return false;
    const double z = lp.evaluate_objective(x);
    if (z < incumbent) {
      incumbent = z;
      best = std::move(x);
    }
    return z <= r.objective + 1e-9;
  };

  auto pick_branch = [&](const detail::NodeResult& r, const std::vector<std::int8_t>& fix, bool largest) {
    int var = -1;
    double score = -1.0;
    for (int b : binaries) {
      if (fix[static_cast<std::size_t>(b)] >= 0) continue;
      const double v = rel.relaxed_value(b, r.x, fix);
      if (v <= kIntegralityTol || v >= 1.0 - kIntegralityTol) continue;
      const double s = largest ? v : 0.5 - std::abs(v - 0.5);
      if (s > score) {
        score = s;
        var = b;
      }
    }
    if (var < 0)  // integral relaxation values but the rounded point failed: branch on any active free binary
      for (int b : binaries)
        if (fix[static_cast<std::size_t>(b)] < 0 && rel.relaxed_value(b, r.x, fix) > 1e-9) return b;
    return var;
  };

  if (binaries.empty()) {
    sol.status = SolveStatus::Optimal;
    sol.values = rel.lift(root.x, root_fix);
    sol.objective = lp.evaluate_objective(sol.values);
    return finish(sol);
  }

  if (!try_incumbent(root, root_fix)) {
    // Dive: push the largest fractional binary to one until integral.
    auto fix = root_fix;
    detail::NodeResult cur = root;
    for (std::size_t step = 0; step < binaries.size() && clock::now() < deadline; ++step) {
      const int v = pick_branch(cur, fix, true);
      if (v < 0) break;
      fix[static_cast<std::size_t>(v)] = 1;
      auto next = detail::solve_node(rel, fix, cur.basis.get(), deadline);
      sol.iterations += next.iterations;
      ++sol.nodes;
      if (next.status != LpStatus::Optimal || next.objective >= incumbent) {
        fix[static_cast<std::size_t>(v)] = 0;
        next = detail::solve_node(rel, fix, cur.basis.get(), deadline);
        sol.iterations += next.iterations;
        ++sol.nodes;
        if (next.status != LpStatus::Optimal) break;
      }
      cur = std::move(next);
      if (try_incumbent(cur, fix)) break;
    }
  } else {
    sol.status = SolveStatus::Optimal;
    sol.values = std::move(best);
    sol.objective = incumbent;
    return finish(sol);
  }

  std::priority_queue<detail::OpenNode, std::vector<detail::OpenNode>, detail::WorseBound> open;
  long next_id = 0;
  open.push({root.objective, next_id++, root_fix, root.basis});
  double lower_bound = root.objective;
  bool limit_hit = false;

  while (!open.empty()) {
    lower_bound = open.top().bound;
    if (incumbent - lower_bound <= tolerance(incumbent)) break;
    if (clock::now() > deadline || sol.nodes >= opt.node_limit) {
      limit_hit = true;
      break;
    }
    detail::OpenNode node = open.top();
    open.pop();
    detail::NodeResult r;
    if (node.id == 0) {
      r = root;
    } else {
      r = detail::solve_node(rel, node.fix, node.basis.get(), deadline);
      sol.iterations += r.iterations;
      ++sol.nodes;
    }
    if (r.status == LpStatus::TimeLimit) {
      limit_hit = true;
      open.push(std::move(node));
      break;
    }
    if (r.status != LpStatus::Optimal) continue;
    if (r.objective >= incumbent - tolerance(incumbent)) continue;
    if (try_incumbent(r, node.fix)) continue;
    // Spread over several members of an at-most-one group: split the ordered
    // members at the relaxed-weight median, zeroing one side per child.
    int gbest = -1;
    std::size_t split = 0;
    double gscore = kIntegralityTol;
    for (std::size_t g = 0; g < rel.groups().size(); ++g) {
      const auto& members = rel.groups()[g];
      double total = 0.0, top = 0.0;
      int active = 0;
      for (int b : members) {
        const double v = rel.relaxed_value(b, r.x, node.fix);
        if (v > kIntegralityTol) ++active;
        total += v;
        top = std::max(top, v);
      }
      if (active < 2 || total - top <= gscore) continue;
      double run = 0.0;
      std::size_t m = 0;
      for (; m + 1 < members.size(); ++m) {
        run += rel.relaxed_value(members[m], r.x, node.fix);
        if (run >= 0.5 * total) break;
      }
      // both sides must carry weight
      double left = 0.0;
      for (std::size_t i = 0; i <= m; ++i) left += rel.relaxed_value(members[i], r.x, node.fix);
      if (left <= kIntegralityTol) continue;
      if (total - left <= kIntegralityTol) {
        if (m == 0) continue;
        --m;
      }
      gscore = total - top;
      gbest = static_cast<int>(g);
      split = m;
    }
    if (gbest >= 0) {
      const auto& members = rel.groups()[static_cast<std::size_t>(gbest)];
      for (int side = 0; side < 2; ++side) {
        auto fix = node.fix;
        for (std::size_t i = 0; i < members.size(); ++i) {
          const bool in_left = i <= split;
          auto& f = fix[static_cast<std::size_t>(members[i])];
          if (in_left == (side == 1) && f < 0) f = 0;
        }
        open.push({r.objective, next_id++, std::move(fix), r.basis});
      }
      continue;
    }
    const int v = pick_branch(r, node.fix, false);
    if (v < 0) continue;
    for (std::int8_t value : {std::int8_t{0}, std::int8_t{1}}) {
      auto fix = node.fix;
      fix[static_cast<std::size_t>(v)] = value;
      open.push({r.objective, next_id++, std::move(fix), r.basis});
    }
  }
  if (open.empty()) lower_bound = incumbent;

  if (best.empty()) {
    sol.status = limit_hit ? SolveStatus::Limit : SolveStatus::Infeasible;
    return finish(sol);
  }
  sol.values = std::move(best);
  sol.objective = incumbent;
  sol.gap = std::max(0.0, incumbent - lower_bound) / std::max(std::abs(incumbent), 1e-10);
  if (limit_hit) sol.status = SolveStatus::Limit;
  else sol.status = incumbent - lower_bound <= 1e-9 ? SolveStatus::Optimal : SolveStatus::GapFeasible;
  return finish(sol);
}

}  // namespace flexbench::mathprog
