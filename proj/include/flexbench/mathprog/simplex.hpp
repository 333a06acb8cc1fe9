#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace flexbench::mathprog {

/// Compressed sparse column matrix.
struct SparseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> start{0};
  std::vector<int> index;
  std::vector<double> value;

  void push_column(std::span<const std::pair<int, double>> entries) {
    for (const auto& [r, v] : entries) {
      index.push_back(r);
      value.push_back(v);
    }
    start.push_back(static_cast<int>(index.size()));
    ++cols;
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, TimeLimit };

/// Basis header plus the bound status of every column (structural then logical).
struct Basis {
  std::vector<int> head;
  std::vector<std::uint8_t> status;
  bool empty() const noexcept { return head.empty(); }
};

/// Bounded-variable primal simplex on  A x - s = 0,  l <= (x, s) <= u,  min c'x.
///
/// Each row carries a logical column s_i = a_i x whose bounds encode the row
/// sense, so the slack basis B = -I is always a valid start. Phase 1 minimises
/// the sum of bound violations of basic variables (composite objective), which
/// lets the solver restart from any basis, e.g. a branch-and-bound parent.
/// The basis inverse is kept dense and updated in product form with periodic
/// reinversion. Dantzig pricing, switching to Bland's rule on degenerate stalls.
class BoundedSimplex {
 public:
  enum : std::uint8_t { kBasic = 0, kAtLower = 1, kAtUpper = 2, kFreeZero = 3 };

  BoundedSimplex(SparseMatrix a, std::vector<double> cost)
      : a_(std::move(a)), m_(a_.rows), n_(a_.cols), cost_(std::move(cost)) {
    if (static_cast<int>(cost_.size()) != n_) throw std::invalid_argument("cost size mismatch");
    lo_.assign(static_cast<std::size_t>(n_ + m_), 0.0);
    up_.assign(static_cast<std::size_t>(n_ + m_), 0.0);
  }

  int rows() const noexcept { return m_; }
  int cols() const noexcept { return n_; }

  /// Bounds for all n + m columns.
  void set_bounds(std::vector<double> lower, std::vector<double> upper) {
    if (lower.size() != static_cast<std::size_t>(n_ + m_) || upper.size() != lower.size())
      throw std::invalid_argument("bounds size mismatch");
    lo_ = std::move(lower);
    up_ = std::move(upper);
  }

  LpStatus solve(const Basis* warm = nullptr,
                 std::chrono::steady_clock::time_point deadline = std::chrono::steady_clock::time_point::max(),
                 long max_iterations = 200000) {
    start(warm);
    int degenerate_run = 0;
    bool bland = false;
    int since_refactor = 0;
    long confirmed_at = -1;
    int stalls = 0;
    const auto N = static_cast<std::size_t>(n_ + m_);
    std::vector<double> cb(static_cast<std::size_t>(m_)), pi(static_cast<std::size_t>(m_)),
        alpha(static_cast<std::size_t>(m_));
    for (;;) {
      if (iterations_ >= max_iterations) return LpStatus::IterationLimit;
      if ((iterations_ & 31) == 0 && std::chrono::steady_clock::now() > deadline) return LpStatus::TimeLimit;
      if (since_refactor >= kRefactorEvery) {
        refactor_or_reset();
        since_refactor = 0;
      }

      bool phase1 = false;
      for (int i = 0; i < m_; ++i) {
        const auto j = static_cast<std::size_t>(head_[static_cast<std::size_t>(i)]);
        double c = 0.0;
        if (x_[j] < lo_[j] - feas_tol(lo_[j])) c = -1.0;
        else if (x_[j] > up_[j] + feas_tol(up_[j])) c = 1.0;
        cb[static_cast<std::size_t>(i)] = c;
        phase1 = phase1 || c != 0.0;
      }
      if (!phase1)
        for (int i = 0; i < m_; ++i) cb[static_cast<std::size_t>(i)] = cost_of(head_[static_cast<std::size_t>(i)]);

      std::fill(pi.begin(), pi.end(), 0.0);
      for (int i = 0; i < m_; ++i) {
        const double c = cb[static_cast<std::size_t>(i)];
        if (c == 0.0) continue;
        const double* row = &binv_[static_cast<std::size_t>(i) * static_cast<std::size_t>(m_)];
        for (int k = 0; k < m_; ++k) pi[static_cast<std::size_t>(k)] += c * row[k];
      }

      int q = -1;
      double dq = 0.0, best = 0.0;
      for (std::size_t j = 0; j < N; ++j) {
        const auto st = status_[j];
        if (st == kBasic || lo_[j] == up_[j]) continue;
        const double d = (phase1 ? 0.0 : cost_of(static_cast<int>(j))) - column_dot(static_cast<int>(j), pi);
        const bool inc = d < -kDualTol && (st == kAtLower || st == kFreeZero);
        const bool dec = d > kDualTol && (st == kAtUpper || st == kFreeZero);
        if (!inc && !dec) continue;
        if (bland) {
          q = static_cast<int>(j);
          dq = d;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          q = static_cast<int>(j);
          dq = d;
        }
      }

      if (q < 0) {
        // Confirm against a fresh factorisation before declaring the outcome.
        if (confirmed_at == iterations_) return phase1 ? LpStatus::Infeasible : LpStatus::Optimal;
        refactor_or_reset();
        since_refactor = 0;
        confirmed_at = iterations_;
        continue;
      }

      const double dir = dq < 0 ? 1.0 : -1.0;
      compute_column(q, alpha);

      const auto qs = static_cast<std::size_t>(q);
      double theta = kInfinity;
      int leave = -1;
      bool leave_upper = false;
      if (std::isfinite(lo_[qs]) && std::isfinite(up_[qs])) theta = up_[qs] - lo_[qs];
      for (int i = 0; i < m_; ++i) {
        const double a = alpha[static_cast<std::size_t>(i)];
        if (std::abs(a) < kPivotTol) continue;
        const double r = -dir * a;
        const auto j = static_cast<std::size_t>(head_[static_cast<std::size_t>(i)]);
        const double xi = x_[j];
        double limit;
        bool to_upper;
        if (xi < lo_[j] - feas_tol(lo_[j])) {
          if (r <= 0) continue;
          limit = (lo_[j] - xi) / r;
          to_upper = false;
        } else if (xi > up_[j] + feas_tol(up_[j])) {
          if (r >= 0) continue;
          limit = (up_[j] - xi) / r;
          to_upper = true;
        } else if (r > 0) {
          if (!std::isfinite(up_[j])) continue;
          limit = (up_[j] - xi) / r;
          to_upper = true;
        } else {
          if (!std::isfinite(lo_[j])) continue;
          limit = (lo_[j] - xi) / r;
          to_upper = false;
        }
        limit = std::max(limit, 0.0);
        bool take = limit < theta - kRatioTieTol;
        if (!take && limit <= theta + kRatioTieTol && leave >= 0) {
          const auto lp = static_cast<std::size_t>(leave);
          take = bland ? head_[static_cast<std::size_t>(i)] < head_[lp]
                       : std::abs(a) > std::abs(alpha[lp]);
        } else if (!take && limit <= theta + kRatioTieTol && leave < 0) {
          take = true;  // prefer a basis change over a bound flip on ties
        }
        if (take) {
          theta = limit;
          leave = i;
          leave_upper = to_upper;
        }
      }

      if (!std::isfinite(theta)) {
        if (!phase1) return LpStatus::Unbounded;
        refactor_or_reset();
        since_refactor = 0;
        if (++stalls > 5) return LpStatus::Infeasible;
        continue;
      }

      ++iterations_;
      ++since_refactor;
      x_[qs] += dir * theta;
      for (int i = 0; i < m_; ++i) {
        const double a = alpha[static_cast<std::size_t>(i)];
        if (a != 0.0) x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(i)])] -= dir * theta * a;
      }
      if (leave < 0) {
        const bool to_up = dir > 0;
        status_[qs] = to_up ? kAtUpper : kAtLower;
        x_[qs] = to_up ? up_[qs] : lo_[qs];
      } else {
        const auto jl = static_cast<std::size_t>(head_[static_cast<std::size_t>(leave)]);
        x_[jl] = leave_upper ? up_[jl] : lo_[jl];
        status_[jl] = leave_upper ? kAtUpper : kAtLower;
        pivot(leave, alpha);
        head_[static_cast<std::size_t>(leave)] = q;
        status_[qs] = kBasic;
      }

      if (theta <= 1e-12) {
        if (++degenerate_run > kDegenerateLimit) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
    }
  }

  double objective() const {
    double z = 0.0;
    for (int j = 0; j < n_; ++j) z += cost_[static_cast<std::size_t>(j)] * x_[static_cast<std::size_t>(j)];
    return z;
  }

  /// Values of all n + m columns (structural first).
  std::span<const double> values() const noexcept { return x_; }
  Basis basis() const { return {head_, status_}; }
  long iterations() const noexcept { return iterations_; }

 private:
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();
  static constexpr double kDualTol = 1e-9;
  static constexpr double kPivotTol = 1e-9;
  static constexpr double kRatioTieTol = 1e-12;
  static constexpr int kRefactorEvery = 60;
  static constexpr int kDegenerateLimit = 40;

  static double feas_tol(double bound) { return 1e-9 * (1.0 + (std::isfinite(bound) ? std::abs(bound) : 0.0)); }

  double cost_of(int j) const { return j < n_ ? cost_[static_cast<std::size_t>(j)] : 0.0; }

  double column_dot(int j, const std::vector<double>& v) const {
    if (j >= n_) return -v[static_cast<std::size_t>(j - n_)];
    double s = 0.0;
    for (int p = a_.start[static_cast<std::size_t>(j)]; p < a_.start[static_cast<std::size_t>(j) + 1]; ++p)
      s += a_.value[static_cast<std::size_t>(p)] * v[static_cast<std::size_t>(a_.index[static_cast<std::size_t>(p)])];
    return s;
  }

  void compute_column(int q, std::vector<double>& alpha) const {
    std::fill(alpha.begin(), alpha.end(), 0.0);
    const auto m = static_cast<std::size_t>(m_);
    auto axpy = [&](int r, double v) {
      for (std::size_t i = 0; i < m; ++i) alpha[i] += binv_[i * m + static_cast<std::size_t>(r)] * v;
    };
    if (q >= n_) {
      axpy(q - n_, -1.0);
      return;
    }
    for (int p = a_.start[static_cast<std::size_t>(q)]; p < a_.start[static_cast<std::size_t>(q) + 1]; ++p)
      axpy(a_.index[static_cast<std::size_t>(p)], a_.value[static_cast<std::size_t>(p)]);
  }

  void pivot(int p, const std::vector<double>& alpha) {
    const auto m = static_cast<std::size_t>(m_);
    const auto ps = static_cast<std::size_t>(p);
    double* prow = &binv_[ps * m];
    const double inv = 1.0 / alpha[ps];
    for (std::size_t k = 0; k < m; ++k) prow[k] *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == ps) continue;
      const double f = alpha[i];
      if (f == 0.0) continue;
      double* row = &binv_[i * m];
      for (std::size_t k = 0; k < m; ++k) row[k] -= f * prow[k];
    }
  }

  void place_nonbasic(std::size_t j, std::uint8_t wanted) {
    const bool lo_ok = std::isfinite(lo_[j]), up_ok = std::isfinite(up_[j]);
    if (wanted == kAtUpper && up_ok) {
      status_[j] = kAtUpper;
      x_[j] = up_[j];
    } else if (lo_ok) {
      status_[j] = kAtLower;
      x_[j] = lo_[j];
    } else if (up_ok) {
      status_[j] = kAtUpper;
      x_[j] = up_[j];
    } else {
      status_[j] = kFreeZero;
      x_[j] = 0.0;
    }
  }

  void cold_basis() {
    const auto N = static_cast<std::size_t>(n_ + m_);
    head_.resize(static_cast<std::size_t>(m_));
    status_.assign(N, kAtLower);
    x_.assign(N, 0.0);
    for (int i = 0; i < m_; ++i) {
      head_[static_cast<std::size_t>(i)] = n_ + i;
      status_[static_cast<std::size_t>(n_ + i)] = kBasic;
    }
    for (std::size_t j = 0; j < static_cast<std::size_t>(n_); ++j) place_nonbasic(j, kAtLower);
  }

  void start(const Basis* warm) {
    iterations_ = 0;
    const auto N = static_cast<std::size_t>(n_ + m_);
    bool ok = false;
    if (warm && warm->head.size() == static_cast<std::size_t>(m_) && warm->status.size() == N) {
      head_ = warm->head;
      status_ = warm->status;
      x_.assign(N, 0.0);
      for (std::size_t j = 0; j < N; ++j)
        if (status_[j] != kBasic) place_nonbasic(j, status_[j]);
      ok = refactor();
    }
    if (!ok) {
      cold_basis();
      ok = refactor();
    }
    if (!ok) throw std::logic_error("slack basis must be nonsingular");
    compute_basic_values();
  }

  void refactor_or_reset() {
    if (!refactor()) {
      std::vector<std::uint8_t> keep = status_;
      cold_basis();
      for (std::size_t j = 0; j < static_cast<std::size_t>(n_); ++j)
        if (keep[j] == kAtUpper) place_nonbasic(j, kAtUpper);
      refactor();
    }
    compute_basic_values();
  }

  /// Gauss-Jordan inversion of the current basis matrix.
  bool refactor() {
    const auto m = static_cast<std::size_t>(m_);
    std::vector<double> b(m * m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      const int j = head_[k];
      if (j >= n_) {
        b[static_cast<std::size_t>(j - n_) * m + k] = -1.0;
      } else {
        for (int p = a_.start[static_cast<std::size_t>(j)]; p < a_.start[static_cast<std::size_t>(j) + 1]; ++p)
          b[static_cast<std::size_t>(a_.index[static_cast<std::size_t>(p)]) * m + k] +=
              a_.value[static_cast<std::size_t>(p)];
      }
    }
    binv_.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) binv_[i * m + i] = 1.0;
    for (std::size_t c = 0; c < m; ++c) {
      std::size_t piv = c;
      double best = std::abs(b[c * m + c]);
      for (std::size_t r = c + 1; r < m; ++r)
        if (std::abs(b[r * m + c]) > best) {
          best = std::abs(b[r * m + c]);
          piv = r;
        }
      if (best < 1e-11) return false;
      if (piv != c)
        for (std::size_t k = 0; k < m; ++k) {
          std::swap(b[c * m + k], b[piv * m + k]);
          std::swap(binv_[c * m + k], binv_[piv * m + k]);
        }
      const double inv = 1.0 / b[c * m + c];
      for (std::size_t k = 0; k < m; ++k) {
        b[c * m + k] *= inv;
        binv_[c * m + k] *= inv;
      }
      for (std::size_t r = 0; r < m; ++r) {
        if (r == c) continue;
        const double f = b[r * m + c];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < m; ++k) {
          b[r * m + k] -= f * b[c * m + k];
          binv_[r * m + k] -= f * binv_[c * m + k];
        }
      }
    }
    return true;
  }

  void compute_basic_values() {
    const auto m = static_cast<std::size_t>(m_);
    std::vector<double> r(m, 0.0);
    for (int j = 0; j < n_ + m_; ++j) {
      const auto js = static_cast<std::size_t>(j);
      if (status_[js] == kBasic || x_[js] == 0.0) continue;
      if (j >= n_) {
        r[static_cast<std::size_t>(j - n_)] += x_[js];
      } else {
        for (int p = a_.start[js]; p < a_.start[js + 1]; ++p)
          r[static_cast<std::size_t>(a_.index[static_cast<std::size_t>(p)])] -=
              a_.value[static_cast<std::size_t>(p)] * x_[js];
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += binv_[i * m + k] * r[k];
      x_[static_cast<std::size_t>(head_[i])] = s;
    }
  }

  double primal_infeasibility() const {
    double total = 0.0;
    for (int i = 0; i < m_; ++i) {
      const auto j = static_cast<std::size_t>(head_[static_cast<std::size_t>(i)]);
      if (x_[j] < lo_[j] - feas_tol(lo_[j])) total += lo_[j] - x_[j];
      if (x_[j] > up_[j] + feas_tol(up_[j])) total += x_[j] - up_[j];
    }
    return total;
  }

  SparseMatrix a_;
  int m_;
  int n_;
  std::vector<double> cost_;
  std::vector<double> lo_, up_;
  std::vector<double> x_;
  std::vector<int> head_;
  std::vector<std::uint8_t> status_;
  std::vector<double> binv_;
  long iterations_ = 0;
};

}  // namespace flexbench::mathprog
