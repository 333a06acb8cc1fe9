#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "flexbench/errors.hpp"
#include "flexbench/rng.hpp"
#include "flexbench/scenario/boxcox.hpp"

namespace flexbench {

inline constexpr int kHoursPerDay = 24;

/// ARMA(p,q) on the Box-Cox transformed series after removing an hour-of-day
/// level (24 indicator regressors).
struct ArmaxModel {
  std::vector<double> ar;   // phi_1..phi_p
  std::vector<double> ma;   // theta_1..theta_q
  std::vector<double> exo;  // one level per hour of day, transformed units
  double noise_std = 1.0;
  BoxCoxTransform boxcox;
  double scale = 1.0;  // standard deviation of the raw series

  std::size_t memory() const noexcept { return std::max(ar.size(), ma.size()); }

  friend bool operator==(const ArmaxModel&, const ArmaxModel&) = default;
};

namespace detail {

inline Eigen::VectorXd least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                     const std::vector<std::string>& names) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < x.cols()) {
    const auto bad = qr.colsPermutation().indices()[qr.rank()];
    throw FitError("singular regression: regressor '" + names[static_cast<std::size_t>(bad)] +
                   "' is linearly dependent on the others");
  }
  return qr.solve(y);
}

/// Forward transform that tolerates values below the fitted domain.
inline double boxcox_forward_clamped(double x, const BoxCoxTransform& tf) {
  return boxcox_forward(std::max(x, 1e-9 - tf.shift), tf);
}

}  // namespace detail

/// Hannan-Rissanen fit: a long autoregression supplies innovation estimates,
/// then AR and MA coefficients come from one joint least-squares regression.
inline ArmaxModel fit_armax(std::span<const double> history, std::span<const int> hour_of_day, int p = 2, int q = 1) {
  if (p < 1 || q < 0 || p > 4 || q > 4) throw std::invalid_argument("ARMAX orders must satisfy 1 <= p <= 4, 0 <= q <= 4");
  if (history.size() != hour_of_day.size()) throw std::invalid_argument("one hour label per observation");
  const std::size_t n = history.size();
  if (n < static_cast<std::size_t>(50 * (p + q + 1)))
    throw FitError("ARMAX fit needs at least " + std::to_string(50 * (p + q + 1)) + " points");

  ArmaxModel model;
  model.boxcox = fit_boxcox(history);
  double mean = 0.0;
  for (double x : history) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : history) ss += (x - mean) * (x - mean);
  model.scale = std::sqrt(ss / static_cast<double>(n - 1));

  std::vector<double> y(n);
  for (std::size_t t = 0; t < n; ++t) y[t] = boxcox_forward(history[t], model.boxcox);

  // Least squares on 24 indicators reduces to per-hour means.
  std::vector<double> sum(kHoursPerDay, 0.0);
  std::vector<int> count(kHoursPerDay, 0);
  for (std::size_t t = 0; t < n; ++t) {
    const int h = hour_of_day[t];
    if (h < 0 || h >= kHoursPerDay) throw std::invalid_argument("hour label outside [0,24)");
    sum[static_cast<std::size_t>(h)] += y[t];
    ++count[static_cast<std::size_t>(h)];
  }
  model.exo.resize(kHoursPerDay);
  for (int h = 0; h < kHoursPerDay; ++h) {
    if (count[static_cast<std::size_t>(h)] == 0)
      throw FitError("singular regression: regressor 'hour_of_day=" + std::to_string(h) + "' has no observations");
    model.exo[static_cast<std::size_t>(h)] = sum[static_cast<std::size_t>(h)] / count[static_cast<std::size_t>(h)];
  }
  std::vector<double> z(n);
  double zz = 0.0, yy = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    z[t] = y[t] - model.exo[static_cast<std::size_t>(hour_of_day[t])];
    zz += z[t] * z[t];
    yy += y[t] * y[t];
  }
  model.ar.assign(static_cast<std::size_t>(p), 0.0);
  model.ma.assign(static_cast<std::size_t>(q), 0.0);
  if (zz <= 1e-24 * std::max(1.0, yy)) {
    model.noise_std = 1e-12;  // deterministic series
    return model;
  }

  std::vector<double> e(n, 0.0);
  std::size_t start = static_cast<std::size_t>(p);
  if (q > 0) {
    const int m = std::clamp(static_cast<int>(n / 50), p + q + 1, 20);
    const auto rows = static_cast<Eigen::Index>(n - static_cast<std::size_t>(m));
    Eigen::MatrixXd x(rows, m);
    Eigen::VectorXd target(rows);
    std::vector<std::string> names;
    for (int i = 1; i <= m; ++i) names.push_back("long_ar_lag_" + std::to_string(i));
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto t = static_cast<std::size_t>(r) + static_cast<std::size_t>(m);
      target(r) = z[t];
      for (int i = 1; i <= m; ++i) x(r, i - 1) = z[t - static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd phi = detail::least_squares(x, target, names);
    const Eigen::VectorXd resid = target - x * phi;
    for (Eigen::Index r = 0; r < rows; ++r) e[static_cast<std::size_t>(r) + static_cast<std::size_t>(m)] = resid(r);
    start = static_cast<std::size_t>(m + std::max(p, q));
  }

  const auto rows = static_cast<Eigen::Index>(n - start);
  Eigen::MatrixXd x(rows, p + q);
  Eigen::VectorXd target(rows);
  std::vector<std::string> names;
  for (int i = 1; i <= p; ++i) names.push_back("ar_lag_" + std::to_string(i));
  for (int j = 1; j <= q; ++j) names.push_back("ma_lag_" + std::to_string(j));
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::size_t t = start + static_cast<std::size_t>(r);
    target(r) = z[t];
    for (int i = 1; i <= p; ++i) x(r, i - 1) = z[t - static_cast<std::size_t>(i)];
    for (int j = 1; j <= q; ++j) x(r, p + j - 1) = e[t - static_cast<std::size_t>(j)];
  }
  const Eigen::VectorXd beta = detail::least_squares(x, target, names);
  for (int i = 0; i < p; ++i) model.ar[static_cast<std::size_t>(i)] = beta(i);
  for (int j = 0; j < q; ++j) model.ma[static_cast<std::size_t>(j)] = beta(p + j);
  const Eigen::VectorXd resid = target - x * beta;
  const double dof = static_cast<double>(std::max<Eigen::Index>(1, rows - (p + q)));
  model.noise_std = std::max(std::sqrt(resid.squaredNorm() / dof), 1e-12);
  return model;
}

/// Recent transformed deviations and innovations, enough to continue the recursion.
struct ArmaxState {
  std::vector<double> z;  // oldest first
  std::vector<double> e;
};

/// Filters the conditioning series through the model to recover innovations.
inline ArmaxState armax_state(const ArmaxModel& m, std::span<const double> series, std::span<const int> hours) {
  if (series.size() != hours.size()) throw std::invalid_argument("one hour label per observation");
  if (series.size() < m.memory()) throw std::invalid_argument("conditioning series shorter than model memory");
  ArmaxState s;
  s.z.resize(series.size());
  s.e.assign(series.size(), 0.0);
  for (std::size_t t = 0; t < series.size(); ++t) {
    s.z[t] = detail::boxcox_forward_clamped(series[t], m.boxcox) - m.exo[static_cast<std::size_t>(hours[t])];
    if (t < m.memory()) continue;
    double pred = 0.0;
    for (std::size_t i = 0; i < m.ar.size(); ++i) pred += m.ar[i] * s.z[t - 1 - i];
    for (std::size_t j = 0; j < m.ma.size(); ++j) pred += m.ma[j] * s.e[t - 1 - j];
    s.e[t] = s.z[t] - pred;
  }
  return s;
}

/// Continues the process over `future_hours.size()` steps, in raw units.
inline std::vector<double> simulate_armax(const ArmaxModel& m, const ArmaxState& state,
                                          std::span<const int> future_hours, Rng& rng) {
  const std::size_t mem = m.memory();
  std::vector<double> z(state.z.end() - static_cast<std::ptrdiff_t>(std::min(mem, state.z.size())), state.z.end());
  std::vector<double> e(state.e.end() - static_cast<std::ptrdiff_t>(std::min(mem, state.e.size())), state.e.end());
  std::vector<double> out;
  out.reserve(future_hours.size());
  for (int h : future_hours) {
    const double eps = m.noise_std * rng.normal();
    double v = eps;
    for (std::size_t i = 0; i < m.ar.size(); ++i) v += m.ar[i] * z[z.size() - 1 - i];
    for (std::size_t j = 0; j < m.ma.size(); ++j) v += m.ma[j] * e[e.size() - 1 - j];
    z.push_back(v);
    e.push_back(eps);
    out.push_back(boxcox_inverse_clamped(v + m.exo[static_cast<std::size_t>(h)], m.boxcox));
  }
  return out;
}

inline std::vector<double> simulate_armax(const ArmaxModel& m, std::span<const double> seed_history,
                                          std::span<const int> seed_hours, std::span<const int> future_hours,
                                          Rng& rng) {
  return simulate_armax(m, armax_state(m, seed_history, seed_hours), future_hours, rng);
}

}  // namespace flexbench
