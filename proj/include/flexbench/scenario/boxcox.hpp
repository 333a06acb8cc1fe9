#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "flexbench/errors.hpp"

namespace flexbench {

struct BoxCoxTransform {
  double lambda = 1.0;
  double shift = 0.0;  // added before transforming so inputs are positive

  friend bool operator==(const BoxCoxTransform&, const BoxCoxTransform&) = default;
};

inline double boxcox_forward(double x, const BoxCoxTransform& tf) {
  const double v = x + tf.shift;
  if (!(v > 0.0)) throw DomainError("Box-Cox input must be positive after shift, got " + std::to_string(v));
  if (tf.lambda == 0.0) return std::log(v);
  return (std::pow(v, tf.lambda) - 1.0) / tf.lambda;
}

inline double boxcox_inverse(double y, const BoxCoxTransform& tf) {
  if (tf.lambda == 0.0) return std::exp(y) - tf.shift;
  const double base = tf.lambda * y + 1.0;
  if (!(base > 0.0)) throw DomainError("Box-Cox inverse undefined for y = " + std::to_string(y));
  return std::pow(base, 1.0 / tf.lambda) - tf.shift;
}

/// Inverse for simulated values, which can leave the image of the forward
/// transform; they are pulled back to its boundary first.
inline double boxcox_inverse_clamped(double y, const BoxCoxTransform& tf) {
  if (tf.lambda == 0.0) return std::exp(std::min(y, 700.0)) - tf.shift;
  const double tiny = 1e-12;
  if (tf.lambda > 0.0) y = std::max(y, (tiny - 1.0) / tf.lambda);
  else y = std::min(y, (tiny - 1.0) / tf.lambda);
  return std::pow(tf.lambda * y + 1.0, 1.0 / tf.lambda) - tf.shift;
}

inline constexpr std::array<double, 5> kBoxCoxLambdaGrid{-1.0, -0.5, 0.0, 0.5, 1.0};

/// Picks lambda from the fixed grid by the Gaussian profile log-likelihood
/// (including the Jacobian term).
inline BoxCoxTransform fit_boxcox(std::span<const double> history) {
  if (history.size() < 100) throw FitError("Box-Cox fit needs at least 100 points");
  const auto [lo, hi] = std::minmax_element(history.begin(), history.end());
  if (*hi - *lo <= 1e-12 * std::max(1.0, std::abs(*hi))) throw FitError("Box-Cox fit on a constant series");
  BoxCoxTransform best{1.0, std::max(0.0, 1e-3 - *lo)};
  double best_ll = -std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(history.size());
  double log_sum = 0.0;
  for (double x : history) log_sum += std::log(x + best.shift);
  for (double lambda : kBoxCoxLambdaGrid) {
    BoxCoxTransform tf{lambda, best.shift};
    double mean = 0.0, m2 = 0.0;
    std::size_t k = 0;
    for (double x : history) {
      const double y = boxcox_forward(x, tf);
      ++k;
      const double d = y - mean;
      mean += d / static_cast<double>(k);
      m2 += d * (y - mean);
    }
    const double var = m2 / n;
    if (!(var > 0.0) || !std::isfinite(var)) continue;
    const double ll = -0.5 * n * std::log(var) + (lambda - 1.0) * log_sum;
    if (ll > best_ll) {
      best_ll = ll;
      best.lambda = lambda;
    }
  }
  return best;
}

}  // namespace flexbench
