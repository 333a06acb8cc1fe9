#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "flexbench/core/market_history.hpp"
#include "flexbench/rng.hpp"

namespace flexbench {

struct SynthProfile {
  Timestamp start = parse_iso8601("2022-12-01T00:00");
  int days = 151;  // Dec-Apr: every season present has > 32 days
  int ptu_minutes = 15;
  double mean_da_price = 32.0;   // EUR/MWh, hit exactly over the sample
  double da_daily_swing = 9.0;   // amplitude of the daily shape
  double da_noise = 4.0;         // hourly AR(1) innovation std
  double imbalance_noise = 12.0;
  double reserve_premium = 25.0;  // typical gap between regulation and imbalance price
  double burst_start = 0.06;      // chance per PTU that a deployment burst starts
  double burst_stop = 0.3;        // chance per PTU that a running burst ends
  std::uint64_t seed = 1;
};

namespace detail {

// Load-shaped daily curve in [-1, 1]: night trough, morning and evening peaks.
inline double daily_shape(double hour) {
  const double two_pi = 2.0 * std::numbers::pi;
  return 0.6 * std::sin(two_pi * (hour - 9.0) / 24.0) + 0.4 * std::sin(2.0 * two_pi * (hour - 5.0) / 24.0);
}

}  // namespace detail

/// Deterministic market history with daily seasonality, AR noise and bursty
/// deployment. Same profile, same rows.
inline MarketHistory synth_history(const SynthProfile& prof) {
  if (prof.days <= 0 || prof.ptu_minutes <= 0 || 60 % prof.ptu_minutes != 0)
    throw std::invalid_argument("synthetic profile needs days > 0 and a PTU length dividing 60");
  const int pph = 60 / prof.ptu_minutes;
  const int hours = prof.days * 24;
  Rng rng(prof.seed);

  std::vector<double> da(static_cast<std::size_t>(hours));
  double ar = 0.0;
  for (int k = 0; k < hours; ++k) {
    ar = 0.8 * ar + prof.da_noise * rng.normal();
    da[static_cast<std::size_t>(k)] = prof.da_daily_swing * detail::daily_shape(k % 24) + ar;
  }
  double mean = 0.0;
  for (double v : da) mean += v;
  mean /= hours;
  for (double& v : da) v += prof.mean_da_price - mean;

  MarketHistory h;
  h.ptu_minutes = prof.ptu_minutes;
  double e = 0.0, pu = 0.0, pd = 0.0;
  bool up_burst = false, down_burst = false;
  auto usage = [&](bool& burst, double hour, double& level) {
    // evenings and mornings are busier
    const double activity = 1.0 + 0.5 * detail::daily_shape(hour);
    if (burst) burst = rng.uniform() >= prof.burst_stop;
    else burst = rng.uniform() < prof.burst_start * activity;
    if (!burst) {
      level = 0.0;
      return 0.0;
    }
    level = std::clamp(0.6 * level + 0.4 * rng.uniform() + 0.1 * rng.normal(), 0.05, 1.0);
    return level;
  };
  double lu = 0.0, ld = 0.0;
  for (int t = 0; t < hours * pph; ++t) {
    const Timestamp ts = prof.start + std::chrono::minutes{t * prof.ptu_minutes};
    const double hour = static_cast<double>(t) / pph;
    const double hod = std::fmod(hour, 24.0);
    const double d = da[static_cast<std::size_t>(t / pph)];
    e = 0.6 * e + prof.imbalance_noise * rng.normal();
    const double imb = d + e;
    pu = 0.5 * pu + 0.5 * std::abs(rng.normal());
    pd = 0.5 * pd + 0.5 * std::abs(rng.normal());
    const double up = std::max(imb, d) + prof.reserve_premium * (0.4 + pu);
    const double down = std::min(imb, d) - prof.reserve_premium * (0.4 + pd);
    const double uu = usage(up_burst, hod, lu);
    const double du = usage(down_burst, hod + 12.0, ld);
    h.push_back(ts, d, up, down, imb, uu, du);
  }
  return h;
}

}  // namespace flexbench
