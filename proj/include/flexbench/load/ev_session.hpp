#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "flexbench/core/time_grid.hpp"

namespace flexbench {

/// One elastic EV charging job. Energies are battery-side kWh, power is grid-side kW.
struct EvSession {
  int arrival_ptu = 0;
  int departure_ptu = 48;
  double capacity = 30.0;
  double initial_soc = 1.0;
  double target_soc = 27.0;
  double max_power = 7.0;
  double efficiency = 0.9;

  double requested_load() const noexcept { return target_soc - initial_soc; }
  int duration_ptus() const noexcept { return departure_ptu - arrival_ptu; }
  bool active(int t) const noexcept { return t >= arrival_ptu && t < departure_ptu; }

  void validate(const TimeGrid& grid) const {
    if (!(max_power > 0)) throw std::invalid_argument("max power must be positive");
    if (!(efficiency > 0 && efficiency <= 1)) throw std::invalid_argument("efficiency must lie in (0,1]");
    if (!(0 <= initial_soc && initial_soc <= target_soc && target_soc <= capacity))
      throw std::invalid_argument("need 0 <= initial SOC <= target SOC <= capacity");
    if (arrival_ptu < 0 || departure_ptu > grid.horizon_ptus() || arrival_ptu >= departure_ptu)
      throw std::invalid_argument("session window must lie inside the grid");
    const double reachable = efficiency * max_power * duration_ptus() * grid.ptu_hours();
    if (requested_load() > reachable + 1e-9) throw std::invalid_argument("session is infeasible");
  }
};

/// SOC after one PTU at the given grid power. Not clipped at capacity.
inline double soc_step(double soc, double grid_power, const EvSession& session, double ptu_hours) {
  if (grid_power < -1e-9 || grid_power > session.max_power + 1e-9)
    throw std::invalid_argument("grid power outside [0, max power]");
  return soc + session.efficiency * grid_power * ptu_hours;
}

/// Battery-side energy still obtainable from t_now until departure.
inline double max_chargeable(const EvSession& session, int t_now, double ptu_hours) {
  if (t_now < session.arrival_ptu || t_now > session.departure_ptu)
    throw std::invalid_argument("t_now outside the session window");
  return session.efficiency * session.max_power * (session.departure_ptu - t_now) * ptu_hours;
}

/// Virtual SOC path (one value per PTU boundary from arrival) and its violations.
struct SocTrajectory {
  std::vector<double> soc;
  double overflow_energy = 0.0;
  double unmet_energy = 0.0;

  /// Builds the trajectory from per-PTU grid power over the session window.
  static SocTrajectory from_power(const EvSession& session, const std::vector<double>& power, double ptu_hours) {
    SocTrajectory tr;
    tr.soc.reserve(power.size() + 1);
    double s = session.initial_soc;
    tr.soc.push_back(s);
    for (double p : power) {
      s = soc_step(s, p, session, ptu_hours);
      tr.soc.push_back(s);
    }
    tr.finalize(session);
    return tr;
  }

  void finalize(const EvSession& session) {
    const double peak = soc.empty() ? 0.0 : *std::max_element(soc.begin(), soc.end());
    overflow_energy = std::max(0.0, peak - session.capacity);
    unmet_energy = std::max(0.0, session.target_soc - (soc.empty() ? 0.0 : soc.back()));
  }
};

}  // namespace flexbench
