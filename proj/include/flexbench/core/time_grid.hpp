#pragma once

#include <stdexcept>
#include <string>

#include "flexbench/core/calendar.hpp"

namespace flexbench {

/// The PTU lattice of one planning horizon. Hours are the day-ahead resolution.
class TimeGrid {
 public:
  TimeGrid() = default;

  TimeGrid(int ptu_minutes, int horizon_ptus, Timestamp session_start = Timestamp{})
      : ptu_minutes_(ptu_minutes), horizon_ptus_(horizon_ptus), session_start_(session_start) {
    if (ptu_minutes <= 0 || 60 % ptu_minutes != 0)
      throw std::invalid_argument("PTU duration must divide 60 minutes");
    ptus_per_hour_ = 60 / ptu_minutes;
    if (horizon_ptus <= 0 || horizon_ptus % ptus_per_hour_ != 0)
      throw std::invalid_argument("horizon must be a positive multiple of PTUs per hour");
  }

  int ptu_minutes() const noexcept { return ptu_minutes_; }
  int ptus_per_hour() const noexcept { return ptus_per_hour_; }
  int horizon_ptus() const noexcept { return horizon_ptus_; }
  int hours() const noexcept { return horizon_ptus_ / ptus_per_hour_; }
  double ptu_hours() const noexcept { return ptu_minutes_ / 60.0; }
  Timestamp session_start() const noexcept { return session_start_; }

  int hour_of(int t) const {
    if (t < 0 || t >= horizon_ptus_)
      throw std::out_of_range("PTU index " + std::to_string(t) + " outside horizon");
    return t / ptus_per_hour_;
  }

  /// Start time of PTU t; t may run past the horizon (used for continuations).
  Timestamp time_of(int t) const { return session_start_ + std::chrono::minutes{t * ptu_minutes_}; }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  int ptu_minutes_ = 15;
  int ptus_per_hour_ = 4;
  int horizon_ptus_ = 48;
  Timestamp session_start_{};
};

}  // namespace flexbench
