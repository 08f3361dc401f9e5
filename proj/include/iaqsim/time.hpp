#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace iaqsim {

/// Simulation time in integer milliseconds since the start of the run.
/// Integer ticks keep scheduler ordering exact (no floating-point ties).
using Tick = std::int64_t;

inline constexpr Tick kMsPerSecond = 1000;
inline constexpr Tick kMsPerMinute = 60 * kMsPerSecond;
inline constexpr Tick kMsPerHour   = 60 * kMsPerMinute;
inline constexpr Tick kMsPerDay    = 24 * kMsPerHour;

constexpr Tick seconds(double s) { return static_cast<Tick>(s * kMsPerSecond); }
constexpr double to_seconds(Tick t) { return static_cast<double>(t) / kMsPerSecond; }

/// Time of day in [0, kMsPerDay).
constexpr Tick time_of_day(Tick t) {
  Tick tod = t % kMsPerDay;
  return tod < 0 ? tod + kMsPerDay : tod;
}

/// Day index (0-based) containing tick t.
constexpr std::int64_t day_index(Tick t) {
  return t >= 0 ? t / kMsPerDay : (t - kMsPerDay + 1) / kMsPerDay;
}

constexpr std::int64_t hour_of_day(Tick t) { return time_of_day(t) / kMsPerHour; }

/// Parses "HH:MM" or "HH:MM:SS" into a time-of-day tick.
inline Tick parse_time_of_day(const std::string& s) {
  int h = 0, m = 0, sec = 0;
  char c1 = 0, c2 = 0;
  int n = std::sscanf(s.c_str(), "%d%c%d%c%d", &h, &c1, &m, &c2, &sec);
  bool ok = (n == 3 && c1 == ':') || (n == 5 && c1 == ':' && c2 == ':');
  if (!ok || h < 0 || h > 24 || m < 0 || m > 59 || sec < 0 || sec > 59)
    throw std::invalid_argument("bad time-of-day: '" + s + "' (expected HH:MM)");
  Tick t = Tick(h) * kMsPerHour + Tick(m) * kMsPerMinute + Tick(sec) * kMsPerSecond;
  if (t > kMsPerDay) throw std::invalid_argument("time-of-day past 24:00: '" + s + "'");
  return t;
}

}  // namespace iaqsim
