#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "iaqsim/rng.hpp"
#include "iaqsim/time.hpp"

namespace iaqsim {

/// Per-room baseline climate. The diurnal temperature term is a 24 h sinusoid
/// peaking at 15:00; humidity carries a small anti-correlated term.
struct RoomProfile {
  std::string room_id;
  double base_temp_c = 22.0;
  double temp_diurnal_amplitude_c = 0.0;
  double base_humidity_pct = 45.0;
  double humidity_diurnal_amplitude_pct = 0.0;
  double base_gas_ppm = 400.0;
  double noise_sigma_temp_c = 0.0;
  double noise_sigma_gas_ppm = 0.0;
};

/// A scheduled in-room activity (e.g. cooking) that boosts temperature and
/// pollutant level while its window is active. Window is [start, end):
/// inclusive start, exclusive end.
struct ActivityEvent {
  enum class Recurrence { daily, once };

  std::string room_id;
  Tick start_tod = 0;   // time-of-day, ms
  Tick end_tod = 0;     // time-of-day, ms
  double temp_boost_c = 0.0;
  double gas_boost_ppm = 0.0;
  Recurrence recurrence = Recurrence::daily;
  std::int64_t day = 0;  // only for Recurrence::once: 0-based day index
};

/// Ground truth at (room, instant).
struct EnvReading {
  std::string room_id;
  Tick t = 0;
  double temp_c = 0.0;
  double humidity_pct = 0.0;
  double gas_ppm = 0.0;
};

inline bool event_active(const ActivityEvent& ev, Tick t) {
  if (ev.recurrence == ActivityEvent::Recurrence::once && day_index(t) != ev.day)
    return false;
  Tick tod = time_of_day(t);
  return tod >= ev.start_tod && tod < ev.end_tod;
}

/// Events (from the given room) whose window contains t.
inline std::vector<ActivityEvent> active_events(const std::vector<ActivityEvent>& events,
                                                const std::string& room_id, Tick t) {
  std::vector<ActivityEvent> out;
  for (const auto& ev : events)
    if (ev.room_id == room_id && event_active(ev, t)) out.push_back(ev);
  return out;
}

/// Diurnal factor: sin peaking at 15:00, zero-crossings at 09:00 and 21:00.
inline double diurnal_factor(Tick t) {
  double tod_s = to_seconds(time_of_day(t));
  constexpr double day_s = 86400.0;
  constexpr double peak_s = 15.0 * 3600.0;
  return std::sin(2.0 * std::numbers::pi * (tod_s - (peak_s - day_s / 4.0)) / day_s);
}

/// base + diurnal + active-event boosts + Gaussian noise. Deterministic given
/// (profile, events, t, stream state). Draw order is fixed: temperature noise
/// first, then gas noise. Humidity is clamped to [0,100] last.
inline EnvReading sample_environment(const RoomProfile& profile,
                                     const std::vector<ActivityEvent>& events,
                                     Tick t, Pcg32& rng) {
  double d = diurnal_factor(t);
  double temp = profile.base_temp_c + profile.temp_diurnal_amplitude_c * d;
  double humidity = profile.base_humidity_pct - profile.humidity_diurnal_amplitude_pct * d;
  double gas = profile.base_gas_ppm;

  for (const auto& ev : events) {
    if (ev.room_id != profile.room_id || !event_active(ev, t)) continue;
    temp += ev.temp_boost_c;
    gas += ev.gas_boost_ppm;
  }

  if (profile.noise_sigma_temp_c > 0) temp += rng.normal(0.0, profile.noise_sigma_temp_c);
  if (profile.noise_sigma_gas_ppm > 0) gas += rng.normal(0.0, profile.noise_sigma_gas_ppm);

  EnvReading r;
  r.room_id = profile.room_id;
  r.t = t;
  r.temp_c = temp;
  r.humidity_pct = std::clamp(humidity, 0.0, 100.0);
  r.gas_ppm = std::max(gas, 0.0);
  return r;
}

}  // namespace iaqsim
