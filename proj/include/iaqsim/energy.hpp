#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>

#include "iaqsim/time.hpp"

namespace iaqsim {

enum class Component { gas_sensor, humidity_sensor, temp_sensor, radio, mcu };

inline constexpr std::array<Component, 5> kAllComponents = {
    Component::gas_sensor, Component::humidity_sensor, Component::temp_sensor,
    Component::radio, Component::mcu};

inline const char* to_string(Component c) {
  switch (c) {
    case Component::gas_sensor: return "gas_sensor";
    case Component::humidity_sensor: return "humidity_sensor";
    case Component::temp_sensor: return "temp_sensor";
    case Component::radio: return "radio";
    case Component::mcu: return "mcu";
  }
  return "?";
}

enum class DrawState { active, sleep };

/// Component-level power draws. Datasheet-style units as configured (mW for
/// the heated sensors, mA/uA for current-specified parts); current-specified
/// components are converted via P = V * I with the declared supply rails.
struct PowerProfile {
  double gas_sensor_active_mw = 900.0;
  double humidity_sensor_active_mw = 200.0;
  double temp_sensor_active_ua = 80.0;
  double radio_active_ma = 40.0;       // XBee series 2
  double mcu_active_ua = 300.0;        // ATtiny85
  double supply_voltage_logic = 3.3;
  double supply_voltage_gas = 5.0;     // heater rail; kept for overrides
  double radio_sleep_ua = 1.0;
  double mcu_sleep_ua = 0.5;
  // sensors are hard power-gated by the interface circuit while asleep
  double sensor_sleep_mw = 0.0;
  Tick tx_airtime = 10;  // ms of radio-active time per transmitted message

  /// Power in watts for a component in a given state.
  double power_w(Component c, DrawState s) const {
    if (s == DrawState::sleep) {
      switch (c) {
        case Component::radio: return supply_voltage_logic * radio_sleep_ua * 1e-6;
        case Component::mcu: return supply_voltage_logic * mcu_sleep_ua * 1e-6;
        default: return sensor_sleep_mw * 1e-3;
      }
    }
    switch (c) {
      case Component::gas_sensor: return gas_sensor_active_mw * 1e-3;
      case Component::humidity_sensor: return humidity_sensor_active_mw * 1e-3;
      case Component::temp_sensor: return supply_voltage_logic * temp_sensor_active_ua * 1e-6;
      case Component::radio: return supply_voltage_logic * radio_active_ma * 1e-3;
      case Component::mcu: return supply_voltage_logic * mcu_active_ua * 1e-6;
    }
    return 0.0;
  }
};

/// Named radio presets from the hardware options considered for the node.
/// "lilypad_xbee" has no published draw; selecting it without an explicit
/// radio_active_ma override is an error at scenario load.
inline double radio_preset_ma(const std::string& name) {
  if (name == "xbee_s2") return 40.0;
  if (name == "xbee_pro") return 62.0;
  if (name == "lilypad_xbee")
    throw std::invalid_argument(
        "radio preset 'lilypad_xbee' has no datasheet draw; "
        "set power.radio_active_ma explicitly");
  throw std::invalid_argument("unknown radio preset '" + name + "'");
}

/// Per-node energy account: joules per (component, state) plus active seconds
/// per component. Totals only ever grow.
struct EnergyLedger {
  std::string node_id;
  std::map<Component, double> active_j;
  std::map<Component, double> sleep_j;
  std::map<Component, double> active_s;

  void accrue(Component c, DrawState s, double duration_s, const PowerProfile& p) {
    if (duration_s < 0)
      throw std::logic_error("EnergyLedger::accrue: negative duration (engine bug)");
    double joules = p.power_w(c, s) * duration_s;
    if (s == DrawState::active) {
      active_j[c] += joules;
      active_s[c] += duration_s;
    } else {
      sleep_j[c] += joules;
    }
  }

  double component_j(Component c) const {
    double j = 0;
    if (auto it = active_j.find(c); it != active_j.end()) j += it->second;
    if (auto it = sleep_j.find(c); it != sleep_j.end()) j += it->second;
    return j;
  }

  double total_j() const {
    double j = 0;
    for (Component c : kAllComponents) j += component_j(c);
    return j;
  }
};

struct EnergyBreakdown {
  double total_j = 0;
  std::map<Component, double> by_component_j;
};

/// Total and per-component energy for one node out of a completed run's
/// ledgers. The breakdown sums to the total exactly (same additions).
inline EnergyBreakdown node_energy_over(const std::map<std::string, EnergyLedger>& ledgers,
                                        const std::string& node_id) {
  auto it = ledgers.find(node_id);
  if (it == ledgers.end())
    throw std::out_of_range("node_energy_over: unknown node '" + node_id + "'");
  EnergyBreakdown b;
  for (Component c : kAllComponents) {
    double j = it->second.component_j(c);
    b.by_component_j[c] = j;
    b.total_j += j;
  }
  return b;
}

}  // namespace iaqsim
