#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "iaqsim/energy.hpp"
#include "iaqsim/environment.hpp"
#include "iaqsim/network.hpp"
#include "iaqsim/node.hpp"
#include "iaqsim/sensor_model.hpp"
#include "iaqsim/time.hpp"

namespace iaqsim {

/// A scheduled sink-side data request.
struct SinkRequest {
  Tick time = 0;
  std::string target_node;
};

/// Everything a run needs, loaded from one declarative file.
struct Scenario {
  Tick duration = 30 * kMsPerDay;
  std::uint64_t master_seed = 1;
  std::vector<RoomProfile> rooms;
  std::vector<ActivityEvent> events;
  std::vector<NodeConfig> nodes;
  Topology topology;
  PowerProfile power;
  SensorModels sensors;
  std::vector<SinkRequest> sink_requests;

  const RoomProfile* room(const std::string& id) const {
    for (const auto& r : rooms)
      if (r.room_id == id) return &r;
    return nullptr;
  }
  const NodeConfig* node(const std::string& id) const {
    for (const auto& n : nodes)
      if (n.node_id == id) return &n;
    return nullptr;
  }
  const NodeConfig* node_for_room(const std::string& room_id) const {
    for (const auto& n : nodes)
      if (n.senses && n.room_id == room_id) return &n;
    return nullptr;
  }
};

struct ScenarioParseError : std::runtime_error {
  int line = 0;
  int column = 0;
  ScenarioParseError(const std::string& msg, int l, int c)
      : std::runtime_error(msg), line(l), column(c) {}
};

namespace detail {

using nlohmann::json;

/// Collects "unknown key" issues: every key must be in the allowed set.
inline void check_keys(const json& obj, const std::set<std::string>& allowed,
                       const std::string& path, std::vector<std::string>& issues) {
  if (!obj.is_object()) {
    issues.push_back(path + ": expected an object");
    return;
  }
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      issues.push_back(path + "." + it.key() + ": unknown key");
}

inline double get_num(const json& obj, const std::string& key, double fallback,
                      bool required, const std::string& path,
                      std::vector<std::string>& issues) {
  if (!obj.is_object() || !obj.contains(key)) {
    if (required) issues.push_back(path + "." + key + ": missing required key");
    return fallback;
  }
  if (!obj[key].is_number()) {
    issues.push_back(path + "." + key + ": expected a number");
    return fallback;
  }
  return obj[key].get<double>();
}

inline std::string get_str(const json& obj, const std::string& key,
                           const std::string& fallback, bool required,
                           const std::string& path, std::vector<std::string>& issues) {
  if (!obj.is_object() || !obj.contains(key)) {
    if (required) issues.push_back(path + "." + key + ": missing required key");
    return fallback;
  }
  if (!obj[key].is_string()) {
    issues.push_back(path + "." + key + ": expected a string");
    return fallback;
  }
  return obj[key].get<std::string>();
}

inline bool get_bool(const json& obj, const std::string& key, bool fallback,
                     const std::string& path, std::vector<std::string>& issues) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) {
    issues.push_back(path + "." + key + ": expected a boolean");
    return fallback;
  }
  return obj[key].get<bool>();
}

inline Tick get_seconds(const json& obj, const std::string& key, Tick fallback,
                        bool required, const std::string& path,
                        std::vector<std::string>& issues) {
  double v = get_num(obj, key, to_seconds(fallback), required, path, issues);
  return seconds(v);
}

inline Tick get_tod(const json& obj, const std::string& key, const std::string& path,
                    std::vector<std::string>& issues) {
  std::string s = get_str(obj, key, "", true, path, issues);
  if (s.empty()) return 0;
  try {
    return parse_time_of_day(s);
  } catch (const std::invalid_argument& e) {
    issues.push_back(path + "." + key + ": " + e.what());
    return 0;
  }
}

}  // namespace detail

/// Strict parse: malformed JSON throws ScenarioParseError (with line/column);
/// unknown keys and wrong types are appended to `issues`.
inline Scenario parse_scenario(const std::string& text, std::vector<std::string>& issues) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // recover line/column from the byte offset
    int line = 1, col = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') { ++line; col = 1; } else { ++col; }
    }
    throw ScenarioParseError(e.what(), line, col);
  }

  Scenario sc;
  detail::check_keys(doc,
                     {"duration_s", "master_seed", "rooms", "activity_events", "nodes",
                      "links", "power", "sensors", "sink_requests"},
                     "scenario", issues);
  if (!doc.is_object()) return sc;

  sc.duration = detail::get_seconds(doc, "duration_s", sc.duration, true, "scenario", issues);
  if (doc.contains("master_seed")) {
    if (doc["master_seed"].is_number_unsigned() || doc["master_seed"].is_number_integer())
      sc.master_seed = doc["master_seed"].get<std::uint64_t>();
    else
      issues.push_back("scenario.master_seed: expected an integer");
  }

  if (doc.contains("rooms") && doc["rooms"].is_array()) {
    int i = 0;
    for (const auto& jr : doc["rooms"]) {
      std::string path = "rooms[" + std::to_string(i++) + "]";
      detail::check_keys(jr,
                         {"room_id", "base_temp_c", "temp_diurnal_amplitude_c",
                          "base_humidity_pct", "humidity_diurnal_amplitude_pct",
                          "base_gas_ppm", "noise_sigma_temp_c", "noise_sigma_gas_ppm"},
                         path, issues);
      RoomProfile r;
      r.room_id = detail::get_str(jr, "room_id", "", true, path, issues);
      r.base_temp_c = detail::get_num(jr, "base_temp_c", r.base_temp_c, false, path, issues);
      r.temp_diurnal_amplitude_c =
          detail::get_num(jr, "temp_diurnal_amplitude_c", r.temp_diurnal_amplitude_c, false, path, issues);
      r.base_humidity_pct =
          detail::get_num(jr, "base_humidity_pct", r.base_humidity_pct, false, path, issues);
      r.humidity_diurnal_amplitude_pct =
          detail::get_num(jr, "humidity_diurnal_amplitude_pct", r.humidity_diurnal_amplitude_pct, false, path, issues);
      r.base_gas_ppm = detail::get_num(jr, "base_gas_ppm", r.base_gas_ppm, false, path, issues);
      r.noise_sigma_temp_c =
          detail::get_num(jr, "noise_sigma_temp_c", r.noise_sigma_temp_c, false, path, issues);
      r.noise_sigma_gas_ppm =
          detail::get_num(jr, "noise_sigma_gas_ppm", r.noise_sigma_gas_ppm, false, path, issues);
      sc.rooms.push_back(std::move(r));
    }
  } else if (doc.contains("rooms")) {
    issues.push_back("scenario.rooms: expected an array");
  }

  if (doc.contains("activity_events") && doc["activity_events"].is_array()) {
    int i = 0;
    for (const auto& je : doc["activity_events"]) {
      std::string path = "activity_events[" + std::to_string(i++) + "]";
      detail::check_keys(je,
                         {"room_id", "start", "end", "temp_boost_c", "gas_boost_ppm",
                          "recurrence", "day"},
                         path, issues);
      ActivityEvent ev;
      ev.room_id = detail::get_str(je, "room_id", "", true, path, issues);
      ev.start_tod = detail::get_tod(je, "start", path, issues);
      ev.end_tod = detail::get_tod(je, "end", path, issues);
      ev.temp_boost_c = detail::get_num(je, "temp_boost_c", 0.0, false, path, issues);
      ev.gas_boost_ppm = detail::get_num(je, "gas_boost_ppm", 0.0, false, path, issues);
      std::string rec = detail::get_str(je, "recurrence", "daily", false, path, issues);
      if (rec == "daily") {
        ev.recurrence = ActivityEvent::Recurrence::daily;
      } else if (rec == "once") {
        ev.recurrence = ActivityEvent::Recurrence::once;
        ev.day = static_cast<std::int64_t>(detail::get_num(je, "day", 0, true, path, issues));
      } else {
        issues.push_back(path + ".recurrence: expected 'daily' or 'once'");
      }
      sc.events.push_back(std::move(ev));
    }
  }

  if (doc.contains("nodes") && doc["nodes"].is_array()) {
    int i = 0;
    for (const auto& jn : doc["nodes"]) {
      std::string path = "nodes[" + std::to_string(i++) + "]";
      detail::check_keys(jn,
                         {"node_id", "room_id", "role", "parent", "sampling_period_s",
                          "reporting_interval_s", "report_phase_s", "thresholds",
                          "wake_interval_s", "awake_window_s", "senses"},
                         path, issues);
      NodeConfig n;
      n.node_id = detail::get_str(jn, "node_id", "", true, path, issues);
      std::string role = detail::get_str(jn, "role", "end_device", true, path, issues);
      if (role == "coordinator") n.role = Role::coordinator;
      else if (role == "router") n.role = Role::router;
      else if (role == "end_device") n.role = Role::end_device;
      else issues.push_back(path + ".role: expected coordinator|router|end_device");
      n.senses = detail::get_bool(jn, "senses", n.role != Role::coordinator, path, issues);
      n.room_id = detail::get_str(jn, "room_id", "", n.senses, path, issues);
      n.parent_id = detail::get_str(jn, "parent", "", n.role != Role::coordinator, path, issues);
      n.sampling_period =
          detail::get_seconds(jn, "sampling_period_s", n.sampling_period, false, path, issues);
      n.reporting_interval =
          detail::get_seconds(jn, "reporting_interval_s", n.reporting_interval, false, path, issues);
      n.report_phase =
          detail::get_seconds(jn, "report_phase_s", n.report_phase, false, path, issues);
      n.wake_interval =
          detail::get_seconds(jn, "wake_interval_s", n.wake_interval, false, path, issues);
      n.awake_window =
          detail::get_seconds(jn, "awake_window_s", n.awake_window, false, path, issues);
      if (jn.is_object() && jn.contains("thresholds")) {
        const auto& jt = jn["thresholds"];
        std::string tp = path + ".thresholds";
        detail::check_keys(jt, {"temp_high_c", "gas_high_aqi", "humidity_high_pct"}, tp, issues);
        n.thresholds.temp_high_c =
            detail::get_num(jt, "temp_high_c", n.thresholds.temp_high_c, false, tp, issues);
        n.thresholds.gas_high_aqi =
            detail::get_num(jt, "gas_high_aqi", n.thresholds.gas_high_aqi, false, tp, issues);
        n.thresholds.humidity_high_pct =
            detail::get_num(jt, "humidity_high_pct", n.thresholds.humidity_high_pct, false, tp, issues);
      }
      sc.topology.nodes[n.node_id] = n.role;
      if (!n.parent_id.empty()) sc.topology.parent[n.node_id] = n.parent_id;
      sc.nodes.push_back(std::move(n));
    }
  } else {
    issues.push_back("scenario.nodes: missing or not an array");
  }

  if (doc.contains("links") && doc["links"].is_array()) {
    int i = 0;
    for (const auto& jl : doc["links"]) {
      std::string path = "links[" + std::to_string(i++) + "]";
      detail::check_keys(jl, {"child", "delivery_probability", "latency_ms"}, path, issues);
      std::string child = detail::get_str(jl, "child", "", true, path, issues);
      LinkParams lp;
      lp.delivery_probability =
          detail::get_num(jl, "delivery_probability", 1.0, false, path, issues);
      lp.latency = static_cast<Tick>(detail::get_num(jl, "latency_ms", 50.0, false, path, issues));
      sc.topology.link[child] = lp;
    }
  }
  // default link params for children without an explicit entry
  for (const auto& [child, parent] : sc.topology.parent)
    if (!sc.topology.link.count(child)) sc.topology.link[child] = LinkParams{};

  if (doc.contains("power")) {
    const auto& jp = doc["power"];
    detail::check_keys(jp,
                       {"gas_sensor_active_mw", "humidity_sensor_active_mw",
                        "temp_sensor_active_ua", "radio_preset", "radio_active_ma",
                        "mcu_active_ua", "supply_voltage_logic", "supply_voltage_gas",
                        "radio_sleep_ua", "mcu_sleep_ua", "sensor_sleep_mw",
                        "tx_airtime_ms"},
                       "power", issues);
    auto& p = sc.power;
    p.gas_sensor_active_mw =
        detail::get_num(jp, "gas_sensor_active_mw", p.gas_sensor_active_mw, false, "power", issues);
    p.humidity_sensor_active_mw =
        detail::get_num(jp, "humidity_sensor_active_mw", p.humidity_sensor_active_mw, false, "power", issues);
    p.temp_sensor_active_ua =
        detail::get_num(jp, "temp_sensor_active_ua", p.temp_sensor_active_ua, false, "power", issues);
    if (jp.is_object() && jp.contains("radio_preset")) {
      std::string preset = detail::get_str(jp, "radio_preset", "xbee_s2", false, "power", issues);
      if (jp.contains("radio_active_ma")) {
        // explicit override wins; preset name kept for documentation only
      } else {
        try {
          p.radio_active_ma = radio_preset_ma(preset);
        } catch (const std::invalid_argument& e) {
          issues.push_back(std::string("power.radio_preset: ") + e.what());
        }
      }
    }
    p.radio_active_ma =
        detail::get_num(jp, "radio_active_ma", p.radio_active_ma, false, "power", issues);
    p.mcu_active_ua =
        detail::get_num(jp, "mcu_active_ua", p.mcu_active_ua, false, "power", issues);
    p.supply_voltage_logic =
        detail::get_num(jp, "supply_voltage_logic", p.supply_voltage_logic, false, "power", issues);
    p.supply_voltage_gas =
        detail::get_num(jp, "supply_voltage_gas", p.supply_voltage_gas, false, "power", issues);
    p.radio_sleep_ua =
        detail::get_num(jp, "radio_sleep_ua", p.radio_sleep_ua, false, "power", issues);
    p.mcu_sleep_ua = detail::get_num(jp, "mcu_sleep_ua", p.mcu_sleep_ua, false, "power", issues);
    p.sensor_sleep_mw =
        detail::get_num(jp, "sensor_sleep_mw", p.sensor_sleep_mw, false, "power", issues);
    p.tx_airtime =
        static_cast<Tick>(detail::get_num(jp, "tx_airtime_ms", double(p.tx_airtime), false, "power", issues));
  }

  if (doc.contains("sensors")) {
    const auto& js = doc["sensors"];
    detail::check_keys(js,
                       {"gas", "temp_sigma_c", "humidity_sigma_pct", "aqi_mapping"},
                       "sensors", issues);
    if (js.is_object() && js.contains("gas")) {
      const auto& jg = js["gas"];
      detail::check_keys(jg,
                         {"r0_baseline_ppm", "exponent", "warmup_s", "measurement_sigma_ppm"},
                         "sensors.gas", issues);
      auto& g = sc.sensors.gas;
      g.r0_baseline_ppm =
          detail::get_num(jg, "r0_baseline_ppm", g.r0_baseline_ppm, false, "sensors.gas", issues);
      g.exponent = detail::get_num(jg, "exponent", g.exponent, false, "sensors.gas", issues);
      g.warmup_ms = detail::get_seconds(jg, "warmup_s", g.warmup_ms, false, "sensors.gas", issues);
      g.measurement_sigma_ppm =
          detail::get_num(jg, "measurement_sigma_ppm", g.measurement_sigma_ppm, false, "sensors.gas", issues);
    }
    sc.sensors.temp_sigma_c =
        detail::get_num(js, "temp_sigma_c", sc.sensors.temp_sigma_c, false, "sensors", issues);
    sc.sensors.humidity_sigma_pct =
        detail::get_num(js, "humidity_sigma_pct", sc.sensors.humidity_sigma_pct, false, "sensors", issues);
    if (js.is_object() && js.contains("aqi_mapping")) {
      if (!js["aqi_mapping"].is_array()) {
        issues.push_back("sensors.aqi_mapping: expected an array of [ppm, index] pairs");
      } else {
        int i = 0;
        for (const auto& jb : js["aqi_mapping"]) {
          std::string path = "sensors.aqi_mapping[" + std::to_string(i++) + "]";
          if (!jb.is_array() || jb.size() != 2 || !jb[0].is_number() || !jb[1].is_number()) {
            issues.push_back(path + ": expected [ppm, index]");
            continue;
          }
          sc.sensors.aqi.breakpoints.emplace_back(jb[0].get<double>(), jb[1].get<double>());
        }
      }
    }
  }
  if (sc.sensors.aqi.breakpoints.empty()) {
    // default 5-breakpoint table anchored at the gas sensor baseline
    double b = sc.sensors.gas.r0_baseline_ppm;
    sc.sensors.aqi.breakpoints = {{0.0, 0.0}, {b, 50.0}, {2 * b, 100.0},
                                  {3.5 * b, 200.0}, {5 * b, 300.0}};
  }

  if (doc.contains("sink_requests") && doc["sink_requests"].is_array()) {
    int i = 0;
    for (const auto& jq : doc["sink_requests"]) {
      std::string path = "sink_requests[" + std::to_string(i++) + "]";
      detail::check_keys(jq, {"time_s", "target"}, path, issues);
      SinkRequest q;
      q.time = detail::get_seconds(jq, "time_s", 0, true, path, issues);
      q.target_node = detail::get_str(jq, "target", "", true, path, issues);
      sc.sink_requests.push_back(std::move(q));
    }
  }

  return sc;
}

/// Semantic validation: cross-references, ranges, topology structure.
inline std::vector<std::string> validate_scenario(const Scenario& sc) {
  std::vector<std::string> v;
  if (sc.duration <= 0) v.push_back("duration_s: must be > 0");

  std::set<std::string> room_ids;
  for (std::size_t i = 0; i < sc.rooms.size(); ++i) {
    const auto& r = sc.rooms[i];
    std::string p = "rooms[" + std::to_string(i) + "]";
    if (!room_ids.insert(r.room_id).second) v.push_back(p + ": duplicate room_id '" + r.room_id + "'");
    if (r.base_humidity_pct < 0 || r.base_humidity_pct > 100)
      v.push_back(p + ".base_humidity_pct: must be in [0,100]");
    if (r.base_gas_ppm < 0) v.push_back(p + ".base_gas_ppm: must be >= 0");
    if (r.noise_sigma_temp_c < 0) v.push_back(p + ".noise_sigma_temp_c: must be >= 0");
    if (r.noise_sigma_gas_ppm < 0) v.push_back(p + ".noise_sigma_gas_ppm: must be >= 0");
  }

  for (std::size_t i = 0; i < sc.events.size(); ++i) {
    const auto& e = sc.events[i];
    std::string p = "activity_events[" + std::to_string(i) + "]";
    if (!room_ids.count(e.room_id)) v.push_back(p + ".room_id: unknown room '" + e.room_id + "'");
    if (e.start_tod >= e.end_tod) v.push_back(p + ": start must be before end");
    if (e.temp_boost_c < 0) v.push_back(p + ".temp_boost_c: must be >= 0");
    if (e.gas_boost_ppm < 0) v.push_back(p + ".gas_boost_ppm: must be >= 0");
    if (e.recurrence == ActivityEvent::Recurrence::once && e.day < 0)
      v.push_back(p + ".day: must be >= 0");
  }

  std::set<std::string> node_ids;
  for (std::size_t i = 0; i < sc.nodes.size(); ++i) {
    const auto& n = sc.nodes[i];
    std::string p = "nodes[" + std::to_string(i) + "]";
    if (!node_ids.insert(n.node_id).second)
      v.push_back(p + ": duplicate node_id '" + n.node_id + "'");
    if (n.senses && !room_ids.count(n.room_id))
      v.push_back(p + ".room_id: unknown room '" + n.room_id + "'");
    if (n.senses && n.sampling_period <= 0) v.push_back(p + ".sampling_period_s: must be > 0");
    if (n.senses && n.reporting_interval < n.sampling_period)
      v.push_back(p + ".reporting_interval_s: must be >= sampling_period_s");
    if (n.role == Role::coordinator && !n.parent_id.empty())
      v.push_back(p + ".parent: coordinator must not have a parent");
    if (n.role != Role::coordinator && n.parent_id.empty())
      v.push_back(p + ".parent: required for non-coordinator nodes");
    if (n.wake_interval <= 0) v.push_back(p + ".wake_interval_s: must be > 0");
    if (n.awake_window < 0) v.push_back(p + ".awake_window_s: must be >= 0");
  }

  for (const auto& t : validate_topology(sc.topology)) v.push_back(t);

  for (const auto& [child, lp] : sc.topology.link) {
    if (!sc.topology.nodes.count(child))
      v.push_back("links." + child + ": unknown node");
    if (lp.delivery_probability < 0 || lp.delivery_probability > 1)
      v.push_back("links." + child + ".delivery_probability: must be in [0,1]");
    if (lp.latency < 0) v.push_back("links." + child + ".latency_ms: must be >= 0");
  }

  const auto& g = sc.sensors.gas;
  if (g.r0_baseline_ppm <= 0) v.push_back("sensors.gas.r0_baseline_ppm: must be > 0");
  if (g.exponent >= 0) v.push_back("sensors.gas.exponent: must be < 0");
  if (g.warmup_ms < 0) v.push_back("sensors.gas.warmup_s: must be >= 0");
  if (g.measurement_sigma_ppm < 0) v.push_back("sensors.gas.measurement_sigma_ppm: must be >= 0");
  if (!sc.sensors.aqi.valid())
    v.push_back("sensors.aqi_mapping: breakpoints must be strictly increasing in both coordinates");
  for (const auto& n : sc.nodes) {
    if (n.senses && n.sampling_period > 0 && g.warmup_ms > n.sampling_period)
      v.push_back("sensors.gas.warmup_s: exceeds sampling_period_s of node '" + n.node_id + "'");
  }

  const auto& pw = sc.power;
  if (pw.gas_sensor_active_mw < 0 || pw.humidity_sensor_active_mw < 0 ||
      pw.temp_sensor_active_ua < 0 || pw.radio_active_ma < 0 || pw.mcu_active_ua < 0)
    v.push_back("power: active draws must be >= 0");
  if (pw.radio_sleep_ua * 1e-3 > pw.radio_active_ma)
    v.push_back("power.radio_sleep_ua: sleep draw exceeds active draw");
  if (pw.mcu_sleep_ua > pw.mcu_active_ua)
    v.push_back("power.mcu_sleep_ua: sleep draw exceeds active draw");
  if (pw.tx_airtime < 0) v.push_back("power.tx_airtime_ms: must be >= 0");

  for (std::size_t i = 0; i < sc.sink_requests.size(); ++i) {
    const auto& q = sc.sink_requests[i];
    std::string p = "sink_requests[" + std::to_string(i) + "]";
    const auto* n = sc.node(q.target_node);
    if (!n) v.push_back(p + ".target: unknown node '" + q.target_node + "'");
    else if (n->role == Role::coordinator) v.push_back(p + ".target: cannot request from the sink itself");
    if (q.time < 0 || q.time > sc.duration) v.push_back(p + ".time_s: outside the run horizon");
  }

  return v;
}

/// Reads, parses, and validates a scenario file. Parse failures throw
/// ScenarioParseError; all other problems are returned as issue strings.
inline Scenario load_scenario_file(const std::string& path, std::vector<std::string>& issues) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Scenario sc = parse_scenario(ss.str(), issues);
  auto sem = validate_scenario(sc);
  issues.insert(issues.end(), sem.begin(), sem.end());
  return sc;
}

}  // namespace iaqsim
