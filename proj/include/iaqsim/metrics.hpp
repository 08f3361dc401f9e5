#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "iaqsim/engine.hpp"
#include "iaqsim/scenario.hpp"
#include "iaqsim/time.hpp"

namespace iaqsim {

inline bool is_generation_kind(const std::string& kind) {
  return kind == "alert_tx" || kind == "aggregate_tx" || kind == "reply";
}

struct NodeCounts {
  std::int64_t generated = 0;
  std::int64_t delivered = 0;
};

struct Metrics {
  std::map<std::string, NodeCounts> per_node;
  std::int64_t generated_total = 0;
  std::int64_t delivered_total = 0;
  std::optional<double> throughput;  // absent when nothing was generated
  std::map<std::string, EnergyBreakdown> energy;
  // per-day counts keyed by the day the message was generated
  std::vector<NodeCounts> daily;
};

/// Sink-delivered / origin-generated. Forwarded copies are not generations;
/// the denominator counts application messages only (alerts, aggregates,
/// replies).
inline std::optional<double> throughput(const std::vector<EventRecord>& log) {
  std::int64_t generated = 0, delivered = 0;
  for (const auto& r : log) {
    if (is_generation_kind(r.kind)) ++generated;
    else if (r.kind == "delivery") ++delivered;
  }
  if (generated == 0) return std::nullopt;
  return static_cast<double>(delivered) / static_cast<double>(generated);
}

inline Metrics compute_metrics(const RunResult& run, const Scenario& sc) {
  Metrics m;
  // delivered messages bucketed by generation day, so per-day ratios stay <= 1
  std::map<std::pair<std::string, std::int64_t>, Tick> generated_at;
  std::size_t days = static_cast<std::size_t>((sc.duration + kMsPerDay - 1) / kMsPerDay);
  m.daily.resize(std::max<std::size_t>(days, 1));

  for (const auto& r : run.log) {
    if (is_generation_kind(r.kind)) {
      ++m.per_node[r.node_id].generated;
      ++m.generated_total;
      generated_at[{r.origin, r.seq}] = r.t;
      auto d = static_cast<std::size_t>(day_index(r.t));
      if (d < m.daily.size()) ++m.daily[d].generated;
    } else if (r.kind == "delivery") {
      ++m.per_node[r.origin].delivered;
      ++m.delivered_total;
      auto it = generated_at.find({r.origin, r.seq});
      if (it != generated_at.end()) {
        auto d = static_cast<std::size_t>(day_index(it->second));
        if (d < m.daily.size()) ++m.daily[d].delivered;
      }
    }
  }
  if (m.generated_total > 0)
    m.throughput = static_cast<double>(m.delivered_total) / static_cast<double>(m.generated_total);
  for (const auto& [id, ledger] : run.ledgers)
    m.energy[id] = node_energy_over(run.ledgers, id);
  return m;
}

struct HourlyBucket {
  std::optional<double> temp_c;
  std::optional<double> humidity_pct;
  std::optional<double> aqi;
  std::int64_t count = 0;
};

/// Per-hour means of the room node's sampled values on one day (0-based).
inline std::vector<HourlyBucket> hourly_series(const std::vector<EventRecord>& log,
                                               const Scenario& sc,
                                               const std::string& room_id,
                                               std::int64_t day) {
  const auto* node = sc.node_for_room(room_id);
  if (!node) throw std::out_of_range("hourly_series: no sensing node in room '" + room_id + "'");
  if (day < 0 || (day + 1) * kMsPerDay > sc.duration + kMsPerDay - 1)
    throw std::out_of_range("hourly_series: day " + std::to_string(day) + " outside the run");

  std::vector<double> temp(24, 0), hum(24, 0), aqi(24, 0);
  std::vector<std::int64_t> n(24, 0);
  for (const auto& r : log) {
    if (r.kind != "sample" || r.node_id != node->node_id) continue;
    if (day_index(r.t) != day) continue;
    auto h = static_cast<std::size_t>(hour_of_day(r.t));
    temp[h] += r.temp_c;
    hum[h] += r.humidity_pct;
    aqi[h] += r.aqi;
    ++n[h];
  }
  std::vector<HourlyBucket> out(24);
  for (std::size_t h = 0; h < 24; ++h) {
    out[h].count = n[h];
    if (n[h] > 0) {
      out[h].temp_c = temp[h] / double(n[h]);
      out[h].humidity_pct = hum[h] / double(n[h]);
      out[h].aqi = aqi[h] / double(n[h]);
    }
  }
  return out;
}

/// Per-day mean AQI of the room node's samples over the whole horizon.
inline std::vector<std::optional<double>> daily_aqi(const std::vector<EventRecord>& log,
                                                    const Scenario& sc,
                                                    const std::string& room_id) {
  const auto* node = sc.node_for_room(room_id);
  if (!node) throw std::out_of_range("daily_aqi: no sensing node in room '" + room_id + "'");
  auto days = static_cast<std::size_t>((sc.duration + kMsPerDay - 1) / kMsPerDay);
  std::vector<double> sum(days, 0);
  std::vector<std::int64_t> n(days, 0);
  for (const auto& r : log) {
    if (r.kind != "sample" || r.node_id != node->node_id) continue;
    auto d = static_cast<std::size_t>(day_index(r.t));
    if (d >= days) continue;
    sum[d] += r.aqi;
    ++n[d];
  }
  std::vector<std::optional<double>> out(days);
  for (std::size_t d = 0; d < days; ++d)
    if (n[d] > 0) out[d] = sum[d] / double(n[d]);
  return out;
}

// -- CSV / JSON export --------------------------------------------------------

namespace detail {
inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}
inline std::string iso8601(Tick t) {
  // simulated time, epoch at run start
  char buf[32];
  std::int64_t s = t / kMsPerSecond;
  std::snprintf(buf, sizeof buf, "%02lldT%02lld:%02lld:%02lld",
                static_cast<long long>(day_index(t)),
                static_cast<long long>(hour_of_day(t)),
                static_cast<long long>((time_of_day(t) / kMsPerMinute) % 60),
                static_cast<long long>(s % 60));
  return buf;
}
}  // namespace detail

inline void write_throughput_daily_csv(std::ostream& os, const Metrics& m) {
  os << "day,generated,delivered,throughput\n";
  for (std::size_t d = 0; d < m.daily.size(); ++d) {
    os << d << ',' << m.daily[d].generated << ',' << m.daily[d].delivered << ',';
    if (m.daily[d].generated > 0)
      os << detail::fmt(double(m.daily[d].delivered) / double(m.daily[d].generated));
    os << '\n';
  }
}

inline void write_energy_csv(std::ostream& os, const Metrics& m) {
  os << "node,total_j";
  for (Component c : kAllComponents) os << ',' << to_string(c) << "_j";
  os << '\n';
  for (const auto& [id, e] : m.energy) {
    os << id << ',' << detail::fmt(e.total_j);
    for (Component c : kAllComponents) os << ',' << detail::fmt(e.by_component_j.at(c));
    os << '\n';
  }
}

inline void write_hourly_csv(std::ostream& os, const std::vector<EventRecord>& log,
                             const Scenario& sc, const std::string& room_id) {
  os << "day,hour,samples,temp_c,humidity_pct,aqi\n";
  auto days = static_cast<std::int64_t>((sc.duration + kMsPerDay - 1) / kMsPerDay);
  for (std::int64_t d = 0; d < days; ++d) {
    auto series = hourly_series(log, sc, room_id, d);
    for (std::size_t h = 0; h < 24; ++h) {
      const auto& b = series[h];
      os << d << ',' << h << ',' << b.count << ',';
      if (b.temp_c) os << detail::fmt(*b.temp_c);
      os << ',';
      if (b.humidity_pct) os << detail::fmt(*b.humidity_pct);
      os << ',';
      if (b.aqi) os << detail::fmt(*b.aqi);
      os << '\n';
    }
  }
}

inline void write_daily_aqi_csv(std::ostream& os, const std::vector<EventRecord>& log,
                                const Scenario& sc) {
  os << "day";
  for (const auto& r : sc.rooms) os << ',' << r.room_id;
  os << '\n';
  std::vector<std::vector<std::optional<double>>> cols;
  for (const auto& r : sc.rooms) cols.push_back(daily_aqi(log, sc, r.room_id));
  std::size_t days = cols.empty() ? 0 : cols.front().size();
  for (std::size_t d = 0; d < days; ++d) {
    os << d;
    for (const auto& col : cols) {
      os << ',';
      if (col[d]) os << detail::fmt(*col[d]);
    }
    os << '\n';
  }
}

inline void write_summary_json(std::ostream& os, const Metrics& m) {
  os << "{\n";
  os << "  \"generated_total\": " << m.generated_total << ",\n";
  os << "  \"delivered_total\": " << m.delivered_total << ",\n";
  os << "  \"throughput\": ";
  if (m.throughput) os << detail::fmt(*m.throughput);
  else os << "null";
  os << ",\n  \"per_node\": {\n";
  bool first = true;
  for (const auto& [id, c] : m.per_node) {
    if (!first) os << ",\n";
    first = false;
    os << "    \"" << id << "\": {\"generated\": " << c.generated
       << ", \"delivered\": " << c.delivered << "}";
  }
  os << "\n  },\n  \"energy_j\": {\n";
  first = true;
  for (const auto& [id, e] : m.energy) {
    if (!first) os << ",\n";
    first = false;
    os << "    \"" << id << "\": " << detail::fmt(e.total_j);
  }
  os << "\n  }\n}\n";
}

}  // namespace iaqsim
