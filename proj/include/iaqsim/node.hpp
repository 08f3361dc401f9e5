#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "iaqsim/report.hpp"
#include "iaqsim/sensor_model.hpp"
#include "iaqsim/time.hpp"

namespace iaqsim {

enum class Role { coordinator, router, end_device };

inline const char* to_string(Role r) {
  switch (r) {
    case Role::coordinator: return "coordinator";
    case Role::router: return "router";
    case Role::end_device: return "end_device";
  }
  return "?";
}

struct Thresholds {
  double temp_high_c = 1e300;
  double gas_high_aqi = 1e300;  // compared against the sample's AQI
  double humidity_high_pct = 1e300;
};

struct NodeConfig {
  std::string node_id;
  std::string room_id;
  Role role = Role::end_device;
  std::string parent_id;              // empty for the coordinator
  Tick sampling_period = 60 * kMsPerSecond;
  Tick reporting_interval = 900 * kMsPerSecond;  // the 15-minute aggregate clock
  Tick report_phase = 0;
  Thresholds thresholds;
  Tick wake_interval = 60 * kMsPerSecond;
  Tick awake_window = 2 * kMsPerSecond;
  bool senses = true;  // the coordinator is a pure sink by default
};

enum class PowerState { sleeping, waking, sampling, transmitting, listening };

inline const char* to_string(PowerState s) {
  switch (s) {
    case PowerState::sleeping: return "sleeping";
    case PowerState::waking: return "waking";
    case PowerState::sampling: return "sampling";
    case PowerState::transmitting: return "transmitting";
    case PowerState::listening: return "listening";
  }
  return "?";
}

struct NodeState {
  PowerState power_state = PowerState::sleeping;
  std::vector<SensorSample> buffer;       // samples since the last aggregate
  std::deque<Request> pending_requests;
  std::int64_t seq_counter = 0;           // next seq to assign
  std::optional<SensorSample> last_sample;
  std::optional<SensorReport> last_aggregate;
};

// -- node_step events ---------------------------------------------------------

struct EvSampleDue { SensorSample sample; };
struct EvReportDue { Tick now; };
struct EvWake { Tick now; };
struct EvRequestArrived { Request request; };
struct EvMessageToForward { Message message; };

using NodeEvent = std::variant<EvSampleDue, EvReportDue, EvWake,
                               EvRequestArrived, EvMessageToForward>;

// -- node_step actions --------------------------------------------------------

struct ActTransmit { SensorReport report; };     // send toward the sink
struct ActForward { Message message; };          // routers only
struct ActReturnToSleep {};

using NodeAction = std::variant<ActTransmit, ActForward, ActReturnToSleep>;

struct ProtocolViolation : std::logic_error {
  using std::logic_error::logic_error;
};

/// True iff any monitored quantity is strictly over its threshold. Ties are
/// non-significant (the boundary rule is strict inequality).
inline bool classify_significance(const SensorSample& s, const Thresholds& th) {
  return s.temp_c > th.temp_high_c || s.aqi > th.gas_high_aqi ||
         s.humidity_pct > th.humidity_high_pct;
}

/// Drains the buffer into an aggregate report (arithmetic means, window from
/// first to last sample). Empty buffer -> nullopt (skip, not a fault).
inline std::optional<SensorReport> aggregate_buffer(std::vector<SensorSample>& buffer,
                                                    const std::string& origin) {
  if (buffer.empty()) return std::nullopt;
  SensorReport r;
  r.origin_node = origin;
  r.kind = ReportKind::aggregate;
  r.window_start = buffer.front().t;
  r.window_end = buffer.back().t;
  double n = static_cast<double>(buffer.size());
  for (const auto& s : buffer) {
    r.temp_c += s.temp_c;
    r.humidity_pct += s.humidity_pct;
    r.aqi += s.aqi;
  }
  r.temp_c /= n;
  r.humidity_pct /= n;
  r.aqi /= n;
  buffer.clear();
  return r;
}

/// Builds the reply for one request: the most recent sample, falling back to
/// the most recent aggregate, else an empty-flagged reply.
inline SensorReport handle_request(NodeState& state, const NodeConfig& config,
                                   const Request&) {
  SensorReport r;
  r.origin_node = config.node_id;
  r.kind = ReportKind::request_reply;
  if (state.last_sample) {
    const auto& s = *state.last_sample;
    r.temp_c = s.temp_c;
    r.humidity_pct = s.humidity_pct;
    r.aqi = s.aqi;
    r.window_start = r.window_end = s.t;
  } else if (state.last_aggregate) {
    const auto& a = *state.last_aggregate;
    r.temp_c = a.temp_c;
    r.humidity_pct = a.humidity_pct;
    r.aqi = a.aqi;
    r.window_start = a.window_start;
    r.window_end = a.window_end;
  } else {
    r.empty = true;
  }
  return r;
}

/// The sensor-node state machine. One call per event; state is mutated in
/// place and the actions the engine must carry out are returned.
///
///  sample_due:  classify. Significant -> one immediate alert, buffer
///               untouched (alert and aggregate streams are disjoint).
///               Normal -> append to buffer, go back to sleep.
///  report_due:  emit aggregate iff buffer non-empty.
///  wake:        service pending requests, else return to sleep.
///  forward:     routers re-emit; end devices raise ProtocolViolation.
inline std::vector<NodeAction> node_step(NodeState& state, const NodeConfig& config,
                                         const NodeEvent& event) {
  std::vector<NodeAction> actions;

  if (const auto* ev = std::get_if<EvSampleDue>(&event)) {
    state.power_state = PowerState::sampling;
    state.last_sample = ev->sample;
    if (classify_significance(ev->sample, config.thresholds)) {
      SensorReport alert;
      alert.origin_node = config.node_id;
      alert.seq = state.seq_counter++;
      alert.kind = ReportKind::alert;
      alert.temp_c = ev->sample.temp_c;
      alert.humidity_pct = ev->sample.humidity_pct;
      alert.aqi = ev->sample.aqi;
      alert.window_start = alert.window_end = ev->sample.t;
      state.power_state = PowerState::transmitting;
      actions.push_back(ActTransmit{std::move(alert)});
    } else {
      state.buffer.push_back(ev->sample);
    }
    state.power_state = PowerState::sleeping;
    actions.push_back(ActReturnToSleep{});
    return actions;
  }

  if (std::get_if<EvReportDue>(&event)) {
    if (auto agg = aggregate_buffer(state.buffer, config.node_id)) {
      agg->seq = state.seq_counter++;
      state.last_aggregate = *agg;
      state.power_state = PowerState::transmitting;
      actions.push_back(ActTransmit{std::move(*agg)});
      state.power_state = PowerState::sleeping;
    }
    actions.push_back(ActReturnToSleep{});
    return actions;
  }

  if (std::get_if<EvWake>(&event)) {
    state.power_state = PowerState::listening;
    while (!state.pending_requests.empty()) {
      Request req = state.pending_requests.front();
      state.pending_requests.pop_front();
      SensorReport reply = handle_request(state, config, req);
      reply.seq = state.seq_counter++;
      actions.push_back(ActTransmit{std::move(reply)});
    }
    state.power_state = PowerState::sleeping;
    actions.push_back(ActReturnToSleep{});
    return actions;
  }

  if (const auto* ev = std::get_if<EvRequestArrived>(&event)) {
    // queued for the next wake; no transmission while asleep
    state.pending_requests.push_back(ev->request);
    return actions;
  }

  const auto& ev = std::get<EvMessageToForward>(event);
  if (config.role == Role::end_device)
    throw ProtocolViolation("end device " + config.node_id +
                            " asked to forward a message");
  if (config.role == Role::coordinator)
    throw ProtocolViolation("coordinator asked to forward; routes end here");
  actions.push_back(ActForward{ev.message});
  return actions;
}

}  // namespace iaqsim
