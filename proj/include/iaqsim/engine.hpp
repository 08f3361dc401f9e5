#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "iaqsim/energy.hpp"
#include "iaqsim/environment.hpp"
#include "iaqsim/network.hpp"
#include "iaqsim/node.hpp"
#include "iaqsim/report.hpp"
#include "iaqsim/rng.hpp"
#include "iaqsim/scenario.hpp"
#include "iaqsim/sensor_model.hpp"
#include "iaqsim/time.hpp"

namespace iaqsim {

/// One line of the run's event log.
struct EventRecord {
  Tick t = 0;
  std::string node_id;
  std::string kind;     // sample|alert_tx|aggregate_tx|forward|delivery|loss|wake|sleep|request|reply
  std::string origin;   // message origin, empty when n/a
  std::int64_t seq = -1;
  std::int64_t hop = -1;
  double temp_c = std::nan("");
  double humidity_pct = std::nan("");
  double aqi = std::nan("");
};

struct RunResult {
  std::vector<EventRecord> log;
  std::map<std::string, EnergyLedger> ledgers;
  std::uint64_t scheduled_events = 0;
  std::uint64_t processed_events = 0;
};

struct ScenarioInvalid : std::runtime_error {
  std::vector<std::string> violations;
  explicit ScenarioInvalid(std::vector<std::string> v)
      : std::runtime_error("scenario invalid (" + std::to_string(v.size()) + " violation(s))"),
        violations(std::move(v)) {}
};

namespace detail {

// Internal scheduler events. Kind priority is part of the frozen tie-break
// order: (timestamp, node_id, kind priority, insertion order).
enum class EvKind : int {
  wake_start = 0,
  sample_read = 1,
  report_due = 2,
  hop_arrival = 3,
  hop_loss = 4,
  request_inject = 5,
  wake_end = 6,
};

struct Scheduled {
  Tick t;
  std::string node_id;
  EvKind kind;
  std::uint64_t order;
  Message msg;          // hop_arrival / hop_loss
  std::string target;   // request_inject
  std::size_t lost_hop = 0;
};

struct ScheduledAfter {
  bool operator()(const Scheduled& a, const Scheduled& b) const {
    return std::tie(a.t, a.node_id, a.kind, a.order) >
           std::tie(b.t, b.node_id, b.kind, b.order);
  }
};

}  // namespace detail

/// Deterministic single-threaded discrete-event simulation of one scenario.
class Engine {
 public:
  explicit Engine(const Scenario& sc) : sc_(sc) {
    auto violations = validate_scenario(sc_);
    if (!violations.empty()) throw ScenarioInvalid(std::move(violations));
    for (const auto& n : sc_.nodes) {
      states_[n.node_id] = NodeState{};
      ledgers_[n.node_id] = EnergyLedger{n.node_id, {}, {}, {}};
      configs_[n.node_id] = n;
    }
  }

  RunResult run() {
    schedule_timeline();
    while (!queue_.empty()) {
      detail::Scheduled ev = queue_.top();
      queue_.pop();
      ++result_.processed_events;
      dispatch(ev);
    }
    finalize_sleep_energy();
    result_.ledgers = ledgers_;
    return std::move(result_);
  }

  /// Would `node` accept a non-alert message arriving at tick t? The sink is
  /// always receptive; others follow their periodic wake schedule.
  bool is_receptive(const std::string& node, Tick t) const {
    const auto& cfg = configs_.at(node);
    if (cfg.role == Role::coordinator) return true;
    if (cfg.awake_window >= cfg.wake_interval) return true;
    return (t % cfg.wake_interval) < cfg.awake_window;
  }

 private:
  void schedule_timeline() {
    for (const auto& n : sc_.nodes) {
      if (n.senses) {
        Tick warm = sc_.sensors.gas.warmup_ms;
        for (Tick s = 0; s + warm <= sc_.duration; s += n.sampling_period)
          push(s + warm, n.node_id, detail::EvKind::sample_read);
        for (Tick r = n.report_phase + n.reporting_interval; r <= sc_.duration;
             r += n.reporting_interval)
          push(r, n.node_id, detail::EvKind::report_due);
      }
      if (n.role != Role::coordinator && n.awake_window > 0 &&
          n.awake_window < n.wake_interval) {
        for (Tick w = 0; w + n.awake_window <= sc_.duration; w += n.wake_interval) {
          push(w, n.node_id, detail::EvKind::wake_start);
          push(w + n.awake_window, n.node_id, detail::EvKind::wake_end);
        }
      } else if (n.role != Role::coordinator && n.awake_window >= n.wake_interval) {
        // always-receptive node: radio and MCU listen for the whole horizon
        auto& ledger = ledgers_.at(n.node_id);
        ledger.accrue(Component::radio, DrawState::active, to_seconds(sc_.duration), sc_.power);
        ledger.accrue(Component::mcu, DrawState::active, to_seconds(sc_.duration), sc_.power);
      }
    }
    for (const auto& q : sc_.sink_requests) {
      detail::Scheduled ev{q.time, coordinator_id(), detail::EvKind::request_inject,
                           order_++, {}, q.target_node};
      queue_.push(std::move(ev));
      ++result_.scheduled_events;
    }
  }

  void dispatch(const detail::Scheduled& ev) {
    switch (ev.kind) {
      case detail::EvKind::sample_read: on_sample_read(ev); break;
      case detail::EvKind::report_due: on_report_due(ev); break;
      case detail::EvKind::wake_start: on_wake_start(ev); break;
      case detail::EvKind::wake_end: log(ev.t, ev.node_id, "sleep"); break;
      case detail::EvKind::hop_arrival: on_hop_arrival(ev); break;
      case detail::EvKind::hop_loss: on_hop_loss(ev); break;
      case detail::EvKind::request_inject: on_request_inject(ev); break;
    }
  }

  void on_sample_read(const detail::Scheduled& ev) {
    const auto& cfg = configs_.at(ev.node_id);
    const auto* room = sc_.room(cfg.room_id);
    Tick warm = sc_.sensors.gas.warmup_ms;
    double warm_s = to_seconds(warm);
    auto& ledger = ledgers_.at(ev.node_id);
    ledger.accrue(Component::gas_sensor, DrawState::active, warm_s, sc_.power);
    ledger.accrue(Component::humidity_sensor, DrawState::active, warm_s, sc_.power);
    ledger.accrue(Component::temp_sensor, DrawState::active, warm_s, sc_.power);
    ledger.accrue(Component::mcu, DrawState::active, warm_s, sc_.power);

    EnvReading env = sample_environment(*room, sc_.events, ev.t, env_stream(room->room_id));
    SensorSample sample = read_sensors(warm, env, sc_.sensors, sensor_stream(ev.node_id));

    EventRecord rec;
    rec.t = ev.t;
    rec.node_id = ev.node_id;
    rec.kind = "sample";
    rec.temp_c = sample.temp_c;
    rec.humidity_pct = sample.humidity_pct;
    rec.aqi = sample.aqi;
    result_.log.push_back(std::move(rec));

    apply_actions(ev.node_id, ev.t,
                  node_step(states_.at(ev.node_id), cfg, EvSampleDue{sample}));
  }

  void on_report_due(const detail::Scheduled& ev) {
    apply_actions(ev.node_id, ev.t,
                  node_step(states_.at(ev.node_id), configs_.at(ev.node_id),
                            EvReportDue{ev.t}));
  }

  void on_wake_start(const detail::Scheduled& ev) {
    const auto& cfg = configs_.at(ev.node_id);
    double window_s = to_seconds(cfg.awake_window);
    auto& ledger = ledgers_.at(ev.node_id);
    ledger.accrue(Component::radio, DrawState::active, window_s, sc_.power);
    ledger.accrue(Component::mcu, DrawState::active, window_s, sc_.power);
    log(ev.t, ev.node_id, "wake");
    apply_actions(ev.node_id, ev.t,
                  node_step(states_.at(ev.node_id), cfg, EvWake{ev.t}));
  }

  void on_hop_arrival(detail::Scheduled ev) {
    Message& msg = ev.msg;
    const std::string& here = msg.route[msg.hop_index];
    const auto& cfg = configs_.at(here);

    if (msg.kind == MessageKind::report) {
      if (cfg.role == Role::coordinator) {
        EventRecord rec;
        rec.t = ev.t;
        rec.node_id = here;
        rec.kind = "delivery";
        rec.origin = msg.origin();
        rec.seq = msg.report.seq;
        rec.temp_c = msg.report.temp_c;
        rec.humidity_pct = msg.report.humidity_pct;
        rec.aqi = msg.report.aqi;
        result_.log.push_back(std::move(rec));
        return;
      }
      auto actions = node_step(states_.at(here), cfg, EvMessageToForward{msg});
      for (auto& a : actions) {
        if (auto* fwd = std::get_if<ActForward>(&a)) {
          log(ev.t, here, "forward", msg.origin(), msg.report.seq,
              static_cast<std::int64_t>(msg.hop_index));
          accrue_airtime(here);
          Message next = std::move(fwd->message);
          next.hop_index = msg.hop_index + 1;
          dispatch_hop(std::move(next), ev.t);
        }
      }
      return;
    }

    // request travelling down the tree
    if (msg.hop_index + 1 == msg.route.size()) {
      log(ev.t, here, "request", coordinator_id());
      apply_actions(here, ev.t,
                    node_step(states_.at(here), cfg, EvRequestArrived{msg.request}));
      return;
    }
    auto actions = node_step(states_.at(here), cfg, EvMessageToForward{msg});
    for (auto& a : actions) {
      if (auto* fwd = std::get_if<ActForward>(&a)) {
        log(ev.t, here, "forward", msg.request.target_node, -1,
            static_cast<std::int64_t>(msg.hop_index));
        accrue_airtime(here);
        Message next = std::move(fwd->message);
        next.hop_index = msg.hop_index + 1;
        dispatch_hop(std::move(next), ev.t);
      }
    }
  }

  void on_hop_loss(const detail::Scheduled& ev) {
    const Message& msg = ev.msg;
    EventRecord rec;
    rec.t = ev.t;
    rec.node_id = msg.route[msg.hop_index];
    rec.kind = "loss";
    rec.origin = msg.kind == MessageKind::report ? msg.origin() : msg.request.target_node;
    rec.seq = msg.kind == MessageKind::report ? msg.report.seq : -1;
    rec.hop = static_cast<std::int64_t>(ev.lost_hop);
    result_.log.push_back(std::move(rec));
  }

  void on_request_inject(const detail::Scheduled& ev) {
    log(ev.t, ev.node_id, "request", ev.target);
    Message msg;
    msg.kind = MessageKind::request;
    msg.request = Request{ev.target, ev.t};
    msg.route = route_downward(sc_.topology, ev.target);
    msg.hop_index = 1;
    msg.created_at = ev.t;
    accrue_airtime(ev.node_id);
    dispatch_hop(std::move(msg), ev.t);
  }

  void apply_actions(const std::string& node_id, Tick t, std::vector<NodeAction> actions) {
    for (auto& a : actions) {
      if (auto* tx = std::get_if<ActTransmit>(&a)) {
        transmit_report(node_id, t, std::move(tx->report));
      } else if (std::get_if<ActForward>(&a)) {
        throw std::logic_error("unexpected forward action outside hop processing");
      }
      // ActReturnToSleep: power-state bookkeeping only, nothing to schedule
    }
  }

  void transmit_report(const std::string& origin, Tick t, SensorReport report) {
    const char* kind = "aggregate_tx";
    if (report.kind == ReportKind::alert) kind = "alert_tx";
    if (report.kind == ReportKind::request_reply) kind = "reply";
    EventRecord rec;
    rec.t = t;
    rec.node_id = origin;
    rec.kind = kind;
    rec.origin = origin;
    rec.seq = report.seq;
    rec.temp_c = report.temp_c;
    rec.humidity_pct = report.humidity_pct;
    rec.aqi = report.aqi;
    result_.log.push_back(std::move(rec));
    accrue_airtime(origin);

    Message msg;
    msg.kind = MessageKind::report;
    msg.report = std::move(report);
    msg.route = route_upward(sc_.topology, origin);
    msg.hop_index = 1;
    msg.created_at = t;
    if (msg.route.size() == 1) return;  // origin is the sink itself
    dispatch_hop(std::move(msg), t);
  }

  /// Resolves one link trial for the hop the message is about to traverse and
  /// schedules either the arrival or the loss record.
  void dispatch_hop(Message msg, Tick t_tx) {
    const std::string& receiver = msg.route[msg.hop_index];
    // link is keyed by its child endpoint: the sender for upward traffic,
    // the receiver for downward requests
    const std::string& link_child = msg.kind == MessageKind::report
                                        ? msg.route[msg.hop_index - 1]
                                        : msg.route[msg.hop_index];
    const LinkParams& link = sc_.topology.link_for(link_child);
    Tick arrival = t_tx + link.latency;

    bool final_request_hop =
        msg.kind == MessageKind::request && msg.hop_index + 1 == msg.route.size();
    bool receptive = final_request_hop || is_receptive(receiver, arrival);
    bool ok = hop_succeeds(link, receptive, msg.is_alert(), link_stream(link_child));

    detail::Scheduled ev;
    ev.t = arrival;
    ev.node_id = receiver;
    ev.kind = ok ? detail::EvKind::hop_arrival : detail::EvKind::hop_loss;
    ev.order = order_++;
    ev.lost_hop = msg.hop_index;
    ev.msg = std::move(msg);
    queue_.push(std::move(ev));
    ++result_.scheduled_events;
  }

  void accrue_airtime(const std::string& node_id) {
    double airtime_s = to_seconds(sc_.power.tx_airtime);
    auto& ledger = ledgers_.at(node_id);
    ledger.accrue(Component::radio, DrawState::active, airtime_s, sc_.power);
    ledger.accrue(Component::mcu, DrawState::active, airtime_s, sc_.power);
  }

  /// Sleep draw for the remainder of the horizon, per component.
  void finalize_sleep_energy() {
    double horizon_s = to_seconds(sc_.duration);
    for (auto& [id, ledger] : ledgers_) {
      for (Component c : kAllComponents) {
        double active = 0;
        if (auto it = ledger.active_s.find(c); it != ledger.active_s.end())
          active = it->second;
        double asleep = horizon_s - active;
        if (asleep > 0) ledger.accrue(c, DrawState::sleep, asleep, sc_.power);
      }
    }
  }

  void push(Tick t, const std::string& node_id, detail::EvKind kind) {
    queue_.push(detail::Scheduled{t, node_id, kind, order_++, {}, {}, 0});
    ++result_.scheduled_events;
  }

  void log(Tick t, const std::string& node_id, const char* kind,
           const std::string& origin = "", std::int64_t seq = -1, std::int64_t hop = -1) {
    EventRecord rec;
    rec.t = t;
    rec.node_id = node_id;
    rec.kind = kind;
    rec.origin = origin;
    rec.seq = seq;
    rec.hop = hop;
    result_.log.push_back(std::move(rec));
  }

  const std::string& coordinator_id() const {
    for (const auto& [id, role] : sc_.topology.nodes)
      if (role == Role::coordinator) return id;
    throw std::logic_error("no coordinator");  // validated away
  }

  Pcg32& env_stream(const std::string& room) {
    return stream(env_streams_, "env", room);
  }
  Pcg32& sensor_stream(const std::string& node) {
    return stream(sensor_streams_, "sensor", node);
  }
  Pcg32& link_stream(const std::string& child) {
    return stream(link_streams_, "link", child);
  }
  Pcg32& stream(std::map<std::string, Pcg32>& cache, const char* purpose,
                const std::string& entity) {
    auto it = cache.find(entity);
    if (it == cache.end())
      it = cache.emplace(entity, seed_stream(sc_.master_seed, purpose, entity)).first;
    return it->second;
  }

  Scenario sc_;
  std::map<std::string, NodeConfig> configs_;
  std::map<std::string, NodeState> states_;
  std::map<std::string, EnergyLedger> ledgers_;
  std::map<std::string, Pcg32> env_streams_, sensor_streams_, link_streams_;
  std::priority_queue<detail::Scheduled, std::vector<detail::Scheduled>,
                      detail::ScheduledAfter>
      queue_;
  std::uint64_t order_ = 0;
  RunResult result_;
};

inline RunResult run(const Scenario& sc) { return Engine(sc).run(); }

/// Deterministic CSV form of the event log (the golden-log artifact).
inline void write_event_log_csv(std::ostream& os, const std::vector<EventRecord>& log) {
  os << "t_ms,node,kind,origin,seq,hop,temp_c,humidity_pct,aqi\n";
  char buf[64];
  auto num = [&](double v) -> std::string {
    if (std::isnan(v)) return "";
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
  };
  for (const auto& r : log) {
    os << r.t << ',' << r.node_id << ',' << r.kind << ',' << r.origin << ',';
    if (r.seq >= 0) os << r.seq;
    os << ',';
    if (r.hop >= 0) os << r.hop;
    os << ',' << num(r.temp_c) << ',' << num(r.humidity_pct) << ',' << num(r.aqi) << '\n';
  }
}

}  // namespace iaqsim
