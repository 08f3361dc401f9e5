#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iaqsim/time.hpp"

namespace iaqsim {

enum class ReportKind { aggregate, alert, request_reply };

inline const char* to_string(ReportKind k) {
  switch (k) {
    case ReportKind::aggregate: return "aggregate";
    case ReportKind::alert: return "alert";
    case ReportKind::request_reply: return "request_reply";
  }
  return "?";
}

/// A node-originated application message. Aggregates carry the arithmetic
/// means of the buffered samples over [window_start, window_end]; alerts carry
/// the single triggering sample.
struct SensorReport {
  std::string origin_node;
  std::int64_t seq = 0;
  ReportKind kind = ReportKind::aggregate;
  double temp_c = 0.0;
  double humidity_pct = 0.0;
  double aqi = 0.0;
  Tick window_start = 0;
  Tick window_end = 0;
  bool empty = false;  // request_reply only: no data ever sampled
};

/// A data request travelling down the tree from the sink.
struct Request {
  std::string target_node;
  Tick issued_at = 0;
};

enum class MessageKind { report, request };

/// A message in flight. Identity for dedup purposes is (origin, seq) for
/// reports; hop_path records the nodes traversed so far.
struct Message {
  MessageKind kind = MessageKind::report;
  SensorReport report;       // kind == report
  Request request;           // kind == request
  std::vector<std::string> route;  // full path, origin first
  std::size_t hop_index = 0;       // next route index to arrive at
  Tick created_at = 0;

  const std::string& origin() const { return route.front(); }
  bool is_alert() const {
    return kind == MessageKind::report && report.kind == ReportKind::alert;
  }
};

}  // namespace iaqsim
