#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "iaqsim/node.hpp"
#include "iaqsim/rng.hpp"

using namespace iaqsim;

namespace {

NodeConfig leaf_config() {
  NodeConfig c;
  c.node_id = "kitchen";
  c.room_id = "kitchen";
  c.role = Role::end_device;
  c.parent_id = "office";
  c.thresholds = {50.0, 200.0, 95.0};
  return c;
}

SensorSample sample(Tick t, double temp, double hum = 40.0, double aqi = 60.0) {
  return SensorSample{t, temp, hum, aqi};
}

int transmit_count(const std::vector<NodeAction>& actions) {
  int n = 0;
  for (const auto& a : actions)
    if (std::holds_alternative<ActTransmit>(a)) ++n;
  return n;
}

const SensorReport& first_report(const std::vector<NodeAction>& actions) {
  for (const auto& a : actions)
    if (const auto* tx = std::get_if<ActTransmit>(&a)) return tx->report;
  throw std::logic_error("no transmit action");
}

}  // namespace

TEST_CASE("classify_significance boundary rules") {
  Thresholds th{50.0, 200.0, 95.0};
  CHECK(classify_significance(sample(0, 80.0), th));          // temp above
  CHECK_FALSE(classify_significance(sample(0, 20.0), th));    // all below
  CHECK_FALSE(classify_significance(sample(0, 50.0), th));    // tie: strictly over only
  CHECK(classify_significance(sample(0, 20.0, 95.1), th));
  CHECK(classify_significance(sample(0, 20.0, 40.0, 200.5), th));
  CHECK_FALSE(classify_significance(sample(0, 20.0, 95.0, 200.0), th));
}

TEST_CASE("aggregate_buffer arithmetic means") {
  std::vector<SensorSample> buf{sample(100, 20.0), sample(200, 22.0), sample(300, 24.0)};
  auto agg = aggregate_buffer(buf, "kitchen");
  REQUIRE(agg.has_value());
  CHECK(agg->temp_c == Catch::Approx(22.0));
  CHECK(agg->window_start == 100);
  CHECK(agg->window_end == 300);
  CHECK(buf.empty());

  SECTION("single sample aggregates to itself") {
    std::vector<SensorSample> one{sample(42, 19.5, 33.0, 77.0)};
    auto a = aggregate_buffer(one, "x");
    REQUIRE(a.has_value());
    CHECK(a->temp_c == 19.5);
    CHECK(a->humidity_pct == 33.0);
    CHECK(a->aqi == 77.0);
    CHECK(a->window_start == a->window_end);
  }

  SECTION("aqi mean") {
    std::vector<SensorSample> b{sample(1, 0, 0, 100), sample(2, 0, 0, 50),
                                sample(3, 0, 0, 150), sample(4, 0, 0, 100)};
    CHECK(aggregate_buffer(b, "x")->aqi == Catch::Approx(100.0));
  }

  SECTION("empty buffer skips") {
    std::vector<SensorSample> empty;
    CHECK_FALSE(aggregate_buffer(empty, "x").has_value());
  }
}

TEST_CASE("aggregate means match a recomputation oracle on random buffers") {
  Pcg32 rng(21, 22);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + int(rng.uniform() * 40);
    std::vector<SensorSample> buf;
    double st = 0, sh = 0, sa = 0;
    for (int i = 0; i < n; ++i) {
      SensorSample s = sample(i * 60000, rng.uniform() * 50, rng.uniform() * 100,
                              rng.uniform() * 300);
      st += s.temp_c;
      sh += s.humidity_pct;
      sa += s.aqi;
      buf.push_back(s);
    }
    auto agg = aggregate_buffer(buf, "x");
    REQUIRE(agg.has_value());
    REQUIRE(std::abs(agg->temp_c - st / n) <= 1e-9 * std::max(1.0, std::abs(st / n)));
    REQUIRE(std::abs(agg->humidity_pct - sh / n) <= 1e-9 * std::max(1.0, std::abs(sh / n)));
    REQUIRE(std::abs(agg->aqi - sa / n) <= 1e-9 * std::max(1.0, std::abs(sa / n)));
  }
}

TEST_CASE("node_step sample_due") {
  NodeConfig cfg = leaf_config();
  NodeState st;

  SECTION("significant reading emits exactly one alert, buffer untouched") {
    st.buffer.push_back(sample(0, 20.0));
    auto actions = node_step(st, cfg, EvSampleDue{sample(60000, 80.0)});
    CHECK(transmit_count(actions) == 1);
    CHECK(first_report(actions).kind == ReportKind::alert);
    CHECK(first_report(actions).temp_c == 80.0);
    CHECK(st.buffer.size() == 1);  // alert and aggregate streams are disjoint
  }

  SECTION("normal reading buffers, no transmission") {
    auto actions = node_step(st, cfg, EvSampleDue{sample(60000, 20.0)});
    CHECK(transmit_count(actions) == 0);
    CHECK(st.buffer.size() == 1);
  }
}

TEST_CASE("node_step report_due") {
  NodeConfig cfg = leaf_config();
  NodeState st;

  SECTION("non-empty buffer yields one aggregate and clears") {
    node_step(st, cfg, EvSampleDue{sample(60000, 20.0)});
    node_step(st, cfg, EvSampleDue{sample(120000, 22.0)});
    auto actions = node_step(st, cfg, EvReportDue{900000});
    REQUIRE(transmit_count(actions) == 1);
    CHECK(first_report(actions).kind == ReportKind::aggregate);
    CHECK(first_report(actions).temp_c == Catch::Approx(21.0));
    CHECK(st.buffer.empty());
  }

  SECTION("empty buffer is a silent skip") {
    auto actions = node_step(st, cfg, EvReportDue{900000});
    CHECK(transmit_count(actions) == 0);
  }
}

TEST_CASE("node_step wake services requests") {
  NodeConfig cfg = leaf_config();
  NodeState st;

  SECTION("wake with empty queue just goes back to sleep") {
    auto actions = node_step(st, cfg, EvWake{60000});
    REQUIRE(actions.size() == 1);
    CHECK(std::holds_alternative<ActReturnToSleep>(actions[0]));
  }

  SECTION("reply carries the latest sample") {
    node_step(st, cfg, EvSampleDue{sample(60000, 20.0)});
    node_step(st, cfg, EvSampleDue{sample(120000, 24.0)});
    node_step(st, cfg, EvRequestArrived{Request{"kitchen", 130000}});
    auto actions = node_step(st, cfg, EvWake{140000});
    REQUIRE(transmit_count(actions) == 1);
    const auto& r = first_report(actions);
    CHECK(r.kind == ReportKind::request_reply);
    CHECK(r.temp_c == 24.0);
    CHECK_FALSE(r.empty);
  }

  SECTION("no history gives an empty-flagged reply") {
    node_step(st, cfg, EvRequestArrived{Request{"kitchen", 1000}});
    auto actions = node_step(st, cfg, EvWake{2000});
    REQUIRE(transmit_count(actions) == 1);
    CHECK(first_report(actions).empty);
  }

  SECTION("two queued requests drain the queue and bump seq twice") {
    node_step(st, cfg, EvSampleDue{sample(60000, 20.0)});
    std::int64_t seq_before = st.seq_counter;
    node_step(st, cfg, EvRequestArrived{Request{"kitchen", 1}});
    node_step(st, cfg, EvRequestArrived{Request{"kitchen", 2}});
    auto actions = node_step(st, cfg, EvWake{70000});
    CHECK(transmit_count(actions) == 2);
    CHECK(st.pending_requests.empty());
    CHECK(st.seq_counter == seq_before + 2);
  }
}

TEST_CASE("forwarding rules by role") {
  Message msg;
  msg.route = {"kitchen", "office", "sink"};
  msg.hop_index = 1;

  NodeState st;

  SECTION("router re-emits") {
    NodeConfig cfg = leaf_config();
    cfg.role = Role::router;
    auto actions = node_step(st, cfg, EvMessageToForward{msg});
    REQUIRE(actions.size() == 1);
    CHECK(std::holds_alternative<ActForward>(actions[0]));
  }

  SECTION("end device raises a protocol violation") {
    NodeConfig cfg = leaf_config();
    CHECK_THROWS_AS(node_step(st, cfg, EvMessageToForward{msg}), ProtocolViolation);
  }
}

TEST_CASE("property: per-node seq is gapless and strictly increasing") {
  NodeConfig cfg = leaf_config();
  NodeState st;
  Pcg32 rng(31, 32);
  std::vector<std::int64_t> seqs;
  Tick now = 0;
  for (int i = 0; i < 2000; ++i) {
    now += 60000;
    double pick = rng.uniform();
    std::vector<NodeAction> actions;
    if (pick < 0.5) {
      // mix of significant and normal samples
      double temp = rng.uniform() < 0.2 ? 80.0 : 20.0;
      actions = node_step(st, cfg, EvSampleDue{sample(now, temp)});
    } else if (pick < 0.75) {
      actions = node_step(st, cfg, EvReportDue{now});
    } else if (pick < 0.9) {
      node_step(st, cfg, EvRequestArrived{Request{"kitchen", now}});
      continue;
    } else {
      actions = node_step(st, cfg, EvWake{now});
    }
    for (const auto& a : actions)
      if (const auto* tx = std::get_if<ActTransmit>(&a)) seqs.push_back(tx->report.seq);
  }
  REQUIRE(seqs.size() > 100);
  for (std::size_t i = 0; i < seqs.size(); ++i) REQUIRE(seqs[i] == std::int64_t(i));
}

TEST_CASE("property: every event type has a defined transition from random states") {
  // flowchart closure: random event sequences never wedge the state machine
  NodeConfig cfg = leaf_config();
  cfg.role = Role::router;
  NodeState st;
  Pcg32 rng(41, 42);
  Tick now = 0;
  Message msg;
  msg.route = {"kitchen", "office", "sink"};
  msg.hop_index = 1;
  for (int i = 0; i < 5000; ++i) {
    now += 1 + Tick(rng.uniform() * 120000);
    switch (int(rng.uniform() * 5)) {
      case 0:
        node_step(st, cfg, EvSampleDue{sample(now, rng.uniform() * 100)});
        break;
      case 1: node_step(st, cfg, EvReportDue{now}); break;
      case 2: node_step(st, cfg, EvWake{now}); break;
      case 3: node_step(st, cfg, EvRequestArrived{Request{"kitchen", now}}); break;
      default: node_step(st, cfg, EvMessageToForward{msg}); break;
    }
    REQUIRE(st.power_state == PowerState::sleeping);  // all handlers settle back to sleep
  }
}
