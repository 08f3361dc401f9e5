#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "iaqsim/node.hpp"
#include "iaqsim/report.hpp"
#include "iaqsim/rng.hpp"
#include "iaqsim/time.hpp"

namespace iaqsim {

struct LinkParams {
  double delivery_probability = 1.0;
  Tick latency = 50;  // ms per hop
};

/// ZigBee-style tree: a unique coordinator at the root, parent links for every
/// other node, per-link delivery parameters keyed by the child endpoint.
struct Topology {
  std::map<std::string, Role> nodes;
  std::map<std::string, std::string> parent;     // child -> parent
  std::map<std::string, LinkParams> link;        // keyed by child

  const LinkParams& link_for(const std::string& child) const {
    auto it = link.find(child);
    if (it == link.end())
      throw std::out_of_range("no link parameters for node '" + child + "'");
    return it->second;
  }
};

/// All structural violations, as data. An empty result means the topology is
/// a valid single-coordinator tree with router-or-coordinator interior nodes.
inline std::vector<std::string> validate_topology(const Topology& topo) {
  std::vector<std::string> violations;

  std::vector<std::string> coordinators;
  for (const auto& [id, role] : topo.nodes)
    if (role == Role::coordinator) coordinators.push_back(id);
  if (coordinators.empty())
    violations.push_back("topology: no coordinator");
  if (coordinators.size() > 1)
    violations.push_back("topology: multiple coordinators (" +
                         std::to_string(coordinators.size()) + ")");

  for (const auto& [id, role] : topo.nodes) {
    bool has_parent = topo.parent.count(id) > 0;
    if (role == Role::coordinator && has_parent)
      violations.push_back("topology.parent." + id + ": coordinator must not have a parent");
    if (role != Role::coordinator && !has_parent)
      violations.push_back("topology.parent." + id + ": orphan node (no parent link)");
  }

  for (const auto& [child, parent] : topo.parent) {
    if (!topo.nodes.count(child))
      violations.push_back("topology.parent." + child + ": unknown node");
    auto pit = topo.nodes.find(parent);
    if (pit == topo.nodes.end()) {
      violations.push_back("topology.parent." + child + ": unknown parent '" + parent + "'");
    } else if (pit->second == Role::end_device) {
      violations.push_back("topology.parent." + child + ": parent '" + parent +
                           "' is an end device and cannot route");
    }
    if (child == parent)
      violations.push_back("topology.parent." + child + ": self-parenting");
  }

  // cycle / reachability check: walk each parent chain with a step bound
  for (const auto& [id, role] : topo.nodes) {
    if (role == Role::coordinator) continue;
    std::string cur = id;
    std::size_t steps = 0;
    bool reached = false;
    while (steps++ <= topo.nodes.size()) {
      auto it = topo.parent.find(cur);
      if (it == topo.parent.end()) break;
      cur = it->second;
      auto rit = topo.nodes.find(cur);
      if (rit != topo.nodes.end() && rit->second == Role::coordinator) {
        reached = true;
        break;
      }
    }
    if (!reached && topo.parent.count(id))
      violations.push_back("topology.parent." + id +
                           ": chain does not terminate at the coordinator (cycle or dead end)");
  }

  std::sort(violations.begin(), violations.end());
  violations.erase(std::unique(violations.begin(), violations.end()), violations.end());
  return violations;
}

/// origin, parent(origin), ..., coordinator. Requires a valid topology.
inline std::vector<std::string> route_upward(const Topology& topo,
                                             const std::string& origin) {
  if (!topo.nodes.count(origin))
    throw std::out_of_range("route_upward: unknown node '" + origin + "'");
  std::vector<std::string> path{origin};
  std::string cur = origin;
  while (topo.nodes.at(cur) != Role::coordinator) {
    auto it = topo.parent.find(cur);
    if (it == topo.parent.end() || path.size() > topo.nodes.size())
      throw std::logic_error("route_upward: broken parent chain at '" + cur + "'");
    cur = it->second;
    path.push_back(cur);
  }
  return path;
}

/// coordinator, ..., target (the reverse tree path for sink requests).
inline std::vector<std::string> route_downward(const Topology& topo,
                                               const std::string& target) {
  auto path = route_upward(topo, target);
  std::reverse(path.begin(), path.end());
  return path;
}

struct HopOutcome {
  bool delivered = false;
  Tick latency = 0;
};

/// One Bernoulli link trial. Delivered messages incur the link latency.
inline HopOutcome attempt_delivery(const LinkParams& link, Pcg32& rng) {
  HopOutcome out;
  out.delivered = rng.bernoulli(link.delivery_probability);
  out.latency = link.latency;
  return out;
}

/// A hop succeeds iff the link trial succeeds AND the receiver will take the
/// message: alerts wake the path, everything else needs a receptive next hop.
inline bool hop_succeeds(const LinkParams& link, bool receiver_receptive,
                         bool is_alert, Pcg32& rng, Tick* latency_out = nullptr) {
  HopOutcome out = attempt_delivery(link, rng);
  if (latency_out) *latency_out = out.latency;
  return out.delivered && (receiver_receptive || is_alert);
}

struct SendOutcome {
  bool delivered = false;
  std::size_t lost_at_hop = 0;  // 1-based hop index, valid when !delivered
  Tick delivered_at = 0;
  std::vector<std::string> hop_path;
};

/// Synchronous walk of the upward route (one link trial per hop). The engine
/// drives the same hop model event-by-event; this form backs tests and the
/// delivery oracle. `receptive(node, t)` answers whether a node would accept
/// a non-alert message arriving at tick t.
inline SendOutcome send_to_sink(
    const Topology& topo, const std::string& origin, bool is_alert, Tick created_at,
    const std::function<bool(const std::string&, Tick)>& receptive, Pcg32& rng) {
  auto path = route_upward(topo, origin);
  SendOutcome out;
  out.hop_path.push_back(origin);
  Tick t = created_at;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const auto& link = topo.link_for(path[i - 1]);
    Tick lat = 0;
    bool is_sink = (i + 1 == path.size());
    bool ok = hop_succeeds(link, is_sink || receptive(path[i], t + link.latency),
                           is_alert, rng, &lat);
    t += lat;
    if (!ok) {
      out.lost_at_hop = i;
      return out;
    }
    out.hop_path.push_back(path[i]);
  }
  out.delivered = true;
  out.delivered_at = t;
  return out;
}

}  // namespace iaqsim
