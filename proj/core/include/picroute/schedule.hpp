#pragma once

// Sequential routing driver: group-based net ordering, the rip-up-and-reroute
// negotiation loop, and the local rip-up (crossing vs detour) evaluation.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "picroute/access.hpp"
#include "picroute/router.hpp"

namespace picroute {

struct NetTask {
  int net_index = -1;
  int group = -1;
  double priority = 0.0;  // smaller routes first
  int rip_count = 0;
  bool ever_ripped = false;
};

// Priority per net: the group's smallest endpoint distance (in cells) plus
// the local order scaled by 1/|group| so groups stay contiguous.
std::vector<NetTask> order_nets(const Circuit& circuit, const ConditionedCircuit& cond,
                                const Technology& tech);

struct RoutedNetRecord {
  int net_index = -1;
  std::vector<DirectionalNode> nodes;
  std::vector<CrossingPlan> crossings;
  NetGeometry geometry;  // full port-to-port geometry including stubs
  double il_db = 0.0;    // own-path insertion loss (Eq-1 terms over geometry)
  double wl_um = 0.0;
  double bend_deg = 0.0;
  int crossing_count = 0;
};

struct ScheduleOptions {
  RouteOptions route;
  bool enable_lrr = true;
  int max_rr_iters = -1;  // <0: 4 * |N|
  std::function<void(const std::string&)> log;  // progress lines
};

struct RoutingOutcome {
  std::map<int, RoutedNetRecord> routed;  // by net index
  std::vector<int> failed;                // nets left unrouted
  std::vector<std::string> log;
  int iterations = 0;
  bool complete = false;
};

RoutingOutcome run_routing(const Circuit& circuit, OrientedGridMap& map,
                           const ConditionedCircuit& cond, const Technology& tech,
                           const ScheduleOptions& options);

// Builds the final port-to-port geometry for a solved path (stubs, straight
// runs, fillets, crossing marks).
NetGeometry build_net_geometry(int net_index, const std::vector<DirectionalNode>& nodes,
                               const std::vector<CrossingPlan>& crossings,
                               const ConditionedCircuit& cond, const OrientedGridMap& map,
                               const Technology& tech);

// Commit cells for a geometry: width-footprint raster with crossing centers
// tagged.
std::vector<CommitCell> commit_cells_for(int net_index, const NetGeometry& geom,
                                         const std::vector<CrossingPlan>& crossings,
                                         const OrientedGridMap& map);

}  // namespace picroute
