#pragma once

// Curvy-aware A* over the oriented grid: parametric neighbor steps derived
// from the bend radius, geometry-aware legality with predictive crossing
// insertion, insertion-loss + congestion cost, and a 45-degree-aware
// heuristic.

#include <cstdint>
#include <vector>

#include "picroute/access.hpp"
#include "picroute/geometry.hpp"
#include "picroute/grid.hpp"

namespace picroute {

struct StepTable {
  int step90 = 1;
  int step45x = 1;
  int step45y = 1;
};

StepTable build_step_table(const Technology& tech);

enum class StepKind : std::uint8_t {
  Forward = 0,
  Turn45Left,
  Turn45Right,
  Turn90Left,
  Turn90Right,
  CrossForward,  // forward through a perpendicular routed wire
};

struct NeighborStep {
  DirectionalNode to;
  StepKind kind = StepKind::Forward;
  double delta_wl = 0.0;     // centerline length added, um
  double delta_angle = 0.0;  // degrees turned
};

// Geometric neighbor candidates (off-grid candidates dropped). Manhattan
// nodes have five; diagonal nodes three.
std::vector<NeighborStep> neighbors(const DirectionalNode& node, const StepTable& steps,
                                    const Technology& tech, int nx, int ny,
                                    bool diagonals = true);

// 45-degree-aware distance heuristic in dB. Underestimates the remaining
// insertion loss: octile distance priced at the propagation coefficient, plus
// one 45-degree bend penalty when the target cannot be reached straight.
double heuristic(const DirectionalNode& node, const GridIndex& target,
                 const Technology& tech);

// Group congestion penalty at a node: lambda_c times the number of non-free,
// non-own cells in a window whose half-width tracks the group's unrouted
// count.
double gcp_penalty(const OrientedGridMap& map, const DirectionalNode& node,
                   int own_net, int unrouted_count, const Technology& tech,
                   double cw_cells = -1.0, double lambda_c_override = -1.0);

struct CrossingPlan {
  GridIndex cell;
  Dir dir_through = Dir::E;
  Dir dir_crossed = Dir::N;
  int net_crossed = -1;
  std::vector<GridIndex> footprint;
};

enum class LegalityKind : std::uint8_t { Legal, LegalWithCrossing, Illegal };

struct Legality {
  LegalityKind kind = LegalityKind::Illegal;
  CrossingPlan crossing;     // valid when LegalWithCrossing
  const char* reason = "";   // first failing rule when Illegal
  int blocking_net = -1;     // foreign net involved, when applicable
};

struct RouteOptions {
  bool allow_crossings = true;
  bool enable_gcp = true;
  bool enable_history = true;
  bool diagonals = true;
  double lambda_c_override = -1.0;  // <0: tech value
  double alpha_c_override = -1.0;   // <0: tech value
  double cw_cells = -1.0;           // GCP window constant; <0: step45y
  double history_weight = -1.0;     // <0: 0.5 * alpha_c
  bool relax_occupied = false;      // conflict discovery mode (never committed)
  std::int64_t max_pushes = -1;     // search budget; <0 means unlimited
};

struct RouteRequest {
  int net_index = -1;
  DirectionalNode start;       // entry cell, heading away from the source port
  DirectionalNode goal;        // entry cell, required approach heading
  double start_avail_um = 0.0; // straight run available behind the start
  double goal_stub_um = 0.0;   // straight run available beyond the goal
  int group_unrouted = 0;      // unrouted nets in the primary group
};

struct RouteResult {
  bool success = false;
  std::vector<DirectionalNode> nodes;
  std::vector<CrossingPlan> crossings;
  double g_il = 0.0;       // alpha_w*WL + alpha_c*#CR + alpha_b*angle/90
  double wl_um = 0.0;      // centerline length over the node path
  double bend_deg = 0.0;
  int crossing_count = 0;
  std::vector<int> blockers;  // foreign nets that blocked expansion, in order
  const char* failure_reason = "";
  std::int64_t expanded = 0;
};

class CurvyRouter {
 public:
  CurvyRouter(const OrientedGridMap& map, const Technology& tech, RouteOptions opts);

  RouteResult route(const RouteRequest& req) const;

  // One-step legality against the current map; exposed for tests and for
  // re-validating returned paths.
  Legality check_step_legality(const DirectionalNode& from, const NeighborStep& step,
                               int net_index, double avail_um) const;

  const StepTable& step_table() const { return steps_; }
  const RouteOptions& options() const { return opts_; }

  // Straight-run bookkeeping (um), quantized to quarter cells for the search
  // state. Exposed for the oracle used in tests.
  int avail_units(double um) const;
  double unit_um() const { return qstep_; }
  int start_avail_units_cap() const { return avail_cap_; }
  int avail_after(StepKind kind, Dir from_dir, int units_before) const;
  bool avail_allows(StepKind kind, Dir from_dir, int units_before) const;

  // Rebuilds per-net congestion bookkeeping; call before routing a net.
  void prepare_net(int net_index) const;

 private:
  struct StepShape {
    NeighborStep step;
    std::vector<RasterCell> core;       // width-footprint cells, node-relative
    std::vector<RasterCell> halo;       // spacing halo minus core
    int req_units = 0;                  // min avail before taking this step
    int avail_out = 0;                  // avail after (forward: delta)
    bool avail_is_delta = false;
  };

  void build_shapes();
  const std::vector<StepShape>& shapes_for(Dir d) const { return shapes_[(int)d]; }
  Legality classify_cells(const StepShape& shape, const DirectionalNode& from,
                          int net_index, double avail_um) const;
  bool plan_crossing(const DirectionalNode& from, const StepShape& shape,
                     GridIndex hit, int net_index, double avail_um,
                     CrossingPlan& plan, const char** why) const;

  const OrientedGridMap& map_;
  const Technology& tech_;
  RouteOptions opts_;
  StepTable steps_;

  double qstep_ = 0.25;
  int avail_cap_ = 8;
  int avail_min_ = -8;
  double t45_ = 0.0, t90_ = 0.0;
  double L90_ = 0.0, LX_ = 0.0, LY_ = 0.0;
  int runway_cells_ = 1;
  double lambda_c_ = 0.0;
  double cw_ = 1.0;
  double hist_w_ = 0.0;
  double alpha_c_ = 0.0;

  std::vector<std::vector<StepShape>> shapes_;  // per orientation
  mutable std::vector<std::int32_t> foreign_prefix_;  // congestion prefix sums
  mutable int prepared_net_ = -1;
};

}  // namespace picroute
