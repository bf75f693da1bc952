#pragma once

// Oriented routing grid: cell occupancy with stored waveguide orientation,
// per-net reservations, crossings, and the negotiation history map.

#include <cstdint>
#include <string>
#include <vector>

#include "picroute/circuit.hpp"
#include "picroute/geom.hpp"

namespace picroute {

enum class CellKind : std::uint8_t {
  Free = 0,
  DeviceObstacle,
  Occupied,   // a committed waveguide; stores net and its local orientation
  Crossing,   // part of a crossing footprint; stores the crossing id
  Reserved,   // port access region; blocks every net but the owner
};

struct CellState {
  CellKind kind = CellKind::Free;
  std::int32_t owner = -1;   // net index (Occupied/Reserved), device index
                             // (DeviceObstacle), or crossing id (Crossing)
  Dir orientation = Dir::E;  // meaningful for Occupied cells only
};

struct GridIndex {
  int ix = 0;
  int iy = 0;
  bool operator==(const GridIndex&) const = default;
  auto operator<=>(const GridIndex&) const = default;
};

// A search/grid node: cell plus heading. Axis-aligned headings are
// Manhattan-state, diagonals non-Manhattan-state.
struct DirectionalNode {
  int ix = 0;
  int iy = 0;
  Dir orientation = Dir::E;
  bool operator==(const DirectionalNode&) const = default;
};

// One committed crossing: the center cell where two perpendicular nets share
// the grid, plus the footprint cells claimed for the crossing structure.
struct CrossingRecord {
  int id = -1;
  GridIndex center;
  int net_through = -1;     // the net that inserted the crossing
  int net_crossed = -1;     // the previously routed net being crossed
  Dir dir_through = Dir::E;
  Dir dir_crossed = Dir::N;
  std::vector<GridIndex> footprint_cells;  // cells converted to Crossing state
  bool active = true;
};

// What a cell becomes when a net commits over it.
enum class CommitKind : std::uint8_t { Wire, CrossingCenter };

struct CommitCell {
  GridIndex cell;
  Dir orientation = Dir::E;
  CommitKind kind = CommitKind::Wire;
  int crossing_id = -1;  // for CrossingCenter, index into crossing records
};

class OrientedGridMap {
 public:
  OrientedGridMap() = default;
  OrientedGridMap(Rect die, double grid_size);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double grid_size() const { return s_; }
  const Rect& die() const { return die_; }

  bool in_bounds(int ix, int iy) const {
    return ix >= 0 && ix < nx_ && iy >= 0 && iy < ny_;
  }
  bool in_bounds(GridIndex c) const { return in_bounds(c.ix, c.iy); }

  const CellState& at(int ix, int iy) const { return cells_[iy * nx_ + ix]; }
  const CellState& at(GridIndex c) const { return at(c.ix, c.iy); }

  Point cell_center(int ix, int iy) const {
    return {die_.xmin + (ix + 0.5) * s_, die_.ymin + (iy + 0.5) * s_};
  }
  Point cell_center(GridIndex c) const { return cell_center(c.ix, c.iy); }
  GridIndex index_of(const Point& p) const {
    return {(int)std::floor((p.x - die_.xmin) / s_),
            (int)std::floor((p.y - die_.ymin) / s_)};
  }
  Rect cell_rect(int ix, int iy) const {
    return {die_.xmin + ix * s_, die_.ymin + iy * s_, die_.xmin + (ix + 1) * s_,
            die_.ymin + (iy + 1) * s_};
  }

  double history(int ix, int iy) const { return history_[iy * nx_ + ix]; }
  double history(GridIndex c) const { return history(c.ix, c.iy); }
  void add_history(GridIndex c, double inc) { history_[c.iy * nx_ + c.ix] += inc; }

  void set_device_obstacle(GridIndex c, int device_index);
  void reserve(GridIndex c, int net_index);

  // Registers a net's reservation footprint so rip-up can restore it.
  void record_reservation(int net_index, const std::vector<GridIndex>& cells);
  const std::vector<GridIndex>& reservation_cells(int net_index) const;

  // Commits a routed net onto the map. Wire cells must be Free or reserved
  // for this net; CrossingCenter cells must be Occupied by the perpendicular
  // net recorded in the crossing. Remaining reservations of the net are
  // released. Throws std::logic_error on an illegal commit (the router is
  // expected to have pre-checked).
  void commit_net(int net_index, const std::vector<CommitCell>& cells);

  // Marks otherwise-free footprint cells of a crossing. Called by commit_net
  // via the crossing records; exposed for tests.
  void claim_crossing_footprint(CrossingRecord& rec);

  // Permanent pre-built geometry (port stubs): occupies cells for the net and
  // is not touched by rip-up.
  void commit_stub(int net_index, const std::vector<CommitCell>& cells);

  // Reverses commit_net: wire cells revert to Reserved/Free, crossings revert
  // to the other net's Occupied state, the reservation is re-established on
  // cells that are still free, and history is bumped on the ripped cells.
  void ripup_net(int net_index, double history_increment);

  // Surgical footprint replacement after a local geometry edit (endpoint
  // refinement): old wire cells are freed, new ones occupied, crossings and
  // history untouched. The caller must have checked legality of new cells.
  void update_net_cells(int net_index, const std::vector<CommitCell>& new_cells);

  bool is_committed(int net_index) const;

  int make_crossing(GridIndex center, int net_through, int net_crossed,
                    Dir dir_through, Dir dir_crossed,
                    std::vector<GridIndex> footprint);
  const std::vector<CrossingRecord>& crossings() const { return crossings_; }
  const CrossingRecord& crossing(int id) const { return crossings_[id]; }

  // Cells committed for a net (excluding stubs), for evaluation and tests.
  const std::vector<CommitCell>& committed_cells(int net_index) const;

  // Text raster for fixtures: one row per line from the top, '.' free,
  // '#' obstacle, lowercase dir letter for occupied, 'x' crossing,
  // 'r' reserved.
  std::string debug_dump() const;

 private:
  CellState& cell(GridIndex c) { return cells_[c.iy * nx_ + c.ix]; }

  Rect die_;
  double s_ = 1.0;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<CellState> cells_;
  std::vector<double> history_;
  std::vector<CrossingRecord> crossings_;
  std::vector<std::vector<GridIndex>> reservations_;   // per net
  std::vector<std::vector<CommitCell>> committed_;     // per net
  std::vector<char> committed_flag_;                   // per net
};

// Builds the grid for a circuit: every cell intersecting a device bounding
// box becomes DeviceObstacle (conservative outward rounding).
OrientedGridMap rasterize_obstacles(const Circuit& circuit, const Technology& tech);

}  // namespace picroute
