#include "picroute/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace picroute {

OrientedGridMap::OrientedGridMap(Rect die, double grid_size) : die_(die), s_(grid_size) {
  if (grid_size <= 0.0) throw ValidationError("grid: grid size must be > 0");
  nx_ = (int)std::ceil((die.width() - 1e-9) / grid_size);
  ny_ = (int)std::ceil((die.height() - 1e-9) / grid_size);
  if (nx_ < 1 || ny_ < 1)
    throw ValidationError("grid: die too small for a single cell");
  cells_.assign((size_t)nx_ * ny_, CellState{});
  history_.assign((size_t)nx_ * ny_, 0.0);
}

void OrientedGridMap::set_device_obstacle(GridIndex c, int device_index) {
  cell(c) = {CellKind::DeviceObstacle, device_index, Dir::E};
}

void OrientedGridMap::reserve(GridIndex c, int net_index) {
  auto& st = cell(c);
  if (st.kind == CellKind::Free) st = {CellKind::Reserved, net_index, Dir::E};
}

void OrientedGridMap::record_reservation(int net_index,
                                         const std::vector<GridIndex>& cells) {
  if ((int)reservations_.size() <= net_index) reservations_.resize(net_index + 1);
  auto& list = reservations_[net_index];
  list.insert(list.end(), cells.begin(), cells.end());
}

const std::vector<GridIndex>& OrientedGridMap::reservation_cells(int net_index) const {
  static const std::vector<GridIndex> empty;
  if (net_index < 0 || net_index >= (int)reservations_.size()) return empty;
  return reservations_[net_index];
}

int OrientedGridMap::make_crossing(GridIndex center, int net_through, int net_crossed,
                                   Dir dir_through, Dir dir_crossed,
                                   std::vector<GridIndex> footprint) {
  CrossingRecord rec;
  rec.id = (int)crossings_.size();
  rec.center = center;
  rec.net_through = net_through;
  rec.net_crossed = net_crossed;
  rec.dir_through = dir_through;
  rec.dir_crossed = dir_crossed;
  rec.footprint_cells = std::move(footprint);
  crossings_.push_back(std::move(rec));
  return crossings_.back().id;
}

void OrientedGridMap::claim_crossing_footprint(CrossingRecord& rec) {
  // Only otherwise-empty cells are converted; the two wires keep their own
  // Occupied cells inside the footprint.
  std::vector<GridIndex> claimed;
  for (const auto& c : rec.footprint_cells) {
    if (!in_bounds(c)) continue;
    auto& st = cell(c);
    if (st.kind == CellKind::Free ||
        (st.kind == CellKind::Reserved && st.owner == rec.net_through)) {
      st = {CellKind::Crossing, rec.id, Dir::E};
      claimed.push_back(c);
    }
  }
  rec.footprint_cells = std::move(claimed);
}

void OrientedGridMap::commit_net(int net_index, const std::vector<CommitCell>& cells_in) {
  if ((int)committed_.size() <= net_index) {
    committed_.resize(net_index + 1);
    committed_flag_.resize(net_index + 1, 0);
  }
  if (committed_flag_[net_index])
    throw std::logic_error("grid: net committed twice without rip-up");

  // Wire cells first; crossing centers (and their footprint claims) second,
  // so a claim never swallows a cell a later wire entry needs.
  for (const auto& cc : cells_in) {
    if (cc.kind != CommitKind::Wire) continue;
    if (!in_bounds(cc.cell)) throw std::logic_error("grid: commit out of bounds");
    auto& st = cell(cc.cell);
    const bool ok = st.kind == CellKind::Free ||
                    (st.kind == CellKind::Reserved && st.owner == net_index) ||
                    (st.kind == CellKind::Occupied && st.owner == net_index);
    if (!ok)
      throw std::logic_error("grid: net " + std::to_string(net_index) +
                             " commit onto an illegal cell (" + std::to_string(cc.cell.ix) +
                             "," + std::to_string(cc.cell.iy) + ") kind=" +
                             std::to_string((int)st.kind) + " owner=" +
                             std::to_string(st.owner));
    st = {CellKind::Occupied, net_index, cc.orientation};
  }
  for (const auto& cc : cells_in) {
    if (cc.kind != CommitKind::CrossingCenter) continue;
    if (!in_bounds(cc.cell)) throw std::logic_error("grid: commit out of bounds");
    auto& st = cell(cc.cell);
    if (cc.crossing_id < 0 || cc.crossing_id >= (int)crossings_.size())
      throw std::logic_error("grid: commit references unknown crossing");
    auto& rec = crossings_[cc.crossing_id];
    const bool ok = st.kind == CellKind::Occupied && st.owner == rec.net_crossed &&
                    perpendicular(st.orientation, cc.orientation);
    if (!ok) throw std::logic_error("grid: crossing commit onto an illegal cell");
    st = {CellKind::Crossing, cc.crossing_id, Dir::E};
    claim_crossing_footprint(rec);
  }

  committed_[net_index] = cells_in;
  committed_flag_[net_index] = 1;

  // Release the remaining reservation; later nets may now cross this net's
  // straight stubs.
  for (const auto& c : reservation_cells(net_index)) {
    auto& st = cell(c);
    if (st.kind == CellKind::Reserved && st.owner == net_index) st = CellState{};
  }
}

void OrientedGridMap::commit_stub(int net_index, const std::vector<CommitCell>& cells_in) {
  for (const auto& cc : cells_in) {
    if (!in_bounds(cc.cell)) continue;
    auto& st = cell(cc.cell);
    if (st.kind == CellKind::Free ||
        (st.kind == CellKind::Reserved && st.owner == net_index))
      st = {CellKind::Occupied, net_index, cc.orientation};
  }
}

bool OrientedGridMap::is_committed(int net_index) const {
  return net_index >= 0 && net_index < (int)committed_flag_.size() &&
         committed_flag_[net_index];
}

const std::vector<CommitCell>& OrientedGridMap::committed_cells(int net_index) const {
  static const std::vector<CommitCell> empty;
  if (!is_committed(net_index)) return empty;
  return committed_[net_index];
}

void OrientedGridMap::ripup_net(int net_index, double history_increment) {
  if (!is_committed(net_index)) throw std::logic_error("grid: rip-up of unknown net");

  for (const auto& cc : committed_[net_index]) {
    auto& st = cell(cc.cell);
    if (cc.kind == CommitKind::Wire) {
      if (st.kind == CellKind::Occupied && st.owner == net_index) st = CellState{};
      // A cell that became a crossing center after a later net crossed this
      // wire is handled through the crossing records below.
    } else {
      if (st.kind == CellKind::Crossing && st.owner == cc.crossing_id) {
        auto& rec = crossings_[cc.crossing_id];
        st = {CellKind::Occupied, rec.net_crossed, rec.dir_crossed};
      }
    }
    add_history(cc.cell, history_increment);
  }

  // Undo crossings this net participates in: centers where this net was
  // crossed revert to the surviving net; claimed footprint cells free up.
  for (auto& rec : crossings_) {
    if (!rec.active) continue;
    if (rec.net_through != net_index && rec.net_crossed != net_index) continue;
    auto& center = cell(rec.center);
    if (center.kind == CellKind::Crossing && center.owner == rec.id) {
      if (rec.net_crossed == net_index) {
        // The crossed wire goes away; the through wire keeps the cell.
        center = {CellKind::Occupied, rec.net_through, rec.dir_through};
      } else {
        center = {CellKind::Occupied, rec.net_crossed, rec.dir_crossed};
      }
    }
    for (const auto& c : rec.footprint_cells) {
      auto& st = cell(c);
      if (st.kind == CellKind::Crossing && st.owner == rec.id) st = CellState{};
    }
    rec.active = false;
  }

  committed_[net_index].clear();
  committed_flag_[net_index] = 0;

  // Reservations come back where nothing else claimed the cell meanwhile.
  for (const auto& c : reservation_cells(net_index)) reserve(c, net_index);
}

void OrientedGridMap::update_net_cells(int net_index,
                                       const std::vector<CommitCell>& new_cells) {
  if (!is_committed(net_index))
    throw std::logic_error("grid: update of a net that is not committed");
  for (const auto& cc : committed_[net_index]) {
    if (cc.kind != CommitKind::Wire) continue;
    auto& st = cell(cc.cell);
    if (st.kind == CellKind::Occupied && st.owner == net_index) st = CellState{};
  }
  for (const auto& cc : new_cells) {
    if (cc.kind != CommitKind::Wire) continue;
    auto& st = cell(cc.cell);
    if (st.kind == CellKind::Crossing) continue;  // part of an own crossing
    const bool ok = st.kind == CellKind::Free ||
                    (st.kind == CellKind::Reserved && st.owner == net_index) ||
                    (st.kind == CellKind::Occupied && st.owner == net_index);
    if (!ok) throw std::logic_error("grid: update onto an illegal cell");
    st = {CellKind::Occupied, net_index, cc.orientation};
  }
  committed_[net_index] = new_cells;
}

std::string OrientedGridMap::debug_dump() const {
  std::ostringstream out;
  for (int iy = ny_ - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < nx_; ++ix) {
      const auto& st = at(ix, iy);
      char ch = '.';
      switch (st.kind) {
        case CellKind::Free: ch = '.'; break;
        case CellKind::DeviceObstacle: ch = '#'; break;
        case CellKind::Occupied: ch = std::tolower(dir_name(st.orientation)[0]); break;
        case CellKind::Crossing: ch = 'x'; break;
        case CellKind::Reserved: ch = 'r'; break;
      }
      out << ch;
    }
    out << '\n';
  }
  return out.str();
}

OrientedGridMap rasterize_obstacles(const Circuit& circuit, const Technology& tech) {
  OrientedGridMap map(circuit.die, tech.grid_size_s);
  const double eps = 1e-9;
  for (int d = 0; d < (int)circuit.devices.size(); ++d) {
    const Rect& bb = circuit.devices[d].bounding_box;
    const int ix0 = std::max(0, (int)std::floor((bb.xmin - circuit.die.xmin) / tech.grid_size_s + eps));
    const int iy0 = std::max(0, (int)std::floor((bb.ymin - circuit.die.ymin) / tech.grid_size_s + eps));
    const int ix1 = std::min(map.nx() - 1, (int)std::ceil((bb.xmax - circuit.die.xmin) / tech.grid_size_s - eps) - 1);
    const int iy1 = std::min(map.ny() - 1, (int)std::ceil((bb.ymax - circuit.die.ymin) / tech.grid_size_s - eps) - 1);
    for (int iy = iy0; iy <= iy1; ++iy)
      for (int ix = ix0; ix <= ix1; ++ix)
        map.set_device_obstacle({ix, iy}, d);
  }
  return map;
}

}  // namespace picroute
