#pragma once

// Post-route endpoint refinement: absorb the sub-cell offset between the
// grid-aligned terminal run and the true port center, either by sliding the
// terminal straight (and its adjoining fillet) or with a sine bend.

#include <vector>

#include "picroute/schedule.hpp"

namespace picroute {

struct RefinementAction {
  int net_index = -1;
  int endpoint = 0;  // 0 = net.a, 1 = net.b
  enum class Kind : std::uint8_t { None, Shift, SineBend, Failed } kind = Kind::None;
  double offset_um = 0.0;
};

// Refines both endpoints of every routed net in place (geometry and grid
// cells are updated). Returns one action per refined endpoint; Failed actions
// leave the net misaligned and are reported as DRVs downstream.
std::vector<RefinementAction> refine_endpoints(
    std::map<int, RoutedNetRecord>& routed, const Circuit& circuit,
    const ConditionedCircuit& cond, OrientedGridMap& map, const Technology& tech);

}  // namespace picroute
