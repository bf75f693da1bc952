#pragma once

// Independent design-rule checker over real geometry: net-to-net spacing,
// device overlap, port alignment, and crossing angles. Works from sampled
// centerlines, not from the routing grid.

#include <string>
#include <vector>

#include "picroute/circuit.hpp"
#include "picroute/geometry.hpp"

namespace picroute {

enum class DrvKind : std::uint8_t { Spacing, DeviceOverlap, PortMisalignment, CrossingAngle };

const char* drv_kind_name(DrvKind k);

struct Violation {
  DrvKind kind;
  Point location;
  std::string a;  // involved entity ids
  std::string b;
};

struct DrcReport {
  std::vector<Violation> violations;
  bool clean() const { return violations.empty(); }
};

// geometries[i] belongs to circuit.nets[i]; empty geometries (unrouted nets)
// are skipped.
DrcReport run_drc(const Circuit& circuit, const std::vector<NetGeometry>& geometries,
                  const Technology& tech);

}  // namespace picroute
