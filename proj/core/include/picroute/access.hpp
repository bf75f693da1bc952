#pragma once

// Pre-routing port conditioning: propagate internal ports to device
// boundaries, group ports by device face, spread co-located ports, stagger
// access-point depths, and reserve bending-aware access regions.

#include <optional>
#include <string>
#include <vector>

#include "picroute/circuit.hpp"
#include "picroute/geometry.hpp"
#include "picroute/grid.hpp"

namespace picroute {

// One end of a net after conditioning. The routing search enters/leaves at
// `cell`; a straight (or sine) stub connects the true port to that cell.
struct AccessPoint {
  int net_index = -1;
  int endpoint = 0;  // 0 = net.a, 1 = net.b
  GridIndex cell;
  Dir port_dir = Dir::E;     // port facing; the approach heading is opposite
  Point port_center;         // true port center after propagation, um
  Point axis_anchor;         // port face projected onto the cell axis line
  double stub_len_um = 0.0;  // straight run between stub start and the cell
  std::optional<Segment> sine_stub;  // present for spread ports
  std::vector<CommitCell> stub_cells;
  bool unroutable_warning = false;
};

struct PortGroup {
  int id = -1;
  int device_index = -1;
  Dir direction = Dir::E;
  // Net endpoints (net_index * 2 + endpoint) ordered by local order o
  // (outermost first).
  std::vector<int> members;
  double dist_g_cells = 0.0;  // smallest endpoint distance among member nets
  int unrouted = 0;
};

struct ConditionedCircuit {
  std::vector<AccessPoint> access;  // index = net_index * 2 + endpoint
  std::vector<PortGroup> groups;
  std::vector<int> group_of_endpoint;  // per net endpoint, group id
  std::vector<int> primary_group;      // per net: the denser endpoint group
  std::vector<std::string> warnings;
};

// Moves every port that lies strictly inside its device bounding box to the
// boundary along its orientation ray (nearest face for diagonal rays).
void propagate_ports(Circuit& circuit);

// Partition of net endpoints by (device, orientation), local order assigned
// outermost-first along the face.
std::vector<PortGroup> form_port_groups(const Circuit& circuit);

// Symmetric lateral offsets for k co-located ports at the given pitch:
// (i - (k-1)/2) * pitch for i in [0, k).
std::vector<double> spread_offsets(int k, double pitch);

// Access-region depth for member i of a staggered group.
double stagger_extension(const Technology& tech, int member_rank);

// Reserved access-region depth: bend radius plus one crossing footprint.
double reservation_depth(const Technology& tech);

// Full conditioning pipeline; mutates ports (propagation), the grid
// (reservations + stub commits), and returns the access metadata.
ConditionedCircuit condition_circuit(Circuit& circuit, OrientedGridMap& map,
                                     const Technology& tech);

}  // namespace picroute
