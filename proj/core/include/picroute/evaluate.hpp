#pragma once

// Insertion-loss evaluation: per-net Eq-1 style terms, the optical DAG over
// device ports, and the critical-path (max-IL) dynamic program.

#include <map>
#include <string>
#include <vector>

#include "picroute/circuit.hpp"
#include "picroute/schedule.hpp"

namespace picroute {

struct NetIl {
  double total = 0.0;
  double wg = 0.0;    // alpha_w * length
  double cr = 0.0;    // alpha_c * crossings
  double bend = 0.0;  // alpha_b * degrees / 90
};

// Closed-form loss for given totals (length in um, alpha_w in dB/cm).
NetIl net_il(double wl_um, int crossings, double bend_deg, const Technology& tech);
// Loss of a real geometry; extra_crossings adds crossings inserted by other
// nets that pass through this one.
NetIl net_il(const NetGeometry& geom, const Technology& tech, int extra_crossings = 0);

struct CriticalPathElement {
  enum class Kind : std::uint8_t { SourcePort, Device, Net, SinkPort } kind;
  std::string name;
  double il_db = 0.0;
};

struct RoutingReport {
  double il_max = 0.0;
  std::vector<CriticalPathElement> critical_path;
  double wl_critical_um = 0.0;
  int cr_critical = 0;
  int drv_count = 0;
  int failed_nets = 0;
  std::map<std::string, NetIl> per_net;
  double wall_time_s = 0.0;
};

// Longest-path DP over the optical DAG (ports as nodes; nets and intra-device
// traversals as edges). Throws ValidationError when no source exists or when
// the connectivity graph has a cycle (naming an involved edge).
RoutingReport il_max(const Circuit& circuit,
                     const std::map<int, RoutedNetRecord>& routed,
                     const Technology& tech);

// Crossings each net participates in beyond its own marks: crossings whose
// center lies on this net's straight segments.
std::vector<int> crossed_by_others(const Circuit& circuit,
                                   const std::map<int, RoutedNetRecord>& routed);

}  // namespace picroute
