#pragma once

// Parametric benchmark circuits: interferometer meshes, dense multi-port
// coupler arrays, and large-die optical network-on-chip fabrics, plus the
// matching technology files.

#include <cstdint>
#include <string>

#include "picroute/circuit.hpp"

namespace picroute {

struct GeneratedBench {
  Circuit circuit;
  Technology tech;
  int declared_devices = 0;
  int declared_nets = 0;
};

// Single-mode PTC-style technology (fine grid, small bend radius).
Technology ptc_technology();
// Large-die interconnect technology (coarse 50 um grid, 60 um bend radius).
Technology wronoc_technology();

// Rectangular interferometer mesh with 2x2 couplers in the alternating
// column pattern; N even. Row positions carry seeded cell and sub-cell
// jitter so routes need jogs and endpoint refinement.
GeneratedBench generate_clements(int N, std::uint64_t seed);

// Columns of N-port couplers with same-side port bundles dense enough to
// force spreading/staggering, a shuffled inter-column permutation, and a
// phase-shifter row in between.
GeneratedBench generate_mmi_array(int N, std::uint64_t seed, int columns = 2);

// Central switch cluster with boundary memory controllers; variant is one of
// north, oneside, corner, pairwise.
GeneratedBench generate_wronoc(const std::string& variant, std::uint64_t seed);

}  // namespace picroute
