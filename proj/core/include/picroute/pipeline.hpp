#pragma once

// One-call flow: condition ports, run the negotiated router, refine
// endpoints, check design rules, and evaluate insertion loss.

#include "picroute/drc.hpp"
#include "picroute/evaluate.hpp"
#include "picroute/layout_io.hpp"
#include "picroute/refine.hpp"

namespace picroute {

struct PipelineResult {
  OrientedGridMap map;
  ConditionedCircuit cond;
  RoutingOutcome outcome;
  std::vector<RefinementAction> refinements;
  DrcReport drc;
  RoutingReport report;
  Layout layout;
};

PipelineResult route_circuit(Circuit& circuit, const Technology& tech,
                             const ScheduleOptions& options);

// DRC over a layout loaded from file (geometries keyed by net index).
DrcReport drc_layout(const Circuit& circuit, const Layout& layout, const Technology& tech);

// IL evaluation over a layout loaded from file.
RoutingReport evaluate_layout(const Circuit& circuit, const Layout& layout,
                              const Technology& tech);

}  // namespace picroute
