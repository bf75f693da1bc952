#include "picroute/pipeline.hpp"

#include <chrono>

namespace picroute {

namespace {

std::vector<NetGeometry> geometries_of(const Circuit& circuit, const Layout& layout) {
  std::vector<NetGeometry> g(circuit.nets.size());
  for (int n = 0; n < (int)circuit.nets.size(); ++n) g[n].net_index = n;
  for (const auto& [n, rec] : layout.routed) g[n] = rec.geometry;
  return g;
}

}  // namespace

PipelineResult route_circuit(Circuit& circuit, const Technology& tech,
                             const ScheduleOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  PipelineResult r;
  r.map = rasterize_obstacles(circuit, tech);
  r.cond = condition_circuit(circuit, r.map, tech);
  r.outcome = run_routing(circuit, r.map, r.cond, tech, options);
  r.refinements = refine_endpoints(r.outcome.routed, circuit, r.cond, r.map, tech);

  r.layout.routed = r.outcome.routed;
  r.layout.failed = r.outcome.failed;

  r.drc = run_drc(circuit, geometries_of(circuit, r.layout), tech);
  r.report = il_max(circuit, r.outcome.routed, tech);
  r.report.drv_count = (int)r.drc.violations.size();
  r.report.failed_nets = (int)r.outcome.failed.size();
  r.report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

DrcReport drc_layout(const Circuit& circuit, const Layout& layout, const Technology& tech) {
  return run_drc(circuit, geometries_of(circuit, layout), tech);
}

RoutingReport evaluate_layout(const Circuit& circuit, const Layout& layout,
                              const Technology& tech) {
  RoutingReport report = il_max(circuit, layout.routed, tech);
  report.failed_nets = (int)layout.failed.size();
  return report;
}

}  // namespace picroute
