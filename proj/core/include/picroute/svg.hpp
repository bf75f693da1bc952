#pragma once

// Deterministic SVG rendering of a routed layout: device rectangles,
// waveguide centerlines at true width, crossing markers, and the critical
// path highlighted.

#include <string>

#include "picroute/evaluate.hpp"
#include "picroute/layout_io.hpp"

namespace picroute {

std::string render_svg(const Circuit& circuit, const Layout& layout,
                       const Technology& tech, const RoutingReport* report = nullptr);

void export_svg(const Circuit& circuit, const Layout& layout, const Technology& tech,
                const RoutingReport* report, const std::string& path);

}  // namespace picroute
