#pragma once

// Layout file (JSON) reader/writer and the SVG renderer contract.

#include <map>
#include <string>

#include "picroute/circuit.hpp"
#include "picroute/evaluate.hpp"
#include "picroute/schedule.hpp"

namespace picroute {

struct Layout {
  std::map<int, RoutedNetRecord> routed;  // by net index
  std::vector<int> failed;
};

void save_layout(const Layout& layout, const Circuit& circuit, const Technology& tech,
                 const std::string& path);
Layout load_layout(const std::string& path, const Circuit& circuit);

std::string layout_to_json(const Layout& layout, const Circuit& circuit,
                           const Technology& tech);

std::string report_to_json(const RoutingReport& report, const Circuit& circuit);
void save_report_json(const RoutingReport& report, const Circuit& circuit,
                      const std::string& path);
std::string report_to_text(const RoutingReport& report);

}  // namespace picroute
