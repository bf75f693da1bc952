#include "picroute/svg.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace picroute {

namespace {

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

// Path data for a net's centerline (world coordinates; the root group flips y).
std::string path_data(const NetGeometry& geom) {
  std::ostringstream d;
  bool open = false;
  Point cur{0, 0};
  for (const auto& seg : geom.segments) {
    if (seg.kind == Segment::Kind::CrossingMark) continue;
    const Point s = seg.start();
    if (!open || distance(cur, s) > 1e-6) {
      d << "M " << num(s.x) << " " << num(s.y) << " ";
      open = true;
    }
    switch (seg.kind) {
      case Segment::Kind::Straight:
        d << "L " << num(seg.p1.x) << " " << num(seg.p1.y) << " ";
        cur = seg.p1;
        break;
      case Segment::Kind::ArcFillet: {
        const Point e = seg.end();
        d << "A " << num(seg.radius) << " " << num(seg.radius) << " 0 0 "
          << (seg.arc_ccw() ? 1 : 0) << " " << num(e.x) << " " << num(e.y) << " ";
        cur = e;
        break;
      }
      case Segment::Kind::SineBend: {
        std::vector<Point> pts;
        sample_centerline(seg, seg.length() / 32.0, pts);
        for (size_t i = 1; i < pts.size(); ++i)
          d << "L " << num(pts[i].x) << " " << num(pts[i].y) << " ";
        cur = seg.p1;
        break;
      }
      case Segment::Kind::CrossingMark:
        break;
    }
  }
  return d.str();
}

}  // namespace

std::string render_svg(const Circuit& circuit, const Layout& layout,
                       const Technology& tech, const RoutingReport* report) {
  const Rect die = circuit.die;
  const double margin = std::max(die.width(), die.height()) * 0.02 + 5.0;
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\""
      << num(die.xmin - margin) << " " << num(-die.ymax - margin) << " "
      << num(die.width() + 2 * margin) << " " << num(die.height() + 2 * margin)
      << "\">\n";
  svg << "<g transform=\"scale(1,-1)\">\n";

  svg << "<rect class=\"die\" x=\"" << num(die.xmin) << "\" y=\"" << num(die.ymin)
      << "\" width=\"" << num(die.width()) << "\" height=\"" << num(die.height())
      << "\" fill=\"none\" stroke=\"#202020\" stroke-width=\""
      << num(std::max(0.2, die.width() / 800.0)) << "\"/>\n";

  svg << "<g class=\"devices\" fill=\"#cfd8dc\" stroke=\"#455a64\" stroke-width=\""
      << num(std::max(0.1, die.width() / 1600.0)) << "\">\n";
  for (const auto& dev : circuit.devices) {
    const Rect& b = dev.bounding_box;
    svg << "<rect id=\"dev-" << dev.id << "\" x=\"" << num(b.xmin) << "\" y=\""
        << num(b.ymin) << "\" width=\"" << num(b.width()) << "\" height=\""
        << num(b.height()) << "\"/>\n";
  }
  svg << "</g>\n";

  svg << "<g class=\"nets\" fill=\"none\" stroke=\"#1565c0\" stroke-width=\""
      << num(tech.waveguide_width) << "\" stroke-linecap=\"round\">\n";
  for (const auto& [n, rec] : layout.routed) {
    svg << "<path id=\"net-" << circuit.nets[n].id << "\" d=\"" << path_data(rec.geometry)
        << "\"/>\n";
  }
  svg << "</g>\n";

  svg << "<g class=\"crossings\" fill=\"#ffe082\" stroke=\"#b28704\" stroke-width=\""
      << num(std::max(0.05, tech.waveguide_width / 4.0)) << "\">\n";
  for (const auto& [n, rec] : layout.routed) {
    for (const auto& seg : rec.geometry.segments) {
      if (seg.kind != Segment::Kind::CrossingMark) continue;
      const double h = seg.size / 2.0;
      svg << "<rect x=\"" << num(seg.center.x - h) << "\" y=\"" << num(seg.center.y - h)
          << "\" width=\"" << num(seg.size) << "\" height=\"" << num(seg.size) << "\"";
      if (is_diagonal(seg.axis_a))
        svg << " transform=\"rotate(45 " << num(seg.center.x) << " " << num(seg.center.y)
            << ")\"";
      svg << " fill-opacity=\"0.7\"/>\n";
    }
  }
  svg << "</g>\n";

  if (report) {
    std::set<std::string> critical_nets;
    for (const auto& el : report->critical_path)
      if (el.kind == CriticalPathElement::Kind::Net) critical_nets.insert(el.name);
    svg << "<g class=\"critical\" fill=\"none\" stroke=\"#c62828\" stroke-width=\""
        << num(tech.waveguide_width * 1.5) << "\" stroke-opacity=\"0.85\">\n";
    for (const auto& [n, rec] : layout.routed) {
      if (!critical_nets.count(circuit.nets[n].id)) continue;
      svg << "<path d=\"" << path_data(rec.geometry) << "\"/>\n";
    }
    svg << "</g>\n";
  }

  svg << "</g>\n</svg>\n";
  return svg.str();
}

void export_svg(const Circuit& circuit, const Layout& layout, const Technology& tech,
                const RoutingReport* report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write svg file: " + path);
  out << render_svg(circuit, layout, tech, report);
}

}  // namespace picroute
