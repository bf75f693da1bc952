#include "picroute/drc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace picroute {

const char* drv_kind_name(DrvKind k) {
  switch (k) {
    case DrvKind::Spacing: return "spacing";
    case DrvKind::DeviceOverlap: return "device_overlap";
    case DrvKind::PortMisalignment: return "port_misalignment";
    case DrvKind::CrossingAngle: return "crossing_angle";
  }
  return "?";
}

namespace {

struct Sample {
  Point a, b;   // one sampled centerline sub-segment
  int net;
  double width;
};

double seg_seg_distance(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  const auto point_seg = [](const Point& p, const Point& a, const Point& b) {
    const Point d = b - a;
    const double len2 = dot(d, d);
    const double t = len2 > 0 ? std::clamp(dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
    return distance(p, a + d * t);
  };
  const auto intersect = [](const Point& a, const Point& b, const Point& c, const Point& d) {
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
  };
  if (intersect(p1, p2, q1, q2)) return 0.0;
  return std::min({point_seg(p1, q1, q2), point_seg(p2, q1, q2),
                   point_seg(q1, p1, p2), point_seg(q2, p1, p2)});
}

struct CrossingSite {
  Point center;
  double size;
  int owner_net;
  Dir axis_a, axis_b;
};

}  // namespace

DrcReport run_drc(const Circuit& circuit, const std::vector<NetGeometry>& geometries,
                  const Technology& tech) {
  DrcReport report;
  const double step = tech.grid_size_s / 4.0;

  // Sampled sub-segments per net, plus declared crossing sites.
  std::vector<Sample> samples;
  std::vector<CrossingSite> sites;
  std::vector<std::vector<Point>> endpoints(circuit.nets.size());
  std::vector<std::vector<Point>> end_tangents(circuit.nets.size());

  for (int n = 0; n < (int)geometries.size(); ++n) {
    const NetGeometry& g = geometries[n];
    if (g.segments.empty()) continue;
    const Segment* first = nullptr;
    const Segment* last = nullptr;
    for (const auto& seg : g.segments) {
      if (seg.kind == Segment::Kind::CrossingMark) {
        sites.push_back({seg.center, seg.size, n, seg.axis_a, seg.axis_b});
        continue;
      }
      if (!first) first = &seg;
      last = &seg;
      std::vector<Point> pts;
      sample_centerline(seg, step, pts);
      for (size_t i = 0; i + 1 < pts.size(); ++i)
        samples.push_back({pts[i], pts[i + 1], n, seg.width});
    }
    if (first) {
      endpoints[n] = {first->start(), last->end()};
      end_tangents[n] = {first->tangent_start() * -1.0, last->tangent_end()};
    }
  }

  // --- Spacing: spatial hash over sample bounding boxes.
  const double cutoff = tech.min_spacing + tech.waveguide_width + step;
  const double bin = std::max(cutoff, tech.grid_size_s);
  std::map<std::pair<int, int>, std::vector<int>> grid;
  const auto bin_of = [&](const Point& p) {
    return std::pair<int, int>{(int)std::floor(p.x / bin), (int)std::floor(p.y / bin)};
  };
  for (int i = 0; i < (int)samples.size(); ++i)
    grid[bin_of({(samples[i].a.x + samples[i].b.x) / 2, (samples[i].a.y + samples[i].b.y) / 2})]
        .push_back(i);

  std::set<std::pair<int, int>> reported_pairs;
  for (const auto& [cellkey, list] : grid) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const auto it = grid.find({cellkey.first + dx, cellkey.second + dy});
        if (it == grid.end()) continue;
        for (int i : list) {
          for (int j : it->second) {
            const Sample& si = samples[i];
            const Sample& sj = samples[j];
            if (si.net >= sj.net) continue;
            const auto pair_key = std::make_pair(si.net, sj.net);
            if (reported_pairs.count(pair_key)) continue;
            const double d = seg_seg_distance(si.a, si.b, sj.a, sj.b);
            const double gap = d - (si.width + sj.width) / 2.0;
            if (gap >= tech.min_spacing - 1e-9) continue;
            const Point mid = (si.a + si.b + sj.a + sj.b) * 0.25;
            // Exempt pairs inside a crossing they share.
            bool exempt = false;
            for (const auto& site : sites) {
              if (distance(site.center, mid) > site.size * 0.75 + tech.min_spacing)
                continue;
              if (site.owner_net == si.net || site.owner_net == sj.net) {
                exempt = true;
                break;
              }
            }
            if (exempt) continue;
            reported_pairs.insert(pair_key);
            report.violations.push_back({DrvKind::Spacing, mid, circuit.nets[si.net].id,
                                         circuit.nets[sj.net].id});
          }
        }
      }
    }
  }

  // --- Device overlap (wire band entering a bounding box away from its own
  // ports).
  std::set<std::pair<int, int>> reported_dev;
  for (const auto& s : samples) {
    const Net& net = circuit.nets[s.net];
    const Point pa = circuit.port(net.a).center;
    const Point pb = circuit.port(net.b).center;
    for (int d = 0; d < (int)circuit.devices.size(); ++d) {
      if (reported_dev.count({s.net, d})) continue;
      const Rect bb = circuit.devices[d].bounding_box;
      const Point mid = (s.a + s.b) * 0.5;
      if (rect_distance(bb, s.a) >= s.width / 2.0 - 1e-9 &&
          rect_distance(bb, s.b) >= s.width / 2.0 - 1e-9)
        continue;
      // Endpoint caps touching the port face are fine.
      const double port_r = std::max(s.width * 2.0, tech.grid_size_s);
      if (std::min(distance(mid, pa), distance(mid, pb)) <= port_r) continue;
      reported_dev.insert({s.net, d});
      report.violations.push_back(
          {DrvKind::DeviceOverlap, mid, net.id, circuit.devices[d].id});
    }
  }

  // --- Port alignment.
  for (int n = 0; n < (int)geometries.size(); ++n) {
    if (endpoints[n].empty()) continue;
    const Net& net = circuit.nets[n];
    for (int e = 0; e < 2; ++e) {
      const Port& port = circuit.port(e == 0 ? net.a : net.b);
      // Match the geometric end nearest to this port.
      const int which =
          distance(endpoints[n][0], port.center) <= distance(endpoints[n][1], port.center)
              ? 0 : 1;
      const Point end = endpoints[n][which];
      const Point t_out = end_tangents[n][which];
      bool bad = distance(end, port.center) > kEpsPort;
      const Point want = dir_unit(port.orientation) * -1.0;  // face-to-face
      if (!bad && dot(t_out, want) < 1.0 - 1e-6) bad = true;
      if (bad)
        report.violations.push_back({DrvKind::PortMisalignment, end, net.id,
                                     (e == 0 ? net.a : net.b).str()});
    }
  }

  // --- Crossing angle: the two participating wires must meet at 90 degrees.
  for (const auto& site : sites) {
    if (!perpendicular(site.axis_a, site.axis_b)) {
      report.violations.push_back({DrvKind::CrossingAngle, site.center,
                                   circuit.nets[site.owner_net].id, ""});
      continue;
    }
    // Find the crossed net's local tangent at the center.
    for (int m = 0; m < (int)geometries.size(); ++m) {
      if (m == site.owner_net) continue;
      for (const auto& seg : geometries[m].segments) {
        if (seg.kind == Segment::Kind::CrossingMark) continue;
        if (centerline_distance(seg, site.center) <= seg.width / 2.0 + kEpsGeo) {
          const Point t = centerline_tangent_near(seg, site.center);
          const Point ta = dir_unit(site.axis_a);
          const double cosang = std::abs(dot(t, ta));
          if (cosang > 1e-6 && std::abs(cosang - 1.0) > 1e-6) {
            report.violations.push_back({DrvKind::CrossingAngle, site.center,
                                         circuit.nets[site.owner_net].id,
                                         circuit.nets[m].id});
          }
        }
      }
    }
  }

  return report;
}

}  // namespace picroute
