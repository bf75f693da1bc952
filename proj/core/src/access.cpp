#include "picroute/access.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace picroute {

namespace {

// Lateral coordinate of a point along a device face (perpendicular to the
// port orientation).
double lateral_coord(const Point& p, Dir facing) {
  const Point n{-dir_unit(facing).y, dir_unit(facing).x};
  return dot(p, n);
}

}  // namespace

void propagate_ports(Circuit& circuit) {
  for (auto& dev : circuit.devices) {
    const Rect& bb = dev.bounding_box;
    for (auto& port : dev.ports) {
      if (!bb.contains_strict(port.center)) continue;
      const Point u = dir_unit(port.orientation);
      double t = std::numeric_limits<double>::max();
      if (u.x > 1e-12) t = std::min(t, (bb.xmax - port.center.x) / u.x);
      if (u.x < -1e-12) t = std::min(t, (bb.xmin - port.center.x) / u.x);
      if (u.y > 1e-12) t = std::min(t, (bb.ymax - port.center.y) / u.y);
      if (u.y < -1e-12) t = std::min(t, (bb.ymin - port.center.y) / u.y);
      port.center = port.center + u * t;
    }
  }
}

std::vector<PortGroup> form_port_groups(const Circuit& circuit) {
  struct Member {
    int endpoint_key;  // net*2 + end
    double lateral;
  };
  std::map<std::pair<int, Dir>, std::vector<Member>> buckets;

  for (int n = 0; n < (int)circuit.nets.size(); ++n) {
    const Net& net = circuit.nets[n];
    for (int e = 0; e < 2; ++e) {
      const PortRef& ref = e == 0 ? net.a : net.b;
      const Port& port = circuit.port(ref);
      buckets[{ref.device_index, port.orientation}].push_back(
          {n * 2 + e, lateral_coord(port.center, port.orientation)});
    }
  }

  std::vector<PortGroup> groups;
  for (auto& [key, members] : buckets) {
    PortGroup g;
    g.id = (int)groups.size();
    g.device_index = key.first;
    g.direction = key.second;

    double lo = members.front().lateral, hi = lo;
    for (const auto& m : members) {
      lo = std::min(lo, m.lateral);
      hi = std::max(hi, m.lateral);
    }
    const double mid = (lo + hi) / 2.0;
    // Outermost first; ties resolved toward the lower lateral coordinate.
    std::sort(members.begin(), members.end(), [&](const Member& a, const Member& b) {
      const double da = std::abs(a.lateral - mid), db = std::abs(b.lateral - mid);
      if (da != db) return da > db;
      if (a.lateral != b.lateral) return a.lateral < b.lateral;
      return a.endpoint_key < b.endpoint_key;
    });
    for (const auto& m : members) g.members.push_back(m.endpoint_key);

    g.dist_g_cells = std::numeric_limits<double>::max();
    g.unrouted = 0;
    std::vector<int> seen_nets;
    for (const auto& m : members) {
      const int n = m.endpoint_key / 2;
      if (std::find(seen_nets.begin(), seen_nets.end(), n) != seen_nets.end()) continue;
      seen_nets.push_back(n);
      ++g.unrouted;
      const Net& net = circuit.nets[n];
      g.dist_g_cells = std::min(
          g.dist_g_cells, distance(circuit.port(net.a).center, circuit.port(net.b).center));
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<double> spread_offsets(int k, double pitch) {
  std::vector<double> out;
  for (int i = 0; i < k; ++i) out.push_back((i - (k - 1) / 2.0) * pitch);
  return out;
}

double reservation_depth(const Technology& tech) {
  return tech.bend_radius_r + tech.crossing_size;
}

double stagger_extension(const Technology& tech, int member_rank) {
  return reservation_depth(tech) + member_rank * tech.stagger_delta;
}

namespace {

struct EndpointPlan {
  Point stub_start;     // where the straight stub begins (axis anchor or sine end)
  Dir dir = Dir::E;
  double extension = 0; // straight depth from stub_start to the access cell
  std::optional<Segment> sine;
  Point port_center;
};

}  // namespace

ConditionedCircuit condition_circuit(Circuit& circuit, OrientedGridMap& map,
                                     const Technology& tech) {
  propagate_ports(circuit);

  ConditionedCircuit out;
  const int n_nets = (int)circuit.nets.size();
  out.access.resize(n_nets * 2);
  out.group_of_endpoint.assign(n_nets * 2, -1);
  out.primary_group.assign(n_nets, -1);
  out.groups = form_port_groups(circuit);

  for (const auto& g : out.groups)
    for (int key : g.members) out.group_of_endpoint[key] = g.id;
  for (int n = 0; n < n_nets; ++n) {
    const int ga = out.group_of_endpoint[n * 2];
    const int gb = out.group_of_endpoint[n * 2 + 1];
    const size_t sa = out.groups[ga].members.size();
    const size_t sb = out.groups[gb].members.size();
    out.primary_group[n] = sb > sa ? gb : (sa > sb ? ga : std::min(ga, gb));
  }

  const double s = map.grid_size();
  std::vector<EndpointPlan> plans(n_nets * 2);

  // Per-group planning: spreading for cell collisions, then staggered depths.
  for (const auto& g : out.groups) {
    const Dir d = g.direction;
    const Point u = dir_unit(d);
    const Point nvec{-u.y, u.x};

    // Detect co-located members (same grid cell).
    bool collide = false;
    std::map<std::pair<int, int>, int> cell_count;
    for (int key : g.members) {
      const Net& net = circuit.nets[key / 2];
      const Port& port = circuit.port(key % 2 == 0 ? net.a : net.b);
      const GridIndex c = map.index_of(port.center + u * (0.51 * s));
      if (++cell_count[{c.ix, c.iy}] > 1) collide = true;
    }

    std::vector<int> sorted_by_lateral = g.members;
    std::sort(sorted_by_lateral.begin(), sorted_by_lateral.end(), [&](int a, int b) {
      const Net& na = circuit.nets[a / 2];
      const Net& nb = circuit.nets[b / 2];
      const Port& pa = circuit.port(a % 2 == 0 ? na.a : na.b);
      const Port& pb = circuit.port(b % 2 == 0 ? nb.a : nb.b);
      return lateral_coord(pa.center, d) < lateral_coord(pb.center, d);
    });

    if (collide) {
      // Symmetric spread around the centroid; sine stubs reach the new rows.
      Point centroid{0, 0};
      for (int key : sorted_by_lateral) {
        const Net& net = circuit.nets[key / 2];
        centroid = centroid + circuit.port(key % 2 == 0 ? net.a : net.b).center;
      }
      centroid = centroid * (1.0 / sorted_by_lateral.size());

      const int k = (int)sorted_by_lateral.size();
      // Parallel access wires need two grid columns of pitch for the
      // cell-quantized spacing checks, whatever the technology asks for.
      double pitch = std::max(tech.port_spread_pitch, 2.0 * s);
      const double pitch_min = std::max(tech.waveguide_width + tech.min_spacing, 2.0 * s);
      bool placed = false;
      while (pitch >= pitch_min - 1e-9 && !placed) {
        placed = true;
        double max_offset = 0;
        const auto offsets = spread_offsets(k, pitch);
        for (int i = 0; i < k && placed; ++i) {
          const Point ap = centroid + u * tech.port_spread_extension + nvec * offsets[i];
          if (!map.die().contains(ap)) placed = false;
          else {
            const GridIndex c = map.index_of(ap);
            if (map.at(c).kind == CellKind::DeviceObstacle) placed = false;
          }
          max_offset = std::max(max_offset, std::abs(offsets[i]));
        }
        if (placed) {
          const double ext = std::max(tech.port_spread_extension, 4.0 * (max_offset + s));
          for (int i = 0; i < k; ++i) {
            const int key = sorted_by_lateral[i];
            const Net& net = circuit.nets[key / 2];
            const Port& port = circuit.port(key % 2 == 0 ? net.a : net.b);
            // Snap the spread point onto a cell axis line so the straight
            // extension continues between cell centers.
            Point raw = centroid + u * ext + nvec * offsets[i];
            GridIndex c = map.index_of(raw);
            Point snapped = map.cell_center(c);
            // Keep the axial coordinate exact; snap only laterally.
            Point ap = raw + nvec * dot(snapped - raw, nvec);
            EndpointPlan& plan = plans[key];
            plan.port_center = port.center;
            plan.dir = d;
            plan.sine = sine_bend(port.center, ap, d, tech.waveguide_width);
            plan.stub_start = ap;
            plan.extension = 0.0;
          }
        } else {
          pitch *= 0.5;
        }
      }
      if (!placed) {
        throw ValidationError("port access: cannot spread congested ports of device '" +
                              circuit.devices[g.device_index].id + "'");
      }
    } else {
      for (int key : sorted_by_lateral) {
        const Net& net = circuit.nets[key / 2];
        const Port& port = circuit.port(key % 2 == 0 ? net.a : net.b);
        EndpointPlan& plan = plans[key];
        plan.port_center = port.center;
        plan.dir = d;
        // Anchor on the axis line through the port's cell.
        const GridIndex c = map.index_of(port.center + u * (0.51 * s));
        const Point cc = map.cell_center(c);
        plan.stub_start = port.center + nvec * dot(cc - port.center, nvec);
        plan.extension = 0.0;
      }
    }

    // Staggered depths, outermost (rank 0) shallowest. Rank follows the
    // group's local order.
    for (size_t rank = 0; rank < g.members.size(); ++rank) {
      const int key = g.members[rank];
      EndpointPlan& plan = plans[key];
      double ext = stagger_extension(tech, (int)rank);

      // Cap at the available straight runway.
      const Point u2 = dir_unit(plan.dir);
      double runway = ext;
      for (double t = s; t <= ext + 0.5 * s; t += s) {
        const Point p = plan.stub_start + u2 * t;
        if (!map.die().contains(p)) { runway = std::max(0.0, t - s); break; }
        const GridIndex c = map.index_of(p);
        if (map.at(c).kind == CellKind::DeviceObstacle) { runway = std::max(0.0, t - s); break; }
      }
      if (runway < ext - 1e-9) {
        std::ostringstream msg;
        msg << "port access: access region for net '" << circuit.nets[key / 2].id
            << "' capped at " << runway << " um (wanted " << ext << ")";
        out.warnings.push_back(msg.str());
        ext = runway;
      }
      plan.extension = ext;
    }
  }

  // Facing-pair truncation: a net whose two access regions point at each
  // other gets both depths cut at the midpoint.
  for (int n = 0; n < n_nets; ++n) {
    EndpointPlan& a = plans[n * 2];
    EndpointPlan& b = plans[n * 2 + 1];
    if (a.dir != opposite(b.dir)) continue;
    const Point u = dir_unit(a.dir);
    const double gap = dot(b.stub_start - a.stub_start, u);
    const double lat = std::abs(cross(u, b.stub_start - a.stub_start));
    if (gap <= 0.0 || lat > tech.waveguide_width) continue;
    if (a.extension + b.extension > gap - s) {
      const double half = std::max(s, (gap - s) / 2.0);
      a.extension = std::min(a.extension, half);
      b.extension = std::min(b.extension, half);
    }
  }

  // Materialize access points. Stub wires claim their cells before any
  // reservation: congested fans share cells at sub-grid pitch and the first
  // wire through keeps the cell.
  const int res_halfwidth =
      ((int)std::ceil(tech.waveguide_width / s) + 2) / 2;  // cells each side
  for (int key = 0; key < n_nets * 2; ++key) {
    const int n = key / 2;
    EndpointPlan& plan = plans[key];
    AccessPoint& ap = out.access[key];
    ap.net_index = n;
    ap.endpoint = key % 2;
    ap.port_dir = plan.dir;
    ap.port_center = plan.port_center;
    ap.sine_stub = plan.sine;

    const Point u = dir_unit(plan.dir);
    Point entry = plan.stub_start + u * plan.extension;
    GridIndex cell = map.index_of(entry);
    if (!map.in_bounds(cell)) {
      // Port at the die edge facing outward: clamp and warn.
      cell.ix = std::clamp(cell.ix, 0, map.nx() - 1);
      cell.iy = std::clamp(cell.iy, 0, map.ny() - 1);
      ap.unroutable_warning = true;
      out.warnings.push_back("port access: net '" + circuit.nets[n].id +
                             "' has no room in front of its port");
    }
    ap.cell = cell;
    ap.axis_anchor = plan.stub_start;
    ap.stub_len_um = plan.extension;

    // Stub wire cells (between stub start and the entry cell center), claimed
    // immediately.
    const Point cc = map.cell_center(cell);
    if (plan.extension > 0.5 * s) {
      NetGeometry stub;
      stub.net_index = n;
      stub.segments.push_back(Segment::straight(plan.stub_start, cc, tech.waveguide_width));
      for (const auto& rc : rasterize_geometry(stub, map))
        ap.stub_cells.push_back({rc.cell, rc.orientation, CommitKind::Wire, -1});
    }
    if (plan.sine) {
      NetGeometry stub;
      stub.net_index = n;
      stub.segments.push_back(*plan.sine);
      for (const auto& rc : rasterize_geometry(stub, map))
        ap.stub_cells.push_back({rc.cell, rc.orientation, CommitKind::Wire, -1});
    }
    map.commit_stub(n, ap.stub_cells);
  }

  // Reservations claim what is left of each corridor.
  for (int key = 0; key < n_nets * 2; ++key) {
    const int n = key / 2;
    EndpointPlan& plan = plans[key];
    AccessPoint& ap = out.access[key];
    const Point u = dir_unit(plan.dir);
    const Point entry = plan.stub_start + u * plan.extension;

    std::vector<GridIndex> reserved;
    const Point base = plan.sine ? plan.port_center : plan.stub_start;
    const double depth = std::max(plan.extension, distance(base, entry));
    const int steps = std::max(1, (int)std::ceil(depth / s) + 1);
    bool any_free = false;
    const Point nvec{-u.y, u.x};
    for (int t = 0; t <= steps; ++t) {
      const Point p = base + u * std::min(t * s, depth);
      for (int w = -res_halfwidth; w <= res_halfwidth; ++w) {
        const GridIndex c = map.index_of(p + nvec * (w * s));
        if (!map.in_bounds(c)) continue;
        if (map.at(c).kind == CellKind::Free) {
          map.reserve(c, n);
          reserved.push_back(c);
          any_free = true;
        }
      }
    }
    map.record_reservation(n, reserved);
    if (!any_free && !reserved.empty()) {
      out.warnings.push_back("port access: reservation for net '" + circuit.nets[n].id +
                             "' fully blocked by obstacles");
    }
    if (reserved.empty()) {
      ap.unroutable_warning = true;
      out.warnings.push_back("port access: reservation for net '" + circuit.nets[n].id +
                             "' is empty (port likely unroutable)");
    }
  }

  return out;
}

}  // namespace picroute
