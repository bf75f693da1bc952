#include "picroute/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace picroute {

namespace {

constexpr double kPi = 3.14159265358979323846;

Point rot90(const Point& v) { return {-v.y, v.x}; }

double sine_angle_deg(const Point& p0, const Point& p1, Dir heading) {
  const Point u = dir_unit(heading);
  const Point d = p1 - p0;
  const double axial = dot(d, u);
  const double lateral = cross(u, d);
  if (axial <= 0.0) return 0.0;
  // Total absolute turning of y = D/2*(1 - cos(pi x / L)): the tangent angle
  // rises to atan(pi D / (2 L)) at midspan and returns to zero.
  const double peak = std::atan(kPi * std::abs(lateral) / (2.0 * axial));
  return 2.0 * peak * 180.0 / kPi;
}

double sine_length(const Point& p0, const Point& p1, Dir heading) {
  const Point u = dir_unit(heading);
  const Point d = p1 - p0;
  const double L = dot(d, u);
  const double D = cross(u, d);
  if (L <= 0.0) return norm(d);
  // Simpson integration of sqrt(1 + y'^2); deterministic fixed panel count.
  const int n = 64;
  const double h = L / n;
  auto f = [&](double x) {
    const double yp = (D / 2.0) * (kPi / L) * std::sin(kPi * x / L);
    return std::sqrt(1.0 + yp * yp);
  };
  double acc = f(0.0) + f(L);
  for (int i = 1; i < n; ++i) acc += f(i * h) * ((i & 1) ? 4.0 : 2.0);
  return acc * h / 3.0;
}

Point sine_point(const Point& p0, const Point& p1, Dir heading, double t) {
  const Point u = dir_unit(heading);
  const Point n = rot90(u);
  const Point d = p1 - p0;
  const double L = dot(d, u);
  const double D = cross(u, d);
  const double x = t * L;
  const double y = (D / 2.0) * (1.0 - std::cos(kPi * x / L));
  return p0 + u * x + n * y;
}

}  // namespace

Segment Segment::straight(Point a, Point b, double width) {
  Segment s;
  s.kind = Kind::Straight;
  s.p0 = a;
  s.p1 = b;
  s.width = width;
  return s;
}

Segment Segment::arc_fillet(Point corner, Dir from, Dir to, double radius, double width) {
  Segment s;
  s.kind = Kind::ArcFillet;
  s.corner = corner;
  s.from_dir = from;
  s.to_dir = to;
  s.radius = radius;
  s.width = width;
  const int turn = turn_steps(from, to);
  if (turn == 0 || std::abs(turn) > 2)
    throw GeometryError("arc fillet turn must be +/-45 or +/-90 degrees");
  return s;
}

Segment Segment::crossing_mark(Point center, Dir a, Dir b, double size) {
  Segment s;
  s.kind = Kind::CrossingMark;
  s.center = center;
  s.axis_a = a;
  s.axis_b = b;
  s.size = size;
  if (!perpendicular(a, b)) throw GeometryError("crossing axes must be perpendicular");
  return s;
}

double Segment::turn_angle_deg() const {
  switch (kind) {
    case Kind::ArcFillet: return 45.0 * std::abs(turn_steps(from_dir, to_dir));
    case Kind::SineBend: return sine_angle_deg(p0, p1, heading);
    default: return 0.0;
  }
}

double Segment::tangent_length() const {
  const double theta = turn_angle_deg() * kPi / 180.0;
  return radius * std::tan(theta / 2.0);
}

bool Segment::arc_ccw() const { return turn_steps(from_dir, to_dir) > 0; }

Point Segment::arc_center() const {
  const Point u = dir_unit(from_dir);
  const Point t0 = corner - u * tangent_length();
  const Point n = arc_ccw() ? rot90(u) : rot90(u) * -1.0;
  return t0 + n * radius;
}

double Segment::length() const {
  switch (kind) {
    case Kind::Straight: return distance(p0, p1);
    case Kind::ArcFillet: return radius * turn_angle_deg() * kPi / 180.0;
    case Kind::SineBend: return sine_length(p0, p1, heading);
    case Kind::CrossingMark: return 0.0;
  }
  return 0.0;
}

Point Segment::start() const {
  switch (kind) {
    case Kind::ArcFillet: return corner - dir_unit(from_dir) * tangent_length();
    case Kind::CrossingMark: return center;
    default: return p0;
  }
}

Point Segment::end() const {
  switch (kind) {
    case Kind::ArcFillet: return corner + dir_unit(to_dir) * tangent_length();
    case Kind::CrossingMark: return center;
    default: return p1;
  }
}

Point Segment::tangent_start() const {
  switch (kind) {
    case Kind::Straight: {
      const Point d = p1 - p0;
      const double n = norm(d);
      return n > 0 ? d * (1.0 / n) : Point{1, 0};
    }
    case Kind::ArcFillet: return dir_unit(from_dir);
    case Kind::SineBend: return dir_unit(heading);
    case Kind::CrossingMark: return dir_unit(axis_a);
  }
  return {1, 0};
}

Point Segment::tangent_end() const {
  switch (kind) {
    case Kind::ArcFillet: return dir_unit(to_dir);
    default: return tangent_start();
  }
}

Segment sine_bend(Point p0, Point p1, Dir heading, double width, double min_length_factor) {
  const Point u = dir_unit(heading);
  const Point d = p1 - p0;
  const double axial = dot(d, u);
  const double lateral = cross(u, d);
  if (axial <= 0.0)
    throw GeometryError("sine bend: endpoint must lie ahead along the heading");
  if (std::abs(lateral) < kEpsGeo) return Segment::straight(p0, p1, width);
  if (axial < min_length_factor * std::abs(lateral))
    throw GeometryError("sine bend: axial length below minimum for this offset");
  Segment s;
  s.kind = Segment::Kind::SineBend;
  s.p0 = p0;
  s.p1 = p1;
  s.heading = heading;
  s.width = width;
  return s;
}

double NetGeometry::straight_length() const {
  double acc = 0.0;
  for (const auto& s : segments)
    if (s.kind == Segment::Kind::Straight) acc += s.length();
  return acc;
}

double NetGeometry::path_length() const {
  double acc = 0.0;
  for (const auto& s : segments) acc += s.length();
  return acc;
}

double NetGeometry::bend_deg() const {
  double acc = 0.0;
  for (const auto& s : segments) acc += s.turn_angle_deg();
  return acc;
}

int NetGeometry::crossing_count() const {
  int n = 0;
  for (const auto& s : segments)
    if (s.kind == Segment::Kind::CrossingMark) ++n;
  return n;
}

bool NetGeometry::g0_continuous() const {
  const Segment* prev = nullptr;
  for (const auto& s : segments) {
    if (s.kind == Segment::Kind::CrossingMark) continue;
    if (prev && distance(prev->end(), s.start()) > kEpsGeo) return false;
    prev = &s;
  }
  return true;
}

NetGeometry instantiate_polyline(const std::vector<Point>& points, double radius,
                                 double width, double lead_in, double lead_out) {
  NetGeometry geom;
  if (points.size() < 2) return geom;

  // Collapse collinear runs into single legs.
  std::vector<Point> v;
  v.push_back(points.front());
  for (size_t i = 1; i + 1 < points.size(); ++i) {
    const Point a = points[i] - v.back();
    const Point b = points[i + 1] - points[i];
    if (norm(a) < kEpsGeo) continue;
    if (std::abs(cross(a, b)) < kEpsGeo * std::max(1.0, norm(a) * norm(b)) &&
        dot(a, b) >= 0.0)
      continue;
    v.push_back(points[i]);
  }
  if (distance(points.back(), v.back()) > kEpsGeo) v.push_back(points.back());

  if (v.size() == 2) {
    geom.segments.push_back(Segment::straight(v[0], v[1], width));
    return geom;
  }

  // Fillets at interior vertices; check tangent fit on every leg.
  std::vector<Segment> arcs;
  for (size_t i = 1; i + 1 < v.size(); ++i) {
    const Point din = v[i] - v[i - 1];
    const Point dout = v[i + 1] - v[i];
    const Dir from = quantize_dir(din);
    const Dir to = quantize_dir(dout);
    if (norm(dir_unit(from) * norm(din) - din) > 1e-4 * std::max(1.0, norm(din)) ||
        norm(dir_unit(to) * norm(dout) - dout) > 1e-4 * std::max(1.0, norm(dout)))
      throw GeometryError("polyline legs must be 45-degree quantized");
    arcs.push_back(Segment::arc_fillet(v[i], from, to, radius, width));
  }

  for (size_t i = 0; i + 1 < arcs.size(); ++i) {
    const double leg = distance(arcs[i].corner, arcs[i + 1].corner);
    if (arcs[i].tangent_length() + arcs[i + 1].tangent_length() > leg + 1e-9)
      throw GeometryError("consecutive fillets do not fit between corners");
  }
  if (arcs.front().tangent_length() >
      distance(v[0], arcs.front().corner) + lead_in + 1e-9)
    throw GeometryError("first fillet protrudes past the available lead-in");
  if (arcs.back().tangent_length() >
      distance(v.back(), arcs.back().corner) + lead_out + 1e-9)
    throw GeometryError("last fillet protrudes past the available lead-out");

  // Emit straight/arc alternation, skipping zero-length straights.
  Point cur = v[0];
  for (size_t i = 0; i < arcs.size(); ++i) {
    const Point t0 = arcs[i].start();
    if (dot(t0 - cur, dir_unit(arcs[i].from_dir)) > kEpsGeo)
      geom.segments.push_back(Segment::straight(cur, t0, width));
    geom.segments.push_back(arcs[i]);
    cur = arcs[i].end();
  }
  if (distance(cur, v.back()) > kEpsGeo)
    geom.segments.push_back(Segment::straight(cur, v.back(), width));
  return geom;
}

std::vector<Point> node_polyline(const std::vector<DirectionalNode>& nodes,
                                 const OrientedGridMap& map) {
  std::vector<Point> pts;
  if (nodes.empty()) return pts;
  pts.push_back(map.cell_center(nodes.front().ix, nodes.front().iy));
  for (size_t i = 1; i < nodes.size(); ++i) {
    const Point a = map.cell_center(nodes[i - 1].ix, nodes[i - 1].iy);
    const Point b = map.cell_center(nodes[i].ix, nodes[i].iy);
    if (nodes[i].orientation != nodes[i - 1].orientation) {
      const Point ua = dir_unit(nodes[i - 1].orientation);
      const Point ub = dir_unit(nodes[i].orientation);
      const double den = cross(ua, ub);
      if (std::abs(den) > 1e-12) {
        const double t = cross(b - a, ub) / den;
        pts.push_back(a + ua * t);
      }
    }
    pts.push_back(b);
  }
  return pts;
}

NetGeometry instantiate_path(const std::vector<DirectionalNode>& nodes,
                             const OrientedGridMap& map, const Technology& tech) {
  NetGeometry geom = instantiate_polyline(node_polyline(nodes, map),
                                          tech.bend_radius_r,
                                          tech.waveguide_width,
                                          /*lead_in=*/tech.bend_radius_r * 2.0,
                                          /*lead_out=*/tech.bend_radius_r * 2.0);
  return geom;
}

void sample_centerline(const Segment& seg, double max_step, std::vector<Point>& out) {
  switch (seg.kind) {
    case Segment::Kind::Straight: {
      const double len = seg.length();
      const int n = std::max(1, (int)std::ceil(len / max_step));
      for (int i = 0; i <= n; ++i) out.push_back(seg.p0 + (seg.p1 - seg.p0) * (double(i) / n));
      break;
    }
    case Segment::Kind::ArcFillet: {
      const Point c = seg.arc_center();
      const Point s0 = seg.start();
      const double a0 = std::atan2(s0.y - c.y, s0.x - c.x);
      const double sweep = (seg.arc_ccw() ? 1.0 : -1.0) * seg.turn_angle_deg() * kPi / 180.0;
      const double len = seg.length();
      const int n = std::max(2, (int)std::ceil(len / max_step));
      for (int i = 0; i <= n; ++i) {
        const double a = a0 + sweep * (double(i) / n);
        out.push_back({c.x + seg.radius * std::cos(a), c.y + seg.radius * std::sin(a)});
      }
      break;
    }
    case Segment::Kind::SineBend: {
      const double len = seg.length();
      const int n = std::max(4, (int)std::ceil(len / max_step));
      for (int i = 0; i <= n; ++i) out.push_back(sine_point(seg.p0, seg.p1, seg.heading, double(i) / n));
      break;
    }
    case Segment::Kind::CrossingMark:
      break;
  }
}

double centerline_distance(const Segment& seg, const Point& p) {
  switch (seg.kind) {
    case Segment::Kind::Straight: {
      const Point d = seg.p1 - seg.p0;
      const double len2 = dot(d, d);
      if (len2 <= 0.0) return distance(p, seg.p0);
      const double t = std::clamp(dot(p - seg.p0, d) / len2, 0.0, 1.0);
      return distance(p, seg.p0 + d * t);
    }
    case Segment::Kind::ArcFillet: {
      const Point c = seg.arc_center();
      const Point s0 = seg.start();
      const Point s1 = seg.end();
      const double a0 = std::atan2(s0.y - c.y, s0.x - c.x);
      const double sweep = (seg.arc_ccw() ? 1.0 : -1.0) * seg.turn_angle_deg() * kPi / 180.0;
      double ap = std::atan2(p.y - c.y, p.x - c.x);
      // Bring ap into the arc's angular frame.
      double rel = ap - a0;
      while (rel > kPi) rel -= 2 * kPi;
      while (rel < -kPi) rel += 2 * kPi;
      const double lo = std::min(0.0, sweep), hi = std::max(0.0, sweep);
      if (rel >= lo && rel <= hi)
        return std::abs(distance(p, c) - seg.radius);
      return std::min(distance(p, s0), distance(p, s1));
    }
    case Segment::Kind::SineBend: {
      // Dense polyline approximation; sine bends are short and rare.
      std::vector<Point> pts;
      sample_centerline(seg, std::max(seg.length() / 64.0, 1e-3), pts);
      double best = std::numeric_limits<double>::max();
      for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const Point d = pts[i + 1] - pts[i];
        const double len2 = dot(d, d);
        const double t = len2 > 0 ? std::clamp(dot(p - pts[i], d) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, distance(p, pts[i] + d * t));
      }
      return best;
    }
    case Segment::Kind::CrossingMark:
      return std::numeric_limits<double>::max();
  }
  return std::numeric_limits<double>::max();
}

Point centerline_tangent_near(const Segment& seg, const Point& p) {
  switch (seg.kind) {
    case Segment::Kind::Straight:
      return seg.tangent_start();
    case Segment::Kind::ArcFillet: {
      const Point c = seg.arc_center();
      const double ap = std::atan2(p.y - c.y, p.x - c.x);
      const Point radial{std::cos(ap), std::sin(ap)};
      Point t = seg.arc_ccw() ? rot90(radial) : rot90(radial) * -1.0;
      return t;
    }
    case Segment::Kind::SineBend: {
      const Point u = dir_unit(seg.heading);
      const Point d = seg.p1 - seg.p0;
      const double L = dot(d, u);
      const double D = cross(u, d);
      const double x = std::clamp(dot(p - seg.p0, u), 0.0, L);
      const double yp = (D / 2.0) * (kPi / L) * std::sin(kPi * x / L);
      const Point n = rot90(u);
      const Point t = u + n * yp;
      const double nn = norm(t);
      return t * (1.0 / nn);
    }
    case Segment::Kind::CrossingMark:
      return dir_unit(seg.axis_a);
  }
  return {1, 0};
}

namespace {

std::vector<RasterCell> rasterize_into(const Segment& seg, const OrientedGridMap& map,
                                       double halfwidth) {
  std::vector<RasterCell> out;
  if (seg.kind == Segment::Kind::CrossingMark) return out;

  // Bounding box of the band, conservatively inflated.
  std::vector<Point> pts;
  sample_centerline(seg, map.grid_size() * 0.5, pts);
  double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
  for (const auto& p : pts) {
    xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
  }
  const double s = map.grid_size();
  const double m = halfwidth + 0.51 * s;
  const GridIndex lo = map.index_of({xmin - m, ymin - m});
  const GridIndex hi = map.index_of({xmax + m, ymax + m});

  const double cell_half_diag = s * 0.70710678118654752440;
  const int sub = 8;  // s/8 probe lattice
  for (int iy = std::max(0, lo.iy); iy <= std::min(map.ny() - 1, hi.iy); ++iy) {
    for (int ix = std::max(0, lo.ix); ix <= std::min(map.nx() - 1, hi.ix); ++ix) {
      const Point cc = map.cell_center(ix, iy);
      const double dc = centerline_distance(seg, cc);
      bool inside;
      if (dc <= halfwidth - cell_half_diag) {
        inside = true;
      } else if (dc > halfwidth + cell_half_diag) {
        inside = false;
      } else {
        inside = false;
        const Rect r = map.cell_rect(ix, iy);
        for (int a = 0; a <= sub && !inside; ++a)
          for (int b = 0; b <= sub && !inside; ++b) {
            const Point p{r.xmin + (r.xmax - r.xmin) * a / sub,
                          r.ymin + (r.ymax - r.ymin) * b / sub};
            inside = centerline_distance(seg, p) <= halfwidth;
          }
      }
      if (inside) {
        const Dir d = quantize_dir(centerline_tangent_near(seg, cc));
        out.push_back({{ix, iy}, d});
      }
    }
  }
  return out;
}

}  // namespace

std::vector<RasterCell> rasterize_segment(const Segment& seg, const OrientedGridMap& map,
                                          double extra_halfwidth) {
  return rasterize_into(seg, map, seg.width * 0.5 + extra_halfwidth);
}

std::vector<RasterCell> rasterize_geometry(const NetGeometry& geom,
                                           const OrientedGridMap& map,
                                           double extra_halfwidth) {
  std::vector<RasterCell> out;
  std::vector<char> seen((size_t)map.nx() * map.ny(), 0);
  for (const auto& seg : geom.segments) {
    for (const auto& rc : rasterize_segment(seg, map, extra_halfwidth)) {
      char& flag = seen[(size_t)rc.cell.iy * map.nx() + rc.cell.ix];
      if (!flag) {
        flag = 1;
        out.push_back(rc);
      }
    }
  }
  return out;
}

std::vector<RasterCell> rasterize_centerline_band(const NetGeometry& geom,
                                                  const OrientedGridMap& map,
                                                  double radius) {
  std::vector<RasterCell> out;
  std::vector<char> seen((size_t)map.nx() * map.ny(), 0);
  const double s = map.grid_size();
  for (const auto& seg : geom.segments) {
    if (seg.kind == Segment::Kind::CrossingMark) continue;
    std::vector<Point> pts;
    sample_centerline(seg, s * 0.5, pts);
    double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
    for (const auto& p : pts) {
      xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
    }
    const GridIndex lo = map.index_of({xmin - radius - s, ymin - radius - s});
    const GridIndex hi = map.index_of({xmax + radius + s, ymax + radius + s});
    for (int iy = std::max(0, lo.iy); iy <= std::min(map.ny() - 1, hi.iy); ++iy) {
      for (int ix = std::max(0, lo.ix); ix <= std::min(map.nx() - 1, hi.ix); ++ix) {
        char& flag = seen[(size_t)iy * map.nx() + ix];
        if (flag) continue;
        const Point cc = map.cell_center(ix, iy);
        if (centerline_distance(seg, cc) <= radius) {
          flag = 1;
          const Dir d = quantize_dir(centerline_tangent_near(seg, cc));
          out.push_back({{ix, iy}, d});
        }
      }
    }
  }
  return out;
}

}  // namespace picroute
