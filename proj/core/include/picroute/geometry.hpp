#pragma once

// Real waveguide geometry: straight runs, circular-arc fillets for 45/90
// degree turns, sine bends for lateral offsets, and crossing markers; plus
// conservative rasterization onto the routing grid.

#include <optional>
#include <vector>

#include "picroute/geom.hpp"
#include "picroute/grid.hpp"
#include "picroute/tech.hpp"

namespace picroute {

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kEpsGeo = 1e-6;    // G0 continuity tolerance, um
inline constexpr double kEpsPort = 0.01;   // port alignment tolerance, um

struct Segment {
  enum class Kind : std::uint8_t { Straight, ArcFillet, SineBend, CrossingMark };
  Kind kind = Kind::Straight;
  double width = 0.5;

  // Straight / SineBend endpoints.
  Point p0, p1;
  // ArcFillet: polyline corner with incoming/outgoing headings and radius.
  Point corner;
  Dir from_dir = Dir::E;
  Dir to_dir = Dir::E;
  double radius = 0.0;
  // SineBend axis heading (tangent at both ends).
  Dir heading = Dir::E;
  // CrossingMark: center and the two perpendicular axes.
  Point center;
  Dir axis_a = Dir::E;
  Dir axis_b = Dir::N;
  double size = 0.0;

  static Segment straight(Point a, Point b, double width);
  static Segment arc_fillet(Point corner, Dir from, Dir to, double radius, double width);
  static Segment crossing_mark(Point center, Dir a, Dir b, double size);

  double turn_angle_deg() const;   // 45 or 90 for fillets, total |turn| for sine
  double length() const;           // centerline length (0 for crossing marks)
  Point start() const;
  Point end() const;
  Point tangent_start() const;     // unit tangent at start
  Point tangent_end() const;
  // Arc helpers (valid for ArcFillet).
  double tangent_length() const;   // r*tan(theta/2)
  Point arc_center() const;
  bool arc_ccw() const;
};

// Sine bend between p0 and p1 whose end tangents are parallel to `heading`;
// degenerates to a straight when the lateral offset is ~0. Throws
// GeometryError when the axial length is below min_length_factor*|offset|.
Segment sine_bend(Point p0, Point p1, Dir heading, double width,
                  double min_length_factor = 4.0);

struct NetGeometry {
  int net_index = -1;
  std::vector<Segment> segments;

  double straight_length() const;  // straight runs only
  double path_length() const;      // full centerline: straights + arcs + sines
  double bend_deg() const;         // total turned angle
  int crossing_count() const;

  // Verifies G0 continuity of consecutive segments (within kEpsGeo).
  bool g0_continuous() const;
};

// Builds geometry for a polyline through the given points: fillets of the
// bend radius are inscribed at every direction change. Leg directions must be
// 45-degree quantized. lead_in/lead_out give how much straight run exists
// before the first and after the last point; a fillet may protrude into that
// allowance but consecutive fillets must fit between their corners, otherwise
// GeometryError is thrown (an Eq-style step-size bug upstream).
NetGeometry instantiate_polyline(const std::vector<Point>& points, double radius,
                                 double width, double lead_in = 0.0,
                                 double lead_out = 0.0);

// Polyline through the node centers with the turn corner inserted between
// nodes whose headings differ (the corner is the intersection of the two
// heading rays).
std::vector<Point> node_polyline(const std::vector<DirectionalNode>& nodes,
                                 const OrientedGridMap& map);

// Node path on the grid map -> geometry through the cell centers, fillets
// inscribed at every heading change. Consecutive nodes must be valid
// neighbor steps.
NetGeometry instantiate_path(const std::vector<DirectionalNode>& nodes,
                             const OrientedGridMap& map, const Technology& tech);

// Samples the centerline of a segment at spacing <= max_step (always includes
// both endpoints). Crossing marks yield no samples.
void sample_centerline(const Segment& seg, double max_step, std::vector<Point>& out);

// Minimum distance from a point to the segment's centerline.
double centerline_distance(const Segment& seg, const Point& p);
// Unit tangent of the centerline at the closest point to p.
Point centerline_tangent_near(const Segment& seg, const Point& p);

struct RasterCell {
  GridIndex cell;
  Dir orientation = Dir::E;
  bool operator==(const RasterCell&) const = default;
};

// Cells whose area intersects the width-expanded centerline, each tagged with
// the local tangent quantized to 8 directions. Cell membership is decided by
// probing an s/8 sub-lattice of the cell against the analytic band distance;
// `extra_halfwidth` widens the band (used for spacing halos).
std::vector<RasterCell> rasterize_geometry(const NetGeometry& geom,
                                           const OrientedGridMap& map,
                                           double extra_halfwidth = 0.0);
std::vector<RasterCell> rasterize_segment(const Segment& seg,
                                          const OrientedGridMap& map,
                                          double extra_halfwidth = 0.0);

// Cells whose CENTER lies within `radius` of the centerline. Spacing checks
// use this against committed wires, which run near their cell centers.
std::vector<RasterCell> rasterize_centerline_band(const NetGeometry& geom,
                                                  const OrientedGridMap& map,
                                                  double radius);

}  // namespace picroute
