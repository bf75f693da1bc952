#pragma once

// Basic planar geometry used throughout the router. All coordinates are in
// micrometers unless a name says otherwise.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

namespace picroute {

struct Point {
  double x = 0.0;
  double y = 0.0;

  Point operator+(const Point& o) const { return {x + o.x, y + o.y}; }
  Point operator-(const Point& o) const { return {x - o.x, y - o.y}; }
  Point operator*(double k) const { return {x * k, y * k}; }
  bool operator==(const Point& o) const = default;
};

inline double dot(const Point& a, const Point& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Point& a, const Point& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Point& a) { return std::hypot(a.x, a.y); }
inline double distance(const Point& a, const Point& b) { return norm(a - b); }

struct Rect {
  double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  bool valid() const { return xmax >= xmin && ymax >= ymin; }
  bool contains(const Point& p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
  bool contains_strict(const Point& p) const {
    return p.x > xmin && p.x < xmax && p.y > ymin && p.y < ymax;
  }
  bool contains(const Rect& r) const {
    return r.xmin >= xmin && r.xmax <= xmax && r.ymin >= ymin && r.ymax <= ymax;
  }
  bool overlaps(const Rect& r) const {
    return !(r.xmax <= xmin || r.xmin >= xmax || r.ymax <= ymin || r.ymin >= ymax);
  }
  Point center() const { return {(xmin + xmax) * 0.5, (ymin + ymax) * 0.5}; }
  Rect expanded(double m) const { return {xmin - m, ymin - m, xmax + m, ymax + m}; }
};

// Distance from a point to an axis-aligned rectangle (0 if inside).
inline double rect_distance(const Rect& r, const Point& p) {
  const double dx = std::max({r.xmin - p.x, 0.0, p.x - r.xmax});
  const double dy = std::max({r.ymin - p.y, 0.0, p.y - r.ymax});
  return std::hypot(dx, dy);
}

// The eight routing orientations, counterclockwise from east. Axis-aligned
// orientations are "Manhattan"; diagonals are "non-Manhattan".
enum class Dir : std::uint8_t { E = 0, NE = 1, N = 2, NW = 3, W = 4, SW = 5, S = 6, SE = 7 };

inline constexpr std::array<Dir, 8> kAllDirs = {Dir::E,  Dir::NE, Dir::N,  Dir::NW,
                                                Dir::W,  Dir::SW, Dir::S,  Dir::SE};

inline bool is_axis(Dir d) { return (static_cast<int>(d) & 1) == 0; }
inline bool is_diagonal(Dir d) { return (static_cast<int>(d) & 1) == 1; }

inline Dir opposite(Dir d) { return static_cast<Dir>((static_cast<int>(d) + 4) & 7); }

// Rotate by k 45-degree steps, counterclockwise.
inline Dir rotated(Dir d, int k45) {
  return static_cast<Dir>(((static_cast<int>(d) + k45) % 8 + 8) % 8);
}

// True when the headings meet at exactly 90 degrees.
inline bool perpendicular(Dir a, Dir b) {
  const int diff = (static_cast<int>(a) - static_cast<int>(b) + 8) & 7;
  return diff == 2 || diff == 6;
}

// Signed turn (in 45-degree steps, positive = counterclockwise) from a to b,
// in [-4, 3].
inline int turn_steps(Dir a, Dir b) {
  int diff = (static_cast<int>(b) - static_cast<int>(a) + 8) & 7;
  if (diff > 4) diff -= 8;
  return diff;
}

// Integer step of the direction on the grid (components in {-1,0,1}).
inline std::array<int, 2> dir_step(Dir d) {
  static constexpr std::array<std::array<int, 2>, 8> steps = {
      {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
  return steps[static_cast<int>(d)];
}

// Unit vector of the direction (diagonals normalized).
inline Point dir_unit(Dir d) {
  const auto s = dir_step(d);
  if (is_axis(d)) return {double(s[0]), double(s[1])};
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  return {s[0] * inv_sqrt2, s[1] * inv_sqrt2};
}

inline double dir_angle_deg(Dir d) { return 45.0 * static_cast<int>(d); }

inline const char* dir_name(Dir d) {
  static constexpr std::array<const char*, 8> names = {"E", "NE", "N", "NW",
                                                       "W", "SW", "S", "SE"};
  return names[static_cast<int>(d)];
}

// Parses one of E,NE,N,NW,W,SW,S,SE. Returns false on anything else.
inline bool parse_dir(const std::string& s, Dir& out) {
  for (Dir d : kAllDirs) {
    if (s == dir_name(d)) {
      out = d;
      return true;
    }
  }
  return false;
}

// Quantizes an arbitrary tangent vector to the nearest of the 8 directions.
inline Dir quantize_dir(const Point& v) {
  const double ang = std::atan2(v.y, v.x);  // [-pi, pi]
  int idx = static_cast<int>(std::lround(ang / (M_PI / 4.0)));
  return static_cast<Dir>(((idx % 8) + 8) % 8);
}

}  // namespace picroute
