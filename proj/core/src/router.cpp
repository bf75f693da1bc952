#include "picroute/router.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>

namespace picroute {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;

// Step-length constants derived from the bend radius and grid size.
struct StepConsts {
  double s, r;
  double L90, LX, LY;  // um
  double t90, t45;
  double arc90, arc45;
  double wl_turn90, wl_turn45;
};

StepConsts step_consts(const Technology& tech, const StepTable& st) {
  StepConsts c;
  c.s = tech.grid_size_s;
  c.r = tech.bend_radius_r;
  c.L90 = st.step90 * c.s;
  c.LX = st.step45x * c.s;
  c.LY = st.step45y * c.s;
  c.t90 = c.r;
  c.t45 = (kSqrt2 - 1.0) * c.r;
  c.arc90 = c.r * kPi / 2.0;
  c.arc45 = c.r * kPi / 4.0;
  c.wl_turn90 = 2.0 * c.L90 - 2.0 * c.t90 + c.arc90;
  c.wl_turn45 = (c.LX - c.LY) + kSqrt2 * c.LY - 2.0 * c.t45 + c.arc45;
  return c;
}

bool same_axis(Dir a, Dir b) { return a == b || a == opposite(b); }

}  // namespace

StepTable build_step_table(const Technology& tech) {
  const double ratio = tech.bend_radius_r / tech.grid_size_s;
  StepTable st;
  st.step90 = (int)std::ceil(ratio - 1e-12);
  st.step45x = (int)std::ceil((kSqrt2 - 1.0) * ratio - 1e-12);
  st.step45y = (int)std::ceil((1.0 - kSqrt2 / 2.0) * ratio - 1e-12);
  st.step90 = std::max(1, st.step90);
  st.step45x = std::max(1, st.step45x);
  st.step45y = std::max(1, st.step45y);
  return st;
}

std::vector<NeighborStep> neighbors(const DirectionalNode& node, const StepTable& st,
                                    const Technology& tech, int nx, int ny,
                                    bool diagonals) {
  const StepConsts c = step_consts(tech, st);
  std::vector<NeighborStep> out;
  const auto push = [&](int dx, int dy, Dir o, StepKind kind, double wl, double ang) {
    const int ix = node.ix + dx, iy = node.iy + dy;
    if (ix < 0 || ix >= nx || iy < 0 || iy >= ny) return;
    out.push_back({{ix, iy, o}, kind, wl, ang});
  };

  const auto u = dir_step(node.orientation);
  if (is_axis(node.orientation)) {
    const auto n = dir_step(rotated(node.orientation, 2));  // left normal
    push(u[0], u[1], node.orientation, StepKind::Forward, c.s, 0.0);
    if (diagonals) {
      push(u[0] * st.step45x + n[0] * st.step45y, u[1] * st.step45x + n[1] * st.step45y,
           rotated(node.orientation, 1), StepKind::Turn45Left, c.wl_turn45, 45.0);
      push(u[0] * st.step45x - n[0] * st.step45y, u[1] * st.step45x - n[1] * st.step45y,
           rotated(node.orientation, -1), StepKind::Turn45Right, c.wl_turn45, 45.0);
    }
    push((u[0] + n[0]) * st.step90, (u[1] + n[1]) * st.step90,
         rotated(node.orientation, 2), StepKind::Turn90Left, c.wl_turn90, 90.0);
    push((u[0] - n[0]) * st.step90, (u[1] - n[1]) * st.step90,
         rotated(node.orientation, -2), StepKind::Turn90Right, c.wl_turn90, 90.0);
  } else {
    push(u[0], u[1], node.orientation, StepKind::Forward, kSqrt2 * c.s, 0.0);
    // Turns toward the two adjacent axis directions: the axis-side component
    // takes step45x, the other axis step45y.
    const Dir left = rotated(node.orientation, 1);    // N for NE, etc.
    const Dir right = rotated(node.orientation, -1);  // E for NE, etc.
    const auto axis_delta = [&](Dir target) -> std::array<int, 2> {
      if (same_axis(target, Dir::E))
        return {u[0] * st.step45x, u[1] * st.step45y};
      return {u[0] * st.step45y, u[1] * st.step45x};
    };
    const auto dl = axis_delta(left);
    const auto dr = axis_delta(right);
    push(dl[0], dl[1], left, StepKind::Turn45Left, c.wl_turn45, 45.0);
    push(dr[0], dr[1], right, StepKind::Turn45Right, c.wl_turn45, 45.0);
  }
  return out;
}

double heuristic(const DirectionalNode& node, const GridIndex& target,
                 const Technology& tech) {
  const double dx = std::abs(node.ix - target.ix);
  const double dy = std::abs(node.iy - target.iy);
  const double dmin = std::min(dx, dy);
  const double dmax = std::max(dx, dy);
  const double dist_cells = (dmax - dmin) + kSqrt2 * dmin;
  double h = dist_cells * tech.grid_size_s * tech.alpha_w_per_um();
  bool bend_needed = dmin > 0 && dmax > 0;
  if (bend_needed && dx == dy && is_diagonal(node.orientation)) {
    // Target exactly on the node's diagonal ray: reachable with zero bends.
    const auto u = dir_step(node.orientation);
    if ((target.ix - node.ix) * u[0] > 0 && (target.iy - node.iy) * u[1] > 0)
      bend_needed = false;
  }
  if (bend_needed) h += tech.alpha_b * 45.0 / 90.0;
  return h;
}

double gcp_penalty(const OrientedGridMap& map, const DirectionalNode& node,
                   int own_net, int unrouted_count, const Technology& tech,
                   double cw_cells, double lambda_c_override) {
  const StepTable st = build_step_table(tech);
  const double cw = cw_cells >= 0 ? cw_cells : (double)st.step45y;
  const double lambda = lambda_c_override >= 0 ? lambda_c_override : tech.lambda_c;
  const int W = (int)std::lround(cw * std::max(0, unrouted_count));
  int count = 0;
  for (int iy = std::max(0, node.iy - W); iy <= std::min(map.ny() - 1, node.iy + W); ++iy)
    for (int ix = std::max(0, node.ix - W); ix <= std::min(map.nx() - 1, node.ix + W); ++ix) {
      const auto& st2 = map.at(ix, iy);
      // Cells claimed by other nets (wires, reservations, crossings); device
      // blockages are already hard obstacles and would swamp every node next
      // to a port.
      const bool foreign =
          st2.kind == CellKind::Crossing ||
          ((st2.kind == CellKind::Occupied || st2.kind == CellKind::Reserved) &&
           st2.owner != own_net);
      if (foreign) ++count;
    }
  return lambda * count;
}

CurvyRouter::CurvyRouter(const OrientedGridMap& map, const Technology& tech,
                         RouteOptions opts)
    : map_(map), tech_(tech), opts_(opts), steps_(build_step_table(tech)) {
  const StepConsts c = step_consts(tech, steps_);
  qstep_ = c.s / 4.0;
  t45_ = c.t45;
  t90_ = c.t90;
  L90_ = c.L90;
  LX_ = c.LX;
  LY_ = c.LY;
  runway_cells_ = std::max(
      1, (int)std::ceil((tech.crossing_size / 2.0 + tech.crossing_straight_margin) / c.s -
                        1e-12));
  alpha_c_ = opts_.alpha_c_override >= 0 ? opts_.alpha_c_override : tech.alpha_c;
  lambda_c_ = opts_.lambda_c_override >= 0 ? opts_.lambda_c_override : tech.lambda_c;
  cw_ = opts_.cw_cells >= 0 ? opts_.cw_cells : (double)steps_.step45y;
  // Per-cell history weight. A contested run is tens of cells, so a handful
  // of rips on it should rival one crossing; the raw 0.5*alpha_c per cell
  // would outprice the entire die on coarse grids.
  hist_w_ = opts_.history_weight >= 0
                ? opts_.history_weight
                : std::min(0.5 * tech.alpha_c, 10.0 * tech.alpha_w_per_um() * c.s);
  build_shapes();
}

int CurvyRouter::avail_units(double um) const {
  const double v = um / qstep_;
  int units = (int)std::floor(v + 1e-9);
  return std::clamp(units, avail_min_, avail_cap_);
}

void CurvyRouter::build_shapes() {
  const StepConsts c = step_consts(tech_, steps_);
  const double w = tech_.waveguide_width;
  // Spacing halo against committed wires, measured to their cell centers
  // (wires run near centers). The stray allowance keeps legally spaced
  // adjacent-column wires routable; signoff spacing is the DRC's job.
  const double stray = std::min(0.45 * c.s, std::max(0.0, c.s - w - tech_.min_spacing));
  const double halo_radius = w + tech_.min_spacing + stray - 1e-6;

  // Requirements / results of the straight-run bookkeeping, in quarter-cell
  // units (ceil for requirements, floor for results: conservative both ways).
  const auto ceil_u = [&](double um) { return (int)std::ceil(um / qstep_ - 1e-9); };
  const auto floor_u = [&](double um) { return (int)std::floor(um / qstep_ + 1e-9); };

  const int req90 = ceil_u(c.t90 - c.L90);
  const int req45_ms = ceil_u(c.t45 - (c.LX - c.LY));
  const int req45_nms = ceil_u(c.t45 - kSqrt2 * c.LY);
  const int reqx = ceil_u(tech_.crossing_size / 2.0 + tech_.crossing_straight_margin - c.s);
  const int out90 = floor_u(c.L90 - c.t90);
  const int out45_ms = floor_u(kSqrt2 * c.LY - c.t45);
  const int out45_nms = floor_u((c.LX - c.LY) - c.t45);

  avail_cap_ = std::max({req90, req45_ms, req45_nms, reqx, 4}) + 1;
  avail_min_ = std::min({out90, out45_ms, out45_nms, 0}) - 1;

  // Scratch map for template rasterization, node at its center cell.
  const int K = steps_.step90 + runway_cells_ +
                (int)std::ceil((c.r + halo_radius) / c.s) + 4;
  OrientedGridMap scratch({0, 0, (2 * K + 1) * c.s, (2 * K + 1) * c.s}, c.s);
  const GridIndex center{K, K};
  const Point c0 = scratch.cell_center(center);

  const auto rasterize_pieces = [&](const std::vector<Segment>& pieces, double extra) {
    std::vector<RasterCell> cells;
    NetGeometry g;
    g.segments = pieces;
    for (const auto& rc : rasterize_geometry(g, scratch, extra)) {
      cells.push_back({{rc.cell.ix - K, rc.cell.iy - K}, rc.orientation});
    }
    return cells;
  };
  const auto halo_pieces = [&](const std::vector<Segment>& pieces,
                               const std::vector<RasterCell>& core) {
    std::vector<RasterCell> cells;
    NetGeometry g;
    g.segments = pieces;
    for (const auto& rc : rasterize_centerline_band(g, scratch, halo_radius)) {
      const RasterCell rel{{rc.cell.ix - K, rc.cell.iy - K}, rc.orientation};
      bool in_core = false;
      for (const auto& cc : core)
        if (cc.cell == rel.cell) { in_core = true; break; }
      if (!in_core) cells.push_back(rel);
    }
    return cells;
  };

  shapes_.assign(8, {});
  for (Dir d : kAllDirs) {
    auto& list = shapes_[(int)d];
    const Point u = dir_unit(d);
    const bool ms = is_axis(d);
    const auto base_steps = neighbors({K, K, d}, steps_, tech_, 2 * K + 1, 2 * K + 1, true);

    for (const auto& nb : base_steps) {
      StepShape shape;
      shape.step = nb;
      shape.step.to = {nb.to.ix - K, nb.to.iy - K, nb.to.orientation};  // relative

      std::vector<Segment> pieces;
      const Point b = scratch.cell_center({nb.to.ix, nb.to.iy});
      switch (nb.kind) {
        case StepKind::Forward: {
          pieces.push_back(Segment::straight(c0, b, w));
          shape.req_units = avail_min_;  // no requirement
          shape.avail_out = ms ? 4 : floor_u(kSqrt2 * c.s);
          shape.avail_is_delta = true;
          break;
        }
        case StepKind::Turn90Left:
        case StepKind::Turn90Right: {
          const Point corner = c0 + u * c.L90;
          Segment arc = Segment::arc_fillet(corner, d, nb.to.orientation, c.r, w);
          if (c.L90 - c.t90 > kEpsGeo)
            pieces.push_back(Segment::straight(c0, arc.start(), w));
          pieces.push_back(arc);
          if (distance(arc.end(), b) > kEpsGeo)
            pieces.push_back(Segment::straight(arc.end(), b, w));
          shape.req_units = req90;
          shape.avail_out = out90;
          break;
        }
        case StepKind::Turn45Left:
        case StepKind::Turn45Right: {
          const double dc = ms ? (c.LX - c.LY) : kSqrt2 * c.LY;
          const Point corner = c0 + u * dc;
          Segment arc = Segment::arc_fillet(corner, d, nb.to.orientation, c.r, w);
          if (dot(arc.start() - c0, u) > kEpsGeo)
            pieces.push_back(Segment::straight(c0, arc.start(), w));
          pieces.push_back(arc);
          if (dot(b - arc.end(), dir_unit(nb.to.orientation)) > kEpsGeo)
            pieces.push_back(Segment::straight(arc.end(), b, w));
          shape.req_units = ms ? req45_ms : req45_nms;
          shape.avail_out = ms ? out45_ms : out45_nms;
          break;
        }
        default:
          continue;
      }
      shape.core = rasterize_pieces(pieces, 0.0);
      shape.halo = halo_pieces(pieces, shape.core);
      list.push_back(std::move(shape));
    }

    // Crossing variant: forward through the blocked cell plus the runway.
    {
      StepShape shape;
      const auto us = dir_step(d);
      const int span = 1 + runway_cells_;
      shape.step.to = {us[0] * span, us[1] * span, d};
      shape.step.kind = StepKind::CrossForward;
      shape.step.delta_wl = (ms ? c.s : kSqrt2 * c.s) * span;
      shape.step.delta_angle = 0.0;
      shape.req_units = reqx;
      shape.avail_out = (ms ? 4 : floor_u(kSqrt2 * c.s)) * span;
      shape.avail_is_delta = true;
      const Point b = c0 + Point{us[0] * span * c.s, us[1] * span * c.s};
      std::vector<Segment> pieces{Segment::straight(c0, b, w)};
      shape.core = rasterize_pieces(pieces, 0.0);
      shape.halo = halo_pieces(pieces, shape.core);
      list.push_back(std::move(shape));
    }
  }
}

bool CurvyRouter::avail_allows(StepKind kind, Dir from_dir, int units_before) const {
  for (const auto& shape : shapes_for(from_dir))
    if (shape.step.kind == kind) return units_before >= shape.req_units;
  return false;
}

int CurvyRouter::avail_after(StepKind kind, Dir from_dir, int units_before) const {
  for (const auto& shape : shapes_for(from_dir))
    if (shape.step.kind == kind) {
      const int v = shape.avail_is_delta ? units_before + shape.avail_out : shape.avail_out;
      return std::clamp(v, avail_min_, avail_cap_);
    }
  return units_before;
}

void CurvyRouter::prepare_net(int net_index) const {
  // Prefix sums over cells that count as foreign for the congestion window.
  const int nx = map_.nx(), ny = map_.ny();
  foreign_prefix_.assign((size_t)(nx + 1) * (ny + 1), 0);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const auto& st = map_.at(ix, iy);
      int foreign = 0;
      if (st.kind == CellKind::Crossing ||
          ((st.kind == CellKind::Occupied || st.kind == CellKind::Reserved) &&
           st.owner != net_index))
        foreign = 1;
      foreign_prefix_[(size_t)(iy + 1) * (nx + 1) + (ix + 1)] =
          foreign + foreign_prefix_[(size_t)iy * (nx + 1) + (ix + 1)] +
          foreign_prefix_[(size_t)(iy + 1) * (nx + 1) + ix] -
          foreign_prefix_[(size_t)iy * (nx + 1) + ix];
    }
  }
  prepared_net_ = net_index;
}

namespace {

struct PlanContext {
  const CrossingPlan* plan = nullptr;
  double exempt_radius = 0.0;
  Point center;
};

}  // namespace

bool CurvyRouter::plan_crossing(const DirectionalNode& from, const StepShape& shape,
                                GridIndex hit, int net_index, double avail_um,
                                CrossingPlan& plan, const char** why) const {
  (void)shape;
  const auto& st = map_.at(hit);
  if (st.kind != CellKind::Occupied) { *why = "crossing target not a plain wire"; return false; }
  if (!perpendicular(from.orientation, st.orientation)) {
    *why = "non-perpendicular";
    return false;
  }
  // Enough straight length behind the crossing center.
  const double s = map_.grid_size();
  const double need_behind = tech_.crossing_size / 2.0 + tech_.crossing_straight_margin;
  if (avail_um + s < need_behind - 1e-9) { *why = "no straight runway behind"; return false; }

  const auto us = dir_step(from.orientation);
  // Straight runway ahead on our side.
  for (int k = 1; k <= runway_cells_; ++k) {
    const GridIndex c{hit.ix + us[0] * k, hit.iy + us[1] * k};
    if (!map_.in_bounds(c)) { *why = "runway leaves the die"; return false; }
    const auto& cs = map_.at(c);
    const bool ok = cs.kind == CellKind::Free ||
                    ((cs.kind == CellKind::Reserved || cs.kind == CellKind::Occupied) &&
                     cs.owner == net_index);
    if (!ok) { *why = "no straight runway ahead"; return false; }
  }
  // Straight runway on the crossed wire, both directions.
  const auto vs = dir_step(st.orientation);
  for (int k = 1; k <= runway_cells_; ++k) {
    for (int sign : {-1, 1}) {
      const GridIndex c{hit.ix + vs[0] * k * sign, hit.iy + vs[1] * k * sign};
      if (!map_.in_bounds(c)) { *why = "crossed wire too close to the die edge"; return false; }
      const auto& cs = map_.at(c);
      if (cs.kind != CellKind::Occupied || cs.owner != st.owner ||
          !same_axis(cs.orientation, st.orientation)) {
        *why = "crossed wire not straight long enough";
        return false;
      }
    }
  }

  // Crossing footprint free of blockages (device obstacles, third nets,
  // foreign reservations, other crossings).
  const Point center = map_.cell_center(hit);
  const double half = tech_.crossing_size / 2.0;
  std::vector<GridIndex> footprint;
  const int reach = (int)std::ceil(half / s) + 1;
  const bool rotated_box = is_diagonal(from.orientation);
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      const GridIndex c{hit.ix + dx, hit.iy + dy};
      if (!map_.in_bounds(c)) continue;
      const Point cc = map_.cell_center(c);
      const Point rel = cc - center;
      bool inside;
      if (!rotated_box) {
        inside = std::abs(rel.x) <= half + s * 0.5 && std::abs(rel.y) <= half + s * 0.5;
      } else {
        const double a = std::abs(rel.x + rel.y) / kSqrt2;
        const double b = std::abs(rel.x - rel.y) / kSqrt2;
        inside = a <= half + s * 0.5 && b <= half + s * 0.5;
      }
      if (!inside) continue;
      footprint.push_back(c);
      const auto& cs = map_.at(c);
      switch (cs.kind) {
        case CellKind::Free:
          break;
        case CellKind::DeviceObstacle:
          *why = "crossing footprint hits a device";
          return false;
        case CellKind::Crossing:
          *why = "crossing footprint hits another crossing";
          return false;
        case CellKind::Reserved:
          if (cs.owner != net_index) { *why = "crossing footprint in a reserved region"; return false; }
          break;
        case CellKind::Occupied:
          if (cs.owner != net_index && cs.owner != st.owner) {
            *why = "crossing footprint hits a third net";
            return false;
          }
          break;
      }
    }
  }

  plan.cell = hit;
  plan.dir_through = from.orientation;
  plan.dir_crossed = st.orientation;
  plan.net_crossed = st.owner;
  plan.footprint = std::move(footprint);
  return true;
}

Legality CurvyRouter::classify_cells(const StepShape& shape, const DirectionalNode& from,
                                     int net_index, double avail_um) const {
  Legality result;
  GridIndex foreign_hit{-1, -1};
  int foreign_hits = 0;
  int foreign_owner = -1;

  for (const auto& rc : shape.core) {
    const GridIndex c{from.ix + rc.cell.ix, from.iy + rc.cell.iy};
    if (!map_.in_bounds(c)) {
      result.reason = "out of bounds";
      return result;
    }
    const auto& st = map_.at(c);
    switch (st.kind) {
      case CellKind::Free:
        break;
      case CellKind::DeviceObstacle:
        result.reason = "device obstacle";
        return result;
      case CellKind::Reserved:
        if (st.owner != net_index) {
          if (!opts_.relax_occupied) {
            result.reason = "foreign reserved region";
            result.blocking_net = st.owner;
            return result;
          }
        }
        break;
      case CellKind::Crossing:
        if (!opts_.relax_occupied) {
          result.reason = "existing crossing in the way";
          result.blocking_net = map_.crossing(st.owner).net_through;
          return result;
        }
        break;
      case CellKind::Occupied:
        if (st.owner != net_index) {
          if (opts_.relax_occupied) break;
          ++foreign_hits;
          foreign_hit = c;
          foreign_owner = st.owner;
        }
        break;
    }
  }

  if (foreign_hits > 0) {
    result.blocking_net = foreign_owner;
    if (shape.step.kind != StepKind::Forward || !opts_.allow_crossings) {
      result.reason = "blocked by a routed net";
      return result;
    }
    if (foreign_hits > 1) {
      result.reason = "blocked by multiple wire cells";
      return result;
    }
    const char* why = "";
    CrossingPlan plan;
    if (!plan_crossing(from, shape, foreign_hit, net_index, avail_um, plan, &why)) {
      result.reason = why;
      return result;
    }
    result.kind = LegalityKind::LegalWithCrossing;
    result.crossing = std::move(plan);
    // Halo handled by the caller against the CrossForward shape.
    return result;
  }

  if (!opts_.relax_occupied) {
    for (const auto& rc : shape.halo) {
      const GridIndex c{from.ix + rc.cell.ix, from.iy + rc.cell.iy};
      if (!map_.in_bounds(c)) continue;
      const auto& st = map_.at(c);
      if (st.kind == CellKind::Occupied && st.owner != net_index) {
        result.reason = "spacing to a routed net";
        result.blocking_net = st.owner;
        return result;
      }
      if (st.kind == CellKind::Crossing) {
        result.reason = "spacing to a crossing";
        result.blocking_net = map_.crossing(st.owner).net_through;
        return result;
      }
    }
  }

  result.kind = LegalityKind::Legal;
  return result;
}

Legality CurvyRouter::check_step_legality(const DirectionalNode& from,
                                          const NeighborStep& step, int net_index,
                                          double avail_um) const {
  const StepShape* shape = nullptr;
  for (const auto& s : shapes_for(from.orientation)) {
    if (s.step.kind != step.kind) continue;
    if (step.kind == StepKind::Forward || step.kind == StepKind::CrossForward ||
        (s.step.to.ix + from.ix == step.to.ix && s.step.to.iy + from.iy == step.to.iy &&
         s.step.to.orientation == step.to.orientation)) {
      shape = &s;
      break;
    }
  }
  if (!shape) return {LegalityKind::Illegal, {}, "no such neighbor step", -1};

  Legality leg = classify_cells(*shape, from, net_index, avail_um);
  if (leg.kind != LegalityKind::LegalWithCrossing) return leg;

  // Validate the full crossing stride (runway cells and spacing halo) using
  // the CrossForward shape with the crossed net exempted near the center.
  const StepShape* xshape = nullptr;
  for (const auto& s : shapes_for(from.orientation))
    if (s.step.kind == StepKind::CrossForward) xshape = &s;
  if (!xshape) return {LegalityKind::Illegal, {}, "no crossing shape", leg.blocking_net};

  const Point center = map_.cell_center(leg.crossing.cell);
  const double exempt =
      tech_.crossing_size / 2.0 + tech_.min_spacing + map_.grid_size();
  for (const auto& rc : xshape->core) {
    const GridIndex c{from.ix + rc.cell.ix, from.iy + rc.cell.iy};
    if (!map_.in_bounds(c)) return {LegalityKind::Illegal, {}, "out of bounds", -1};
    const auto& st = map_.at(c);
    if (st.kind == CellKind::Free) continue;
    if ((st.kind == CellKind::Reserved || st.kind == CellKind::Occupied) &&
        st.owner == net_index)
      continue;
    if (st.kind == CellKind::Occupied && st.owner == leg.crossing.net_crossed &&
        c == leg.crossing.cell)
      continue;
    return {LegalityKind::Illegal, {}, "crossing stride blocked", st.owner};
  }
  for (const auto& rc : xshape->halo) {
    const GridIndex c{from.ix + rc.cell.ix, from.iy + rc.cell.iy};
    if (!map_.in_bounds(c)) continue;
    const auto& st = map_.at(c);
    if (st.kind == CellKind::Occupied && st.owner != net_index) {
      if (st.owner == leg.crossing.net_crossed &&
          distance(map_.cell_center(c), center) <= exempt)
        continue;
      return {LegalityKind::Illegal, {}, "spacing near crossing", st.owner};
    }
    if (st.kind == CellKind::Crossing)
      return {LegalityKind::Illegal, {}, "spacing to a crossing", -1};
  }
  return leg;
}

namespace {

std::uint64_t pack_state(int ix, int iy, Dir d, int avail, int avail_min) {
  return (std::uint64_t)(std::uint16_t)ix | ((std::uint64_t)(std::uint16_t)iy << 16) |
         ((std::uint64_t)(int)d << 32) | ((std::uint64_t)(std::uint16_t)(avail - avail_min) << 40);
}

struct OpenEntry {
  double f;
  double h;
  int crossings;
  std::int64_t seq;
  std::uint64_t key;
  bool operator>(const OpenEntry& o) const {
    if (f != o.f) return f > o.f;
    if (h != o.h) return h > o.h;
    if (crossings != o.crossings) return crossings > o.crossings;
    return seq > o.seq;
  }
};

struct NodeRec {
  double g_total = std::numeric_limits<double>::infinity();
  double g_il = 0.0;
  double wl = 0.0;
  double angle = 0.0;
  int crossings = 0;
  int avail = 0;
  DirectionalNode node;
  std::uint64_t parent = 0;
  bool has_parent = false;
  StepKind via = StepKind::Forward;
  int plan_index = -1;
};

// Open-addressed state table: the standard hash map dominates the profile on
// large grids.
class StateTable {
 public:
  explicit StateTable(size_t expect) {
    size_t cap = 64;
    while (cap < expect * 2) cap <<= 1;
    keys_.assign(cap, kEmpty);
    slots_.assign(cap, -1);
    mask_ = cap - 1;
  }

  NodeRec* find(std::uint64_t key) {
    size_t i = hash(key);
    while (true) {
      if (keys_[i] == kEmpty) return nullptr;
      if (keys_[i] == key) return &recs_[slots_[i]];
      i = (i + 1) & mask_;
    }
  }

  // Returns the record for key, creating it if absent (fresh = true).
  NodeRec* emplace(std::uint64_t key, bool& fresh) {
    if (recs_.size() * 2 >= keys_.size()) grow();
    size_t i = hash(key);
    while (true) {
      if (keys_[i] == kEmpty) {
        keys_[i] = key;
        slots_[i] = (int)recs_.size();
        recs_.emplace_back();
        fresh = true;
        return &recs_.back();
      }
      if (keys_[i] == key) {
        fresh = false;
        return &recs_[slots_[i]];
      }
      i = (i + 1) & mask_;
    }
  }

 private:
  static constexpr std::uint64_t kEmpty = ~0ull;
  size_t hash(std::uint64_t k) const {
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdull;
    k ^= k >> 29;
    return (size_t)k & mask_;
  }
  void grow() {
    std::vector<std::uint64_t> old_keys = std::move(keys_);
    std::vector<int> old_slots = std::move(slots_);
    const size_t cap = old_keys.size() * 2;
    keys_.assign(cap, kEmpty);
    slots_.assign(cap, -1);
    mask_ = cap - 1;
    for (size_t i = 0; i < old_keys.size(); ++i) {
      if (old_keys[i] == kEmpty) continue;
      size_t j = hash(old_keys[i]);
      while (keys_[j] != kEmpty) j = (j + 1) & mask_;
      keys_[j] = old_keys[i];
      slots_[j] = old_slots[i];
    }
  }

  std::vector<std::uint64_t> keys_;
  std::vector<int> slots_;
  std::vector<NodeRec> recs_;
  size_t mask_ = 0;
};

}  // namespace

RouteResult CurvyRouter::route(const RouteRequest& req) const {
  RouteResult result;
  if (prepared_net_ != req.net_index) prepare_net(req.net_index);

  const double aw = tech_.alpha_w_per_um();
  const double ab = tech_.alpha_b;
  const int W_gcp = (int)std::lround(cw_ * std::max(0, req.group_unrouted));
  const int nx = map_.nx(), ny = map_.ny();

  const auto gcp_at = [&](int ix, int iy) -> double {
    if (!opts_.enable_gcp) return 0.0;
    const int x0 = std::max(0, ix - W_gcp), x1 = std::min(nx - 1, ix + W_gcp);
    const int y0 = std::max(0, iy - W_gcp), y1 = std::min(ny - 1, iy + W_gcp);
    const auto P = [&](int x, int y) {
      return foreign_prefix_[(size_t)y * (nx + 1) + x];
    };
    const int count = P(x1 + 1, y1 + 1) - P(x0, y1 + 1) - P(x1 + 1, y0) + P(x0, y0);
    return lambda_c_ * count;
  };

  const GridIndex goal_cell{req.goal.ix, req.goal.iy};
  const int goal_min_avail = -(int)std::floor(req.goal_stub_um / qstep_ + 1e-9);

  StateTable table(4096);
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<OpenEntry>> open;
  std::int64_t seq = 0;
  std::vector<CrossingPlan> plans;
  std::vector<int> blockers;
  auto note_blocker = [&](int net) {
    if (net < 0) return;
    for (int b : blockers)
      if (b == net) return;
    blockers.push_back(net);
  };

  const int start_avail = avail_units(req.start_avail_um);
  const std::uint64_t start_key =
      pack_state(req.start.ix, req.start.iy, req.start.orientation, start_avail, avail_min_);
  {
    bool fresh;
    NodeRec* rec = table.emplace(start_key, fresh);
    rec->g_total = 0.0;
    rec->node = req.start;
    rec->avail = start_avail;
    const double h0 = heuristic(req.start, goal_cell, tech_);
    open.push({h0, h0, 0, seq++, start_key});
  }

  const double relax_penalty = 10.0 * tech_.alpha_c;

  while (!open.empty()) {
    if (opts_.max_pushes > 0 && seq > opts_.max_pushes) {
      result.failure_reason = "search_budget";
      break;
    }
    const OpenEntry top = open.top();
    open.pop();
    const NodeRec* found = table.find(top.key);
    if (!found) continue;
    NodeRec cur = *found;
    // The congestion term is a node potential (not accumulated into g), so
    // recompute the entry's expected priority for staleness.
    const double cur_f = cur.g_total + gcp_at(cur.node.ix, cur.node.iy) + top.h;
    if (top.f > cur_f + 1e-12) continue;  // stale entry

    if (cur.node.ix == req.goal.ix && cur.node.iy == req.goal.iy &&
        cur.node.orientation == req.goal.orientation && cur.avail >= goal_min_avail) {
      // Reconstruct.
      std::vector<DirectionalNode> nodes;
      std::vector<CrossingPlan> used;
      std::uint64_t key = top.key;
      while (true) {
        const NodeRec& rec = *table.find(key);
        nodes.push_back(rec.node);
        if (rec.plan_index >= 0) used.push_back(plans[rec.plan_index]);
        if (!rec.has_parent) break;
        key = rec.parent;
      }
      std::reverse(nodes.begin(), nodes.end());
      std::reverse(used.begin(), used.end());
      result.success = true;
      result.nodes = std::move(nodes);
      result.crossings = std::move(used);
      result.g_il = cur.g_il;
      result.wl_um = cur.wl;
      result.bend_deg = cur.angle;
      result.crossing_count = cur.crossings;
      result.expanded = seq;
      return result;
    }

    const double avail_um = cur.avail * qstep_;
    for (const auto& shape : shapes_for(cur.node.orientation)) {
      if (shape.step.kind == StepKind::CrossForward) continue;  // via fallback only
      if (!opts_.diagonals &&
          (shape.step.kind == StepKind::Turn45Left || shape.step.kind == StepKind::Turn45Right))
        continue;
      if (is_diagonal(cur.node.orientation) && !opts_.diagonals) continue;
      if (cur.avail < shape.req_units) continue;

      DirectionalNode to{cur.node.ix + shape.step.to.ix, cur.node.iy + shape.step.to.iy,
                         shape.step.to.orientation};
      if (to.ix < 0 || to.ix >= nx || to.iy < 0 || to.iy >= ny) continue;

      Legality leg = classify_cells(shape, cur.node, req.net_index, avail_um);
      const StepShape* use_shape = &shape;
      int plan_index = -1;
      double step_extra = 0.0;
      int dcr = 0;

      if (leg.kind == LegalityKind::Illegal) {
        note_blocker(leg.blocking_net);
        continue;
      }
      if (leg.kind == LegalityKind::LegalWithCrossing) {
        // Re-check the full stride with the plan in effect.
        NeighborStep probe = shape.step;
        probe.to = {cur.node.ix + shape.step.to.ix, cur.node.iy + shape.step.to.iy,
                    shape.step.to.orientation};
        Legality full = check_step_legality(cur.node, probe, req.net_index, avail_um);
        if (full.kind != LegalityKind::LegalWithCrossing) {
          note_blocker(full.blocking_net);
          continue;
        }
        for (const auto& s2 : shapes_for(cur.node.orientation))
          if (s2.step.kind == StepKind::CrossForward) use_shape = &s2;
        to = {cur.node.ix + use_shape->step.to.ix, cur.node.iy + use_shape->step.to.iy,
              use_shape->step.to.orientation};
        if (to.ix < 0 || to.ix >= nx || to.iy < 0 || to.iy >= ny) continue;
        plans.push_back(full.crossing);
        plan_index = (int)plans.size() - 1;
        dcr = 1;
      }

      // Relaxed conflict-discovery cost for passing foreign cells; spacing
      // halo violations count at a fraction so clean paths stay preferred.
      if (opts_.relax_occupied) {
        const auto foreign_at = [&](const GridIndex& c) {
          if (!map_.in_bounds(c)) return false;
          const auto& st = map_.at(c);
          return (st.kind == CellKind::Occupied || st.kind == CellKind::Reserved ||
                  st.kind == CellKind::Crossing) &&
                 !((st.kind == CellKind::Occupied || st.kind == CellKind::Reserved) &&
                   st.owner == req.net_index);
        };
        for (const auto& rc : use_shape->core)
          if (foreign_at({cur.node.ix + rc.cell.ix, cur.node.iy + rc.cell.iy}))
            step_extra += relax_penalty;
        for (const auto& rc : use_shape->halo)
          if (foreign_at({cur.node.ix + rc.cell.ix, cur.node.iy + rc.cell.iy}))
            step_extra += relax_penalty * 0.25;
      }

      if (opts_.enable_history && hist_w_ > 0.0) {
        double hsum = 0.0;
        for (const auto& rc : use_shape->core) {
          const GridIndex c{cur.node.ix + rc.cell.ix, cur.node.iy + rc.cell.iy};
          // Saturating contribution: enough to steer reroutes away, bounded
          // so heavily contested cells cannot defeat the heuristic.
          if (map_.in_bounds(c)) hsum += std::min(map_.history(c), 4.0);
        }
        step_extra += hist_w_ * hsum;
      }

      const double d_il = aw * use_shape->step.delta_wl +
                          ab * use_shape->step.delta_angle / 90.0 + alpha_c_ * dcr;
      const int new_avail = std::clamp(
          use_shape->avail_is_delta ? cur.avail + use_shape->avail_out : use_shape->avail_out,
          avail_min_, avail_cap_);
      const std::uint64_t key = pack_state(to.ix, to.iy, to.orientation, new_avail, avail_min_);
      const double g_total = cur.g_total + d_il + step_extra;

      bool fresh = false;
      NodeRec* slot = table.emplace(key, fresh);
      if (!fresh && slot->g_total <= g_total + 1e-15) continue;
      NodeRec& rec = *slot;
      rec.g_total = g_total;
      rec.g_il = cur.g_il + d_il;
      rec.wl = cur.wl + use_shape->step.delta_wl;
      rec.angle = cur.angle + use_shape->step.delta_angle;
      rec.crossings = cur.crossings + dcr;
      rec.avail = new_avail;
      rec.node = to;
      rec.parent = top.key;
      rec.has_parent = true;
      rec.via = use_shape->step.kind;
      rec.plan_index = plan_index;
      const double h = heuristic(to, goal_cell, tech_);
      open.push({g_total + gcp_at(to.ix, to.iy) + h, h, rec.crossings, seq++, key});
    }
  }

  result.success = false;
  if (!result.failure_reason[0]) result.failure_reason = "no_path";
  result.blockers = std::move(blockers);
  result.expanded = seq;
  return result;
}

}  // namespace picroute
