#include "picroute/schedule.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>

namespace picroute {

namespace {

// Which endpoint starts the search: prefer the light's direction.
int pick_start_endpoint(const Circuit& circuit, const Net& net) {
  const Port& a = circuit.port(net.a);
  const Port& b = circuit.port(net.b);
  if (a.is_source || a.role == PortRole::Out) return 0;
  if (b.is_source || b.role == PortRole::Out) return 1;
  return 0;
}

struct TaskOrder {
  bool operator()(const NetTask& a, const NetTask& b) const {
    if (a.priority != b.priority) return a.priority > b.priority;
    return a.net_index > b.net_index;
  }
};

}  // namespace

std::vector<NetTask> order_nets(const Circuit& circuit, const ConditionedCircuit& cond,
                                const Technology& tech) {
  std::vector<NetTask> tasks;
  for (int n = 0; n < (int)circuit.nets.size(); ++n) {
    NetTask t;
    t.net_index = n;
    t.group = cond.primary_group[n];
    const PortGroup& g = cond.groups[t.group];
    int order = 0;
    for (size_t i = 0; i < g.members.size(); ++i)
      if (g.members[i] / 2 == n) { order = (int)i; break; }
    t.priority = g.dist_g_cells / tech.grid_size_s +
                 (double)order / std::max<size_t>(1, g.members.size());
    tasks.push_back(t);
  }
  return tasks;
}

NetGeometry build_net_geometry(int net_index, const std::vector<DirectionalNode>& nodes,
                               const std::vector<CrossingPlan>& crossings,
                               const ConditionedCircuit& cond, const OrientedGridMap& map,
                               const Technology& tech) {
  const AccessPoint& apa = cond.access[net_index * 2];
  const AccessPoint& apb = cond.access[net_index * 2 + 1];
  // nodes run from one access cell to the other; identify which end is which.
  const bool a_first = !nodes.empty() && nodes.front().ix == apa.cell.ix &&
                       nodes.front().iy == apa.cell.iy;
  const AccessPoint& start_ap = a_first ? apa : apb;
  const AccessPoint& end_ap = a_first ? apb : apa;

  NetGeometry geom;
  geom.net_index = net_index;
  const double w = tech.waveguide_width;

  std::vector<Point> pts;
  if (start_ap.sine_stub) {
    geom.segments.push_back(*start_ap.sine_stub);
    pts.push_back(start_ap.sine_stub->p1);
  } else {
    pts.push_back(start_ap.axis_anchor);
  }
  for (const auto& p : node_polyline(nodes, map)) pts.push_back(p);
  if (!end_ap.sine_stub) pts.push_back(end_ap.axis_anchor);
  else pts.push_back(end_ap.sine_stub->p1);

  NetGeometry path = instantiate_polyline(pts, tech.bend_radius_r, w, 0.0, 0.0);
  for (auto& seg : path.segments) geom.segments.push_back(seg);

  if (end_ap.sine_stub) {
    // Reversed sine: same profile traversed toward the port.
    Segment rev = sine_bend(end_ap.sine_stub->p1, end_ap.sine_stub->p0,
                            opposite(end_ap.port_dir), w);
    geom.segments.push_back(rev);
  }

  for (const auto& plan : crossings) {
    geom.segments.push_back(Segment::crossing_mark(
        map.cell_center(plan.cell), plan.dir_through, plan.dir_crossed,
        tech.crossing_size));
  }
  return geom;
}

std::vector<CommitCell> commit_cells_for(int net_index, const NetGeometry& geom,
                                         const std::vector<CrossingPlan>& crossings,
                                         const OrientedGridMap& map) {
  // The width band touches the device face cell where the wire abuts its
  // port; those obstacle cells are not claimable and stay with the device.
  // Likewise, sine stubs in a congested fan share cells at sub-grid pitch:
  // whoever claimed the cell first keeps it.
  Point end_a{0, 0}, end_b{0, 0};
  bool has_ends = false;
  std::vector<const Segment*> sines;
  for (const auto& seg : geom.segments) {
    if (seg.kind == Segment::Kind::CrossingMark) continue;
    if (seg.kind == Segment::Kind::SineBend) sines.push_back(&seg);
    if (!has_ends) { end_a = seg.start(); has_ends = true; }
    end_b = seg.end();
  }
  const double port_r = map.grid_size() * 1.6;

  std::vector<CommitCell> cells;
  for (const auto& rc : rasterize_geometry(geom, map)) {
    const auto& st = map.at(rc.cell);
    if (st.kind == CellKind::DeviceObstacle && has_ends) {
      const Point cc = map.cell_center(rc.cell);
      if (distance(cc, end_a) <= port_r || distance(cc, end_b) <= port_r) continue;
    }
    const bool claimable = st.kind == CellKind::Free ||
                           ((st.kind == CellKind::Occupied || st.kind == CellKind::Reserved) &&
                            st.owner == net_index);
    if (!claimable && !sines.empty()) {
      const Point cc = map.cell_center(rc.cell);
      bool near_sine = false;
      for (const Segment* sb : sines)
        if (centerline_distance(*sb, cc) <= sb->width / 2.0 + map.grid_size() * 0.75) {
          near_sine = true;
          break;
        }
      if (near_sine) continue;
    }
    cells.push_back({rc.cell, rc.orientation, CommitKind::Wire, -1});
  }
  // Tag crossing centers (crossing ids are assigned at commit time by the
  // caller, which rewrites crossing_id).
  for (size_t i = 0; i < crossings.size(); ++i) {
    bool found = false;
    for (auto& cc : cells) {
      if (cc.cell == crossings[i].cell) {
        cc.kind = CommitKind::CrossingCenter;
        cc.crossing_id = (int)i;  // plan index; rewritten to map id on commit
        found = true;
      }
    }
    if (!found)
      cells.push_back({crossings[i].cell, crossings[i].dir_through,
                       CommitKind::CrossingCenter, (int)i});
  }
  return cells;
}

namespace {

struct Pipeline {
  const Circuit& circuit;
  OrientedGridMap& map;
  const ConditionedCircuit& cond;
  const Technology& tech;
  const ScheduleOptions& options;
  RoutingOutcome& out;
  std::vector<int> group_unrouted;
  std::priority_queue<NetTask, std::vector<NetTask>, TaskOrder> queue;
  std::vector<NetTask> base_tasks;
  std::vector<char> ever_ripped;
  std::vector<int> rip_counts;

  void log_line(const std::string& s) {
    out.log.push_back(s);
    if (options.log) options.log(s);
  }

  RouteRequest make_request(int n) const {
    const Net& net = circuit.nets[n];
    const int se = pick_start_endpoint(circuit, net);
    const AccessPoint& sa = cond.access[n * 2 + se];
    const AccessPoint& ta = cond.access[n * 2 + (1 - se)];
    RouteRequest req;
    req.net_index = n;
    req.start = {sa.cell.ix, sa.cell.iy, sa.port_dir};
    req.goal = {ta.cell.ix, ta.cell.iy, opposite(ta.port_dir)};
    req.start_avail_um = sa.sine_stub ? 0.0 : sa.stub_len_um;
    req.goal_stub_um = ta.sine_stub ? 0.0 : ta.stub_len_um;
    req.group_unrouted = group_unrouted[cond.primary_group[n]];
    return req;
  }

  double path_il(const RouteResult& r) const {
    return r.g_il;  // alpha_w*WL + alpha_c*CR + alpha_b*angle/90 along the path
  }

  void commit(int n, const RouteResult& res) {
    NetGeometry geom = build_net_geometry(n, res.nodes, res.crossings, cond, map, tech);
    auto cells = commit_cells_for(n, geom, res.crossings, map);
    // Materialize crossing records and rewrite plan indices to map ids.
    std::vector<int> ids(res.crossings.size(), -1);
    for (size_t i = 0; i < res.crossings.size(); ++i) {
      const auto& plan = res.crossings[i];
      ids[i] = map.make_crossing(plan.cell, n, plan.net_crossed, plan.dir_through,
                                 plan.dir_crossed, plan.footprint);
    }
    for (auto& cc : cells)
      if (cc.kind == CommitKind::CrossingCenter) cc.crossing_id = ids[cc.crossing_id];
    map.commit_net(n, cells);

    RoutedNetRecord rec;
    rec.net_index = n;
    rec.nodes = res.nodes;
    rec.crossings = res.crossings;
    rec.geometry = std::move(geom);
    rec.wl_um = rec.geometry.path_length();
    rec.bend_deg = rec.geometry.bend_deg();
    rec.crossing_count = rec.geometry.crossing_count();
    rec.il_db = tech.alpha_w_per_um() * rec.wl_um + tech.alpha_c * rec.crossing_count +
                tech.alpha_b * rec.bend_deg / 90.0;
    out.routed[n] = std::move(rec);
    for (int e = 0; e < 2; ++e) {
      const int g = cond.group_of_endpoint[n * 2 + e];
      if (group_unrouted[g] > 0) --group_unrouted[g];
    }
  }

  void rip(int n, const char* why, int iter) {
    // Crossings that involve this net die with it; snapshot them first so the
    // surviving party's record can be refreshed.
    std::vector<int> affected;
    for (const auto& rec : map.crossings())
      if (rec.active && (rec.net_through == n || rec.net_crossed == n))
        affected.push_back(rec.id);
    map.ripup_net(n, 1.0);
    for (int id : affected) {
      const auto& rec = map.crossing(id);
      const int other = rec.net_through == n ? rec.net_crossed : rec.net_through;
      auto it = out.routed.find(other);
      if (it == out.routed.end()) continue;
      auto& og = it->second;
      bool changed = false;
      for (auto sit = og.geometry.segments.begin(); sit != og.geometry.segments.end();) {
        if (sit->kind == Segment::Kind::CrossingMark &&
            map.index_of(sit->center) == rec.center) {
          sit = og.geometry.segments.erase(sit);
          changed = true;
        } else {
          ++sit;
        }
      }
      if (changed) {
        auto cit = std::remove_if(og.crossings.begin(), og.crossings.end(),
                                  [&](const CrossingPlan& p) { return p.cell == rec.center; });
        og.crossings.erase(cit, og.crossings.end());
        og.crossing_count = og.geometry.crossing_count();
        og.il_db = tech.alpha_w_per_um() * og.wl_um + tech.alpha_c * og.crossing_count +
                   tech.alpha_b * og.bend_deg / 90.0;
      }
    }
    out.routed.erase(n);
    ever_ripped[n] = 1;
    ++rip_counts[n];
    for (int e = 0; e < 2; ++e) ++group_unrouted[cond.group_of_endpoint[n * 2 + e]];
    NetTask t = base_tasks[n];
    t.rip_count = rip_counts[n];
    t.ever_ripped = true;
    queue.push(t);
    std::ostringstream os;
    os << "ROUTE iter=" << iter << " net=" << circuit.nets[n].id
       << " action=ripped rips=" << rip_counts[n] << " why=" << why;
    log_line(os.str());
  }
};

}  // namespace

RoutingOutcome run_routing(const Circuit& circuit, OrientedGridMap& map,
                           const ConditionedCircuit& cond, const Technology& tech,
                           const ScheduleOptions& options) {
  RoutingOutcome out;
  Pipeline p{circuit, map, cond, tech, options, out};

  p.group_unrouted.assign(cond.groups.size(), 0);
  for (const auto& g : cond.groups) p.group_unrouted[g.id] = g.unrouted;
  p.ever_ripped.assign(circuit.nets.size(), 0);
  p.rip_counts.assign(circuit.nets.size(), 0);

  p.base_tasks = order_nets(circuit, cond, tech);
  for (const auto& t : p.base_tasks) p.queue.push(t);

  // Negotiation wants headroom: hard fabrics settle within a few passes per
  // net, but 4|N| proved too tight for corner-heavy interconnects.
  const int max_iters = options.max_rr_iters > 0 ? options.max_rr_iters
                                                 : 16 * std::max<int>(1, circuit.nets.size());

  RouteOptions cs_opts = options.route;
  if (cs_opts.max_pushes < 0) cs_opts.max_pushes = 24ll * map.nx() * map.ny();
  RouteOptions ncs_opts = cs_opts;
  ncs_opts.allow_crossings = false;
  RouteOptions relax_opts = cs_opts;
  relax_opts.relax_occupied = true;
  relax_opts.allow_crossings = false;
  relax_opts.max_pushes = 8ll * map.nx() * map.ny();

  CurvyRouter cs_router(map, tech, cs_opts);
  CurvyRouter ncs_router(map, tech, ncs_opts);
  CurvyRouter relax_router(map, tech, relax_opts);

  int iter = 0;
  while (!p.queue.empty() && iter < max_iters) {
    ++iter;
    NetTask task = p.queue.top();
    p.queue.pop();
    const int n = task.net_index;
    if (out.routed.count(n)) continue;  // stale entry

    const RouteRequest req = p.make_request(n);
    cs_router.prepare_net(n);
    RouteResult cs = cs_router.route(req);

    if (!cs.success) {
      // Negotiation: rerun with relaxed occupancy to discover conflicting
      // nets, rip them (history update), and requeue everyone involved.
      relax_router.prepare_net(n);
      RouteResult relaxed = relax_router.route(req);
      std::vector<int> conflicts;
      if (relaxed.success) {
        // Sweep the relaxed path's geometry, spacing halo included, to find
        // every net standing in the way.
        NetGeometry g = build_net_geometry(n, relaxed.nodes, {}, cond, map, tech);
        const double halo = tech.min_spacing + 0.25 * tech.grid_size_s;
        std::set<int> seen;
        for (const auto& rc : rasterize_geometry(g, map, halo)) {
          const auto& st = map.at(rc.cell);
          int owner = -1;
          if ((st.kind == CellKind::Occupied || st.kind == CellKind::Reserved) &&
              st.owner != n)
            owner = st.owner;
          else if (st.kind == CellKind::Crossing)
            owner = map.crossing(st.owner).net_through;
          if (owner >= 0 && map.is_committed(owner) && seen.insert(owner).second)
            conflicts.push_back(owner);
        }
      } else {
        for (int b : cs.blockers)
          if (map.is_committed(b)) conflicts.push_back(b);
      }
      std::ostringstream os;
      os << "ROUTE iter=" << iter << " net=" << circuit.nets[n].id
         << " action=failed reason=" << (cs.failure_reason[0] ? cs.failure_reason : "no_path")
         << " conflicts=" << conflicts.size();
      p.log_line(os.str());
      if (conflicts.empty() && std::getenv("PICROUTE_DEBUG_DUMP")) {
        std::ofstream f(std::string(std::getenv("PICROUTE_DEBUG_DUMP")));
        f << "net " << n << " iter " << iter << " expanded " << cs.expanded << "\n";
        f << map.debug_dump();
        std::exit(9);
      }
      // Rip the nearest few conflicts rather than the whole chain: history
      // accumulates either way, and narrow rips keep the loop stable.
      const int rip_budget = 3;
      for (int i = 0; i < (int)conflicts.size() && i < rip_budget; ++i)
        p.rip(conflicts[i], "conflict", iter);
      if (!conflicts.empty()) {
        // Victim first: retry before the ripped blockers re-claim the
        // corridor, otherwise the same standoff repeats.
        task.priority -= 1.0 + task.rip_count;
      } else {
        // Nothing rippable is in the way (pending nets' reservations):
        // back off and let the rest of the queue reshape the map.
        task.priority += 10.0 * (1 + task.rip_count);
      }
      ++task.rip_count;
      p.queue.push(task);
      continue;
    }

    const RouteResult* winner = &cs;
    RouteResult ncs, cs_again;
    const char* mode = "cs";
    if (options.enable_lrr && options.route.allow_crossings && cs.crossing_count > 0) {
      ncs_router.prepare_net(n);
      ncs = ncs_router.route(req);
      if (ncs.success) {
        if (p.path_il(ncs) <= p.path_il(cs)) {
          winner = &ncs;
          mode = "ncs";
        }
      } else {
        // Blocked without crossings: a never-ripped blocker points at a net
        // order problem; rip it and keep a crossing solution for now.
        int blocker = -1;
        for (int b : ncs.blockers)
          if (map.is_committed(b)) { blocker = b; break; }
        if (blocker >= 0 && !p.ever_ripped[blocker]) {
          p.rip(blocker, "lrr-blocker", iter);
          // The rip may have stolen cells the crossing solution relied on;
          // search again on the updated map.
          cs_router.prepare_net(n);
          cs_again = cs_router.route(req);
          if (!cs_again.success) {
            p.queue.push(task);
            continue;
          }
          winner = &cs_again;
        }
      }
    }

    p.commit(n, *winner);
    const auto& rec = out.routed[n];
    std::ostringstream os;
    os << "ROUTE iter=" << iter << " net=" << circuit.nets[n].id
       << " action=routed mode=" << mode << " il=" << rec.il_db
       << " cr=" << rec.crossing_count << " wl=" << rec.wl_um;
    p.log_line(os.str());
  }

  out.iterations = iter;
  std::set<int> pending;
  while (!p.queue.empty()) {
    if (!out.routed.count(p.queue.top().net_index)) pending.insert(p.queue.top().net_index);
    p.queue.pop();
  }
  for (int n : pending) out.failed.push_back(n);
  out.complete = out.failed.empty() && (int)out.routed.size() == (int)circuit.nets.size();
  return out;
}

}  // namespace picroute
