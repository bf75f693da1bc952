#include "picroute/refine.hpp"

#include <algorithm>
#include <cmath>

namespace picroute {

namespace {

// Replaces a net's wire cells on the map after a local geometry edit. New
// cells must be free or already ours; crossing centers are untouched.
bool reoccupy(OrientedGridMap& map, int net_index, const RoutedNetRecord& rec,
              const NetGeometry& new_geom) {
  auto new_cells = commit_cells_for(net_index, new_geom, rec.crossings, map);
  // Map plan indices back onto live crossing ids via position match.
  for (auto& cc : new_cells) {
    if (cc.kind != CommitKind::CrossingCenter) continue;
    cc.crossing_id = -1;
    for (const auto& cr : map.crossings())
      if (cr.active && cr.center == cc.cell &&
          (cr.net_through == net_index || cr.net_crossed == net_index))
        cc.crossing_id = cr.id;
    if (cc.crossing_id < 0) return false;
  }
  for (const auto& cc : new_cells) {
    if (!map.in_bounds(cc.cell)) return false;
    if (cc.kind == CommitKind::CrossingCenter) continue;
    const auto& st = map.at(cc.cell);
    const bool ok = st.kind == CellKind::Free ||
                    ((st.kind == CellKind::Occupied || st.kind == CellKind::Reserved) &&
                     st.owner == net_index) ||
                    st.kind == CellKind::Crossing;
    if (!ok) return false;
  }
  map.update_net_cells(net_index, new_cells);
  return true;
}

}  // namespace

std::vector<RefinementAction> refine_endpoints(
    std::map<int, RoutedNetRecord>& routed, const Circuit& circuit,
    const ConditionedCircuit& cond, OrientedGridMap& map, const Technology& tech) {
  std::vector<RefinementAction> actions;

  for (auto& [n, rec] : routed) {
    for (int endpoint = 0; endpoint < 2; ++endpoint) {
      const AccessPoint& ap = cond.access[n * 2 + endpoint];
      RefinementAction act;
      act.net_index = n;
      act.endpoint = endpoint;

      if (ap.sine_stub) {  // spread stubs already land on the true port
        act.kind = RefinementAction::Kind::None;
        actions.push_back(act);
        continue;
      }

      const Point u = dir_unit(ap.port_dir);
      const Point nvec{-u.y, u.x};
      const double delta = dot(ap.port_center - ap.axis_anchor, nvec);
      act.offset_um = delta;
      if (std::abs(delta) <= kEpsPort) {
        act.kind = RefinementAction::Kind::None;
        actions.push_back(act);
        continue;
      }

      // Locate the terminal segment at this endpoint.
      auto& segs = rec.geometry.segments;
      int si = -1;
      bool at_start = false;
      for (int i = 0; i < (int)segs.size(); ++i) {
        if (segs[i].kind != Segment::Kind::Straight &&
            segs[i].kind != Segment::Kind::SineBend)
          continue;
        if (distance(segs[i].p0, ap.axis_anchor) <= kEpsGeo) {
          si = i;
          at_start = true;
        }
        if (distance(segs[i].p1, ap.axis_anchor) <= kEpsGeo) {
          si = i;
          at_start = false;
        }
      }
      if (si < 0) {
        act.kind = RefinementAction::Kind::Failed;
        actions.push_back(act);
        continue;
      }

      // A terminal sine (a straight net whose far end was already refined):
      // retarget its near end onto the port center.
      if (segs[si].kind == Segment::Kind::SineBend) {
        NetGeometry trial = rec.geometry;
        Segment& sb = trial.segments[si];
        Segment replacement =
            at_start ? sine_bend(ap.port_center, sb.p1, sb.heading, sb.width)
                     : sine_bend(sb.p0, ap.port_center, sb.heading, sb.width);
        trial.segments[si] = replacement;
        if (reoccupy(map, n, rec, trial)) {
          rec.geometry = std::move(trial);
          act.kind = RefinementAction::Kind::SineBend;
        } else {
          act.kind = RefinementAction::Kind::Failed;
        }
        rec.wl_um = rec.geometry.path_length();
        rec.bend_deg = rec.geometry.bend_deg();
        rec.il_db = tech.alpha_w_per_um() * rec.wl_um + tech.alpha_c * rec.crossing_count +
                    tech.alpha_b * rec.bend_deg / 90.0;
        actions.push_back(act);
        continue;
      }

      NetGeometry trial = rec.geometry;
      bool shifted = false;

      // Shift variant: translate the terminal straight laterally and slide
      // the adjoining fillet along its far leg.
      const int ai = at_start ? si + 1 : si - 1;
      if (std::abs(delta) < tech.grid_size_s / 2.0 && ai >= 0 && ai < (int)segs.size() &&
          segs[ai].kind == Segment::Kind::ArcFillet) {
        Segment arc = trial.segments[ai];
        const Dir far_dir = at_start ? arc.to_dir : arc.from_dir;
        const Point slide_u = dir_unit(far_dir);
        const double men = dot(slide_u, nvec);
        if (std::abs(men) > 1e-9) {
          const double k = delta / men;
          Segment new_arc = arc;
          new_arc.corner = arc.corner + slide_u * k;
          Segment& term = trial.segments[si];
          Segment new_term = term;
          if (at_start) {
            new_term.p0 = ap.port_center;
            new_term.p1 = new_arc.start();
          } else {
            new_term.p1 = ap.port_center;
            new_term.p0 = new_arc.end();
          }
          // The far leg absorbs the slide; verify it still hosts its fillets.
          const int fi = at_start ? ai + 1 : ai - 1;
          bool fits = dot(at_start ? (new_term.p1 - new_term.p0)
                                   : (new_term.p0 - new_term.p1),
                          dir_unit(ap.port_dir)) > 0;
          if (fits && fi >= 0 && fi < (int)trial.segments.size() &&
              trial.segments[fi].kind == Segment::Kind::Straight) {
            Segment& far = trial.segments[fi];
            Segment new_far = far;
            if (at_start) new_far.p0 = new_arc.end();
            else new_far.p1 = new_arc.start();
            if (dot(new_far.p1 - new_far.p0, dir_unit(far_dir)) < -kEpsGeo) fits = false;
            if (fits) {
              trial.segments[si] = new_term;
              trial.segments[ai] = new_arc;
              trial.segments[fi] = new_far;
            }
          } else if (fits) {
            trial.segments[si] = new_term;
            trial.segments[ai] = new_arc;
          }
          if (fits && trial.g0_continuous() && reoccupy(map, n, rec, trial)) {
            rec.geometry = std::move(trial);
            act.kind = RefinementAction::Kind::Shift;
            shifted = true;
          }
        }
      }

      if (!shifted) {
        // Sine-bend fallback over the terminal straight.
        trial = rec.geometry;
        Segment& term = trial.segments[si];
        const double len = term.length();
        if (len >= 4.0 * std::abs(delta)) {
          Segment sb = at_start
                           ? sine_bend(ap.port_center, term.p1, ap.port_dir,
                                       term.width)
                           : sine_bend(term.p0, ap.port_center, opposite(ap.port_dir),
                                       term.width);
          trial.segments[si] = sb;
          if (reoccupy(map, n, rec, trial)) {
            rec.geometry = std::move(trial);
            act.kind = RefinementAction::Kind::SineBend;
          } else {
            act.kind = RefinementAction::Kind::Failed;
          }
        } else {
          act.kind = RefinementAction::Kind::Failed;
        }
      }

      // Refresh the record's summary numbers.
      rec.wl_um = rec.geometry.path_length();
      rec.bend_deg = rec.geometry.bend_deg();
      rec.crossing_count = rec.geometry.crossing_count();
      rec.il_db = tech.alpha_w_per_um() * rec.wl_um + tech.alpha_c * rec.crossing_count +
                  tech.alpha_b * rec.bend_deg / 90.0;
      actions.push_back(act);
    }
  }
  (void)circuit;
  return actions;
}

}  // namespace picroute
