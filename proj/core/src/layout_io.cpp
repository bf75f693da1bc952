#include "picroute/layout_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace picroute {

using nlohmann::json;

namespace {

json segment_to_json(const Segment& seg) {
  json j;
  j["width"] = seg.width;
  switch (seg.kind) {
    case Segment::Kind::Straight:
      j["kind"] = "straight";
      j["x0"] = seg.p0.x; j["y0"] = seg.p0.y;
      j["x1"] = seg.p1.x; j["y1"] = seg.p1.y;
      break;
    case Segment::Kind::ArcFillet:
      j["kind"] = "arc";
      j["cx"] = seg.corner.x; j["cy"] = seg.corner.y;
      j["from"] = dir_name(seg.from_dir);
      j["to"] = dir_name(seg.to_dir);
      j["radius"] = seg.radius;
      break;
    case Segment::Kind::SineBend:
      j["kind"] = "sine";
      j["x0"] = seg.p0.x; j["y0"] = seg.p0.y;
      j["x1"] = seg.p1.x; j["y1"] = seg.p1.y;
      j["heading"] = dir_name(seg.heading);
      break;
    case Segment::Kind::CrossingMark:
      j["kind"] = "crossing";
      j["x"] = seg.center.x; j["y"] = seg.center.y;
      j["axis_a"] = dir_name(seg.axis_a);
      j["axis_b"] = dir_name(seg.axis_b);
      j["size"] = seg.size;
      j.erase("width");
      break;
  }
  return j;
}

Segment segment_from_json(const json& j, const std::string& ctx) {
  const std::string kind = j.at("kind").get<std::string>();
  const auto dir_of = [&](const char* key) {
    Dir d;
    if (!parse_dir(j.at(key).get<std::string>(), d))
      throw ParseError(ctx + ": bad direction in segment");
    return d;
  };
  if (kind == "straight") {
    return Segment::straight({j.at("x0").get<double>(), j.at("y0").get<double>()},
                             {j.at("x1").get<double>(), j.at("y1").get<double>()},
                             j.at("width").get<double>());
  }
  if (kind == "arc") {
    return Segment::arc_fillet({j.at("cx").get<double>(), j.at("cy").get<double>()},
                               dir_of("from"), dir_of("to"), j.at("radius").get<double>(),
                               j.at("width").get<double>());
  }
  if (kind == "sine") {
    Segment s;
    s.kind = Segment::Kind::SineBend;
    s.p0 = {j.at("x0").get<double>(), j.at("y0").get<double>()};
    s.p1 = {j.at("x1").get<double>(), j.at("y1").get<double>()};
    s.heading = dir_of("heading");
    s.width = j.at("width").get<double>();
    return s;
  }
  if (kind == "crossing") {
    return Segment::crossing_mark({j.at("x").get<double>(), j.at("y").get<double>()},
                                  dir_of("axis_a"), dir_of("axis_b"),
                                  j.at("size").get<double>());
  }
  throw ParseError(ctx + ": unknown segment kind '" + kind + "'");
}

}  // namespace

std::string layout_to_json(const Layout& layout, const Circuit& circuit,
                           const Technology& tech) {
  json j;
  j["format"] = "picroute-layout";
  j["version"] = 1;
  j["grid_size"] = tech.grid_size_s;
  json nets = json::array();
  for (const auto& [n, rec] : layout.routed) {
    json nj;
    nj["id"] = circuit.nets[n].id;
    nj["status"] = "routed";
    nj["wl_um"] = rec.wl_um;
    nj["bend_deg"] = rec.bend_deg;
    nj["crossings"] = rec.crossing_count;
    nj["il_db"] = rec.il_db;
    json segs = json::array();
    for (const auto& seg : rec.geometry.segments) segs.push_back(segment_to_json(seg));
    nj["segments"] = std::move(segs);
    nets.push_back(std::move(nj));
  }
  j["nets"] = std::move(nets);
  json failed = json::array();
  for (int n : layout.failed) failed.push_back(circuit.nets[n].id);
  j["failed"] = std::move(failed);
  return j.dump(2) + "\n";
}

void save_layout(const Layout& layout, const Circuit& circuit, const Technology& tech,
                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write layout file: " + path);
  out << layout_to_json(layout, circuit, tech);
}

Layout load_layout(const std::string& path, const Circuit& circuit) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open layout file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (j.value("format", "") != "picroute-layout")
    throw ParseError(path + ": not a picroute layout file");

  std::map<std::string, int> net_index;
  for (int n = 0; n < (int)circuit.nets.size(); ++n) net_index[circuit.nets[n].id] = n;

  Layout layout;
  for (const auto& nj : j.at("nets")) {
    const std::string id = nj.at("id").get<std::string>();
    const auto it = net_index.find(id);
    if (it == net_index.end())
      throw ParseError(path + ": layout references unknown net '" + id + "'");
    RoutedNetRecord rec;
    rec.net_index = it->second;
    rec.geometry.net_index = it->second;
    for (const auto& sj : nj.at("segments"))
      rec.geometry.segments.push_back(segment_from_json(sj, path));
    rec.wl_um = nj.value("wl_um", rec.geometry.path_length());
    rec.bend_deg = nj.value("bend_deg", rec.geometry.bend_deg());
    rec.crossing_count = nj.value("crossings", rec.geometry.crossing_count());
    rec.il_db = nj.value("il_db", 0.0);
    layout.routed[it->second] = std::move(rec);
  }
  for (const auto& fj : j.value("failed", json::array())) {
    const auto it = net_index.find(fj.get<std::string>());
    if (it != net_index.end()) layout.failed.push_back(it->second);
  }
  return layout;
}

std::string report_to_json(const RoutingReport& report, const Circuit& circuit) {
  (void)circuit;
  json j;
  j["il_max_db"] = report.il_max;
  j["wl_critical_um"] = report.wl_critical_um;
  j["cr_critical"] = report.cr_critical;
  j["drv_count"] = report.drv_count;
  j["failed_nets"] = report.failed_nets;
  j["wall_time_s"] = report.wall_time_s;
  json path = json::array();
  for (const auto& el : report.critical_path) {
    json ej;
    switch (el.kind) {
      case CriticalPathElement::Kind::SourcePort: ej["kind"] = "source"; break;
      case CriticalPathElement::Kind::Device: ej["kind"] = "device"; break;
      case CriticalPathElement::Kind::Net: ej["kind"] = "net"; break;
      case CriticalPathElement::Kind::SinkPort: ej["kind"] = "sink"; break;
    }
    ej["name"] = el.name;
    ej["il_db"] = el.il_db;
    path.push_back(std::move(ej));
  }
  j["critical_path"] = std::move(path);
  json nets;
  for (const auto& [id, il] : report.per_net) {
    nets[id] = {{"total", il.total}, {"wg", il.wg}, {"cr", il.cr}, {"bend", il.bend}};
  }
  j["per_net_il"] = std::move(nets);
  return j.dump(2) + "\n";
}

void save_report_json(const RoutingReport& report, const Circuit& circuit,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report file: " + path);
  out << report_to_json(report, circuit);
}

std::string report_to_text(const RoutingReport& report) {
  std::ostringstream os;
  os.precision(4);
  os << std::fixed;
  os << "routing report\n";
  os << "  il_max: " << report.il_max << " dB\n";
  os << "  critical wl: " << report.wl_critical_um << " um\n";
  os << "  critical crossings: " << report.cr_critical << "\n";
  os << "  drv: " << report.drv_count << "\n";
  os << "  failed nets: " << report.failed_nets << "\n";
  os << "  wall time: " << report.wall_time_s << " s\n";
  os << "  critical path:";
  for (const auto& el : report.critical_path) os << " " << el.name;
  os << "\n";
  return os.str();
}

}  // namespace picroute
