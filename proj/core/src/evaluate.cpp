#include "picroute/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace picroute {

NetIl net_il(double wl_um, int crossings, double bend_deg, const Technology& tech) {
  NetIl il;
  il.wg = tech.alpha_w_per_um() * wl_um;
  il.cr = tech.alpha_c * crossings;
  il.bend = tech.alpha_b * bend_deg / 90.0;
  il.total = il.wg + il.cr + il.bend;
  return il;
}

NetIl net_il(const NetGeometry& geom, const Technology& tech, int extra_crossings) {
  return net_il(geom.path_length(), geom.crossing_count() + extra_crossings,
                geom.bend_deg(), tech);
}

std::vector<int> crossed_by_others(const Circuit& circuit,
                                   const std::map<int, RoutedNetRecord>& routed) {
  std::vector<int> extra(circuit.nets.size(), 0);
  for (const auto& [n, rec] : routed) {
    for (const auto& seg : rec.geometry.segments) {
      if (seg.kind != Segment::Kind::CrossingMark) continue;
      for (const auto& [m, other] : routed) {
        if (m == n) continue;
        for (const auto& os : other.geometry.segments) {
          if (os.kind != Segment::Kind::Straight) continue;
          if (centerline_distance(os, seg.center) <= os.width * 0.5 + kEpsGeo) {
            ++extra[m];
            goto next_mark;
          }
        }
      }
    next_mark:;
    }
  }
  return extra;
}

RoutingReport il_max(const Circuit& circuit,
                     const std::map<int, RoutedNetRecord>& routed,
                     const Technology& tech) {
  RoutingReport report;

  // Port-level nodes: id = device_index * stride + port_index.
  size_t max_ports = 1;
  for (const auto& d : circuit.devices) max_ports = std::max(max_ports, d.ports.size());
  const auto node_id = [&](int dev, int port) { return dev * (int)max_ports + port; };
  const int n_nodes = (int)(circuit.devices.size() * max_ports);

  struct Edge {
    int from, to;
    double w;
    int net_index;  // -1 for intra-device traversal
    std::string name;
  };
  std::vector<Edge> edges;
  const auto extra = crossed_by_others(circuit, routed);

  for (const auto& [n, rec] : routed) {
    const Net& net = circuit.nets[n];
    const Port& pa = circuit.port(net.a);
    const Port& pb = circuit.port(net.b);
    // Direction of light: out -> in; fall back to a -> b.
    bool a_to_b = true;
    if (pa.role == PortRole::Out || pb.role == PortRole::In) a_to_b = true;
    else if (pb.role == PortRole::Out || pa.role == PortRole::In) a_to_b = false;
    const NetIl il = net_il(rec.geometry, tech, extra[n]);
    report.per_net[net.id] = il;
    Edge e;
    e.from = a_to_b ? node_id(net.a.device_index, net.a.port_index)
                    : node_id(net.b.device_index, net.b.port_index);
    e.to = a_to_b ? node_id(net.b.device_index, net.b.port_index)
                  : node_id(net.a.device_index, net.a.port_index);
    e.w = il.total;
    e.net_index = n;
    e.name = net.id;
    edges.push_back(std::move(e));
  }

  for (int d = 0; d < (int)circuit.devices.size(); ++d) {
    const Device& dev = circuit.devices[d];
    const double w = tech.device_loss(dev.type_name);
    for (int i = 0; i < (int)dev.ports.size(); ++i) {
      if (dev.ports[i].role != PortRole::In || dev.ports[i].is_sink) continue;
      for (int j = 0; j < (int)dev.ports.size(); ++j) {
        if (dev.ports[j].role != PortRole::Out || dev.ports[j].is_source) continue;
        edges.push_back({node_id(d, i), node_id(d, j), w, -1, dev.id});
      }
    }
  }

  // Kahn topological order over the subgraph with edges.
  std::vector<std::vector<int>> out_edges(n_nodes);
  std::vector<int> indeg(n_nodes, 0);
  for (int e = 0; e < (int)edges.size(); ++e) {
    out_edges[edges[e].from].push_back(e);
    ++indeg[edges[e].to];
  }
  std::vector<int> order;
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;  // deterministic
  for (int v = 0; v < n_nodes; ++v)
    if (indeg[v] == 0) ready.push(v);
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int e : out_edges[v])
      if (--indeg[edges[e].to] == 0) ready.push(edges[e].to);
  }
  if ((int)order.size() != n_nodes) {
    for (const auto& e : edges)
      if (indeg[e.to] > 0)
        throw ValidationError("optical graph has a cycle through '" + e.name + "'");
  }

  // Sources and sinks.
  constexpr double kNegInf = -1e300;
  std::vector<double> value(n_nodes, kNegInf);
  std::vector<int> via_edge(n_nodes, -1);
  bool any_source = false;
  for (int d = 0; d < (int)circuit.devices.size(); ++d)
    for (int i = 0; i < (int)circuit.devices[d].ports.size(); ++i)
      if (circuit.devices[d].ports[i].is_source) {
        value[node_id(d, i)] = 0.0;
        any_source = true;
      }
  if (!any_source) throw ValidationError("optical graph has no source ports");

  for (int v : order) {
    if (value[v] == kNegInf) continue;
    for (int e : out_edges[v]) {
      const double cand = value[v] + edges[e].w;
      if (cand > value[edges[e].to] + 1e-15) {
        value[edges[e].to] = cand;
        via_edge[edges[e].to] = e;
      }
    }
  }

  int best_sink = -1;
  for (int d = 0; d < (int)circuit.devices.size(); ++d)
    for (int i = 0; i < (int)circuit.devices[d].ports.size(); ++i)
      if (circuit.devices[d].ports[i].is_sink) {
        const int v = node_id(d, i);
        if (value[v] > kNegInf && (best_sink < 0 || value[v] > value[best_sink]))
          best_sink = v;
      }
  if (best_sink < 0) {
    report.il_max = 0.0;
    return report;
  }

  report.il_max = value[best_sink];
  // Backtrack the argmax path.
  std::vector<int> chain;
  for (int v = best_sink; via_edge[v] >= 0; v = edges[via_edge[v]].from)
    chain.push_back(via_edge[v]);
  std::reverse(chain.begin(), chain.end());

  const auto port_name = [&](int v) {
    const int d = v / (int)max_ports;
    const int i = v % (int)max_ports;
    return circuit.devices[d].id + "." + circuit.devices[d].ports[i].id;
  };
  if (!chain.empty()) {
    report.critical_path.push_back(
        {CriticalPathElement::Kind::SourcePort, port_name(edges[chain.front()].from), 0.0});
  }
  for (int e : chain) {
    const Edge& edge = edges[e];
    if (edge.net_index >= 0) {
      report.critical_path.push_back({CriticalPathElement::Kind::Net, edge.name, edge.w});
      const auto it = routed.find(edge.net_index);
      if (it != routed.end()) {
        report.wl_critical_um += it->second.geometry.path_length();
        report.cr_critical += it->second.geometry.crossing_count() + extra[edge.net_index];
      }
    } else {
      report.critical_path.push_back({CriticalPathElement::Kind::Device, edge.name, edge.w});
    }
  }
  if (!chain.empty()) {
    report.critical_path.push_back(
        {CriticalPathElement::Kind::SinkPort, port_name(edges[chain.back()].to), 0.0});
  }
  return report;
}

}  // namespace picroute
