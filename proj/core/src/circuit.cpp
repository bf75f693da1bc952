#include "picroute/circuit.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace picroute {

const char* role_name(PortRole r) {
  switch (r) {
    case PortRole::In: return "in";
    case PortRole::Out: return "out";
    case PortRole::Bidirectional: return "bi";
  }
  return "bi";
}

bool parse_role(const std::string& s, PortRole& out) {
  if (s == "in") out = PortRole::In;
  else if (s == "out") out = PortRole::Out;
  else if (s == "bi") out = PortRole::Bidirectional;
  else return false;
  return true;
}

const Port* Device::find_port(const std::string& port_id) const {
  for (const auto& p : ports)
    if (p.id == port_id) return &p;
  return nullptr;
}

void Circuit::validate() {
  if (!die.valid() || die.width() <= 0.0 || die.height() <= 0.0)
    throw ValidationError("circuit: die rectangle is degenerate");

  std::map<std::string, int> device_index;
  for (int i = 0; i < (int)devices.size(); ++i) {
    auto& dev = devices[i];
    if (dev.id.empty()) throw ValidationError("circuit: device with empty id");
    if (!device_index.emplace(dev.id, i).second)
      throw ValidationError("circuit: duplicate device id '" + dev.id + "'");
    if (!die.contains(dev.bounding_box))
      throw ValidationError("circuit: device '" + dev.id + "' lies outside the die");

    std::map<std::string, int> port_ids;
    for (int j = 0; j < (int)dev.ports.size(); ++j) {
      auto& port = dev.ports[j];
      port.device_index = i;
      if (!port_ids.emplace(port.id, j).second)
        throw ValidationError("circuit: duplicate port id '" + dev.id + "." +
                              port.id + "'");
      if (port.width <= 0.0)
        throw ValidationError("circuit: port '" + dev.id + "." + port.id +
                              "' has non-positive width");
      if (!dev.bounding_box.contains(port.center))
        throw ValidationError("circuit: port '" + dev.id + "." + port.id +
                              "' lies outside its device bounding box");
    }
  }

  for (size_t i = 0; i < devices.size(); ++i)
    for (size_t j = i + 1; j < devices.size(); ++j)
      if (devices[i].bounding_box.overlaps(devices[j].bounding_box))
        throw ValidationError("circuit: devices '" + devices[i].id + "' and '" +
                              devices[j].id + "' overlap");

  std::map<std::string, int> net_ids;
  for (int n = 0; n < (int)nets.size(); ++n) {
    auto& net = nets[n];
    if (!net_ids.emplace(net.id, n).second)
      throw ValidationError("circuit: duplicate net id '" + net.id + "'");
    for (PortRef* ref : {&net.a, &net.b}) {
      auto it = device_index.find(ref->device_id);
      if (it == device_index.end())
        throw ValidationError("circuit: net '" + net.id +
                              "' references unknown device in '" + ref->str() + "'");
      ref->device_index = it->second;
      const auto& dev = devices[it->second];
      ref->port_index = -1;
      for (int j = 0; j < (int)dev.ports.size(); ++j)
        if (dev.ports[j].id == ref->port_id) ref->port_index = j;
      if (ref->port_index < 0)
        throw ValidationError("circuit: net '" + net.id +
                              "' references unknown port '" + ref->str() + "'");
    }
    if (net.a.device_index == net.b.device_index && net.a.port_index == net.b.port_index)
      throw ValidationError("circuit: net '" + net.id + "' connects a port to itself");
  }
}

namespace {

double read_double(std::istringstream& ls, const std::string& ctx) {
  std::string tok;
  if (!(ls >> tok)) throw ParseError(ctx + ": missing number");
  try {
    size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(ctx + ": bad number '" + tok + "'");
  }
}

PortRef parse_port_ref(const std::string& tok, const std::string& ctx) {
  const auto dotpos = tok.find('.');
  if (dotpos == std::string::npos || dotpos == 0 || dotpos + 1 == tok.size())
    throw ParseError(ctx + ": expected '<device>.<port>', got '" + tok + "'");
  PortRef ref;
  ref.device_id = tok.substr(0, dotpos);
  ref.port_id = tok.substr(dotpos + 1);
  return ref;
}

}  // namespace

Circuit load_circuit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open netlist file: " + path);

  Circuit circuit;
  std::string line;
  int lineno = 0;
  bool saw_header = false;
  bool saw_die = false;
  Device* open_device = nullptr;

  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    const std::string ctx = path + ":" + std::to_string(lineno);

    if (!saw_header) {
      std::string version;
      if (key != "picroute-netlist" || !(ls >> version) || version != "v1")
        throw ParseError(ctx + ": expected header 'picroute-netlist v1'");
      saw_header = true;
      continue;
    }

    if (key == "die") {
      circuit.die.xmin = read_double(ls, ctx);
      circuit.die.ymin = read_double(ls, ctx);
      circuit.die.xmax = read_double(ls, ctx);
      circuit.die.ymax = read_double(ls, ctx);
      saw_die = true;
    } else if (key == "device") {
      if (open_device) throw ParseError(ctx + ": previous device not closed with 'end'");
      Device dev;
      std::string bbox_kw;
      if (!(ls >> dev.id >> dev.type_name >> bbox_kw) || bbox_kw != "bbox")
        throw ParseError(ctx + ": expected 'device <id> <type> bbox <x0> <y0> <x1> <y1>'");
      dev.bounding_box.xmin = read_double(ls, ctx);
      dev.bounding_box.ymin = read_double(ls, ctx);
      dev.bounding_box.xmax = read_double(ls, ctx);
      dev.bounding_box.ymax = read_double(ls, ctx);
      circuit.devices.push_back(std::move(dev));
      open_device = &circuit.devices.back();
    } else if (key == "port") {
      if (!open_device) throw ParseError(ctx + ": 'port' outside a device block");
      Port port;
      std::string dir_tok, role_tok;
      if (!(ls >> port.id)) throw ParseError(ctx + ": port needs an id");
      port.center.x = read_double(ls, ctx);
      port.center.y = read_double(ls, ctx);
      if (!(ls >> dir_tok) || !parse_dir(dir_tok, port.orientation))
        throw ParseError(ctx + ": bad port orientation (use E,NE,N,NW,W,SW,S,SE)");
      port.width = read_double(ls, ctx);
      if (!(ls >> role_tok) || !parse_role(role_tok, port.role))
        throw ParseError(ctx + ": bad port role (use in|out|bi)");
      std::string flag;
      while (ls >> flag) {
        if (flag == "source") port.is_source = true;
        else if (flag == "sink") port.is_sink = true;
        else throw ParseError(ctx + ": unknown port flag '" + flag + "'");
      }
      open_device->ports.push_back(std::move(port));
    } else if (key == "end") {
      if (!open_device) throw ParseError(ctx + ": 'end' without open device");
      open_device = nullptr;
    } else if (key == "net") {
      if (open_device) throw ParseError(ctx + ": 'net' inside a device block");
      Net net;
      std::string ta, tb;
      if (!(ls >> net.id >> ta >> tb))
        throw ParseError(ctx + ": expected 'net <id> <dev.port> <dev.port>'");
      net.a = parse_port_ref(ta, ctx);
      net.b = parse_port_ref(tb, ctx);
      circuit.nets.push_back(std::move(net));
    } else {
      throw ParseError(ctx + ": unknown record '" + key + "'");
    }
  }

  if (!saw_header) throw ParseError(path + ": missing 'picroute-netlist v1' header");
  if (open_device) throw ParseError(path + ": device block not closed with 'end'");
  if (!saw_die) throw ParseError(path + ": missing 'die' record");

  circuit.validate();
  return circuit;
}

void save_circuit(const Circuit& circuit, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write netlist file: " + path);
  out.precision(12);
  out << "picroute-netlist v1\n";
  out << "die " << circuit.die.xmin << " " << circuit.die.ymin << " "
      << circuit.die.xmax << " " << circuit.die.ymax << "\n";
  for (const auto& dev : circuit.devices) {
    out << "device " << dev.id << " " << dev.type_name << " bbox "
        << dev.bounding_box.xmin << " " << dev.bounding_box.ymin << " "
        << dev.bounding_box.xmax << " " << dev.bounding_box.ymax << "\n";
    for (const auto& p : dev.ports) {
      out << "  port " << p.id << " " << p.center.x << " " << p.center.y << " "
          << dir_name(p.orientation) << " " << p.width << " " << role_name(p.role);
      if (p.is_source) out << " source";
      if (p.is_sink) out << " sink";
      out << "\n";
    }
    out << "end\n";
  }
  for (const auto& net : circuit.nets)
    out << "net " << net.id << " " << net.a.str() << " " << net.b.str() << "\n";
}

}  // namespace picroute
