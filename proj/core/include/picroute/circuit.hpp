#pragma once

// Placed-circuit model: devices with directional ports, 2-pin nets, die.

#include <string>
#include <vector>

#include "picroute/geom.hpp"
#include "picroute/tech.hpp"

namespace picroute {

enum class PortRole : std::uint8_t { In, Out, Bidirectional };

const char* role_name(PortRole r);
bool parse_role(const std::string& s, PortRole& out);

struct Port {
  std::string id;         // unique within its device
  int device_index = -1;  // filled by Circuit validation
  Point center;
  Dir orientation = Dir::E;  // the direction the port faces (out of the device)
  double width = 0.5;
  PortRole role = PortRole::Bidirectional;
  bool is_source = false;
  bool is_sink = false;
};

struct Device {
  std::string id;
  std::string type_name;
  Rect bounding_box;
  std::vector<Port> ports;

  const Port* find_port(const std::string& port_id) const;
};

// Endpoint reference "device.port" resolved to indices after validation.
struct PortRef {
  std::string device_id;
  std::string port_id;
  int device_index = -1;
  int port_index = -1;

  std::string str() const { return device_id + "." + port_id; }
};

struct Net {
  std::string id;
  PortRef a;
  PortRef b;
};

struct Circuit {
  Rect die;
  std::vector<Device> devices;
  std::vector<Net> nets;

  const Port& port(const PortRef& ref) const {
    return devices[ref.device_index].ports[ref.port_index];
  }
  Port& port(const PortRef& ref) {
    return devices[ref.device_index].ports[ref.port_index];
  }

  // Resolves references and checks all invariants; throws ValidationError
  // naming the offending entity.
  void validate();
};

Circuit load_circuit(const std::string& path);
void save_circuit(const Circuit& circuit, const std::string& path);

}  // namespace picroute
