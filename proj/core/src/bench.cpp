#include "picroute/bench.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace picroute {

namespace {

// Small deterministic RNG helpers (std::mt19937_64 bit stream, no
// distribution objects).
struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed ^ 0x9e3779b97f4a7c15ull) {}
  double uniform() { return (gen() >> 11) * (1.0 / 9007199254740992.0); }
  double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int irange(int lo, int hi) {  // inclusive
    return lo + (int)(gen() % (std::uint64_t)(hi - lo + 1));
  }
};

std::string idx_name(const std::string& base, int i) {
  std::ostringstream os;
  os << base << i;
  return os.str();
}

Port make_port(const std::string& id, Point at, Dir dir, double width, PortRole role,
               bool source = false, bool sink = false) {
  Port p;
  p.id = id;
  p.center = at;
  p.orientation = dir;
  p.width = width;
  p.role = role;
  p.is_source = source;
  p.is_sink = sink;
  return p;
}

}  // namespace

Technology ptc_technology() {
  Technology t;
  t.grid_size_s = 2.0;
  t.bend_radius_r = 5.0;
  t.waveguide_width = 0.5;
  t.min_spacing = 1.0;
  t.crossing_size = 5.0;
  t.crossing_straight_margin = 1.0;
  t.alpha_w = 1.5;
  t.alpha_c = 0.52;
  t.alpha_b = 0.005;
  t.lambda_c = 0.01;
  t.port_spread_pitch = 2.5;
  t.port_spread_extension = 5.0;
  t.stagger_delta = 6.0;
  t.device_il = {{"mzi", 1.2},        {"y_branch", 0.3}, {"mmi", 0.1},
                 {"phase_shifter", 0.05}, {"term", 0.0}};
  return t;
}

Technology wronoc_technology() {
  Technology t;
  t.grid_size_s = 50.0;
  t.bend_radius_r = 60.0;
  t.waveguide_width = 2.0;
  t.min_spacing = 5.0;
  t.crossing_size = 10.0;
  t.crossing_straight_margin = 5.0;
  t.alpha_w = 1.5;
  t.alpha_c = 0.52;
  t.alpha_b = 0.005;
  t.lambda_c = 0.002;  // commensurate with the 50 um cell wire cost
  t.port_spread_pitch = 12.0;
  t.port_spread_extension = 60.0;
  t.stagger_delta = 50.0;
  t.device_il = {{"router", 1.0}, {"term", 0.0}};
  return t;
}

GeneratedBench generate_clements(int N, std::uint64_t seed) {
  if (N < 2 || N % 2 != 0)
    throw ValidationError("clements generator: N must be even and >= 2");
  GeneratedBench bench;
  bench.tech = ptc_technology();
  Circuit& c = bench.circuit;
  Rng rng(seed);
  const double s = bench.tech.grid_size_s;

  const double row_pitch = 24.0;
  const double col_pitch = 96.0;
  const double mzi_w = 40.0, mzi_h = row_pitch + 8.0;
  const double term_w = 8.0, term_h = 8.0;
  const double x0 = 48.0;
  const double y0 = 40.0;

  // Per-row sub-cell jitter plus per-device cell jitter.
  std::vector<double> row_y(N);
  for (int i = 0; i < N; ++i)
    row_y[i] = y0 + i * row_pitch + rng.range(-0.35, 0.35) * s;

  struct ModeState {
    std::string port;  // device.port currently driving the mode line
  };
  std::vector<ModeState> mode(N);

  // Input terminals.
  for (int i = 0; i < N; ++i) {
    Device d;
    d.id = idx_name("in", i);
    d.type_name = "term";
    const double y = row_y[i];
    d.bounding_box = {x0 - 40.0, y - term_h / 2, x0 - 40.0 + term_w, y + term_h / 2};
    d.ports.push_back(make_port("o", {d.bounding_box.xmax, y}, Dir::E, 0.5,
                                PortRole::Out, /*source=*/true));
    c.devices.push_back(d);
    mode[i].port = d.id + ".o";
  }

  int mzi_count = 0;
  const auto connect = [&](const std::string& from, const std::string& to) {
    Net net;
    net.id = idx_name("n", (int)c.nets.size());
    const auto dot1 = from.find('.');
    const auto dot2 = to.find('.');
    net.a = {from.substr(0, dot1), from.substr(dot1 + 1)};
    net.b = {to.substr(0, dot2), to.substr(dot2 + 1)};
    c.nets.push_back(net);
  };

  for (int col = 0; col < N; ++col) {
    const int first = (col % 2 == 0) ? 0 : 1;
    for (int lo = first; lo + 1 < N; lo += 2) {
      Device d;
      d.id = idx_name("mzi", mzi_count++);
      d.type_name = "mzi";
      const double cx = x0 + col * col_pitch + mzi_w / 2;
      const double cy = (row_y[lo] + row_y[lo + 1]) / 2 + rng.irange(-2, 2) * s +
                        rng.range(-0.3, 0.3) * s;
      d.bounding_box = {cx - mzi_w / 2, cy - mzi_h / 2, cx + mzi_w / 2, cy + mzi_h / 2};
      const double arm = row_pitch / 2;
      // Ports one micron inside the box to exercise propagation.
      d.ports.push_back(make_port("i0", {d.bounding_box.xmin + 1.0, cy - arm}, Dir::W,
                                  0.5, PortRole::In));
      d.ports.push_back(make_port("i1", {d.bounding_box.xmin + 1.0, cy + arm}, Dir::W,
                                  0.5, PortRole::In));
      d.ports.push_back(make_port("o0", {d.bounding_box.xmax - 1.0, cy - arm}, Dir::E,
                                  0.5, PortRole::Out));
      d.ports.push_back(make_port("o1", {d.bounding_box.xmax - 1.0, cy + arm}, Dir::E,
                                  0.5, PortRole::Out));
      c.devices.push_back(d);
      connect(mode[lo].port, d.id + ".i0");
      connect(mode[lo + 1].port, d.id + ".i1");
      mode[lo].port = d.id + ".o0";
      mode[lo + 1].port = d.id + ".o1";
    }
  }

  for (int i = 0; i < N; ++i) {
    Device d;
    d.id = idx_name("out", i);
    d.type_name = "term";
    const double x1 = x0 + N * col_pitch + 32.0;
    const double y = row_y[i];
    d.bounding_box = {x1, y - term_h / 2, x1 + term_w, y + term_h / 2};
    d.ports.push_back(make_port("i", {d.bounding_box.xmin, y}, Dir::W, 0.5,
                                PortRole::In, false, /*sink=*/true));
    c.devices.push_back(d);
    connect(mode[i].port, d.id + ".i");
  }

  double xmax = 0, ymax = 0;
  for (const auto& d : c.devices) {
    xmax = std::max(xmax, d.bounding_box.xmax);
    ymax = std::max(ymax, d.bounding_box.ymax);
  }
  c.die = {0, 0, xmax + 40.0, ymax + 40.0};

  bench.declared_devices = N * (N - 1) / 2 + 2 * N;
  bench.declared_nets = N * N;
  c.validate();
  return bench;
}

GeneratedBench generate_mmi_array(int N, std::uint64_t seed, int columns) {
  if (N < 2) throw ValidationError("mmi generator: N must be >= 2");
  if (columns != 2) throw ValidationError("mmi generator: only 2 columns supported");
  GeneratedBench bench;
  bench.tech = ptc_technology();
  Circuit& c = bench.circuit;
  Rng rng(seed);
  const double s = bench.tech.grid_size_s;

  const double dense_pitch = 1.6;  // below the grid pitch: forces spreading
  const double line_pitch = 24.0;
  const double mmi_w = 24.0;
  const double mmi_h = N * dense_pitch + 16.0;
  const double y_mid = 40.0 + (N - 1) * line_pitch / 2.0;
  const double gap = 110.0;
  const double x_io_in = 8.0;
  const double x_a = 80.0;
  const double x_ps = x_a + mmi_w + gap;
  const double x_b = x_ps + 10.0 + gap;
  const double x_io_out = x_b + mmi_w + 72.0;

  const auto connect = [&](const std::string& from, const std::string& to) {
    Net net;
    net.id = idx_name("n", (int)c.nets.size());
    const auto dot1 = from.find('.');
    const auto dot2 = to.find('.');
    net.a = {from.substr(0, dot1), from.substr(dot1 + 1)};
    net.b = {to.substr(0, dot2), to.substr(dot2 + 1)};
    c.nets.push_back(net);
  };

  // Terminals on widely spaced rows.
  for (int i = 0; i < N; ++i) {
    Device d;
    d.id = idx_name("in", i);
    d.type_name = "term";
    const double y = 40.0 + i * line_pitch + rng.range(-0.3, 0.3) * s;
    d.bounding_box = {x_io_in, y - 4, x_io_in + 8, y + 4};
    d.ports.push_back(
        make_port("o", {d.bounding_box.xmax, y}, Dir::E, 0.5, PortRole::Out, true));
    c.devices.push_back(d);
  }

  const auto make_mmi = [&](const std::string& id, double x) {
    Device d;
    d.id = id;
    d.type_name = "mmi";
    d.bounding_box = {x, y_mid - mmi_h / 2, x + mmi_w, y_mid + mmi_h / 2};
    for (int i = 0; i < N; ++i) {
      const double y = y_mid + (i - (N - 1) / 2.0) * dense_pitch;
      d.ports.push_back(make_port(idx_name("i", i), {x + 1.0, y}, Dir::W, 0.5,
                                  PortRole::In));
      d.ports.push_back(make_port(idx_name("o", i), {x + mmi_w - 1.0, y}, Dir::E, 0.5,
                                  PortRole::Out));
    }
    c.devices.push_back(d);
  };
  make_mmi("mmia", x_a);
  make_mmi("mmib", x_b);

  for (int i = 0; i < N; ++i) {
    Device d;
    d.id = idx_name("ps", i);
    d.type_name = "phase_shifter";
    const double y = 40.0 + i * line_pitch + rng.range(-0.3, 0.3) * s;
    d.bounding_box = {x_ps, y - 3, x_ps + 10, y + 3};
    d.ports.push_back(make_port("i", {d.bounding_box.xmin, y}, Dir::W, 0.5, PortRole::In));
    d.ports.push_back(make_port("o", {d.bounding_box.xmax, y}, Dir::E, 0.5, PortRole::Out));
    c.devices.push_back(d);
  }

  for (int i = 0; i < N; ++i) {
    Device d;
    d.id = idx_name("out", i);
    d.type_name = "term";
    const double y = 40.0 + i * line_pitch + rng.range(-0.3, 0.3) * s;
    d.bounding_box = {x_io_out, y - 4, x_io_out + 8, y + 4};
    d.ports.push_back(
        make_port("i", {d.bounding_box.xmin, y}, Dir::W, 0.5, PortRole::In, false, true));
    c.devices.push_back(d);
  }

  // Non-identity shuffle between the first coupler and the phase shifters
  // (rotate by N/2) so straight connections topologically cross.
  const auto perm = [&](int i) { return N >= 4 ? (i + N / 2) % N : i; };
  for (int i = 0; i < N; ++i) connect(idx_name("in", i) + ".o", "mmia." + idx_name("i", i));
  for (int i = 0; i < N; ++i)
    connect("mmia." + idx_name("o", perm(i)), idx_name("ps", i) + ".i");
  for (int i = 0; i < N; ++i) connect(idx_name("ps", i) + ".o", "mmib." + idx_name("i", i));
  for (int i = 0; i < N; ++i)
    connect("mmib." + idx_name("o", i), idx_name("out", i) + ".i");

  double xmax = 0, ymax = 0;
  for (const auto& d : c.devices) {
    xmax = std::max(xmax, d.bounding_box.xmax);
    ymax = std::max(ymax, d.bounding_box.ymax);
  }
  c.die = {0, 0, xmax + 40.0, ymax + 60.0};

  bench.declared_devices = 3 * N + 2;
  bench.declared_nets = 4 * N;
  c.validate();
  return bench;
}

GeneratedBench generate_wronoc(const std::string& variant, std::uint64_t seed) {
  if (variant != "north" && variant != "oneside" && variant != "corner" &&
      variant != "pairwise")
    throw ValidationError("wronoc generator: unknown variant '" + variant + "'");
  GeneratedBench bench;
  bench.tech = wronoc_technology();
  Circuit& c = bench.circuit;
  Rng rng(seed);
  (void)rng;

  c.die = {0, 0, 10000, 10000};
  const double rw = 600;

  // Four switches in a central 2x2 cluster.
  const Point centers[4] = {{4200, 4200}, {5800, 4200}, {4200, 5800}, {5800, 5800}};
  std::vector<int> side_slots(4 * 4, 0);  // per device, per side
  for (int i = 0; i < 4; ++i) {
    Device d;
    d.id = idx_name("r", i);
    d.type_name = "router";
    d.bounding_box = {centers[i].x - rw / 2, centers[i].y - rw / 2,
                      centers[i].x + rw / 2, centers[i].y + rw / 2};
    c.devices.push_back(d);
  }

  // Memory controllers per variant.
  struct McPos { Point at; Dir facing; };
  std::vector<McPos> mcs;
  const auto top = [&](double x) { return McPos{{x, 9600}, Dir::S}; };
  const auto bottom = [&](double x) { return McPos{{x, 400}, Dir::N}; };
  const auto left = [&](double y) { return McPos{{400, y}, Dir::E}; };
  if (variant == "north") {
    for (int i = 0; i < 5; ++i) mcs.push_back(top(1800 + i * 1600));
  } else if (variant == "oneside") {
    for (int i = 0; i < 5; ++i) mcs.push_back(left(1800 + i * 1600));
  } else if (variant == "corner") {
    mcs.push_back(top(1200));
    mcs.push_back(top(2400));
    mcs.push_back(top(3600));
    mcs.push_back(left(8800));
    mcs.push_back(left(7600));
  } else {  // pairwise
    mcs.push_back(top(2600));
    mcs.push_back(top(5000));
    mcs.push_back(top(7400));
    mcs.push_back(bottom(3400));
    mcs.push_back(bottom(6600));
  }

  for (int i = 0; i < (int)mcs.size(); ++i) {
    Device d;
    d.id = idx_name("mc", i);
    d.type_name = "term";
    const double half = 150;
    d.bounding_box = {mcs[i].at.x - half, mcs[i].at.y - half, mcs[i].at.x + half,
                      mcs[i].at.y + half};
    // Port laterals land on cell centers (odd multiples of 25 on a 50 um
    // grid): coarse-grid fabrics are drawn snapped, unlike the jittered PTCs.
    const Point u = dir_unit(mcs[i].facing);
    const Point n{-u.y, u.x};
    const Point face = mcs[i].at + u * half;
    d.ports.push_back(make_port("o", face + n * 75.0, mcs[i].facing, 2.0,
                                PortRole::Out, true, false));
    d.ports.push_back(make_port("i", face - n * 75.0, mcs[i].facing, 2.0,
                                PortRole::In, false, true));
    c.devices.push_back(d);
  }

  // Router ports are created on demand on the face toward the peer.
  const auto router_port = [&](int r, const Point& toward, PortRole role) {
    Device& d = c.devices[r];
    const Rect& b = d.bounding_box;
    const Point rel = toward - b.center();
    Dir side;
    if (std::abs(rel.x) > std::abs(rel.y)) side = rel.x > 0 ? Dir::E : Dir::W;
    else side = rel.y > 0 ? Dir::N : Dir::S;
    int& slot = side_slots[r * 4 + (int)side / 2];
    const double off = (slot % 2 == 0 ? 1 : -1) * (75.0 + 100.0 * (slot / 2));
    ++slot;
    const Point u = dir_unit(side);
    const Point n{-u.y, u.x};
    const Point at = b.center() + u * (rw / 2) + n * off;
    const std::string pid = idx_name(role == PortRole::In ? "i" : "o", slot) +
                            dir_name(side);
    d.ports.push_back(make_port(pid, at, side, 2.0, role));
    return d.id + "." + pid;
  };

  const auto connect = [&](const std::string& from, const std::string& to) {
    Net net;
    net.id = idx_name("n", (int)c.nets.size());
    const auto dot1 = from.find('.');
    const auto dot2 = to.find('.');
    net.a = {from.substr(0, dot1), from.substr(dot1 + 1)};
    net.b = {to.substr(0, dot2), to.substr(dot2 + 1)};
    c.nets.push_back(net);
  };

  // Controller <-> switch nets (10) and an acyclic switch mesh (6): 16 total.
  for (int i = 0; i < (int)mcs.size(); ++i) {
    const int rin = i % 4;
    const int rout = (i + 1) % 4;
    const Device& mc = c.devices[4 + i];
    connect(mc.id + ".o", router_port(rin, mc.bounding_box.center(), PortRole::In));
    connect(router_port(rout, mc.bounding_box.center(), PortRole::Out), mc.id + ".i");
  }
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      const Point ca = c.devices[a].bounding_box.center();
      const Point cb = c.devices[b].bounding_box.center();
      connect(router_port(a, cb, PortRole::Out), router_port(b, ca, PortRole::In));
    }

  bench.declared_devices = 9;
  bench.declared_nets = 16;
  c.validate();
  return bench;
}

}  // namespace picroute
