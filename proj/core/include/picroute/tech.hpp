#pragma once

// Process technology description: routing grid pitch, bend radius, widths,
// spacing and crossing rules, and the insertion-loss coefficients.

#include <map>
#include <stdexcept>
#include <string>

namespace picroute {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Technology {
  double grid_size_s = 1.0;        // routing grid pitch, um
  double bend_radius_r = 5.0;      // minimum bend radius, um
  double waveguide_width = 0.5;    // um
  double min_spacing = 1.0;        // edge-to-edge spacing between nets, um
  double crossing_size = 5.0;      // square crossing footprint edge, um
  double crossing_straight_margin = 1.0;  // extra straight beyond footprint, um

  double alpha_w = 1.5;    // propagation loss, dB per cm
  double alpha_c = 0.52;   // loss per crossing, dB
  double alpha_b = 0.005;  // loss per 90 degrees of bending, dB
  double lambda_c = 0.01;  // congestion penalty, dB per occupied grid

  std::map<std::string, double> device_il;  // device type -> dB

  double port_spread_pitch = 2.5;      // lateral pitch for spread access points, um
  double port_spread_extension = 5.0;  // extension for spread access points, um
  double stagger_delta = 6.0;          // per-port extra extension in a group, um

  double alpha_w_per_um() const { return alpha_w / 1e4; }
  double device_loss(const std::string& type) const {
    auto it = device_il.find(type);
    return it == device_il.end() ? 0.0 : it->second;
  }

  // Throws ValidationError on any violated invariant. With
  // allow_subwidth_grid the grid-vs-width rule is skipped (some published
  // benchmarks pair a 0.2 um grid with 0.5 um waveguides).
  void validate(bool allow_subwidth_grid = false) const;
};

Technology load_technology(const std::string& path, bool allow_subwidth_grid = false);
void save_technology(const Technology& tech, const std::string& path);

}  // namespace picroute
