#include "picroute/tech.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace picroute {

namespace {

bool parse_double(const std::string& s, double& out) {
  try {
    size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

void require_nonneg(const char* name, double v) {
  if (v < 0.0)
    throw ValidationError(std::string("technology: ") + name + " must be >= 0");
}

}  // namespace

void Technology::validate(bool allow_subwidth_grid) const {
  if (grid_size_s <= 0.0) throw ValidationError("technology: grid_size must be > 0");
  if (waveguide_width <= 0.0)
    throw ValidationError("technology: waveguide_width must be > 0");
  if (!allow_subwidth_grid && grid_size_s <= waveguide_width)
    throw ValidationError(
        "technology: grid_size must exceed waveguide_width (pass the "
        "subwidth-grid override to accept this pairing)");
  if (bend_radius_r < grid_size_s)
    throw ValidationError("technology: bend_radius must be >= grid_size");
  require_nonneg("min_spacing", min_spacing);
  require_nonneg("crossing_size", crossing_size);
  require_nonneg("crossing_straight_margin", crossing_straight_margin);
  require_nonneg("alpha_w", alpha_w);
  require_nonneg("alpha_c", alpha_c);
  require_nonneg("alpha_b", alpha_b);
  require_nonneg("lambda_c", lambda_c);
  require_nonneg("port_spread_pitch", port_spread_pitch);
  require_nonneg("port_spread_extension", port_spread_extension);
  for (const auto& [type, il] : device_il)
    if (il < 0.0)
      throw ValidationError("technology: device_il for '" + type + "' must be >= 0");
  if (stagger_delta < crossing_size)
    throw ValidationError("technology: stagger_delta must be >= crossing_size");
}

Technology load_technology(const std::string& path, bool allow_subwidth_grid) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open technology file: " + path);

  Technology tech;
  tech.device_il.clear();

  std::string line;
  int lineno = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;

    auto fail = [&](const std::string& msg) -> ParseError {
      return ParseError(path + ":" + std::to_string(lineno) + ": " + msg);
    };

    if (!saw_header) {
      std::string version;
      if (key != "picroute-tech" || !(ls >> version) || version != "v1")
        throw fail("expected header 'picroute-tech v1'");
      saw_header = true;
      continue;
    }

    if (key == "device_il") {
      std::string type, val;
      if (!(ls >> type >> val)) throw fail("device_il needs '<type> <dB>'");
      double il;
      if (!parse_double(val, il)) throw fail("bad device_il value '" + val + "'");
      tech.device_il[type] = il;
      continue;
    }

    std::string val;
    if (!(ls >> val)) throw fail("key '" + key + "' needs a value");
    double v;
    if (!parse_double(val, v)) throw fail("bad value '" + val + "' for key '" + key + "'");

    if (key == "grid_size") tech.grid_size_s = v;
    else if (key == "bend_radius") tech.bend_radius_r = v;
    else if (key == "waveguide_width") tech.waveguide_width = v;
    else if (key == "min_spacing") tech.min_spacing = v;
    else if (key == "crossing_size") tech.crossing_size = v;
    else if (key == "crossing_straight_margin") tech.crossing_straight_margin = v;
    else if (key == "alpha_w_db_per_cm") tech.alpha_w = v;
    else if (key == "alpha_c_db") tech.alpha_c = v;
    else if (key == "alpha_b_db_per_90") tech.alpha_b = v;
    else if (key == "lambda_c_db") tech.lambda_c = v;
    else if (key == "port_spread_pitch") tech.port_spread_pitch = v;
    else if (key == "port_spread_extension") tech.port_spread_extension = v;
    else if (key == "stagger_delta") tech.stagger_delta = v;
    else throw fail("unknown technology key '" + key + "'");

    std::string extra;
    if (ls >> extra) throw fail("trailing token '" + extra + "'");
  }
  if (!saw_header) throw ParseError(path + ": missing 'picroute-tech v1' header");

  tech.validate(allow_subwidth_grid);
  return tech;
}

void save_technology(const Technology& tech, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write technology file: " + path);
  out.precision(12);
  out << "picroute-tech v1\n";
  out << "grid_size " << tech.grid_size_s << "\n";
  out << "bend_radius " << tech.bend_radius_r << "\n";
  out << "waveguide_width " << tech.waveguide_width << "\n";
  out << "min_spacing " << tech.min_spacing << "\n";
  out << "crossing_size " << tech.crossing_size << "\n";
  out << "crossing_straight_margin " << tech.crossing_straight_margin << "\n";
  out << "alpha_w_db_per_cm " << tech.alpha_w << "\n";
  out << "alpha_c_db " << tech.alpha_c << "\n";
  out << "alpha_b_db_per_90 " << tech.alpha_b << "\n";
  out << "lambda_c_db " << tech.lambda_c << "\n";
  out << "port_spread_pitch " << tech.port_spread_pitch << "\n";
  out << "port_spread_extension " << tech.port_spread_extension << "\n";
  out << "stagger_delta " << tech.stagger_delta << "\n";
  for (const auto& [type, il] : tech.device_il)
    out << "device_il " << type << " " << il << "\n";
}

}  // namespace picroute
