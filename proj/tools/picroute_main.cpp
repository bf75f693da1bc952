// Command-line driver: benchmark generation, routing, DRC, and IL evaluation.

#include <iostream>

#include "CLI11.hpp"
#include "picroute/bench.hpp"
#include "picroute/pipeline.hpp"
#include "picroute/svg.hpp"

using namespace picroute;

namespace {

struct RouteFlags {
  double lambda_c = -1.0;
  double alpha_c = -1.0;
  bool disable_gcp = false;
  bool disable_lrr = false;
  bool disable_crossings = false;
  bool diagonal_off = false;
  int max_rr_iters = -1;
  bool allow_subwidth_grid = false;
};

ScheduleOptions make_options(const RouteFlags& f, bool quiet) {
  ScheduleOptions opts;
  opts.route.lambda_c_override = f.lambda_c;
  opts.route.alpha_c_override = f.alpha_c;
  opts.route.enable_gcp = !f.disable_gcp;
  opts.route.allow_crossings = !f.disable_crossings;
  opts.route.diagonals = !f.diagonal_off;
  opts.enable_lrr = !f.disable_lrr;
  opts.max_rr_iters = f.max_rr_iters;
  if (!quiet) opts.log = [](const std::string& line) { std::cout << line << "\n"; };
  return opts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"picroute: curvy waveguide detailed router for photonic circuits"};
  app.require_subcommand(1);

  // --- gen ---------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a benchmark netlist + technology");
  std::string family;
  int gen_n = 4;
  std::string variant = "north";
  std::uint64_t seed = 1;
  std::string out_netlist = "bench.net";
  std::string out_tech;
  gen->add_option("family", family, "clements | mmi | wronoc")->required();
  gen->add_option("size", gen_n, "N for clements/mmi (ignored for wronoc)");
  gen->add_option("--variant", variant, "wronoc placement: north|oneside|corner|pairwise");
  gen->add_option("--seed", seed, "generator jitter seed");
  gen->add_option("--out", out_netlist, "netlist output path");
  gen->add_option("--out-tech", out_tech, "technology output path");

  // --- route ---------------------------------------------------------------
  auto* route = app.add_subcommand("route", "route a netlist and emit layout/report");
  std::string netlist_path, tech_path;
  std::string out_layout = "layout.json";
  std::string out_svg, report_json;
  bool quiet = false;
  RouteFlags flags;
  route->add_option("netlist", netlist_path)->required();
  route->add_option("tech", tech_path)->required();
  route->add_option("--out-layout", out_layout, "layout JSON output");
  route->add_option("--out-svg", out_svg, "SVG rendering output");
  route->add_option("--report-json", report_json, "machine-readable report output");
  route->add_option("--lambda-c", flags.lambda_c, "congestion penalty override (dB/grid)");
  route->add_option("--alpha-c", flags.alpha_c, "crossing loss override (dB)");
  route->add_flag("--disable-gcp", flags.disable_gcp, "turn off the congestion penalty");
  route->add_flag("--disable-lrr", flags.disable_lrr, "turn off the local rip-up check");
  route->add_flag("--disable-crossings", flags.disable_crossings,
                  "never insert waveguide crossings");
  route->add_flag("--diagonal-only-off", flags.diagonal_off,
                  "restrict turns to 90 degrees (no diagonal neighbors)");
  route->add_option("--max-rr-iters", flags.max_rr_iters, "rip-up iteration budget");
  route->add_option("--seed", seed, "accepted for interface parity; routing is seedless");
  route->add_flag("--allow-subwidth-grid", flags.allow_subwidth_grid,
                  "accept technologies whose grid is not wider than the waveguide");
  route->add_flag("--quiet", quiet, "suppress per-iteration progress lines");

  // --- drc ---------------------------------------------------------------
  auto* drc = app.add_subcommand("drc", "design-rule-check a layout file");
  std::string drc_netlist, drc_tech, drc_layout_path;
  bool drc_subwidth = false;
  drc->add_option("netlist", drc_netlist)->required();
  drc->add_option("tech", drc_tech)->required();
  drc->add_option("layout", drc_layout_path)->required();
  drc->add_flag("--allow-subwidth-grid", drc_subwidth);

  // --- eval ---------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "evaluate insertion loss of a layout file");
  std::string eval_netlist, eval_tech, eval_layout, eval_report_json;
  bool eval_subwidth = false;
  eval->add_option("netlist", eval_netlist)->required();
  eval->add_option("tech", eval_tech)->required();
  eval->add_option("layout", eval_layout)->required();
  eval->add_option("--report-json", eval_report_json);
  eval->add_flag("--allow-subwidth-grid", eval_subwidth);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      GeneratedBench bench;
      if (family == "clements") bench = generate_clements(gen_n, seed);
      else if (family == "mmi") bench = generate_mmi_array(gen_n, seed);
      else if (family == "wronoc") bench = generate_wronoc(variant, seed);
      else throw ValidationError("unknown family '" + family + "'");
      save_circuit(bench.circuit, out_netlist);
      if (!out_tech.empty()) save_technology(bench.tech, out_tech);
      std::cout << "generated " << bench.circuit.devices.size() << " devices, "
                << bench.circuit.nets.size() << " nets -> " << out_netlist << "\n";
      return 0;
    }

    if (route->parsed()) {
      Technology tech = load_technology(tech_path, flags.allow_subwidth_grid);
      Circuit circuit = load_circuit(netlist_path);
      PipelineResult result = route_circuit(circuit, tech, make_options(flags, quiet));

      save_layout(result.layout, circuit, tech, out_layout);
      if (!out_svg.empty())
        export_svg(circuit, result.layout, tech, &result.report, out_svg);
      if (!report_json.empty()) save_report_json(result.report, circuit, report_json);
      std::cout << report_to_text(result.report);
      for (const auto& v : result.drc.violations)
        std::cout << "DRV " << drv_kind_name(v.kind) << " at (" << v.location.x << ","
                  << v.location.y << ") " << v.a << " " << v.b << "\n";
      if (!result.outcome.failed.empty()) {
        std::cout << "failed nets:";
        for (int n : result.outcome.failed) std::cout << " " << circuit.nets[n].id;
        std::cout << "\n";
        return 2;
      }
      return result.drc.clean() ? 0 : 3;
    }

    if (drc->parsed()) {
      Technology tech = load_technology(drc_tech, drc_subwidth);
      Circuit circuit = load_circuit(drc_netlist);
      Layout layout = load_layout(drc_layout_path, circuit);
      DrcReport report = drc_layout(circuit, layout, tech);
      for (const auto& v : report.violations)
        std::cout << "DRV " << drv_kind_name(v.kind) << " at (" << v.location.x << ","
                  << v.location.y << ") " << v.a << " " << v.b << "\n";
      std::cout << "violations: " << report.violations.size() << "\n";
      return report.clean() ? 0 : 3;
    }

    if (eval->parsed()) {
      Technology tech = load_technology(eval_tech, eval_subwidth);
      Circuit circuit = load_circuit(eval_netlist);
      Layout layout = load_layout(eval_layout, circuit);
      RoutingReport report = evaluate_layout(circuit, layout, tech);
      if (!eval_report_json.empty()) save_report_json(report, circuit, eval_report_json);
      std::cout << report_to_text(report);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
