// Command-line diagnoser for the engulfing property of convex functions:
// sections, quasi-symmetry ratios, K estimation, definition checks and the
// worked-example experiments, with JSON/CSV/SVG output.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "engulf/bregman.hpp"
#include "engulf/engulfing.hpp"
#include "engulf/expr.hpp"
#include "engulf/function.hpp"
#include "engulf/report.hpp"
#include "engulf/sections.hpp"
#include "engulf/svg.hpp"
#include "engulf/version.hpp"

namespace {

using namespace engulf;

struct GlobalOptions {
  std::string builtin;
  std::string fn_text;
  int dimension = 1;
  std::vector<double> params;
  std::string job_path;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string format = "json";
};

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    v.push_back(std::stod(item));
  }
  if (v.empty()) throw CLI::ValidationError("expected a comma-separated list of reals");
  return v;
}

std::string read_file(const std::string& path);

// Job files are JSON objects with "fn"/"dim" or "builtin"/"params" fields.
void load_job(GlobalOptions& g) {
  nlohmann::json job;
  try {
    job = nlohmann::json::parse(read_file(g.job_path));
  } catch (const std::exception& e) {
    throw CLI::ValidationError(std::string("bad job file: ") + e.what());
  }
  if (job.contains("fn")) g.fn_text = job["fn"].get<std::string>();
  if (job.contains("dim")) g.dimension = job["dim"].get<int>();
  if (job.contains("builtin")) g.builtin = job["builtin"].get<std::string>();
  if (job.contains("params")) g.params = job["params"].get<std::vector<double>>();
  if (job.contains("seed")) g.seed = job["seed"].get<std::uint64_t>();
}

FunctionSpec resolve_function(GlobalOptions& g) {
  if (!g.job_path.empty()) load_job(g);
  if (!g.builtin.empty() && !g.fn_text.empty())
    throw CLI::ValidationError("--builtin and --fn are mutually exclusive");
  if (!g.builtin.empty()) return catalog_function(g.builtin, g.params);
  if (g.fn_text.empty())
    throw CLI::ValidationError("one of --builtin, --fn or a job file is required");

  const expr::ExprTree tree = expr::parse(g.fn_text, g.dimension);
  const FunctionSpec f = expr::make_function(tree);
  SamplerConfig probe;
  probe.seed = g.seed;
  if (const auto w = convexity_probe(f, probe)) {
    std::ostringstream os;
    os << "expression failed the convexity probe: f((x+y)/2) > (f(x)+f(y))/2 at x=(";
    for (size_t i = 0; i < w->x.size(); ++i) os << (i ? "," : "") << w->x[i];
    os << "), y=(";
    for (size_t i = 0; i < w->y.size(); ++i) os << (i ? "," : "") << w->y[i];
    os << "): midpoint " << w->midpoint_value << " > chord " << w->chord_value;
    throw CLI::ValidationError(os.str());
  }
  return f;
}

void write_output(const GlobalOptions& g, const std::string& payload) {
  if (g.out_path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(g.out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + g.out_path);
  out << payload;
}

void write_file(const std::string& path, const std::string& payload) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << payload;
}

void emit_report(const GlobalOptions& g, const ExperimentReport& report) {
  if (g.format == "csv")
    write_output(g, to_csv(report.table));
  else
    write_output(g, to_json_string(report));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"engulf " ENGULF_VERSION
               " - numerical diagnosis of the engulfing property of convex functions"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--builtin", g.builtin, "catalog function tag (see `engulf list`)");
  app.add_option("--fn", g.fn_text, "expression, e.g. 'piecewise(x<0: x^2, x>=0: x^4)'");
  app.add_option("--dim", g.dimension, "dimension of --fn (default 1)");
  app.add_option("--job", g.job_path, "JSON job file with fn/dim or builtin/params fields");
  app.add_option("--params", g.params, "catalog parameters (affine: a b; polyquad: flattened matrix)");
  app.add_option("--seed", g.seed, "master seed (default 1)");
  app.add_option("--out", g.out_path, "output path (default stdout)");
  app.add_option("--format", g.format, "json|csv (default json)")
      ->check(CLI::IsMember({"json", "csv"}));

  // --- list -------------------------------------------------------------------
  auto* cmd_list = app.add_subcommand("list", "list catalog function tags")->fallthrough();

  // --- section ----------------------------------------------------------------
  auto* cmd_section = app.add_subcommand("section", "materialize a section S(x0,p,t)")->fallthrough();
  std::string sec_x0 = "0", sec_p;
  double sec_t = 1.0;
  int sec_dirs = 64;
  double sec_rcap = 1e12;
  std::string sec_svg;
  cmd_section->add_option("--x0", sec_x0, "base point (comma-separated)");
  cmd_section->add_option("--p", sec_p, "subgradient at x0 (default: gradient)");
  cmd_section->add_option("--t", sec_t, "height t > 0")->required();
  cmd_section->add_option("--dirs", sec_dirs, "boundary rays in dimension >= 2 (default 64)");
  cmd_section->add_option("--rcap", sec_rcap, "unboundedness cap (default 1e12)");
  cmd_section->add_option("--svg", sec_svg, "also write an SVG boundary plot (n=2)");

  // --- ratio ------------------------------------------------------------------
  auto* cmd_ratio = app.add_subcommand("ratio", "quasi-symmetry ratio at a pair of points")->fallthrough();
  std::string ratio_x, ratio_y;
  cmd_ratio->add_option("--x", ratio_x, "first point")->required();
  cmd_ratio->add_option("--y", ratio_y, "second point")->required();

  // --- estimate-k ---------------------------------------------------------------
  auto* cmd_estimate = app.add_subcommand("estimate-k", "estimate the minimal characterization constant")->fallthrough();
  SamplerConfig est_cfg;
  RefineConfig est_refine;
  cmd_estimate->add_option("--box", est_cfg.box_radius, "sampling box half-width (default 10)");
  cmd_estimate->add_option("--grid", est_refine.grid_per_axis, "grid levels per sign per axis (default 96)");
  cmd_estimate->add_option("--refine-rounds", est_refine.refine_rounds, "pattern-search rounds (default 40)");
  cmd_estimate->add_option("--doublings", est_refine.box_doublings, "box doublings (default 3)");

  // --- check ------------------------------------------------------------------
  auto* cmd_check = app.add_subcommand("check", "engulfing definition check")->fallthrough();
  std::string check_mode = "soft";
  double check_K = 2.0;
  SamplerConfig check_cfg;
  RefineConfig check_refine;
  cmd_check->add_option("--mode", check_mode, "soft|full|equiv")
      ->check(CLI::IsMember({"soft", "full", "equiv"}));
  cmd_check->add_option("--K", check_K, "constant K > 1 (soft/full modes)");
  cmd_check->add_option("--box", check_cfg.box_radius, "sampling box half-width");
  cmd_check->add_option("--tmin", check_cfg.t_min, "smallest sampled height");
  cmd_check->add_option("--tmax", check_cfg.t_max, "largest sampled height");
  cmd_check->add_option("--samples", check_cfg.triples, "number of (x,t) triples");
  cmd_check->add_option("--grid", check_refine.grid_per_axis, "estimator grid (equiv mode)");

  // --- report -------------------------------------------------------------------
  auto* cmd_report = app.add_subcommand("report", "catalog-wide engulfing report")->fallthrough();
  SamplerConfig report_cfg;
  RefineConfig report_refine;
  cmd_report->add_option("--box", report_cfg.box_radius, "sampling box half-width");
  cmd_report->add_option("--samples", report_cfg.triples, "triples per check");
  cmd_report->add_option("--grid", report_refine.grid_per_axis, "estimator grid");

  // --- plot ---------------------------------------------------------------------
  auto* cmd_plot = app.add_subcommand("plot", "render a report JSON as SVG")->fallthrough();
  std::string plot_input, plot_kind = "ratio-curve";
  cmd_plot->add_option("--input", plot_input, "report JSON path")->required();
  cmd_plot->add_option("--kind", plot_kind, "section-boundary|ratio-curve")
      ->check(CLI::IsMember({"section-boundary", "ratio-curve"}));

  // --- example-2-1 ----------------------------------------------------------------
  auto* cmd_ex21 = app.add_subcommand("example-2-1", "worked chain at pairs (x, -x^k)")->fallthrough();
  double ex_k = 2.0;
  std::string ex_xs = "1,0.1,0.01,0.001";
  cmd_ex21->add_option("--k", ex_k, "exponent k (blow-up covers 1<k<3; default 2)");
  cmd_ex21->add_option("--xs", ex_xs, "comma-separated positive x values");

  // --- exp-family -----------------------------------------------------------------
  auto* cmd_expfam = app.add_subcommand("exp-family", "ratio growth of e^x and e^{x^2}")->fallthrough();
  std::string fam_hs = "1,2,5,10,20";
  cmd_expfam->add_option("--hs", fam_hs, "comma-separated positive h values");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_list->parsed()) {
      std::string out;
      for (const auto& tag : catalog_tags()) out += tag + "\n";
      write_output(g, out);
      return 0;
    }

    if (cmd_section->parsed()) {
      const FunctionSpec f = resolve_function(g);
      const Vec x0 = parse_point(sec_x0);
      Vec p;
      if (!sec_p.empty()) p = parse_point(sec_p);
      else p = gradient(f, x0);
      const ExperimentReport r = section_report(f, {x0, p}, sec_t, sec_dirs, sec_rcap);
      emit_report(g, r);
      if (!sec_svg.empty()) write_file(sec_svg, emit_plot(r, PlotKind::SectionBoundary));
      return 0;
    }

    if (cmd_ratio->parsed()) {
      const FunctionSpec f = resolve_function(g);
      emit_report(g, ratio_report(f, parse_point(ratio_x), parse_point(ratio_y)));
      return 0;
    }

    if (cmd_estimate->parsed()) {
      const FunctionSpec f = resolve_function(g);
      est_cfg.seed = g.seed;
      emit_report(g, kestimate_report(f, est_cfg, est_refine));
      return 0;
    }

    if (cmd_check->parsed()) {
      const FunctionSpec f = resolve_function(g);
      check_cfg.seed = g.seed;
      if (check_mode == "equiv") {
        const EquivalenceReport r = check_equivalence(f, check_cfg, check_refine);
        write_output(g, equivalence_to_json(r));
        return r.verdict == "engulfing" ? 0 : 1;
      }
      const EngulfingVerdict v = check_mode == "soft" ? check_soft(f, check_K, check_cfg)
                                                      : check_full(f, check_K, check_cfg);
      write_output(g, verdict_to_json(v));
      return v.pass ? 0 : 1;
    }

    if (cmd_report->parsed()) {
      report_cfg.seed = g.seed;
      emit_report(g, run_catalog_report(report_cfg, report_refine));
      return 0;
    }

    if (cmd_plot->parsed()) {
      const ExperimentReport r = report_from_json(read_file(plot_input));
      const PlotKind kind =
          plot_kind == "section-boundary" ? PlotKind::SectionBoundary : PlotKind::RatioCurve;
      write_output(g, emit_plot(r, kind));
      return 0;
    }

    if (cmd_ex21->parsed()) {
      emit_report(g, run_example_2_1(ex_k, parse_point(ex_xs)));
      return 0;
    }

    if (cmd_expfam->parsed()) {
      emit_report(g, run_exp_family(parse_point(fam_hs)));
      return 0;
    }
  } catch (const expr::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
