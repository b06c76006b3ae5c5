// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures.  Run via ctest or directly:
//   engulf_acceptance --cli /path/to/engulf

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "engulf/bregman.hpp"
#include "engulf/engulfing.hpp"
#include "engulf/function.hpp"
#include "engulf/report.hpp"
#include "engulf/sections.hpp"

namespace fs = std::filesystem;
using namespace engulf;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report_line(int id, const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << id << ": " << name;
  if (!detail.empty()) std::cout << "  [" << detail << "]";
  std::cout << "\n";
  if (!ok) ++g_failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Independent dense-grid oracle for the quartic characterization constant:
// raw double arithmetic on f(x) = x^4, no library code involved.
// ---------------------------------------------------------------------------

double quartic_pair_constant(double x, double y) {
  const double x2 = x * x, y2 = y * y;
  const double fx = x2 * x2, fy = y2 * y2;
  const double dx = 4.0 * x * x2, dy = 4.0 * y * y2;
  const double d1 = fy - fx - dx * (y - x);
  const double d2 = fx - fy - dy * (x - y);
  const double guard = 1e-9 * (std::abs(fx) + std::abs(fy) + 1.0);
  if (d1 < guard || d2 < guard) return 1.0;
  const double r = d2 / d1;
  return r > 1.0 ? r : 1.0 / r;
}

double quartic_oracle_khat() {
  const int n = 2000;
  double best = 1.0, bx = 0.0, by = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -50.0 + 100.0 * i / (n - 1);
    for (int j = i + 1; j < n; ++j) {
      const double y = -50.0 + 100.0 * j / (n - 1);
      const double k = quartic_pair_constant(x, y);
      if (k > best) { best = k; bx = x; by = y; }
    }
  }
  // compass refinement around the grid argmax
  double sx = 0.05, sy = 0.05;
  for (int round = 0; round < 200; ++round) {
    bool improved = false;
    for (const double cand_x : {bx - sx, bx, bx + sx}) {
      for (const double cand_y : {by - sy, by, by + sy}) {
        const double k = quartic_pair_constant(cand_x, cand_y);
        if (k > best) { best = k; bx = cand_x; by = cand_y; improved = true; }
      }
    }
    if (!improved) { sx *= 0.5; sy *= 0.5; }
    if (sx < 1e-14) break;
  }
  return best;
}

// ---------------------------------------------------------------------------

void criterion_1_gap_identity() {
  const auto start = Clock::now();
  bool ok = true;
  std::string detail;
  for (const auto& tag : catalog_tags()) {
    const FunctionSpec f = catalog_function(tag);
    Rng rng(1001);
    long checked = 0;
    while (checked < 10000) {
      Vec x(static_cast<size_t>(f.dimension())), y(x.size());
      for (auto& c : x) c = rng.uniform(-8.0, 8.0);
      for (auto& c : y) c = rng.uniform(-8.0, 8.0);
      const auto gx = try_gradient(f, x);
      const auto gy = try_gradient(f, y);
      if (!gx || !gy) continue;
      const double d1 = bregman_gap(f, {x, *gx}, y);
      const double d2 = bregman_gap(f, {y, *gy}, x);
      const double m = monotone_gap(f, {x, *gx}, {y, *gy});
      if (!std::isfinite(d1) || !std::isfinite(d2) || !std::isfinite(m)) continue;
      ++checked;
      if (m < -1e-12 ||
          std::abs(m - (d1 + d2)) > 1e-9 * std::max({std::abs(m), d1 + d2, 1e-9})) {
        ok = false;
        detail = tag + " at pair " + fmt(x[0]) + "," + fmt(y[0]);
        break;
      }
    }
    if (!ok) break;
  }
  const double secs = seconds_since(start);
  if (secs >= 5.0) {
    ok = false;
    detail += " runtime " + fmt(secs) + "s >= 5s";
  }
  if (ok) detail = "9 functions x 10^4 pairs, " + fmt(secs) + "s";
  report_line(1, "gap identity monotone_gap = D(x->y) + D(y->x) to 1e-9 rel", ok, detail);
}

void criterion_2_example_2_1() {
  const ExperimentReport head = run_example_2_1(2.0, {1.0});
  const auto& row = head.table.rows[0];
  const double a = std::get<double>(row[2]);
  const double m = std::get<double>(row[3]);
  const double k1 = std::get<double>(row[6]);
  bool ok = std::abs(a - 8.0) <= 1e-12 && std::abs(m - 12.0) <= 1e-12 &&
            std::abs(k1 - 2.0) <= 1e-9;

  const ExperimentReport tail = run_example_2_1(2.0, {0.1, 0.01, 0.001});
  double prev = 0.0;
  for (size_t i = 0; i < tail.table.rows.size(); ++i) {
    const double x = std::get<double>(tail.table.rows[i][1]);
    const double mk = std::get<double>(tail.table.rows[i][6]);
    const double predicted = 1.0 / (2.0 * x);
    ok = ok && mk > prev && mk <= 2.0 * predicted && mk >= 0.5 * predicted;
    prev = mk;
  }
  report_line(2, "example 2.1 regression: A=8, M=12, min K = 2 and 1/(2x) growth", ok,
              "A=" + fmt(a) + " M=" + fmt(m) + " minK(x=1)=" + fmt(k1));
}

void criterion_3_exp_exclusion() {
  const ExperimentReport fam = run_exp_family({10.0, 20.0});
  const double r10 = std::get<double>(fam.table.rows[0][1]);
  const double r20 = std::get<double>(fam.table.rows[1][1]);
  bool ok = std::abs(r10 - 9.005) <= 0.001 && (r20 - r10) >= 8.0;
  const KEstimate est = estimate_k_char(catalog_function("exp"), SamplerConfig{});
  ok = ok && est.diverging;
  report_line(3, "e^x exclusion: ratio(10)=9.005+-0.001, growth >= 8, diverging estimate", ok,
              "ratio(10)=" + fmt(r10) + " ratio(20)=" + fmt(r20) +
                  " diverging=" + (est.diverging ? "true" : "false"));
}

void criterion_4_quad_baseline() {
  const FunctionSpec quad = catalog_function("quad");
  const KEstimate est = estimate_k_char(quad, SamplerConfig{});
  bool ok = std::abs(est.value - 1.0) <= 1e-9;

  SamplerConfig cfg;
  cfg.triples = 10000;
  const EngulfingVerdict soft = check_soft(quad, 1.001, cfg);
  // Full mode needs the 2K(K+1) boost even for the quadratic (opposite
  // near-boundary members sit ~4t apart); the operation contract pins the
  // full constant at engulfing_constant_bound(1.001) = 4.006002.
  const EngulfingVerdict full = check_full(quad, engulfing_constant_bound(1.001), cfg);
  ok = ok && soft.pass && full.pass;
  report_line(4, "quadratic baseline: K-hat = 1 +- 1e-9, soft@1.001 and full@4.006 pass", ok,
              "K-hat=" + fmt(est.value) + " soft=" + (soft.pass ? "pass" : "fail") +
                  " full=" + (full.pass ? "pass" : "fail"));
}

void criterion_5_kink_detection() {
  const FunctionSpec abs = catalog_function("abs");
  SamplerConfig cfg;
  cfg.triples = 10000;
  const EngulfingVerdict v = check_soft(abs, 100.0, cfg);
  bool ok = !v.pass && v.witness.has_value();
  std::string detail = "no witness";
  if (ok) {
    const Witness& w = *v.witness;
    const double forward = bregman_gap(abs, {w.x, w.p}, w.y);
    const double back = bregman_gap(abs, {w.y, w.q}, w.x);
    ok = forward < w.t && back >= 100.0 * w.t && reverify_witness(abs, Mode::Soft, 100.0, w);
    const EngulfingVerdict again = check_soft(abs, 100.0, cfg);
    ok = ok && again.witness.has_value() && again.witness->x == w.x && again.witness->t == w.t &&
         again.witness->y == w.y;
    detail = "witness x=" + fmt(w.x[0]) + " t=" + fmt(w.t) + " y=" + fmt(w.y[0]) +
             " back-gap=" + fmt(back);
  }
  report_line(5, "kink detection: soft(abs, K=100) fails with a reproducible witness", ok, detail);
}

void criterion_6_affine_dichotomy() {
  const FunctionSpec aff = catalog_function("affine");
  bool ok = true;
  for (const double x0 : {-3.0, -1.0, 0.0, 0.5, 2.0, 10.0}) {
    const double p = gradient(aff, Vec{x0})[0];
    for (const double t : {1e-6, 0.01, 1.0, 100.0, 1000.0}) {
      const Interval1D iv = solve_interval_1d(aff, x0, p, t);
      ok = ok && iv.lo_capped && iv.hi_capped && std::isinf(iv.lo) && std::isinf(iv.hi);
    }
  }
  SamplerConfig cfg;
  cfg.triples = 2000;
  const EngulfingVerdict full = check_full(aff, 1.01, cfg);
  ok = ok && full.pass;
  report_line(6, "affine dichotomy: all sections are R, full check passes at K=1.01", ok,
              std::string("full=") + (full.pass ? "pass" : "fail"));
}

void criterion_7_cylinder() {
  const FunctionSpec strip = catalog_function("strip2d");
  const SubgradientPair base{{0.0, 0.0}, {0.0, 0.0}};
  const RayHit rx = boundary_radius(strip, base, 1.0, Vec{1.0, 0.0});
  const RayHit ry = boundary_radius(strip, base, 1.0, Vec{0.0, 1.0});
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const RayHit rd = boundary_radius(strip, base, 1.0, Vec{inv_sqrt2, inv_sqrt2});
  bool ok = !rx.capped && std::abs(rx.radius - 1.0) <= 1e-9;
  ok = ok && ry.capped && std::isinf(ry.radius);
  ok = ok && !rd.capped && std::abs(rd.radius - std::sqrt(2.0)) <= 1e-9;

  SamplerConfig cfg;
  cfg.triples = 2000;
  const EngulfingVerdict full = check_full(strip, engulfing_constant_bound(1.001), cfg);
  ok = ok && full.pass;
  report_line(7, "cylinder: radii 1 / inf / sqrt(2), full check passes at the quad constant", ok,
              "r(1,0)=" + fmt(rx.radius) + " r(diag)=" + fmt(rd.radius) +
                  " full=" + (full.pass ? "pass" : "fail"));
}

void criterion_8_constant_relation() {
  const auto start = Clock::now();
  const double oracle = quartic_oracle_khat();
  bool ok = std::abs(oracle - 3.732050807568877) <= 1e-9;  // 2 + sqrt(3)

  const FunctionSpec quartic = catalog_function("quartic");
  const KEstimate est = estimate_k_char(quartic, SamplerConfig{});
  ok = ok && std::abs(est.value - oracle) <= 1e-6 * oracle && !est.diverging;

  SamplerConfig cfg;
  cfg.triples = 10000;
  const double k_soft = oracle * 1.001;
  const EngulfingVerdict soft = check_soft(quartic, k_soft, cfg);
  const EngulfingVerdict full = check_full(quartic, engulfing_constant_bound(k_soft), cfg);
  ok = ok && soft.pass && full.pass;
  const double secs = seconds_since(start);
  if (secs >= 60.0) ok = false;
  report_line(8, "constant relation: oracle K-hat, soft@K*1.001 and full@2K(K+1), 10^4 triples",
              ok,
              "oracle=" + fmt(oracle) + " estimate=" + fmt(est.value) + " soft=" +
                  (soft.pass ? "pass" : "fail") + " full=" + (full.pass ? "pass" : "fail") +
                  " " + fmt(secs) + "s");
}

void criterion_9_characterization_consistency() {
  bool ok = true;
  std::string detail;

  struct Case { const char* tag; double K; };
  const Case passes[] = {{"quad", 1.001}, {"quartic", 3.732050807568877 * 1.001}};
  for (const auto& c : passes) {
    const FunctionSpec f = catalog_function(c.tag);
    SamplerConfig cfg;
    cfg.triples = 1000;
    PairLog log;
    const EngulfingVerdict v = check_soft(f, c.K, cfg, &log);
    ok = ok && v.pass && !log.empty();
    for (const auto& [a, b] : log) {
      const auto r = characterization_residual(f, a, b, c.K);
      if (r.lower_slack < -1e-9 || r.upper_slack < -1e-9) {
        ok = false;
        detail = std::string(c.tag) + " slack " + fmt(std::min(r.lower_slack, r.upper_slack));
        break;
      }
    }
  }

  const FunctionSpec abs = catalog_function("abs");
  const EngulfingVerdict fail = check_soft(abs, 100.0, SamplerConfig{});
  ok = ok && !fail.pass && fail.witness.has_value();
  if (fail.witness) {
    const Witness& w = *fail.witness;
    const auto r = characterization_residual(abs, {w.x, w.p}, {w.y, w.q}, 100.0);
    ok = ok && (r.lower_slack < 0.0 || r.upper_slack < 0.0);
    if (detail.empty())
      detail = "fail-witness slacks " + fmt(r.lower_slack) + ", " + fmt(r.upper_slack);
  }
  report_line(9, "characterization consistency on soft-pass pairs and soft-fail witnesses", ok,
              detail);
}

bool run_cli(const std::string& cli, const std::string& args) {
  const std::string cmd = cli + " " + args + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  return rc != -1 && WEXITSTATUS(rc) == 0;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_10_determinism(const std::string& cli) {
  if (cli.empty()) {
    report_line(10, "determinism of CLI outputs", false, "no --cli path given");
    return;
  }
  const fs::path dir = fs::path("acceptance_out");
  fs::create_directories(dir);
  bool ok = true;
  std::string detail;

  const auto twice_identical = [&](const std::string& args_stub, const std::string& name,
                                   const std::string& extra_file = "") {
    const fs::path f1 = dir / (name + "_1");
    const fs::path f2 = dir / (name + "_2");
    const std::string e1 = extra_file.empty() ? "" : (dir / (extra_file + "_1")).string();
    const std::string e2 = extra_file.empty() ? "" : (dir / (extra_file + "_2")).string();
    std::string a1 = args_stub, a2 = args_stub;
    if (!extra_file.empty()) {
      a1 += " --svg " + e1;
      a2 += " --svg " + e2;
    }
    if (!run_cli(cli, "--seed 7 --out " + f1.string() + " " + a1) ||
        !run_cli(cli, "--seed 7 --out " + f2.string() + " " + a2)) {
      ok = false;
      detail = name + ": CLI invocation failed";
      return;
    }
    const std::string b1 = slurp(f1), b2 = slurp(f2);
    if (b1.empty() || b1 != b2) {
      ok = false;
      detail = name + ": outputs differ";
    }
    if (!extra_file.empty()) {
      const std::string s1 = slurp(e1), s2 = slurp(e2);
      if (s1.empty() || s1 != s2) {
        ok = false;
        detail = name + ": SVG outputs differ";
      }
    }
  };

  twice_identical("report --samples 200", "report_json");
  twice_identical("exp-family --hs 1,2,5,10,20", "expfam_json");
  twice_identical("--builtin strip2d section --x0 0,0 --t 1 --dirs 64", "section_json",
                  "section_svg");
  report_line(10, "determinism: identical CLI invocations give byte-identical JSON and SVG", ok,
              detail.empty() ? "report, exp-family, section+svg" : detail);
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--cli") cli = argv[i + 1];

  criterion_1_gap_identity();
  criterion_2_example_2_1();
  criterion_3_exp_exclusion();
  criterion_4_quad_baseline();
  criterion_5_kink_detection();
  criterion_6_affine_dichotomy();
  criterion_7_cylinder();
  criterion_8_constant_relation();
  criterion_9_characterization_consistency();
  criterion_10_determinism(cli);

  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES: " + std::to_string(g_failures))
            << "\n";
  return g_failures;
}
