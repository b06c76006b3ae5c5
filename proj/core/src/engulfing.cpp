#include "engulf/engulfing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "engulf/bregman.hpp"
#include "engulf/sections.hpp"

namespace engulf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// All gaps are evaluated on the caller's function directly.  Normalizing at
// the origin first looks attractive (verdicts are affine-invariant) but it
// subtracts the affine part pointwise and so turns functions with a dominant
// affine component into pure rounding residue; the raw evaluation is better
// or equally conditioned for every catalog function.

EngulfingVerdict run_check(const FunctionSpec& w, Mode mode, double K, const SamplerConfig& cfg,
                           PairLog* pair_log) {
  if (!(K > 1.0)) throw std::invalid_argument("engulfing check: requires K > 1");
  cfg.validate();
  const int n = w.dimension();

  EngulfingVerdict verdict{mode, K, true, std::nullopt, 0, cfg.seed, false, 0};
  Rng master(cfg.seed);

  for (int i = 0; i < cfg.triples; ++i) {
    Rng rng = master.split(static_cast<std::uint64_t>(i));
    const Vec x = sample_box_point(rng, cfg.box_radius, n);
    if (!std::isfinite(w.impl().eval(x))) continue;
    const auto p_list = subgradient_extremes(w, x);
    if (p_list.empty()) {
      ++verdict.skipped_kinks;
      continue;
    }
    const double t = sample_height(rng, cfg);

    for (const Vec& p : p_list) {
      const SubgradientPair base{x, p};
      const SectionSample section = sample_section(w, base, t, cfg, rng);
      verdict.any_capped_rays = verdict.any_capped_rays || section.any_capped;

      for (const Vec& y : section.points) {
        const auto q_list = subgradient_extremes(w, y);
        if (q_list.empty()) {
          ++verdict.skipped_kinks;
          continue;
        }
        for (const Vec& q : q_list) {
          if (pair_log)
            pair_log->push_back({SubgradientPair{x, p}, SubgradientPair{y, q}});
          const SubgradientPair back{y, q};
          if (mode == Mode::Soft) {
            ++verdict.samples_used;
            if (!(bregman_gap(w, back, x) < K * t)) {
              verdict.pass = false;
              verdict.witness = Witness{x, p, t, y, q, std::nullopt};
              return verdict;
            }
          } else {
            // z ranges over the sampled section members, the base point first
            // so that a full check subsumes the soft check on its triples.
            ++verdict.samples_used;
            if (!(bregman_gap(w, back, x) < K * t)) {
              verdict.pass = false;
              verdict.witness = Witness{x, p, t, y, q, Vec(x)};
              return verdict;
            }
            for (const Vec& z : section.points) {
              ++verdict.samples_used;
              if (!(bregman_gap(w, back, z) < K * t)) {
                verdict.pass = false;
                verdict.witness = Witness{x, p, t, y, q, Vec(z)};
                return verdict;
              }
            }
          }
        }
      }
    }
  }
  return verdict;
}

}  // namespace

EngulfingVerdict check_soft(const FunctionSpec& f, double K, const SamplerConfig& cfg,
                            PairLog* pair_log) {
  return run_check(f, Mode::Soft, K, cfg, pair_log);
}

EngulfingVerdict check_full(const FunctionSpec& f, double K, const SamplerConfig& cfg,
                            PairLog* pair_log) {
  return run_check(f, Mode::Full, K, cfg, pair_log);
}

bool reverify_witness(const FunctionSpec& w, Mode mode, double K, const Witness& wit) {
  const SubgradientPair base{wit.x, wit.p};
  const SubgradientPair back{wit.y, wit.q};
  if (!(bregman_gap(w, base, wit.y) < wit.t)) return false;  // y must lie in S(x,p,t)
  if (mode == Mode::Soft) return !(bregman_gap(w, back, wit.x) < K * wit.t);
  if (!wit.z) return false;
  if (!(bregman_gap(w, base, *wit.z) < wit.t)) return false;  // z must lie in S(x,p,t)
  return !(bregman_gap(w, back, *wit.z) < K * wit.t);
}

// --- K estimation ----------------------------------------------------------------

namespace {

struct PairEval {
  double k = 1.0;
  bool usable = false;
  bool kink = false;
  bool flat = false;
};

// Minimal constant at one pair, with a conditioning guard.  Relative to the
// magnitudes entering the gap formula: below ~64 eps a computed gap is
// indistinguishable from an exact zero, and below 1e-6 it carries too much
// rounding noise to rank; a zero paired with a sizable reverse gap is a flat
// segment (strict-convexity violation candidate) and contributes +inf.
PairEval eval_pair(const FunctionSpec& w, const Vec& x, const Vec& y) {
  PairEval out;
  bool same = true;
  for (size_t i = 0; i < x.size(); ++i)
    if (x[i] != y[i]) { same = false; break; }
  if (same) return out;

  const double fx = w.impl().eval(x);
  const double fy = w.impl().eval(y);
  if (!std::isfinite(fx) || !std::isfinite(fy)) return out;

  const auto sx = subgradient_extremes(w, x);
  const auto sy = subgradient_extremes(w, y);
  if (sx.empty() || sy.empty() || sx.size() > 1 || sy.size() > 1) {
    // A kink pair admits a subgradient choice with zero reverse gap: +inf.
    out.k = kInf;
    out.kink = true;
    out.usable = true;
    return out;
  }

  double lin_xy = 0, lin_yx = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    lin_xy += sx[0][i] * (y[i] - x[i]);
    lin_yx += sy[0][i] * (x[i] - y[i]);
  }
  const double d1 = fy - fx - lin_xy;  // gap at y from (x, grad x)
  const double d2 = fx - fy - lin_yx;  // gap at x from (y, grad y)
  if (!std::isfinite(d1) || !std::isfinite(d2)) return out;

  const double mag = std::abs(fx) + std::abs(fy) + std::abs(lin_xy) + std::abs(lin_yx);
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * mag;
  const double floor = 1e-6 * mag;
  if (d1 <= noise && d2 <= noise) {
    out.k = 1.0;  // affine along the segment in both directions
    out.usable = true;
    return out;
  }
  if (d1 <= noise || d2 <= noise) {
    if (std::max(d1, d2) >= floor) {
      out.k = kInf;  // flat one way only: strict-convexity violation candidate
      out.flat = true;
      out.usable = true;
    }
    return out;  // otherwise both gaps drown in rounding: skip
  }
  if (d1 < floor || d2 < floor) return out;  // ill-conditioned, skip

  const double r = d2 / d1;
  out.k = std::max(r, 1.0 / r);
  out.usable = true;
  return out;
}

std::vector<double> grid_levels(double box, int per_sign) {
  std::vector<double> levels;
  levels.reserve(2 * static_cast<size_t>(per_sign) + 1);
  for (int k = per_sign - 1; k >= 0; --k)
    levels.push_back(-box * std::pow(10.0, -8.0 * k / std::max(1, per_sign - 1)));
  levels.push_back(0.0);
  for (int k = 0; k < per_sign; ++k)
    levels.push_back(box * std::pow(10.0, -8.0 * k / std::max(1, per_sign - 1)));
  std::reverse(levels.end() - per_sign, levels.end());
  return levels;
}

std::vector<Vec> grid_points(double box, int per_sign, int n, long max_points) {
  const auto levels = grid_levels(box, per_sign);
  std::vector<Vec> pts;
  std::vector<size_t> idx(static_cast<size_t>(n), 0);
  while (true) {
    Vec p(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<size_t>(i)] = levels[idx[static_cast<size_t>(i)]];
    pts.push_back(std::move(p));
    if (static_cast<long>(pts.size()) >= max_points) break;
    int i = 0;
    for (; i < n; ++i) {
      if (++idx[static_cast<size_t>(i)] < levels.size()) break;
      idx[static_cast<size_t>(i)] = 0;
    }
    if (i == n) break;
  }
  return pts;
}

}  // namespace

KEstimate estimate_k_char(const FunctionSpec& w, const SamplerConfig& cfg,
                          const RefineConfig& refine) {
  cfg.validate();
  const int n = w.dimension();

  KEstimate est;
  est.initial_box = cfg.box_radius;
  est.seed = cfg.seed;

  const int per_sign = n == 1 ? refine.grid_per_axis
                              : std::max(4, refine.grid_per_axis / (n == 2 ? 8 : 24));

  double sup = 1.0;
  Vec best_x, best_y;
  double prev_round_sup = 1.0;
  double last_growth = 0.0;

  for (int j = 0; j <= refine.box_doublings; ++j) {
    const double box = cfg.box_radius * std::pow(2.0, j);
    est.final_box = box;
    const auto pts = grid_points(box, per_sign, n, 4000);
    est.grid_points = static_cast<int>(pts.size());

    // subsample pairs beyond the budget, deterministically
    const long total_pairs = static_cast<long>(pts.size()) * (static_cast<long>(pts.size()) - 1) / 2;
    const long stride = std::max(1L, total_pairs / refine.pair_budget);
    long counter = 0;
    for (size_t a = 0; a < pts.size(); ++a) {
      for (size_t b = a + 1; b < pts.size(); ++b) {
        if (stride > 1 && (counter++ % stride) != 0) continue;
        const PairEval pe = eval_pair(w, pts[a], pts[b]);
        ++est.pairs_evaluated;
        if (!pe.usable) continue;
        est.kink_pair = est.kink_pair || pe.kink;
        est.flat_candidate = est.flat_candidate || pe.flat;
        if (pe.k > sup) {
          sup = pe.k;
          best_x = pts[a];
          best_y = pts[b];
        }
      }
    }
    if (j > 0 && prev_round_sup > 0 && std::isfinite(sup))
      last_growth = sup / prev_round_sup - 1.0;
    prev_round_sup = sup;
    if (!std::isfinite(sup)) break;  // kink or flat pair: nothing to refine
  }

  est.grid_sup = sup;
  est.diverging = last_growth > refine.divergence_growth;

  if (std::isfinite(sup) && !best_x.empty()) {
    // pattern search over the concatenated pair coordinates
    Vec coords(best_x);
    coords.insert(coords.end(), best_y.begin(), best_y.end());
    Vec step(coords.size());
    for (size_t i = 0; i < coords.size(); ++i)
      step[i] = 0.25 * std::max(std::abs(coords[i]), 1e-6);

    const double before_refine = sup;
    for (int round = 0; round < refine.refine_rounds; ++round) {
      ++est.refine_rounds_used;
      bool improved = false;
      for (size_t i = 0; i < coords.size(); ++i) {
        for (const double s : {step[i], -step[i]}) {
          Vec cand(coords);
          cand[i] += s;
          const Vec cx(cand.begin(), cand.begin() + n);
          const Vec cy(cand.begin() + n, cand.end());
          const PairEval pe = eval_pair(w, cx, cy);
          ++est.pairs_evaluated;
          if (!pe.usable || pe.kink) continue;  // never refine onto a kink
          est.flat_candidate = est.flat_candidate || pe.flat;
          if (pe.k > sup) {
            sup = pe.k;
            coords = cand;
            best_x = cx;
            best_y = cy;
            improved = true;
          }
        }
        if (!std::isfinite(sup)) break;
      }
      if (!std::isfinite(sup)) break;
      if (!improved)
        for (auto& s : step) s *= refine.shrink;
    }
    if (std::isfinite(sup) && before_refine > 0 && sup / before_refine - 1.0 > refine.divergence_growth)
      est.diverging = true;
  }

  est.value = sup;
  est.argmax_x = best_x;
  est.argmax_y = best_y;
  return est;
}

double engulfing_constant_bound(double k_soft) {
  if (!(k_soft > 1.0)) throw std::invalid_argument("engulfing_constant_bound: requires K > 1");
  return 2.0 * k_soft * (k_soft + 1.0);
}

EquivalenceReport check_equivalence(const FunctionSpec& f, const SamplerConfig& cfg,
                                    const RefineConfig& refine) {
  EquivalenceReport report;
  report.k_hat = estimate_k_char(f, cfg, refine);
  if (!std::isfinite(report.k_hat.value) || report.k_hat.diverging) {
    report.verdict = "not engulfing for any K";
    return report;
  }
  report.soft_K = report.k_hat.value * (1.0 + 1e-3);
  report.soft = check_soft(f, report.soft_K, cfg);
  report.full_K = engulfing_constant_bound(report.soft_K);
  report.full = check_full(f, report.full_K, cfg);
  if (report.soft->pass && report.full->pass)
    report.verdict = "engulfing";
  else if (report.soft->pass && !report.full->pass)
    report.verdict = "soft-pass but full-fail: equivalence violated at 2K(K+1)";
  else
    report.verdict = "violation found";
  return report;
}

}  // namespace engulf
