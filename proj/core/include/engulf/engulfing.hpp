#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "engulf/function.hpp"
#include "engulf/sampling.hpp"

namespace engulf {

enum class Mode { Soft, Full };

struct Witness {
  Vec x, p;             // base pair
  double t;             // section height
  Vec y, q;             // recapturing pair
  std::optional<Vec> z; // full mode: the section member that escapes
};

struct EngulfingVerdict {
  Mode mode;
  double K;
  bool pass;
  std::optional<Witness> witness;
  long samples_used = 0;
  std::uint64_t seed = 0;
  bool any_capped_rays = false;  // sampled sections had cap-classified unbounded rays
  long skipped_kinks = 0;        // nD sample points with no enumerable subgradient
};

using PairLog = std::vector<std::pair<SubgradientPair, SubgradientPair>>;

// Definition check by sampling: x from the box, t log-uniform, y from
// S(x, p, t); at 1D kinks both extreme subgradients are used on both sides.
// Sampling depends only on (f, cfg), never on K, so a pass at K implies a
// pass at every K' > K on the same seed.
EngulfingVerdict check_soft(const FunctionSpec& f, double K, const SamplerConfig& cfg,
                            PairLog* pair_log = nullptr);

// Full variant: additionally every sampled z in S(x, p, t) (x itself
// included) must land in S(y, q, K t).
EngulfingVerdict check_full(const FunctionSpec& f, double K, const SamplerConfig& cfg,
                            PairLog* pair_log = nullptr);

// Recomputes the membership chain of a fail witness; true when the violation
// reproduces exactly.
bool reverify_witness(const FunctionSpec& f, Mode mode, double K, const Witness& w);

struct RefineConfig {
  int grid_per_axis = 96;     // log levels per sign per axis (auto-reduced for n >= 2)
  int box_doublings = 3;      // grids at box_radius * 2^j, j = 0..box_doublings
  int refine_rounds = 40;     // pattern-search rounds from the grid argmax
  double shrink = 0.5;        // step shrink factor per non-improving round
  double divergence_growth = 0.05;
  long pair_budget = 400000;  // per grid, subsampled beyond this
};

struct KEstimate {
  double value = 1.0;         // sup of max(ratio, 1/ratio); +inf at kinks/flats
  Vec argmax_x, argmax_y;
  bool diverging = false;     // sup still growing at the box/refinement limits
  bool kink_pair = false;     // +inf caused by a kink pair
  bool flat_candidate = false;  // zero denominator seen: strict-convexity violation candidate
  long pairs_evaluated = 0;
  int grid_points = 0;        // points per grid at the final box
  double initial_box = 0, final_box = 0;
  double grid_sup = 1.0;      // before refinement
  int refine_rounds_used = 0;
  std::uint64_t seed = 0;
};

// Estimates the minimal characterization constant as the supremum of
// max(ratio, 1/ratio) over sampled pairs, with pattern-search refinement
// around the grid argmax.  Divergence (>5% growth in the last box doubling or
// across refinement) is evidence, never proof.
KEstimate estimate_k_char(const FunctionSpec& f, const SamplerConfig& cfg,
                          const RefineConfig& refine = {});

// K' = 2 K (K + 1), the full-engulfing constant guaranteed by a soft constant K.
double engulfing_constant_bound(double k_soft);

struct EquivalenceReport {
  KEstimate k_hat;
  double soft_K = 0;
  double full_K = 0;
  std::optional<EngulfingVerdict> soft;  // at K_hat * 1.001, when K_hat is finite
  std::optional<EngulfingVerdict> full;  // at 2K(K+1) of that constant
  std::string verdict;
};

// Soft-pass at K̂(1+1e-3) should imply full-pass at 2K(K+1): the equivalence
// theorem, checked by sampling.
EquivalenceReport check_equivalence(const FunctionSpec& f, const SamplerConfig& cfg,
                                    const RefineConfig& refine = {});

}  // namespace engulf
