#pragma once

#include <cstdint>
#include <vector>

namespace engulf {

// Counter-based deterministic RNG (SplitMix64).  The standard <random>
// distributions are implementation-defined, so uniform doubles are produced
// by hand to keep outputs byte-identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // log-uniform on [a,b], 0 < a < b
  double log_uniform(double a, double b);

  bool coin() { return (next_u64() & 1u) != 0; }

  // Independent child stream; splitting is stable under reordering of draws
  // from the parent, so per-task streams match between serial and parallel runs.
  Rng split(std::uint64_t stream) const {
    Rng child(state_ ^ (0xd1342543de82ef95ULL * (stream + 1)));
    child.next_u64();
    return child;
  }

 private:
  std::uint64_t state_;
};

// Sampling parameters shared by the convexity probe, section sampling and the
// engulfing checks.
struct SamplerConfig {
  double box_radius = 10.0;    // half-width of the sampling box
  int triples = 1000;          // (x,t,y) triples per engulfing check
  int section_samples = 8;     // interior points per section
  int directions = 16;         // rays per section in dimension >= 2
  int probe_pairs = 2000;      // pairs for the convexity probe
  double t_min = 1e-6;         // heights are log-uniform on [t_min, t_max]
  double t_max = 1e3;
  std::uint64_t seed = 1;
  double r_cap = 1e12;         // rays unbounded past this radius are cap-classified

  void validate() const;       // throws std::invalid_argument
};

// One coordinate of the sampling measure: magnitudes log-spaced toward 0 and
// toward the box edge, random sign.  Failure regions of interest cluster both
// at x -> 0 and at large separations, so uniform sampling would miss them.
double sample_box_coordinate(Rng& rng, double box_radius);

std::vector<double> sample_box_point(Rng& rng, double box_radius, int dimension);

// random direction on the unit sphere
std::vector<double> sample_unit_direction(Rng& rng, int dimension);

double sample_height(Rng& rng, const SamplerConfig& cfg);

}  // namespace engulf
