#include "engulf/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace engulf {

double Rng::log_uniform(double a, double b) {
  return std::exp(uniform(std::log(a), std::log(b)));
}

void SamplerConfig::validate() const {
  if (box_radius <= 0) throw std::invalid_argument("SamplerConfig: box_radius must be > 0");
  if (triples < 1 || section_samples < 1 || directions < 1 || probe_pairs < 1)
    throw std::invalid_argument("SamplerConfig: all counts must be >= 1");
  if (!(t_min > 0) || !(t_min < t_max))
    throw std::invalid_argument("SamplerConfig: need 0 < t_min < t_max");
  if (r_cap <= 0) throw std::invalid_argument("SamplerConfig: r_cap must be > 0");
}

namespace {
constexpr double kLogDecades = 8.0;  // magnitudes span box_radius * 10^[-8, 0]
}

double sample_box_coordinate(Rng& rng, double box_radius) {
  const double sign = rng.coin() ? 1.0 : -1.0;
  const double u = rng.uniform01();
  double mag;
  if (rng.coin()) {
    mag = box_radius * std::pow(10.0, -kLogDecades * u);  // toward 0
  } else {
    mag = box_radius * (1.0 - 0.5 * std::pow(10.0, -kLogDecades * u));  // toward the edge
  }
  return sign * mag;
}

std::vector<double> sample_box_point(Rng& rng, double box_radius, int dimension) {
  std::vector<double> x(static_cast<size_t>(dimension));
  for (auto& c : x) c = sample_box_coordinate(rng, box_radius);
  return x;
}

std::vector<double> sample_unit_direction(Rng& rng, int dimension) {
  std::vector<double> d(static_cast<size_t>(dimension));
  while (true) {
    double n2 = 0;
    for (auto& c : d) {
      // Box-Muller
      double u1 = rng.uniform01();
      double u2 = rng.uniform01();
      if (u1 <= 0) u1 = 0x1.0p-53;
      c = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
      n2 += c * c;
    }
    if (n2 > 1e-12) {
      const double inv = 1.0 / std::sqrt(n2);
      for (auto& c : d) c *= inv;
      return d;
    }
  }
}

double sample_height(Rng& rng, const SamplerConfig& cfg) {
  return rng.log_uniform(cfg.t_min, cfg.t_max);
}

}  // namespace engulf
