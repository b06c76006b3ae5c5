#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "engulf/sampling.hpp"

namespace engulf {

using Vec = std::vector<double>;

enum class SmoothHint { Smooth, HasKinks, Unknown };

// A point x paired with a slope p from the subdifferential graph.
struct SubgradientPair {
  Vec point;
  Vec slope;
};

// One-sided derivatives of t -> f(x + t v) at t = 0.
struct Slopes {
  double left;
  double right;
};

struct Interval {
  double lo;
  double hi;
};

// Raised where a gradient is requested but the subdifferential is not a
// singleton.
class KinkError : public std::domain_error {
 public:
  KinkError(std::string message, Vec point)
      : std::domain_error(std::move(message)), point_(std::move(point)) {}
  const Vec& point() const { return point_; }

 private:
  Vec point_;
};

class FunctionImpl {
 public:
  virtual ~FunctionImpl() = default;
  virtual int dimension() const = 0;
  virtual double eval(std::span<const double> x) const = 0;
  virtual Slopes dir_slopes(std::span<const double> x, std::span<const double> v) const = 0;
  virtual SmoothHint smooth_hint() const = 0;
  virtual const std::string& tag() const = 0;
  // Returns false when the subdifferential at x is not a singleton.  The
  // default derives partials from per-axis one-sided slopes.
  virtual bool try_gradient(std::span<const double> x, Vec& out) const;
};

// Immutable value handle on a convex function; cheap to copy, safe to share
// across threads.
class FunctionSpec {
 public:
  explicit FunctionSpec(std::shared_ptr<const FunctionImpl> impl);

  int dimension() const { return impl_->dimension(); }
  SmoothHint smooth_hint() const { return impl_->smooth_hint(); }
  const std::string& tag() const { return impl_->tag(); }
  const FunctionImpl& impl() const { return *impl_; }
  std::shared_ptr<const FunctionImpl> impl_ptr() const { return impl_; }

 private:
  std::shared_ptr<const FunctionImpl> impl_;
};

// --- catalog ---------------------------------------------------------------
//
// Tags: "quad" x^2, "quartic" x^4, "ex21" (x^4 on x>=0, x^2 on x<0),
// "abs" |x|, "exp" e^x, "expsq" e^{x^2}, "affine" a*x+b (params {a,b},
// default {2,1}), "strip2d" (x,y) -> x^2, "polyquad" x^T A x with A psd.
FunctionSpec catalog_function(const std::string& tag);
FunctionSpec catalog_function(const std::string& tag, const std::vector<double>& params);
FunctionSpec polyquad_function(const std::vector<Vec>& matrix);
std::vector<std::string> catalog_tags();

// --- operations ------------------------------------------------------------

double evaluate(const FunctionSpec& f, std::span<const double> x);
double evaluate(const FunctionSpec& f, double x);  // dimension-1 shorthand

// Throws KinkError where the subdifferential is not a singleton.
Vec gradient(const FunctionSpec& f, std::span<const double> x);
std::optional<Vec> try_gradient(const FunctionSpec& f, std::span<const double> x);

// One-sided derivative interval [d-, d+]; dimension 1 only.
Interval subdifferential_interval_1d(const FunctionSpec& f, double x);

// Extreme subdifferential slopes at x: {gradient} at smooth points, the two
// one-sided slopes at a 1D kink, empty at an nD kink (not enumerated).
std::vector<Vec> subgradient_extremes(const FunctionSpec& f, std::span<const double> x);

// psi(s) = f((1-s) x + s z); requires x != z.
FunctionSpec restrict_to_line(const FunctionSpec& f, const Vec& x, const Vec& z);

// psi(x) = f(x) - f(0) - grad f(0).x; identity when already normalized.
FunctionSpec normalize_at_origin(const FunctionSpec& f);

// f(x) + slope.x + offset; verdict-invariant perturbation used in analyses.
FunctionSpec add_affine(const FunctionSpec& f, const Vec& slope, double offset);

struct ConvexityWitness {
  Vec x;
  Vec y;
  double midpoint_value;  // f((x+y)/2)
  double chord_value;     // (f(x)+f(y))/2
};

// Midpoint-convexity probe over sampled pairs; nullopt means no violation
// was found.  Guards parsed user input.
std::optional<ConvexityWitness> convexity_probe(const FunctionSpec& f, const SamplerConfig& cfg);

// --- small vector helpers ----------------------------------------------------

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

}  // namespace engulf
