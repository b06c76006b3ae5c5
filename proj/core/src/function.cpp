#include "engulf/function.hpp"

#include <cmath>
#include <sstream>

namespace engulf {

namespace {

constexpr double kKinkTol = 1e-9;

bool is_kink(const Slopes& s) {
  return std::abs(s.right - s.left) > kKinkTol * (1.0 + std::abs(s.left) + std::abs(s.right));
}

void check_dimension(const FunctionSpec& f, std::span<const double> x, const char* what) {
  if (static_cast<int>(x.size()) != f.dimension()) {
    std::ostringstream os;
    os << what << ": dimension mismatch (function has n=" << f.dimension() << ", point has "
       << x.size() << ")";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

bool FunctionImpl::try_gradient(std::span<const double> x, Vec& out) const {
  const int n = dimension();
  out.assign(static_cast<size_t>(n), 0.0);
  Vec axis(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    axis[i] = 1.0;
    const Slopes s = dir_slopes(x, axis);
    axis[i] = 0.0;
    if (is_kink(s)) return false;
    out[i] = 0.5 * (s.left + s.right);
  }
  return true;
}

FunctionSpec::FunctionSpec(std::shared_ptr<const FunctionImpl> impl) : impl_(std::move(impl)) {
  if (!impl_) throw std::invalid_argument("FunctionSpec: null implementation");
}

double evaluate(const FunctionSpec& f, std::span<const double> x) {
  check_dimension(f, x, "evaluate");
  return f.impl().eval(x);
}

double evaluate(const FunctionSpec& f, double x) {
  return evaluate(f, std::span<const double>(&x, 1));
}

std::optional<Vec> try_gradient(const FunctionSpec& f, std::span<const double> x) {
  check_dimension(f, x, "gradient");
  Vec g;
  if (!f.impl().try_gradient(x, g)) return std::nullopt;
  return g;
}

Vec gradient(const FunctionSpec& f, std::span<const double> x) {
  auto g = try_gradient(f, x);
  if (!g) throw KinkError("gradient: subdifferential is not a singleton at this point",
                          Vec(x.begin(), x.end()));
  return *g;
}

Interval subdifferential_interval_1d(const FunctionSpec& f, double x) {
  if (f.dimension() != 1)
    throw std::invalid_argument("subdifferential_interval_1d: requires dimension 1");
  const double v = 1.0;
  const Slopes s = f.impl().dir_slopes(std::span<const double>(&x, 1),
                                       std::span<const double>(&v, 1));
  return {s.left, s.right};
}

std::vector<Vec> subgradient_extremes(const FunctionSpec& f, std::span<const double> x) {
  check_dimension(f, x, "subgradient_extremes");
  if (f.dimension() == 1) {
    const Interval iv = subdifferential_interval_1d(f, x[0]);
    if (std::abs(iv.hi - iv.lo) > kKinkTol * (1.0 + std::abs(iv.lo) + std::abs(iv.hi)))
      return {Vec{iv.lo}, Vec{iv.hi}};
    return {Vec{iv.lo}};
  }
  Vec g;
  if (f.impl().try_gradient(x, g)) return {g};
  return {};  // nD kink: extremal subgradients are not enumerated
}

// --- wrappers ----------------------------------------------------------------

namespace {

class LineRestriction final : public FunctionImpl {
 public:
  LineRestriction(std::shared_ptr<const FunctionImpl> parent, Vec x, Vec z)
      : parent_(std::move(parent)), x_(std::move(x)) {
    v_.resize(x_.size());
    for (size_t i = 0; i < x_.size(); ++i) v_[i] = z[i] - x_[i];
    tag_ = "line(" + parent_->tag() + ")";
  }
  int dimension() const override { return 1; }
  SmoothHint smooth_hint() const override {
    return parent_->smooth_hint() == SmoothHint::Smooth ? SmoothHint::Smooth : SmoothHint::Unknown;
  }
  const std::string& tag() const override { return tag_; }
  double eval(std::span<const double> s) const override {
    return parent_->eval(point_at(s[0]));
  }
  Slopes dir_slopes(std::span<const double> s, std::span<const double> v) const override {
    Vec dir(v_.size());
    for (size_t i = 0; i < v_.size(); ++i) dir[i] = v_[i] * v[0];
    return parent_->dir_slopes(point_at(s[0]), dir);
  }

 private:
  Vec point_at(double s) const {
    Vec p(x_.size());
    for (size_t i = 0; i < x_.size(); ++i) p[i] = x_[i] + s * v_[i];
    return p;
  }
  std::shared_ptr<const FunctionImpl> parent_;
  Vec x_, v_;
  std::string tag_;
};

class AffineShift final : public FunctionImpl {
 public:
  AffineShift(std::shared_ptr<const FunctionImpl> parent, Vec slope, double offset, std::string tag)
      : parent_(std::move(parent)), slope_(std::move(slope)), offset_(offset), tag_(std::move(tag)) {}
  int dimension() const override { return parent_->dimension(); }
  SmoothHint smooth_hint() const override { return parent_->smooth_hint(); }
  const std::string& tag() const override { return tag_; }
  double eval(std::span<const double> x) const override {
    return parent_->eval(x) + dot(slope_, x) + offset_;
  }
  Slopes dir_slopes(std::span<const double> x, std::span<const double> v) const override {
    const Slopes s = parent_->dir_slopes(x, v);
    const double sv = dot(slope_, v);
    return {s.left + sv, s.right + sv};
  }
  bool try_gradient(std::span<const double> x, Vec& out) const override {
    if (!parent_->try_gradient(x, out)) return false;
    for (size_t i = 0; i < out.size(); ++i) out[i] += slope_[i];
    return true;
  }

 private:
  std::shared_ptr<const FunctionImpl> parent_;
  Vec slope_;
  double offset_;
  std::string tag_;
};

}  // namespace

FunctionSpec restrict_to_line(const FunctionSpec& f, const Vec& x, const Vec& z) {
  check_dimension(f, x, "restrict_to_line");
  check_dimension(f, z, "restrict_to_line");
  bool same = true;
  for (size_t i = 0; i < x.size(); ++i)
    if (x[i] != z[i]) { same = false; break; }
  if (same) throw std::invalid_argument("restrict_to_line: x and z must differ");
  return FunctionSpec(std::make_shared<LineRestriction>(f.impl_ptr(), x, z));
}

FunctionSpec normalize_at_origin(const FunctionSpec& f) {
  Vec origin(static_cast<size_t>(f.dimension()), 0.0);
  const Vec g0 = gradient(f, origin);  // KinkError at a kink in 0
  const double c0 = f.impl().eval(origin);
  bool trivial = c0 == 0.0;
  for (double gi : g0) trivial = trivial && gi == 0.0;
  if (trivial) return f;
  Vec neg(g0.size());
  for (size_t i = 0; i < g0.size(); ++i) neg[i] = -g0[i];
  return FunctionSpec(std::make_shared<AffineShift>(f.impl_ptr(), std::move(neg), -c0,
                                                    "normalized(" + f.tag() + ")"));
}

FunctionSpec add_affine(const FunctionSpec& f, const Vec& slope, double offset) {
  check_dimension(f, slope, "add_affine");
  return FunctionSpec(std::make_shared<AffineShift>(f.impl_ptr(), slope, offset,
                                                    f.tag() + "+affine"));
}

// --- convexity probe ---------------------------------------------------------

std::optional<ConvexityWitness> convexity_probe(const FunctionSpec& f, const SamplerConfig& cfg) {
  cfg.validate();
  const int n = f.dimension();

  const auto violated = [&](const Vec& x, const Vec& y) -> std::optional<ConvexityWitness> {
    Vec mid(x.size());
    for (size_t i = 0; i < x.size(); ++i) mid[i] = 0.5 * (x[i] + y[i]);
    const double fx = f.impl().eval(x);
    const double fy = f.impl().eval(y);
    const double fm = f.impl().eval(mid);
    if (!std::isfinite(fx) || !std::isfinite(fy) || !std::isfinite(fm)) return std::nullopt;
    const double chord = 0.5 * (fx + fy);
    const double tol = 1e-9 + 1e-9 * (std::abs(fx) + std::abs(fy));
    if (fm > chord + tol) return ConvexityWitness{x, y, fm, chord};
    return std::nullopt;
  };

  // Deterministic coarse pass first: symmetric pairs at unit and box scale.
  const double unit = std::min(1.0, cfg.box_radius);
  for (double scale : {unit, cfg.box_radius, 0.1 * unit, 1e-3 * unit}) {
    for (int axis = 0; axis < n; ++axis) {
      Vec x(static_cast<size_t>(n), 0.0), y(static_cast<size_t>(n), 0.0);
      x[axis] = -scale;
      y[axis] = scale;
      if (auto w = violated(x, y)) return w;
      y[axis] = 3.0 * scale;  // off-center pair
      if (auto w = violated(x, y)) return w;
    }
  }

  Rng rng(cfg.seed);
  for (int i = 0; i < cfg.probe_pairs; ++i) {
    const Vec x = sample_box_point(rng, cfg.box_radius, n);
    const Vec y = sample_box_point(rng, cfg.box_radius, n);
    if (auto w = violated(x, y)) return w;
  }
  return std::nullopt;
}

}  // namespace engulf
