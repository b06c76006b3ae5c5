#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "engulf/function.hpp"

namespace engulf {
namespace {

// Shared base for smooth scalar catalog entries.
class Smooth1D : public FunctionImpl {
 public:
  explicit Smooth1D(std::string tag) : tag_(std::move(tag)) {}
  int dimension() const override { return 1; }
  SmoothHint smooth_hint() const override { return SmoothHint::Smooth; }
  const std::string& tag() const override { return tag_; }
  Slopes dir_slopes(std::span<const double> x, std::span<const double> v) const override {
    const double d = derivative(x[0]) * v[0];
    return {d, d};
  }
  bool try_gradient(std::span<const double> x, Vec& out) const override {
    out.assign(1, derivative(x[0]));
    return true;
  }
  virtual double derivative(double x) const = 0;

 private:
  std::string tag_;
};

class Quad final : public Smooth1D {
 public:
  Quad() : Smooth1D("quad") {}
  double eval(std::span<const double> x) const override { return x[0] * x[0]; }
  double derivative(double x) const override { return 2.0 * x; }
};

class Quartic final : public Smooth1D {
 public:
  Quartic() : Smooth1D("quartic") {}
  double eval(std::span<const double> x) const override {
    const double x2 = x[0] * x[0];
    return x2 * x2;
  }
  double derivative(double x) const override { return 4.0 * x * x * x; }
};

// x^4 on x >= 0, x^2 on x < 0.  C^1 (both one-sided slopes vanish at 0) but
// not engulfing: the quasi-symmetry ratio blows up along y = -x^2 as x -> 0+.
class Ex21 final : public Smooth1D {
 public:
  Ex21() : Smooth1D("ex21") {}
  double eval(std::span<const double> x) const override {
    if (x[0] >= 0) {
      const double x2 = x[0] * x[0];
      return x2 * x2;
    }
    return x[0] * x[0];
  }
  double derivative(double x) const override {
    return x >= 0 ? 4.0 * x * x * x : 2.0 * x;
  }
};

class Exp final : public Smooth1D {
 public:
  Exp() : Smooth1D("exp") {}
  double eval(std::span<const double> x) const override { return std::exp(x[0]); }
  double derivative(double x) const override { return std::exp(x); }
};

class ExpSq final : public Smooth1D {
 public:
  ExpSq() : Smooth1D("expsq") {}
  double eval(std::span<const double> x) const override { return std::exp(x[0] * x[0]); }
  double derivative(double x) const override { return 2.0 * x * std::exp(x * x); }
};

class Affine final : public Smooth1D {
 public:
  Affine(double a, double b) : Smooth1D("affine"), a_(a), b_(b) {}
  double eval(std::span<const double> x) const override { return a_ * x[0] + b_; }
  double derivative(double) const override { return a_; }

 private:
  double a_, b_;
};

class Abs final : public FunctionImpl {
 public:
  int dimension() const override { return 1; }
  SmoothHint smooth_hint() const override { return SmoothHint::HasKinks; }
  const std::string& tag() const override { return tag_; }
  double eval(std::span<const double> x) const override { return std::abs(x[0]); }
  Slopes dir_slopes(std::span<const double> x, std::span<const double> v) const override {
    if (x[0] > 0) return {v[0], v[0]};
    if (x[0] < 0) return {-v[0], -v[0]};
    return {-std::abs(v[0]), std::abs(v[0])};
  }

 private:
  std::string tag_ = "abs";
};

// (x, y) -> x^2; the cylinder with unbounded sections from the plane example.
class Strip2D final : public FunctionImpl {
 public:
  int dimension() const override { return 2; }
  SmoothHint smooth_hint() const override { return SmoothHint::Smooth; }
  const std::string& tag() const override { return tag_; }
  double eval(std::span<const double> x) const override { return x[0] * x[0]; }
  Slopes dir_slopes(std::span<const double> x, std::span<const double> v) const override {
    const double d = 2.0 * x[0] * v[0];
    return {d, d};
  }
  bool try_gradient(std::span<const double> x, Vec& out) const override {
    out.assign(2, 0.0);
    out[0] = 2.0 * x[0];
    return true;
  }

 private:
  std::string tag_ = "strip2d";
};

class PolyQuad final : public FunctionImpl {
 public:
  explicit PolyQuad(std::vector<Vec> a) : a_(std::move(a)) {
    n_ = static_cast<int>(a_.size());
    std::ostringstream os;
    os << "polyquad" << n_ << "d";
    tag_ = os.str();
  }
  int dimension() const override { return n_; }
  SmoothHint smooth_hint() const override { return SmoothHint::Smooth; }
  const std::string& tag() const override { return tag_; }
  double eval(std::span<const double> x) const override {
    double s = 0;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) s += a_[i][j] * x[i] * x[j];
    return s;
  }
  Slopes dir_slopes(std::span<const double> x, std::span<const double> v) const override {
    Vec g;
    try_gradient(x, g);
    const double d = dot(g, v);
    return {d, d};
  }
  bool try_gradient(std::span<const double> x, Vec& out) const override {
    out.assign(static_cast<size_t>(n_), 0.0);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) out[i] += 2.0 * a_[i][j] * x[j];
    return true;
  }

 private:
  std::vector<Vec> a_;
  int n_;
  std::string tag_;
};

std::vector<Vec> validated_psd(const std::vector<Vec>& matrix) {
  const size_t n = matrix.size();
  if (n == 0) throw std::invalid_argument("polyquad: empty matrix");
  for (const auto& row : matrix)
    if (row.size() != n) throw std::invalid_argument("polyquad: matrix must be square");

  // Symmetrize, then require all eigenvalues >= -tol.
  Eigen::MatrixXd m(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) m(i, j) = 0.5 * (matrix[i][j] + matrix[j][i]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-9 * scale)
    throw std::invalid_argument("polyquad: matrix is not positive semidefinite");

  std::vector<Vec> sym(n, Vec(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) sym[i][j] = m(i, j);
  return sym;
}

}  // namespace

FunctionSpec polyquad_function(const std::vector<Vec>& matrix) {
  return FunctionSpec(std::make_shared<PolyQuad>(validated_psd(matrix)));
}

FunctionSpec catalog_function(const std::string& tag, const std::vector<double>& params) {
  if (tag == "quad") return FunctionSpec(std::make_shared<Quad>());
  if (tag == "quartic") return FunctionSpec(std::make_shared<Quartic>());
  if (tag == "ex21") return FunctionSpec(std::make_shared<Ex21>());
  if (tag == "abs") return FunctionSpec(std::make_shared<Abs>());
  if (tag == "exp") return FunctionSpec(std::make_shared<Exp>());
  if (tag == "expsq") return FunctionSpec(std::make_shared<ExpSq>());
  if (tag == "strip2d") return FunctionSpec(std::make_shared<Strip2D>());
  if (tag == "affine") {
    double a = 2.0, b = 1.0;
    if (!params.empty()) {
      if (params.size() != 2) throw std::invalid_argument("affine: expected params {a, b}");
      a = params[0];
      b = params[1];
    }
    return FunctionSpec(std::make_shared<Affine>(a, b));
  }
  if (tag == "polyquad") {
    if (params.empty()) return polyquad_function({{1.0, 0.0}, {0.0, 2.0}});
    // params as a flattened square matrix
    const auto n = static_cast<size_t>(std::llround(std::sqrt(static_cast<double>(params.size()))));
    if (n * n != params.size())
      throw std::invalid_argument("polyquad: params must be a flattened square matrix");
    std::vector<Vec> m(n, Vec(n));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) m[i][j] = params[i * n + j];
    return polyquad_function(m);
  }
  throw std::invalid_argument("unknown catalog tag: " + tag);
}

FunctionSpec catalog_function(const std::string& tag) { return catalog_function(tag, {}); }

std::vector<std::string> catalog_tags() {
  return {"quad", "quartic", "ex21", "abs", "exp", "expsq", "affine", "strip2d", "polyquad"};
}

}  // namespace engulf
