#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "engulf/function.hpp"

namespace engulf::expr {

// Parseable node kinds, plus three internal kinds (Product, Signum, MaxSelect)
// that only appear in derivative trees.
enum class NodeKind {
  Constant,
  Variable,
  Sum,
  ScalarMul,
  Power,
  Exp,
  Abs,
  Max,
  Piecewise,
  Product,
  Signum,
  MaxSelect,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind;
  double number = 0.0;              // Constant value / ScalarMul coefficient
  int index = 0;                    // Variable index / Power exponent
  std::vector<NodePtr> children;
  std::vector<double> breakpoints;  // Piecewise only, strictly increasing
};

struct ExprTree {
  NodePtr root;
  int dimension = 1;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(size_t offset, const std::string& message)
      : std::runtime_error(message + " (offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

// Grammar: numbers, x or x1..xn, + - (binary and leading unary), scalar '*'
// expr, '^' k with integer k >= 1, exp(e), abs(e), max(e1,...,em),
// piecewise(x<c1: e1, ..., x>=c_last: em), parentheses.  Whitespace-free
// tokens, single-token lookahead.
ExprTree parse(std::string_view text, int dimension);

// Canonical form: parse(print(parse(s))) == parse(s).
std::string print(const ExprTree& tree);

double eval(const Node& node, std::span<const double> x);

struct ValueSlopes {
  double value;
  double left;   // one-sided slope backward along v
  double right;  // one-sided slope forward along v
};
ValueSlopes eval_slopes(const Node& node, std::span<const double> x, std::span<const double> v);

struct Kink {
  double x;
  double left_slope;
  double right_slope;
};

struct Derivative1D {
  ExprTree tree;             // exact away from the kink set
  std::vector<Kink> kinks;   // points where the one-sided derivatives differ
};

// Exact derivative of a dimension-1 tree.  Kinks are located exactly for
// affine arguments of abs; otherwise by a sign-change scan on [-1024, 1024]
// followed by bisection, then verified against the one-sided slopes.
Derivative1D derivative_1d(const ExprTree& tree);

bool equal(const Node& a, const Node& b);

// Wrap a tree as a FunctionSpec.  No convexity check is performed here; run
// convexity_probe before trusting a user expression.
FunctionSpec make_function(const ExprTree& tree);

// --- construction helpers (normalizing) --------------------------------------

NodePtr make_constant(double c);
NodePtr make_variable(int index);
NodePtr make_sum(std::vector<NodePtr> children);
NodePtr make_scalar_mul(double c, NodePtr child);
NodePtr make_power(NodePtr child, int exponent);
NodePtr make_exp(NodePtr child);
NodePtr make_abs(NodePtr child);
NodePtr make_max(std::vector<NodePtr> children);
NodePtr make_piecewise(std::vector<double> breakpoints, std::vector<NodePtr> branches);

}  // namespace engulf::expr
