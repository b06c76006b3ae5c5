#include "engulf/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>

namespace engulf::expr {

namespace {

double powi(double base, int k) {
  double r = 1.0;
  double b = base;
  for (int e = k; e > 0; e >>= 1) {
    if (e & 1) r *= b;
    b *= b;
  }
  return r;
}

NodePtr node(Node n) { return std::make_shared<Node>(std::move(n)); }

}  // namespace

NodePtr make_constant(double c) { return node({NodeKind::Constant, c, 0, {}, {}}); }

NodePtr make_variable(int index) { return node({NodeKind::Variable, 0.0, index, {}, {}}); }

NodePtr make_sum(std::vector<NodePtr> children) {
  std::vector<NodePtr> flat;
  double constant = 0.0;
  bool saw_constant = false;
  for (auto& c : children) {
    if (c->kind == NodeKind::Sum) {
      for (const auto& gc : c->children) {
        if (gc->kind == NodeKind::Constant) {
          constant += gc->number;
          saw_constant = true;
        } else {
          flat.push_back(gc);
        }
      }
    } else if (c->kind == NodeKind::Constant) {
      constant += c->number;
      saw_constant = true;
    } else {
      flat.push_back(std::move(c));
    }
  }
  if (saw_constant && (constant != 0.0 || flat.empty())) flat.push_back(make_constant(constant));
  if (flat.empty()) return make_constant(0.0);
  if (flat.size() == 1) return flat[0];
  return node({NodeKind::Sum, 0.0, 0, std::move(flat), {}});
}

NodePtr make_scalar_mul(double c, NodePtr child) {
  if (child->kind == NodeKind::Constant) return make_constant(c * child->number);
  if (child->kind == NodeKind::ScalarMul) return make_scalar_mul(c * child->number, child->children[0]);
  if (c == 0.0) return make_constant(0.0);
  if (c == 1.0) return child;
  return node({NodeKind::ScalarMul, c, 0, {std::move(child)}, {}});
}

NodePtr make_power(NodePtr child, int exponent) {
  if (exponent == 1) return child;
  if (child->kind == NodeKind::Constant) return make_constant(powi(child->number, exponent));
  return node({NodeKind::Power, 0.0, exponent, {std::move(child)}, {}});
}

NodePtr make_exp(NodePtr child) {
  if (child->kind == NodeKind::Constant) return make_constant(std::exp(child->number));
  return node({NodeKind::Exp, 0.0, 0, {std::move(child)}, {}});
}

NodePtr make_abs(NodePtr child) {
  if (child->kind == NodeKind::Constant) return make_constant(std::abs(child->number));
  return node({NodeKind::Abs, 0.0, 0, {std::move(child)}, {}});
}

NodePtr make_max(std::vector<NodePtr> children) {
  if (children.size() == 1) return children[0];
  return node({NodeKind::Max, 0.0, 0, std::move(children), {}});
}

NodePtr make_piecewise(std::vector<double> breakpoints, std::vector<NodePtr> branches) {
  if (branches.size() != breakpoints.size() + 1)
    throw std::invalid_argument("piecewise: need one more branch than breakpoints");
  for (size_t i = 1; i < breakpoints.size(); ++i)
    if (!(breakpoints[i - 1] < breakpoints[i]))
      throw std::invalid_argument("piecewise: breakpoints must be strictly increasing");
  return node({NodeKind::Piecewise, 0.0, 0, std::move(branches), std::move(breakpoints)});
}

namespace {

NodePtr make_product(NodePtr a, NodePtr b) {
  if (a->kind == NodeKind::Constant) return make_scalar_mul(a->number, std::move(b));
  if (b->kind == NodeKind::Constant) return make_scalar_mul(b->number, std::move(a));
  return node({NodeKind::Product, 0.0, 0, {std::move(a), std::move(b)}, {}});
}

NodePtr make_signum(NodePtr child) { return node({NodeKind::Signum, 0.0, 0, {std::move(child)}, {}}); }

}  // namespace

// --- evaluation ---------------------------------------------------------------

double eval(const Node& n, std::span<const double> x) {
  switch (n.kind) {
    case NodeKind::Constant: return n.number;
    case NodeKind::Variable: return x[static_cast<size_t>(n.index)];
    case NodeKind::Sum: {
      double s = 0;
      for (const auto& c : n.children) s += eval(*c, x);
      return s;
    }
    case NodeKind::ScalarMul: return n.number * eval(*n.children[0], x);
    case NodeKind::Power: return powi(eval(*n.children[0], x), n.index);
    case NodeKind::Exp: return std::exp(eval(*n.children[0], x));
    case NodeKind::Abs: return std::abs(eval(*n.children[0], x));
    case NodeKind::Max: {
      double m = eval(*n.children[0], x);
      for (size_t i = 1; i < n.children.size(); ++i) m = std::max(m, eval(*n.children[i], x));
      return m;
    }
    case NodeKind::Piecewise: {
      const double xi = x[0];
      size_t i = 0;
      while (i < n.breakpoints.size() && xi >= n.breakpoints[i]) ++i;
      return eval(*n.children[i], x);
    }
    case NodeKind::Product: return eval(*n.children[0], x) * eval(*n.children[1], x);
    case NodeKind::Signum: {
      const double v = eval(*n.children[0], x);
      return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
    }
    case NodeKind::MaxSelect: {
      const size_t m = n.children.size() / 2;
      size_t best = 0;
      double bv = eval(*n.children[0], x);
      for (size_t i = 1; i < m; ++i) {
        const double v = eval(*n.children[i], x);
        if (v > bv) { bv = v; best = i; }
      }
      return eval(*n.children[m + best], x);
    }
  }
  return 0;  // unreachable
}

ValueSlopes eval_slopes(const Node& n, std::span<const double> x, std::span<const double> v) {
  switch (n.kind) {
    case NodeKind::Constant: return {n.number, 0.0, 0.0};
    case NodeKind::Variable: {
      const auto i = static_cast<size_t>(n.index);
      return {x[i], v[i], v[i]};
    }
    case NodeKind::Sum: {
      ValueSlopes r{0, 0, 0};
      for (const auto& c : n.children) {
        const auto s = eval_slopes(*c, x, v);
        r.value += s.value;
        r.left += s.left;
        r.right += s.right;
      }
      return r;
    }
    case NodeKind::ScalarMul: {
      auto s = eval_slopes(*n.children[0], x, v);
      return {n.number * s.value, n.number * s.left, n.number * s.right};
    }
    case NodeKind::Power: {
      const auto s = eval_slopes(*n.children[0], x, v);
      const double d = n.index * powi(s.value, n.index - 1);
      return {powi(s.value, n.index), d * s.left, d * s.right};
    }
    case NodeKind::Exp: {
      const auto s = eval_slopes(*n.children[0], x, v);
      const double e = std::exp(s.value);
      return {e, e * s.left, e * s.right};
    }
    case NodeKind::Abs: {
      const auto s = eval_slopes(*n.children[0], x, v);
      if (s.value > 0) return {s.value, s.left, s.right};
      if (s.value < 0) return {-s.value, -s.left, -s.right};
      return {0.0, -std::abs(s.left), std::abs(s.right)};
    }
    case NodeKind::Max: {
      // forward slope: max over active branches; backward: min
      std::vector<ValueSlopes> all;
      all.reserve(n.children.size());
      double m = -std::numeric_limits<double>::infinity();
      for (const auto& c : n.children) {
        all.push_back(eval_slopes(*c, x, v));
        m = std::max(m, all.back().value);
      }
      double left = std::numeric_limits<double>::infinity();
      double right = -std::numeric_limits<double>::infinity();
      for (const auto& s : all) {
        if (s.value == m) {
          left = std::min(left, s.left);
          right = std::max(right, s.right);
        }
      }
      return {m, left, right};
    }
    case NodeKind::Piecewise: {
      const double xi = x[0];
      const double vi = v[0];
      size_t i = 0;
      while (i < n.breakpoints.size() && xi >= n.breakpoints[i]) ++i;
      const auto cur = eval_slopes(*n.children[i], x, v);
      const bool at_bp = i > 0 && xi == n.breakpoints[i - 1];
      if (!at_bp) return cur;
      if (vi == 0.0) return {cur.value, 0.0, 0.0};
      const auto prev = eval_slopes(*n.children[i - 1], x, v);
      if (vi > 0) return {cur.value, prev.left, cur.right};
      return {cur.value, cur.left, prev.right};
    }
    case NodeKind::Product: {
      const auto a = eval_slopes(*n.children[0], x, v);
      const auto b = eval_slopes(*n.children[1], x, v);
      return {a.value * b.value, a.value * b.left + b.value * a.left,
              a.value * b.right + b.value * a.right};
    }
    case NodeKind::Signum: {
      const double s = eval(*n.children[0], x);
      return {s > 0 ? 1.0 : (s < 0 ? -1.0 : 0.0), 0.0, 0.0};
    }
    case NodeKind::MaxSelect: {
      const size_t m = n.children.size() / 2;
      size_t best = 0;
      double bv = eval(*n.children[0], x);
      for (size_t i = 1; i < m; ++i) {
        const double val = eval(*n.children[i], x);
        if (val > bv) { bv = val; best = i; }
      }
      return eval_slopes(*n.children[m + best], x, v);
    }
  }
  return {0, 0, 0};  // unreachable
}

bool equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.number != b.number || a.index != b.index ||
      a.breakpoints != b.breakpoints || a.children.size() != b.children.size())
    return false;
  for (size_t i = 0; i < a.children.size(); ++i)
    if (!equal(*a.children[i], *b.children[i])) return false;
  return true;
}

// --- parser -------------------------------------------------------------------

namespace {

struct Token {
  enum Type { Number, Ident, Plus, Minus, Star, Caret, LParen, RParen, Comma, Colon, Less, GreaterEq, End };
  Type type;
  size_t offset;
  double number = 0.0;
  std::string_view text;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    current_.offset = pos_;
    if (pos_ >= text_.size()) {
      current_.type = Token::End;
      return;
    }
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.data() + pos_;
      const char* end = text_.data() + text_.size();
      double value = 0;
      auto [ptr, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc{})
        throw ParseError(pos_, "syntax error: malformed number");
      current_.type = Token::Number;
      current_.number = value;
      current_.text = text_.substr(pos_, static_cast<size_t>(ptr - begin));
      pos_ += static_cast<size_t>(ptr - begin);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t end = pos_;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
        ++end;
      current_.type = Token::Ident;
      current_.text = text_.substr(pos_, end - pos_);
      pos_ = end;
      return;
    }
    switch (c) {
      case '+': current_.type = Token::Plus; ++pos_; return;
      case '-': current_.type = Token::Minus; ++pos_; return;
      case '*': current_.type = Token::Star; ++pos_; return;
      case '^': current_.type = Token::Caret; ++pos_; return;
      case '(': current_.type = Token::LParen; ++pos_; return;
      case ')': current_.type = Token::RParen; ++pos_; return;
      case ',': current_.type = Token::Comma; ++pos_; return;
      case ':': current_.type = Token::Colon; ++pos_; return;
      case '<': current_.type = Token::Less; ++pos_; return;
      case '>':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
          current_.type = Token::GreaterEq;
          pos_ += 2;
          return;
        }
        throw ParseError(pos_, "syntax error: expected '>='");
    }
    throw ParseError(pos_, std::string("syntax error: unexpected character '") + c + "'");
  }

  std::string_view text_;
  size_t pos_ = 0;
  Token current_;
};

class Parser {
 public:
  Parser(std::string_view text, int dimension) : lex_(text), dim_(dimension) {}

  NodePtr parse_all() {
    NodePtr e = parse_expr();
    if (lex_.peek().type != Token::End)
      throw ParseError(lex_.peek().offset, "syntax error: unexpected trailing input");
    return e;
  }

 private:
  NodePtr parse_expr() {
    std::vector<NodePtr> terms;
    bool negate = false;
    if (lex_.peek().type == Token::Minus) {
      lex_.take();
      negate = true;
    }
    NodePtr first = parse_term();
    terms.push_back(negate ? make_scalar_mul(-1.0, first) : first);
    while (lex_.peek().type == Token::Plus || lex_.peek().type == Token::Minus) {
      const bool minus = lex_.take().type == Token::Minus;
      NodePtr t = parse_term();
      terms.push_back(minus ? make_scalar_mul(-1.0, t) : t);
    }
    return make_sum(std::move(terms));
  }

  NodePtr parse_term() {
    if (lex_.peek().type == Token::Number) {
      const Token num = lex_.take();
      if (lex_.peek().type == Token::Star) {
        lex_.take();
        return make_scalar_mul(num.number, parse_factor());
      }
      return make_constant(num.number);
    }
    return parse_factor();
  }

  NodePtr parse_factor() {
    NodePtr base = parse_atom();
    if (lex_.peek().type == Token::Caret) {
      lex_.take();
      const Token t = lex_.peek();
      if (t.type != Token::Number)
        throw ParseError(t.offset, "syntax error: expected integer exponent after '^'");
      const double k = t.number;
      if (k < 1 || k != std::floor(k) || t.text.find_first_of(".eE") != std::string_view::npos)
        throw ParseError(t.offset, "unsupported construct: exponent must be an integer >= 1");
      lex_.take();
      return make_power(std::move(base), static_cast<int>(k));
    }
    return base;
  }

  NodePtr parse_atom() {
    const Token t = lex_.peek();
    switch (t.type) {
      case Token::LParen: {
        lex_.take();
        NodePtr e = parse_expr();
        expect(Token::RParen, "expected ')'");
        return e;
      }
      case Token::Ident: {
        if (t.text == "exp" || t.text == "abs") {
          lex_.take();
          expect(Token::LParen, "expected '('");
          NodePtr e = parse_expr();
          expect(Token::RParen, "expected ')'");
          return t.text == "exp" ? make_exp(std::move(e)) : make_abs(std::move(e));
        }
        if (t.text == "max") {
          lex_.take();
          expect(Token::LParen, "expected '('");
          std::vector<NodePtr> args;
          args.push_back(parse_expr());
          while (lex_.peek().type == Token::Comma) {
            lex_.take();
            args.push_back(parse_expr());
          }
          expect(Token::RParen, "expected ')'");
          if (args.size() < 2)
            throw ParseError(t.offset, "unsupported construct: max needs at least two arguments");
          return make_max(std::move(args));
        }
        if (t.text == "piecewise") return parse_piecewise();
        return parse_variable();
      }
      default:
        throw ParseError(t.offset, "syntax error: expected an expression");
    }
  }

  NodePtr parse_variable() {
    const Token t = lex_.take();
    if (t.text == "x") {
      if (dim_ != 1)
        throw ParseError(t.offset, "dimension violation: plain 'x' requires dimension 1");
      return make_variable(0);
    }
    if (t.text.size() > 1 && t.text[0] == 'x') {
      int idx = 0;
      auto [ptr, ec] = std::from_chars(t.text.data() + 1, t.text.data() + t.text.size(), idx);
      if (ec == std::errc{} && ptr == t.text.data() + t.text.size()) {
        if (idx < 1 || idx > dim_)
          throw ParseError(t.offset, "dimension violation: variable index out of range");
        return make_variable(idx - 1);
      }
    }
    throw ParseError(t.offset, "unsupported construct: unknown identifier '" + std::string(t.text) + "'");
  }

  NodePtr parse_piecewise() {
    const Token kw = lex_.take();
    if (dim_ != 1)
      throw ParseError(kw.offset, "unsupported construct: piecewise requires dimension 1");
    expect(Token::LParen, "expected '('");
    std::vector<double> breakpoints;
    std::vector<NodePtr> branches;
    bool saw_final = false;
    while (true) {
      const Token vt = lex_.peek();
      if (vt.type != Token::Ident || vt.text != "x")
        throw ParseError(vt.offset, "syntax error: piecewise condition must start with 'x'");
      lex_.take();
      const Token rel = lex_.take();
      if (rel.type != Token::Less && rel.type != Token::GreaterEq)
        throw ParseError(rel.offset, "syntax error: expected '<' or '>=' in piecewise condition");
      double threshold = parse_signed_number();
      if (rel.type == Token::Less) {
        if (saw_final)
          throw ParseError(rel.offset, "syntax error: 'x<' branch after the final 'x>=' branch");
        if (!breakpoints.empty() && !(breakpoints.back() < threshold))
          throw ParseError(rel.offset, "dimension violation: breakpoints must be strictly increasing");
        breakpoints.push_back(threshold);
      } else {
        if (breakpoints.empty() || threshold != breakpoints.back())
          throw ParseError(rel.offset,
                           "syntax error: final condition must be 'x>=' the last breakpoint");
        saw_final = true;
      }
      expect(Token::Colon, "expected ':'");
      branches.push_back(parse_expr());
      if (lex_.peek().type == Token::Comma) {
        lex_.take();
        continue;
      }
      break;
    }
    expect(Token::RParen, "expected ')'");
    if (!saw_final)
      throw ParseError(lex_.peek().offset, "syntax error: piecewise needs a final 'x>=' branch");
    return make_piecewise(std::move(breakpoints), std::move(branches));
  }

  double parse_signed_number() {
    double sign = 1.0;
    if (lex_.peek().type == Token::Minus) {
      lex_.take();
      sign = -1.0;
    }
    const Token t = lex_.peek();
    if (t.type != Token::Number)
      throw ParseError(t.offset, "syntax error: expected a number");
    lex_.take();
    return sign * t.number;
  }

  void expect(Token::Type type, const char* message) {
    const Token& t = lex_.peek();
    if (t.type != type) throw ParseError(t.offset, std::string("syntax error: ") + message);
    lex_.take();
  }

  Lexer lex_;
  int dim_;
};

}  // namespace

ExprTree parse(std::string_view text, int dimension) {
  if (dimension < 1) throw std::invalid_argument("parse: dimension must be >= 1");
  Parser p(text, dimension);
  return {p.parse_all(), dimension};
}

// --- printer ------------------------------------------------------------------

namespace {

std::string format_number(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void print_node(const Node& n, int dimension, std::string& out);

void print_operand(const Node& n, int dimension, bool parenthesize, std::string& out) {
  if (parenthesize) out += '(';
  print_node(n, dimension, out);
  if (parenthesize) out += ')';
}

void print_node(const Node& n, int dimension, std::string& out) {
  switch (n.kind) {
    case NodeKind::Constant:
      if (n.number < 0) {
        out += '-';
        out += format_number(-n.number);
      } else {
        out += format_number(n.number);
      }
      return;
    case NodeKind::Variable:
      out += dimension == 1 ? "x" : "x" + std::to_string(n.index + 1);
      return;
    case NodeKind::Sum:
      for (size_t i = 0; i < n.children.size(); ++i) {
        const Node& c = *n.children[i];
        const bool neg = (c.kind == NodeKind::ScalarMul && c.number < 0) ||
                         (c.kind == NodeKind::Constant && c.number < 0);
        if (i > 0) out += neg ? "-" : "+";
        else if (neg) out += "-";
        if (neg && c.kind == NodeKind::ScalarMul) {
          print_node(*make_scalar_mul(-c.number, c.children[0]), dimension, out);
        } else if (neg) {
          out += format_number(-c.number);
        } else {
          print_node(c, dimension, out);
        }
      }
      return;
    case NodeKind::ScalarMul:
      if (n.number < 0) {
        out += '-';
        out += format_number(-n.number);
      } else {
        out += format_number(n.number);
      }
      out += '*';
      print_operand(*n.children[0], dimension, n.children[0]->kind == NodeKind::Sum, out);
      return;
    case NodeKind::Power: {
      const NodeKind k = n.children[0]->kind;
      print_operand(*n.children[0], dimension,
                    k == NodeKind::Sum || k == NodeKind::ScalarMul || k == NodeKind::Product, out);
      out += '^';
      out += std::to_string(n.index);
      return;
    }
    case NodeKind::Exp:
    case NodeKind::Abs:
      out += n.kind == NodeKind::Exp ? "exp(" : "abs(";
      print_node(*n.children[0], dimension, out);
      out += ')';
      return;
    case NodeKind::Max:
      out += "max(";
      for (size_t i = 0; i < n.children.size(); ++i) {
        if (i > 0) out += ',';
        print_node(*n.children[i], dimension, out);
      }
      out += ')';
      return;
    case NodeKind::Piecewise:
      out += "piecewise(";
      for (size_t i = 0; i < n.children.size(); ++i) {
        if (i > 0) out += ", ";
        if (i < n.breakpoints.size()) {
          out += "x<";
          out += format_number(n.breakpoints[i]);
        } else {
          out += "x>=";
          out += format_number(n.breakpoints.back());
        }
        out += ": ";
        print_node(*n.children[i], dimension, out);
      }
      out += ')';
      return;
    // Internal kinds: printed for diagnostics only, not re-parseable.
    case NodeKind::Product:
      out += "mul(";
      print_node(*n.children[0], dimension, out);
      out += ',';
      print_node(*n.children[1], dimension, out);
      out += ')';
      return;
    case NodeKind::Signum:
      out += "signum(";
      print_node(*n.children[0], dimension, out);
      out += ')';
      return;
    case NodeKind::MaxSelect:
      out += "dmax(";
      for (size_t i = 0; i < n.children.size(); ++i) {
        if (i > 0) out += ',';
        print_node(*n.children[i], dimension, out);
      }
      out += ')';
      return;
  }
}

}  // namespace

std::string print(const ExprTree& tree) {
  std::string out;
  print_node(*tree.root, tree.dimension, out);
  return out;
}

// --- derivative ---------------------------------------------------------------

namespace {

NodePtr differentiate(const NodePtr& n) {
  switch (n->kind) {
    case NodeKind::Constant: return make_constant(0.0);
    case NodeKind::Variable: return make_constant(1.0);
    case NodeKind::Sum: {
      std::vector<NodePtr> d;
      d.reserve(n->children.size());
      for (const auto& c : n->children) d.push_back(differentiate(c));
      return make_sum(std::move(d));
    }
    case NodeKind::ScalarMul: return make_scalar_mul(n->number, differentiate(n->children[0]));
    case NodeKind::Power:
      return make_scalar_mul(n->index, make_product(make_power(n->children[0], n->index - 1),
                                                    differentiate(n->children[0])));
    case NodeKind::Exp: return make_product(make_exp(n->children[0]), differentiate(n->children[0]));
    case NodeKind::Abs:
      return make_product(make_signum(n->children[0]), differentiate(n->children[0]));
    case NodeKind::Max: {
      std::vector<NodePtr> all = n->children;
      for (const auto& c : n->children) all.push_back(differentiate(c));
      return node({NodeKind::MaxSelect, 0.0, 0, std::move(all), {}});
    }
    case NodeKind::Piecewise: {
      std::vector<NodePtr> d;
      d.reserve(n->children.size());
      for (const auto& c : n->children) d.push_back(differentiate(c));
      return make_piecewise(n->breakpoints, std::move(d));
    }
    default:
      throw std::invalid_argument("derivative_1d: tree already contains derivative-only nodes");
  }
}

// Affine detection for exact kink roots: returns (a, b) with node == a*x + b.
std::optional<std::pair<double, double>> as_affine(const Node& n) {
  switch (n.kind) {
    case NodeKind::Constant: return std::make_pair(0.0, n.number);
    case NodeKind::Variable: return std::make_pair(1.0, 0.0);
    case NodeKind::Sum: {
      double a = 0, b = 0;
      for (const auto& c : n.children) {
        const auto cc = as_affine(*c);
        if (!cc) return std::nullopt;
        a += cc->first;
        b += cc->second;
      }
      return std::make_pair(a, b);
    }
    case NodeKind::ScalarMul: {
      const auto cc = as_affine(*n.children[0]);
      if (!cc) return std::nullopt;
      return std::make_pair(n.number * cc->first, n.number * cc->second);
    }
    default: return std::nullopt;
  }
}

constexpr double kScanHalfWidth = 1024.0;
constexpr int kScanSteps = 1 << 16;

// Roots of a continuous scalar expression by sign-change scan + bisection.
void scan_roots(const Node& e, std::vector<double>& out) {
  if (const auto aff = as_affine(e)) {
    if (aff->first != 0.0) out.push_back(-aff->second / aff->first);
    return;
  }
  const double step = 2.0 * kScanHalfWidth / kScanSteps;
  double x0 = -kScanHalfWidth;
  double f0 = eval(e, std::span<const double>(&x0, 1));
  for (int i = 1; i <= kScanSteps; ++i) {
    double x1 = -kScanHalfWidth + i * step;
    const double f1 = eval(e, std::span<const double>(&x1, 1));
    if (f0 == 0.0) out.push_back(x0);
    if ((f0 < 0 && f1 > 0) || (f0 > 0 && f1 < 0)) {
      double lo = x0, hi = x1, flo = f0;
      for (int it = 0; it < 100 && hi - lo > 0; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = eval(e, std::span<const double>(&mid, 1));
        if (fm == 0.0) { lo = hi = mid; break; }
        if ((flo < 0) == (fm < 0)) { lo = mid; flo = fm; }
        else hi = mid;
      }
      out.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    f0 = f1;
  }
  if (f0 == 0.0) out.push_back(x0);
}

// Points where the active branch of a max switches.
void scan_crossings(const Node& maxNode, std::vector<double>& out) {
  const auto argmax_at = [&](double x) -> size_t {
    size_t best = 0;
    double bv = eval(*maxNode.children[0], std::span<const double>(&x, 1));
    for (size_t i = 1; i < maxNode.children.size(); ++i) {
      const double v = eval(*maxNode.children[i], std::span<const double>(&x, 1));
      if (v > bv) { bv = v; best = i; }
    }
    return best;
  };
  const double step = 2.0 * kScanHalfWidth / kScanSteps;
  double x0 = -kScanHalfWidth;
  size_t i0 = argmax_at(x0);
  for (int i = 1; i <= kScanSteps; ++i) {
    const double x1 = -kScanHalfWidth + i * step;
    const size_t i1 = argmax_at(x1);
    if (i1 != i0) {
      // bisect on the difference of the two branches that swap
      const Node& a = *maxNode.children[i0];
      const Node& b = *maxNode.children[i1];
      double lo = x0, hi = x1;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double d = eval(b, std::span<const double>(&mid, 1)) -
                         eval(a, std::span<const double>(&mid, 1));
        if (d <= 0) lo = mid;
        else hi = mid;
      }
      out.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    i0 = i1;
  }
}

void collect_kink_candidates(const Node& n, std::vector<double>& out) {
  switch (n.kind) {
    case NodeKind::Piecewise:
      out.insert(out.end(), n.breakpoints.begin(), n.breakpoints.end());
      break;
    case NodeKind::Abs:
      scan_roots(*n.children[0], out);
      break;
    case NodeKind::Max:
      scan_crossings(n, out);
      break;
    default: break;
  }
  for (const auto& c : n.children) collect_kink_candidates(*c, out);
}

}  // namespace

Derivative1D derivative_1d(const ExprTree& tree) {
  if (tree.dimension != 1) throw std::invalid_argument("derivative_1d: requires dimension 1");

  Derivative1D result;
  result.tree = {differentiate(tree.root), 1};

  std::vector<double> candidates;
  collect_kink_candidates(*tree.root, candidates);
  std::sort(candidates.begin(), candidates.end());
  const double v = 1.0;
  for (size_t i = 0; i < candidates.size(); ++i) {
    const double x = candidates[i];
    if (i > 0 && std::abs(x - candidates[i - 1]) <= 1e-12 * (1.0 + std::abs(x))) continue;
    // Candidates from the scan sit within a few ulp of the crossing, which is
    // usually not representable; probe the one-sided slopes just around it.
    const double delta = 1e-9 * (1.0 + std::abs(x));
    const double xl = x - delta, xr = x + delta;
    const double left = eval_slopes(*tree.root, std::span<const double>(&xl, 1),
                                    std::span<const double>(&v, 1)).left;
    const double right = eval_slopes(*tree.root, std::span<const double>(&xr, 1),
                                     std::span<const double>(&v, 1)).right;
    if (std::abs(right - left) > 1e-6 * (1.0 + std::abs(left) + std::abs(right)))
      result.kinks.push_back({x, left, right});
  }
  return result;
}

// --- FunctionSpec bridge --------------------------------------------------------

namespace {

bool contains_kind(const Node& n, NodeKind a, NodeKind b, NodeKind c) {
  if (n.kind == a || n.kind == b || n.kind == c) return true;
  for (const auto& ch : n.children)
    if (contains_kind(*ch, a, b, c)) return true;
  return false;
}

class ExprFunction final : public FunctionImpl {
 public:
  explicit ExprFunction(ExprTree tree) : tree_(std::move(tree)) {
    tag_ = "parsed:" + print(tree_);
    hint_ = contains_kind(*tree_.root, NodeKind::Abs, NodeKind::Max, NodeKind::Piecewise)
                ? SmoothHint::Unknown
                : SmoothHint::Smooth;
  }
  int dimension() const override { return tree_.dimension; }
  SmoothHint smooth_hint() const override { return hint_; }
  const std::string& tag() const override { return tag_; }
  double eval(std::span<const double> x) const override { return expr::eval(*tree_.root, x); }
  Slopes dir_slopes(std::span<const double> x, std::span<const double> v) const override {
    const auto s = eval_slopes(*tree_.root, x, v);
    return {s.left, s.right};
  }

 private:
  ExprTree tree_;
  std::string tag_;
  SmoothHint hint_;
};

}  // namespace

FunctionSpec make_function(const ExprTree& tree) {
  if (!tree.root) throw std::invalid_argument("make_function: empty tree");
  return FunctionSpec(std::make_shared<ExprFunction>(tree));
}

}  // namespace engulf::expr
