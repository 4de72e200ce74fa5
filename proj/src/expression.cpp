#include "conflow/expression.hpp"

#include "conflow/errors.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

namespace conflow {

struct Expression::Node {
  enum class Kind { Number, Theta, Phi, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp };
  Kind kind = Kind::Number;
  double value = 0.0;
  std::unique_ptr<Node> lhs;
  std::unique_ptr<Node> rhs;

  double eval(double theta, double phi) const {
    switch (kind) {
    case Kind::Number: return value;
    case Kind::Theta: return theta;
    case Kind::Phi: return phi;
    case Kind::Neg: return -lhs->eval(theta, phi);
    case Kind::Add: return lhs->eval(theta, phi) + rhs->eval(theta, phi);
    case Kind::Sub: return lhs->eval(theta, phi) - rhs->eval(theta, phi);
    case Kind::Mul: return lhs->eval(theta, phi) * rhs->eval(theta, phi);
    case Kind::Div: return lhs->eval(theta, phi) / rhs->eval(theta, phi);
    case Kind::Pow: return std::pow(lhs->eval(theta, phi), rhs->eval(theta, phi));
    case Kind::Sin: return std::sin(lhs->eval(theta, phi));
    case Kind::Cos: return std::cos(lhs->eval(theta, phi));
    case Kind::Exp: return std::exp(lhs->eval(theta, phi));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::unique_ptr<Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr leaf(Kind kind, double value = 0.0) {
  auto n = std::make_unique<Expression::Node>();
  n->kind = kind;
  n->value = value;
  return n;
}

NodePtr unary(Kind kind, NodePtr arg) {
  auto n = leaf(kind);
  n->lhs = std::move(arg);
  return n;
}

NodePtr binary(Kind kind, NodePtr lhs, NodePtr rhs) {
  auto n = leaf(kind);
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

// expr   := term (('+' | '-') term)*
// term   := unary (('*' | '/') unary)*
// unary  := '-' unary | '+' unary | power
// power  := atom ('^' unary)?
// atom   := number | name | name '(' expr ')' | '(' expr ')'
class Parser {
public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip();
    if (pos_ != s_.size()) {
      fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    }
    return root;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "expression parse error at position " << pos_ << ": " << msg;
    throw ParseError(os.str(), pos_);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(Kind::Add, std::move(lhs), term());
      } else if (accept('-')) {
        lhs = binary(Kind::Sub, std::move(lhs), term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary_expr();
    for (;;) {
      if (accept('*')) {
        lhs = binary(Kind::Mul, std::move(lhs), unary_expr());
      } else if (accept('/')) {
        lhs = binary(Kind::Div, std::move(lhs), unary_expr());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary_expr() {
    if (accept('-')) return unary(Kind::Neg, unary_expr());
    if (accept('+')) return unary_expr();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (accept('^')) {
      return binary(Kind::Pow, std::move(base), unary_expr());
    }
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "theta") return leaf(Kind::Theta);
      if (name == "phi") return leaf(Kind::Phi);
      if (name == "pi") return leaf(Kind::Number, std::numbers::pi);
      if (name == "e") return leaf(Kind::Number, std::numbers::e);
      Kind fn;
      if (name == "sin") {
        fn = Kind::Sin;
      } else if (name == "cos") {
        fn = Kind::Cos;
      } else if (name == "exp") {
        fn = Kind::Exp;
      } else {
        pos_ = start;
        fail("unknown identifier '" + name + "'");
      }
      if (!accept('(')) fail("expected '(' after " + name);
      NodePtr arg = expr();
      if (!accept(')')) fail("expected ')'");
      return unary(fn, std::move(arg));
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return leaf(Kind::Number, v);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

} // namespace

Expression::Expression(const std::string& text) : text_(text), root_(Parser(text_).parse()) {}
Expression::~Expression() = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;

double Expression::operator()(double theta, double phi) const { return root_->eval(theta, phi); }

ScalarField eval_expression(const std::string& text, const GridPtr& grid) {
  const Expression expr(text);
  ScalarField out(grid);
  for (std::size_t k = 0; k < grid->size(); ++k) {
    const Node n = grid->node(k);
    const double v = expr(grid->theta(n.i), grid->phi(n.j));
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "expression '" << text << "' is not finite at node (" << n.i << ", " << n.j
         << "), theta = " << grid->theta(n.i) << ", phi = " << grid->phi(n.j);
      throw DomainError(os.str());
    }
    out[k] = v;
  }
  return out;
}

} // namespace conflow
