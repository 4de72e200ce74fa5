#pragma once

#include "conflow/grid.hpp"

#include <memory>
#include <string>

namespace conflow {

/// Arithmetic over theta and phi: + - * / ^, unary minus, parentheses,
/// sin, cos, exp and the constants pi and e. `^` is right associative and
/// binds tighter than unary minus, so -x^2 == -(x^2).
class Expression {
public:
  /// Throws ParseError carrying the 0-based offending character offset.
  explicit Expression(const std::string& text);
  ~Expression();
  Expression(Expression&&) noexcept;
  Expression& operator=(Expression&&) noexcept;

  double operator()(double theta, double phi) const;
  const std::string& text() const { return text_; }

  struct Node;

private:
  std::string text_;
  std::unique_ptr<Node> root_;
};

/// Evaluates at every node of the grid. Throws DomainError naming the node
/// where the value is not finite.
ScalarField eval_expression(const std::string& text, const GridPtr& grid);

} // namespace conflow
