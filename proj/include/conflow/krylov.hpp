#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace conflow {

/// y = A x. Implementations must write every entry of y.
using LinearOperator = std::function<void(std::span<const double> x, std::span<double> y)>;

struct KrylovOptions {
  double tol = 1e-12;          ///< relative residual target ||b - A x|| / ||b||
  std::size_t max_iter = 2000; ///< total inner iterations over all restarts
  std::size_t restart = 200;
};

struct KrylovResult {
  std::vector<double> x;
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  bool recovered_from_breakdown = false;
};

/// Right-preconditioned restarted GMRES. `precond`, when given, applies an
/// approximate inverse M^{-1}. Deterministic for identical inputs.
///
/// Throws MaxIterError when the iteration cap is reached and BreakdownError
/// when the Krylov space becomes invariant without reaching the target twice
/// in a row (the second attempt starts from a perturbed guess).
KrylovResult linear_solve(const LinearOperator& op, std::span<const double> rhs,
                          const KrylovOptions& opts = {},
                          const LinearOperator& precond = nullptr);

/// M^{-1} x = x / diag, for a nonzero diagonal.
LinearOperator diagonal_preconditioner(std::vector<double> diag);

} // namespace conflow
