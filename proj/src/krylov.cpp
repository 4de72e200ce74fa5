#include "conflow/krylov.hpp"

#include "conflow/errors.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace conflow {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

struct BreakdownSignal {};

// One GMRES run from x (modified in place). Returns the final relative residual.
double gmres_run(const LinearOperator& op, const LinearOperator& precond,
                 std::span<const double> b, std::vector<double>& x, const KrylovOptions& opts,
                 std::size_t& iterations) {
  const std::size_t n = b.size();
  const double bnorm = norm(b);
  const std::size_t m = std::max<std::size_t>(1, opts.restart);

  std::vector<double> r(n);
  std::vector<double> w(n);
  std::vector<double> z(n);
  std::vector<std::vector<double>> basis(m + 1, std::vector<double>(n));
  std::vector<std::vector<double>> hess(m + 1, std::vector<double>(m, 0.0));
  std::vector<double> cs(m), sn(m), g(m + 1);

  auto apply_precond = [&](std::span<const double> in, std::span<double> out) {
    if (precond) {
      precond(in, out);
    } else {
      std::copy(in.begin(), in.end(), out.begin());
    }
  };
  auto true_residual = [&]() {
    op(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    return norm(r);
  };

  double rel = true_residual() / bnorm;
  while (rel > opts.tol) {
    if (iterations >= opts.max_iter) {
      std::ostringstream os;
      os << "GMRES reached " << opts.max_iter << " iterations at relative residual " << rel;
      throw MaxIterError(os.str());
    }
    const double beta = norm(r);
    for (std::size_t i = 0; i < n; ++i) basis[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;

    std::size_t used = 0;
    bool invariant = false;
    for (std::size_t j = 0; j < m && iterations < opts.max_iter; ++j) {
      apply_precond(basis[j], z);
      op(z, w);
      ++iterations;
      const double wnorm_before = norm(w);
      // Modified Gram-Schmidt with one reorthogonalisation pass.
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i <= j; ++i) {
          const double hij = dot(w, basis[i]);
          hess[i][j] += hij;
          for (std::size_t l = 0; l < n; ++l) w[l] -= hij * basis[i][l];
        }
      }
      const double hnext = norm(w);
      for (std::size_t i = 0; i < j; ++i) {
        const double tmp = cs[i] * hess[i][j] + sn[i] * hess[i + 1][j];
        hess[i + 1][j] = -sn[i] * hess[i][j] + cs[i] * hess[i + 1][j];
        hess[i][j] = tmp;
      }
      const double denom = std::hypot(hess[j][j], hnext);
      if (denom == 0.0) {
        invariant = true;
        break;
      }
      cs[j] = hess[j][j] / denom;
      sn[j] = hnext / denom;
      hess[j][j] = denom;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      used = j + 1;
      if (hnext <= 1e-14 * std::max(wnorm_before, 1e-300)) {
        invariant = true;
        break;
      }
      for (std::size_t l = 0; l < n; ++l) basis[j + 1][l] = w[l] / hnext;
      if (std::abs(g[j + 1]) / bnorm <= opts.tol) break;
    }

    // Back substitution for the least-squares coefficients.
    std::vector<double> y(used, 0.0);
    for (std::size_t ii = used; ii-- > 0;) {
      double acc = g[ii];
      for (std::size_t l = ii + 1; l < used; ++l) acc -= hess[ii][l] * y[l];
      y[ii] = acc / hess[ii][ii];
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t ii = 0; ii < used; ++ii) {
      for (std::size_t l = 0; l < n; ++l) w[l] += y[ii] * basis[ii][l];
    }
    apply_precond(w, z);
    for (std::size_t l = 0; l < n; ++l) x[l] += z[l];
    for (auto& row : hess) std::fill(row.begin(), row.end(), 0.0);

    const double previous = rel;
    rel = true_residual() / bnorm;
    if (invariant && rel > opts.tol) {
      throw BreakdownSignal{};
    }
    if (used == 0 && rel >= previous) {
      throw BreakdownSignal{};
    }
  }
  return rel;
}

} // namespace

KrylovResult linear_solve(const LinearOperator& op, std::span<const double> rhs,
                          const KrylovOptions& opts, const LinearOperator& precond) {
  const std::size_t n = rhs.size();
  KrylovResult result;
  result.x.assign(n, 0.0);
  const double bnorm = norm(rhs);
  if (bnorm == 0.0) {
    return result;
  }
  try {
    result.relative_residual = gmres_run(op, precond, rhs, result.x, opts, result.iterations);
    return result;
  } catch (const BreakdownSignal&) {
  }
  // Retry once from a small deterministic perturbation of the zero guess.
  result.recovered_from_breakdown = true;
  const double scale = 1e-8 * bnorm / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    result.x[i] = scale * std::sin(1.0 + static_cast<double>(i));
  }
  try {
    result.relative_residual = gmres_run(op, precond, rhs, result.x, opts, result.iterations);
  } catch (const BreakdownSignal&) {
    throw BreakdownError("GMRES breakdown: Krylov space became invariant before the "
                         "residual target was reached");
  }
  return result;
}

LinearOperator diagonal_preconditioner(std::vector<double> diag) {
  for (double d : diag) {
    if (d == 0.0 || !std::isfinite(d)) {
      throw PreconditionError("diagonal preconditioner: zero or non-finite diagonal entry");
    }
  }
  return [diag = std::move(diag)](std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] / diag[i];
  };
}

} // namespace conflow
