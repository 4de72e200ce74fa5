#pragma once

#include "conflow/ellipticity.hpp"
#include "conflow/errors.hpp"
#include "conflow/gas.hpp"
#include "conflow/grid.hpp"

#include <string>
#include <vector>

namespace conflow {

/// Dirichlet problem N phi = source on the masked patch. Only the values of
/// `boundary` on discrete boundary nodes are used.
struct BVProblem {
  GasModel gas;
  ScalarField boundary;
  ScalarField source;
};

enum class Preconditioner {
  Diagonal,       ///< Jacobi scaling of the frozen-density operator
  FrozenDensityLU ///< sparse LU of the frozen-density operator
};

struct SolveOptions {
  double newton_tol = 1e-10;
  std::size_t max_newton = 50;
  std::size_t max_damping = 30;
  double lin_tol = 1e-12;
  std::size_t lin_max_iter = 4000;
  std::size_t lin_restart = 200;
  /// Frozen-density (Picard) steps allowed when a Newton step cannot reduce
  /// the residual.
  std::size_t picard_steps = 3;
  Preconditioner preconditioner = Preconditioner::FrozenDensityLU;
  /// Margin requested from the certificate embedded in the report.
  double certificate_eps = 1e-3;
};

enum class StepKind { Newton, Picard };

struct SolveReport {
  bool converged = false;
  std::size_t iterations = 0;
  std::vector<double> residual_history;
  std::vector<StepKind> steps;
  std::size_t linear_iterations = 0;
  std::vector<std::string> warnings;
  EllipticityCertificate certificate;
  bool has_certificate = false;
};

struct SolveResult {
  ScalarField solution;
  SolveReport report;
};

class NonConvergenceError : public Error {
public:
  NonConvergenceError(const std::string& what, ScalarField best, SolveReport report)
      : Error(what), best_(std::move(best)), report_(std::move(report)) {}
  const ScalarField& best_iterate() const { return best_; }
  const SolveReport& report() const { return report_; }

private:
  ScalarField best_;
  SolveReport report_;
};

class VacuumEncounteredError : public Error {
public:
  using Error::Error;
};

/// Damped Newton iteration on the divergence-form discretization. The
/// Jacobian is applied matrix-free from the analytic density gradient and
/// inverted with preconditioned GMRES. The initial guess is the discrete
/// Laplace-Beltrami extension of the boundary data.
///
/// Boundary nodes of the returned field carry the datum bit-exactly.
SolveResult solve_dirichlet(const BVProblem& problem, const SolveOptions& opts = {});

/// Discrete harmonic extension: Laplace-Beltrami u = 0 at interior nodes,
/// u = boundary datum on boundary nodes.
ScalarField laplace_beltrami_extension(const ScalarField& boundary,
                                       const SolveOptions& opts = {});

/// Problem whose exact discrete solution is `exact`: source = N_h(exact),
/// boundary = trace of exact. Throws InadmissibleError unless rho > 0 and
/// L^2 < 1 at every masked node.
BVProblem manufactured_problem(const GasModel& gas, const ScalarField& exact);

} // namespace conflow
