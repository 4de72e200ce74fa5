#include "conflow/solver.hpp"

#include "conflow/krylov.hpp"
#include "conflow/spherical_ops.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace conflow {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

/// Interior nodes are the unknowns; boundary nodes are held fixed.
struct Unknowns {
  explicit Unknowns(const SphericalGrid& grid)
      : nodes(grid.interior_nodes()), index(grid.size(), kNone) {
    for (std::size_t u = 0; u < nodes.size(); ++u) index[nodes[u]] = u;
  }
  std::vector<std::size_t> nodes;
  std::vector<std::size_t> index;
};

/// Matrix of u -> weighted_laplacian(weight, u) + zeroth * u restricted to
/// interior unknowns (boundary values treated as zero).
SparseMatrix assemble_frozen(const SphericalGrid& grid, const Unknowns& unk,
                             const std::vector<double>& weight,
                             const std::vector<double>& zeroth) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(5 * unk.nodes.size());
  const double ht2 = grid.h_theta() * grid.h_theta();
  const double hp2 = grid.h_phi() * grid.h_phi();
  for (std::size_t row = 0; row < unk.nodes.size(); ++row) {
    const std::size_t k = unk.nodes[row];
    const std::size_t i = grid.node(k).i;
    const double s = grid.sin_theta(i);
    const std::size_t nb[4] = {*grid.neighbor(k, Axis::Theta, 1), *grid.neighbor(k, Axis::Theta, -1),
                               *grid.neighbor(k, Axis::Phi, 1), *grid.neighbor(k, Axis::Phi, -1)};
    const double coef[4] = {
        grid.sin_theta_half_up(i) * 0.5 * (weight[k] + weight[nb[0]]) / (s * ht2),
        grid.sin_theta_half_up(i - 1) * 0.5 * (weight[k] + weight[nb[1]]) / (s * ht2),
        0.5 * (weight[k] + weight[nb[2]]) / (s * s * hp2),
        0.5 * (weight[k] + weight[nb[3]]) / (s * s * hp2)};
    double diag = zeroth[k];
    for (int m = 0; m < 4; ++m) {
      diag -= coef[m];
      if (unk.index[nb[m]] != kNone) {
        triplets.emplace_back(static_cast<int>(row), static_cast<int>(unk.index[nb[m]]), coef[m]);
      }
    }
    triplets.emplace_back(static_cast<int>(row), static_cast<int>(row), diag);
  }
  const auto n = static_cast<int>(unk.nodes.size());
  SparseMatrix a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  return a;
}

LinearOperator make_preconditioner(const SparseMatrix& a, Preconditioner kind) {
  if (kind == Preconditioner::Diagonal) {
    std::vector<double> diag(static_cast<std::size_t>(a.rows()));
    for (int r = 0; r < a.rows(); ++r) diag[static_cast<std::size_t>(r)] = a.coeff(r, r);
    return diagonal_preconditioner(std::move(diag));
  }
  auto lu = std::make_shared<Eigen::SparseLU<SparseMatrix>>();
  lu->compute(a);
  if (lu->info() != Eigen::Success) {
    throw BreakdownError("frozen-density preconditioner: sparse LU factorisation failed");
  }
  return [lu](std::span<const double> x, std::span<double> y) {
    Eigen::Map<const Eigen::VectorXd> in(x.data(), static_cast<Eigen::Index>(x.size()));
    Eigen::Map<Eigen::VectorXd> out(y.data(), static_cast<Eigen::Index>(y.size()));
    out = lu->solve(in);
  };
}

LinearOperator sparse_operator(const SparseMatrix& a) {
  return [&a](std::span<const double> x, std::span<double> y) {
    Eigen::Map<const Eigen::VectorXd> in(x.data(), static_cast<Eigen::Index>(x.size()));
    Eigen::Map<Eigen::VectorXd> out(y.data(), static_cast<Eigen::Index>(y.size()));
    out = a * in;
  };
}

KrylovOptions krylov_options(const SolveOptions& opts) {
  return {opts.lin_tol, opts.lin_max_iter, opts.lin_restart};
}

/// Residual N_h(u) - source at interior nodes, in unknown ordering.
std::vector<double> residual_vector(const ScalarField& u,
                                    const ScalarField& source, const Unknowns& unk,
                                    const NodalDensity& nd) {
  const SphericalGrid& grid = u.grid();
  std::vector<double> r(unk.nodes.size());
  for (std::size_t row = 0; row < unk.nodes.size(); ++row) {
    const std::size_t k = unk.nodes[row];
    r[row] = stencil::weighted_laplacian(grid, nd.rho, u.values(), k) + 2.0 * nd.rho[k] * u[k] -
             source[k];
  }
  return r;
}

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Exact derivative of the discrete residual at u, applied matrix-free.
class Jacobian {
public:
  Jacobian(const ScalarField& u, const NodalDensity& nd, const Unknowns& unk)
      : u_(u), nd_(nd), unk_(unk), v_(u.grid().size(), 0.0), drho_(u.grid().size(), 0.0) {}

  void operator()(std::span<const double> x, std::span<double> y) {
    const SphericalGrid& grid = u_.grid();
    for (std::size_t row = 0; row < unk_.nodes.size(); ++row) v_[unk_.nodes[row]] = x[row];
    for (std::size_t k : grid.masked_nodes()) {
      const DensityPartials& p = nd_.partials[k];
      const double dq1 = stencil::d_theta(grid, v_, k);
      const double dq2 = stencil::d_phi(grid, v_, k) / grid.sin_theta(grid.node(k).i);
      drho_[k] = p.dq1 * dq1 + p.dq2 * dq2 + p.dz * v_[k];
    }
    for (std::size_t row = 0; row < unk_.nodes.size(); ++row) {
      const std::size_t k = unk_.nodes[row];
      y[row] = stencil::weighted_laplacian(grid, nd_.rho, v_, k) +
               stencil::weighted_laplacian(grid, drho_, u_.values(), k) +
               2.0 * (drho_[k] * u_[k] + nd_.rho[k] * v_[k]);
    }
  }

private:
  const ScalarField& u_;
  const NodalDensity& nd_;
  const Unknowns& unk_;
  std::vector<double> v_;
  std::vector<double> drho_;
};

void check_boundary(const ScalarField& boundary) {
  for (std::size_t k : boundary.grid().boundary_nodes()) {
    if (!std::isfinite(boundary[k])) {
      const Node n = boundary.grid().node(k);
      std::ostringstream os;
      os << "boundary datum is not finite at node (" << n.i << ", " << n.j << ")";
      throw GridError(os.str());
    }
  }
}

} // namespace

ScalarField laplace_beltrami_extension(const ScalarField& boundary, const SolveOptions& opts) {
  const SphericalGrid& grid = boundary.grid();
  check_boundary(boundary);
  ScalarField u(boundary.grid_ptr(), 0.0);
  for (std::size_t k : grid.boundary_nodes()) u[k] = boundary[k];

  const Unknowns unk(grid);
  if (unk.nodes.empty()) {
    return u;
  }
  const std::vector<double> ones(grid.size(), 1.0);
  const std::vector<double> zeros(grid.size(), 0.0);
  std::vector<double> rhs(unk.nodes.size());
  for (std::size_t row = 0; row < unk.nodes.size(); ++row) {
    rhs[row] = -stencil::weighted_laplacian(grid, ones, u.values(), unk.nodes[row]);
  }
  const SparseMatrix a = assemble_frozen(grid, unk, ones, zeros);
  const KrylovResult sol = linear_solve(sparse_operator(a), rhs, krylov_options(opts),
                                        make_preconditioner(a, opts.preconditioner));
  for (std::size_t row = 0; row < unk.nodes.size(); ++row) u[unk.nodes[row]] = sol.x[row];
  return u;
}

SolveResult solve_dirichlet(const BVProblem& problem, const SolveOptions& opts) {
  if (!(opts.newton_tol >= 1e-14) || !(opts.lin_tol > 0.0) || opts.max_newton == 0 ||
      opts.max_damping == 0 || opts.lin_max_iter == 0) {
    throw PreconditionError("solve options: tolerances and caps must be positive, newton_tol >= 1e-14");
  }
  const GasModel& gas = problem.gas;
  const SphericalGrid& grid = problem.boundary.grid();
  require_same_grid(grid, problem.source.grid(), "solve_dirichlet");
  if (grid.boundary_nodes().empty()) {
    throw GridError("solve_dirichlet: the mask has no boundary nodes");
  }
  const Unknowns unk(grid);

  SolveReport report;
  if (!grid.interior_connected()) {
    report.warnings.push_back("interior nodes are not connected");
  }

  ScalarField u = laplace_beltrami_extension(problem.boundary, opts);
  NodalDensity nd;
  try {
    nd = nodal_density(gas, u);
  } catch (const VacuumError& e) {
    throw VacuumEncounteredError(std::string("initial guess is not admissible: ") + e.what());
  }
  std::vector<double> r = residual_vector(u, problem.source, unk, nd);
  double res = sup_norm(r);
  report.residual_history.push_back(res);

  std::size_t picard_used = 0;
  while (res > opts.newton_tol) {
    if (report.iterations >= opts.max_newton) {
      std::ostringstream os;
      os << "Newton iteration cap " << opts.max_newton << " reached at residual " << res;
      throw NonConvergenceError(os.str(), u, report);
    }
    std::vector<double> neg_r(r.size());
    for (std::size_t l = 0; l < r.size(); ++l) neg_r[l] = -r[l];

    bool any_admissible = false;
    // Backtracking on the sup-norm residual; accepts only strict decrease.
    auto line_search = [&](const std::vector<double>& step) -> bool {
      double lambda = 1.0;
      for (std::size_t d = 0; d <= opts.max_damping; ++d, lambda *= 0.5) {
        ScalarField trial = u;
        for (std::size_t row = 0; row < unk.nodes.size(); ++row) {
          trial[unk.nodes[row]] += lambda * step[row];
        }
        NodalDensity trial_nd;
        try {
          trial_nd = nodal_density(gas, trial);
        } catch (const VacuumError&) {
          continue;
        }
        any_admissible = true;
        std::vector<double> trial_r = residual_vector(trial, problem.source, unk, trial_nd);
        const double trial_res = sup_norm(trial_r);
        if (trial_res < res) {
          u = std::move(trial);
          nd = std::move(trial_nd);
          r = std::move(trial_r);
          res = trial_res;
          return true;
        }
      }
      return false;
    };

    // Frozen-density operator; the Newton preconditioner also carries the
    // linearised zeroth-order coefficient 2 rho + 2 z d rho / dz.
    std::vector<double> zeroth_picard(grid.size(), 0.0);
    std::vector<double> zeroth_newton(grid.size(), 0.0);
    for (std::size_t k : unk.nodes) {
      zeroth_picard[k] = 2.0 * nd.rho[k];
      zeroth_newton[k] = 2.0 * nd.rho[k] + 2.0 * u[k] * nd.partials[k].dz;
    }

    bool accepted = false;
    try {
      const SparseMatrix pre = assemble_frozen(grid, unk, nd.rho, zeroth_newton);
      Jacobian jac(u, nd, unk);
      const KrylovResult step =
          linear_solve(std::ref(jac), neg_r, krylov_options(opts),
                       make_preconditioner(pre, opts.preconditioner));
      report.linear_iterations += step.iterations;
      accepted = line_search(step.x);
      if (accepted) report.steps.push_back(StepKind::Newton);
    } catch (const MaxIterError&) {
    } catch (const BreakdownError&) {
    }

    if (!accepted && picard_used < opts.picard_steps) {
      ++picard_used;
      const SparseMatrix a = assemble_frozen(grid, unk, nd.rho, zeroth_picard);
      const KrylovResult step = linear_solve(sparse_operator(a), neg_r, krylov_options(opts),
                                             make_preconditioner(a, opts.preconditioner));
      report.linear_iterations += step.iterations;
      accepted = line_search(step.x);
      if (accepted) report.steps.push_back(StepKind::Picard);
    }

    if (!accepted) {
      if (!any_admissible) {
        throw VacuumEncounteredError(
            "damping exhausted without an admissible iterate (rho <= 0 on every trial)");
      }
      std::ostringstream os;
      os << "line search could not reduce the residual below " << res;
      throw NonConvergenceError(os.str(), u, report);
    }
    ++report.iterations;
    report.residual_history.push_back(res);
  }

  report.converged = true;
  report.certificate = certify_uniform(gas, u, opts.certificate_eps);
  report.has_certificate = true;
  return {std::move(u), std::move(report)};
}

BVProblem manufactured_problem(const GasModel& gas, const ScalarField& exact) {
  NodalDensity nd;
  try {
    nd = nodal_density(gas, exact);
  } catch (const VacuumError& e) {
    throw InadmissibleError(std::string("manufactured solution is not admissible: ") + e.what());
  }
  const SphericalGrid& grid = exact.grid();
  for (std::size_t k : grid.masked_nodes()) {
    const double l2 = nd.states[k].q_sq() / sound_speed_sq(gas, nd.states[k]);
    if (!(l2 < 1.0)) {
      const Node n = grid.node(k);
      std::ostringstream os;
      os << "manufactured solution is not elliptic: L^2 = " << l2 << " at node (" << n.i << ", "
         << n.j << ")";
      throw InadmissibleError(os.str());
    }
  }
  return {gas, exact, residual_N(gas, exact, ResidualForm::Divergence)};
}

} // namespace conflow
