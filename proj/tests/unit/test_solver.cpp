#include "conflow/errors.hpp"
#include "conflow/solver.hpp"
#include "conflow/spherical_ops.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace conflow;

namespace {

const GasModel kGas2(2.0, 1.0, 4.0);

GridPtr patch(std::size_t n, std::vector<std::uint8_t> mask = {}) {
  return make_grid({std::numbers::pi / 3, 2 * std::numbers::pi / 3, 0.0, std::numbers::pi / 2, n, n},
                   std::move(mask));
}

ScalarField cos_field(const GridPtr& g) {
  ScalarField f(g);
  for (std::size_t k = 0; k < g->size(); ++k) f[k] = 2 + 0.1 * std::cos(g->theta(g->node(k).i));
  return f;
}

double sup_diff(const ScalarField& a, const ScalarField& b) {
  double e = 0.0;
  for (std::size_t k : a.grid().masked_nodes()) e = std::max(e, std::abs(a[k] - b[k]));
  return e;
}

// Source of N for phi = 2 + 0.1 cos(theta), gamma = 2, c0^2 = 1, B = 4.
double analytic_source(double t) {
  const double p = 2 + 0.1 * std::cos(t), dp = -0.1 * std::sin(t), ddp = -0.1 * std::cos(t);
  const double rho = 1 + 0.5 * (4 - p * p - dp * dp);
  const double drho = -(dp * ddp + p * dp);
  return (std::cos(t) * rho * dp + std::sin(t) * (drho * dp + rho * ddp)) / std::sin(t) + 2 * rho * p;
}

} // namespace

TEST_CASE("constant solution") {
  auto g = patch(33);
  const SolveResult r = solve_dirichlet({kGas2, ScalarField(g, 2.0), ScalarField(g, 4.0)});
  CHECK(r.report.converged);
  CHECK(r.report.iterations <= 2);
  CHECK(sup_diff(r.solution, ScalarField(g, 2.0)) < 1e-12);
  CHECK(r.report.has_certificate);
  CHECK(r.report.certificate.pass);
}

TEST_CASE("manufactured solution is recovered on the build grid") {
  auto g = patch(33);
  const ScalarField exact = cos_field(g);
  const BVProblem p = manufactured_problem(kGas2, exact);
  const SolveResult r = solve_dirichlet(p);
  CHECK(r.report.converged);
  CHECK(r.report.iterations <= 8);
  CHECK(sup_diff(r.solution, exact) <= 1e-10);
  for (std::size_t k : g->boundary_nodes()) REQUIRE(r.solution[k] == exact[k]);
  // Residual history never increases.
  for (std::size_t i = 1; i < r.report.residual_history.size(); ++i) {
    CHECK(r.report.residual_history[i] <= r.report.residual_history[i - 1]);
  }
  CHECK(r.report.residual_history.back() <= 1e-10);

  const BVProblem c = manufactured_problem(kGas2, ScalarField(g, 2.05));
  CHECK(sup_diff(solve_dirichlet(c).solution, ScalarField(g, 2.05)) < 1e-12);
}

TEST_CASE("error against the analytic solution decreases at second order") {
  std::vector<double> errs;
  for (std::size_t n : {33u, 65u}) {
    auto g = patch(n);
    ScalarField src(g);
    for (std::size_t k = 0; k < g->size(); ++k) src[k] = analytic_source(g->theta(g->node(k).i));
    const ScalarField exact = cos_field(g);
    const SolveResult r = solve_dirichlet({kGas2, exact, src});
    errs.push_back(sup_diff(r.solution, exact));
  }
  CHECK(errs[0] / errs[1] >= 3.6);
}

TEST_CASE("diagonal preconditioner gives the same solution") {
  auto g = patch(17);
  const BVProblem p = manufactured_problem(kGas2, cos_field(g));
  SolveOptions o;
  o.preconditioner = Preconditioner::Diagonal;
  const SolveResult d = solve_dirichlet(p, o);
  const SolveResult l = solve_dirichlet(p);
  CHECK(d.report.converged);
  CHECK(sup_diff(d.solution, l.solution) < 1e-10);
}

TEST_CASE("masked domain") {
  // Disc-like mask: drop the four corner blocks.
  const std::size_t n = 21;
  std::vector<std::uint8_t> mask(n * n, 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if ((i < 4 || i > n - 5) && (j < 4 || j > n - 5)) mask[i * n + j] = 0;
  auto g = patch(n, mask);
  const ScalarField exact = cos_field(g);
  const SolveResult r = solve_dirichlet(manufactured_problem(kGas2, exact));
  CHECK(r.report.converged);
  CHECK(sup_diff(r.solution, exact) < 1e-10);
}

TEST_CASE("vacuum data is rejected") {
  auto g = patch(17);
  const GasModel gas(2.0, 1.0, -10.0);
  CHECK_THROWS_AS(solve_dirichlet({gas, ScalarField(g, 0.1), ScalarField(g)}),
                  VacuumEncounteredError);
}

TEST_CASE("non-convergence carries the best iterate") {
  auto g = patch(17);
  SolveOptions o;
  o.max_newton = 1;
  o.newton_tol = 1e-14;
  try {
    solve_dirichlet(manufactured_problem(kGas2, cos_field(g)), o);
    FAIL("expected NonConvergenceError");
  } catch (const NonConvergenceError& e) {
    CHECK(e.best_iterate().size() == g->size());
    CHECK_FALSE(e.report().converged);
  }
}

TEST_CASE("inadmissible manufactured data") {
  auto g = patch(17);
  ScalarField steep(g);
  for (std::size_t k = 0; k < g->size(); ++k) steep[k] = 2 + 1.2 * g->theta(g->node(k).i);
  CHECK_THROWS_AS(manufactured_problem(kGas2, steep), InadmissibleError);
}

TEST_CASE("option validation and grid mismatch") {
  auto g = patch(9);
  SolveOptions o;
  o.newton_tol = 1e-16;
  CHECK_THROWS_AS(solve_dirichlet({kGas2, ScalarField(g, 2.0), ScalarField(g, 4.0)}, o),
                  PreconditionError);
  CHECK_THROWS_AS(solve_dirichlet({kGas2, ScalarField(g, 2.0), ScalarField(patch(7), 4.0)}),
                  GridMismatchError);
}

TEST_CASE("Laplace-Beltrami extension keeps the data and is harmonic") {
  auto g = patch(17);
  const ScalarField ext = laplace_beltrami_extension(cos_field(g));
  const ScalarField data = cos_field(g);
  for (std::size_t k : g->boundary_nodes()) REQUIRE(ext[k] == data[k]);
  // Interior values stay within the boundary range (maximum principle).
  double lo = 1e9, hi = -1e9;
  for (std::size_t k : g->boundary_nodes()) {
    lo = std::min(lo, data[k]);
    hi = std::max(hi, data[k]);
  }
  for (std::size_t k : g->interior_nodes()) {
    REQUIRE(ext[k] >= lo - 1e-12);
    REQUIRE(ext[k] <= hi + 1e-12);
  }
}
