#include "conflow/comparison.hpp"
#include "conflow/errors.hpp"
#include "conflow/solver.hpp"
#include "conflow/spherical_ops.hpp"

#include "support/uniform_flow.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace conflow;

namespace {

const GasModel kGas2(2.0, 1.0, 4.0);

GridPtr patch(std::size_t n) {
  return make_grid({std::numbers::pi / 3, 2 * std::numbers::pi / 3, 0.0, std::numbers::pi / 2, n, n});
}

ScalarField sample(const GridPtr& g, double (*f)(double, double)) {
  ScalarField out(g);
  for (std::size_t k = 0; k < g->size(); ++k) {
    const Node n = g->node(k);
    out[k] = f(g->theta(n.i), g->phi(n.j));
  }
  return out;
}

PointCoefficients at(const CoefficientFields& c, std::size_t k) {
  return {c.a11[k], c.a12[k], c.a21[k], c.a22[k], c.b1[k], c.b2[k], c.c1[k], c.c2[k], c.d[k]};
}

} // namespace

TEST_CASE("mean-value coefficients of a constant state") {
  auto g = patch(9);
  const CoefficientFields c = mean_value_coefficients(kGas2, ScalarField(g, 2.0), ScalarField(g, 2.0));
  for (std::size_t k : g->masked_nodes()) {
    const PointCoefficients p = at(c, k);
    REQUIRE(p.a11 == doctest::Approx(1.0));
    REQUIRE(p.a22 == doctest::Approx(1.0));
    REQUIRE(p.a12 == 0.0);
    REQUIRE(p.b1 == 0.0);
    REQUIRE(p.c2 == 0.0);
    REQUIRE(p.d == doctest::Approx(-6.0));
  }
}

TEST_CASE("coefficients reduce to the pointwise Jacobian for equal fields") {
  const FlowState s{0.3, -0.2, 2.0};
  const PointCoefficients one = mean_value_coefficients_at(kGas2, s, s, 1);
  const PointCoefficients eight = mean_value_coefficients_at(kGas2, s, s, 8);
  const double rho = density(kGas2, s);
  const DensityPartials p = density_partials(kGas2, s);
  CHECK(one.a11 == doctest::Approx(rho + s.q1 * p.dq1).epsilon(1e-14));
  CHECK(one.a12 == doctest::Approx(s.q1 * p.dq2).epsilon(1e-14));
  CHECK(one.a12 == doctest::Approx(one.a21).epsilon(1e-14));
  CHECK(one.b2 == doctest::Approx(s.q2 * p.dz).epsilon(1e-14));
  CHECK(one.c1 == doctest::Approx(2 * s.z * p.dq1).epsilon(1e-14));
  CHECK(one.d == doctest::Approx(2 * rho + 2 * s.z * p.dz).epsilon(1e-14));
  CHECK(eight.d == doctest::Approx(one.d).epsilon(1e-14));
  CHECK(eight.a22 == doctest::Approx(one.a22).epsilon(1e-14));
}

TEST_CASE("quadrature has converged at eight points") {
  const FlowState m{0.1, 0.05, 2.0}, p{-0.05, 0.1, 2.2};
  const PointCoefficients a = mean_value_coefficients_at(kGas2, m, p, 8);
  const PointCoefficients b = mean_value_coefficients_at(kGas2, m, p, 16);
  CHECK(std::abs(a.a11 - b.a11) < 1e-12);
  CHECK(std::abs(a.a12 - b.a12) < 1e-12);
  CHECK(std::abs(a.b1 - b.b1) < 1e-12);
  CHECK(std::abs(a.c2 - b.c2) < 1e-12);
  CHECK(std::abs(a.d - b.d) < 1e-12);
  CHECK_THROWS_AS(mean_value_coefficients_at(kGas2, {3, 0, 0}, p, 8), VacuumError);
}

TEST_CASE("linearized operator examples") {
  auto g = patch(65);
  CoefficientFields c{ScalarField(g, 1.0), ScalarField(g), ScalarField(g), ScalarField(g, 1.0),
                      ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g),
                      ScalarField(g, -6.0)};
  const ScalarField zero = linearized_apply(c, ScalarField(g));
  for (double v : zero.values()) REQUIRE(v == 0.0);
  const ScalarField h = sample(g, [](double t, double) { return std::cos(t); });
  const ScalarField r = linearized_apply(c, h);
  CHECK(r[g->index(0 + 1, 20)] == doctest::Approx(-8 * std::cos(g->theta(1))).epsilon(1e-3));
  CHECK(r[g->index(32, 20)] == doctest::Approx(-8 * std::cos(g->theta(32))).epsilon(1e-3));
}

TEST_CASE("linearized operator matches the Frechet derivative of the residual") {
  // The two stencils differ at O(h^2); the forward difference adds O(eps).
  std::vector<double> errs;
  for (std::size_t n : {33u, 65u}) {
    auto g = patch(n);
    const ScalarField phi = sample(g, [](double t, double p) { return 2 + 0.1 * std::cos(t) + 0.05 * std::sin(p); });
    const ScalarField h = sample(g, [](double t, double p) { return std::sin(2 * t) * std::cos(3 * p); });
    const double eps = 1e-6;
    ScalarField shifted = phi;
    for (std::size_t k = 0; k < g->size(); ++k) shifted[k] += eps * h[k];
    const ScalarField r0 = residual_N(kGas2, phi), r1 = residual_N(kGas2, shifted);
    const ScalarField lin = linearized_apply(mean_value_coefficients(kGas2, phi, phi), h);
    double err = 0.0;
    for (std::size_t k : g->interior_nodes()) err = std::max(err, std::abs((r1[k] - r0[k]) / eps - lin[k]));
    errs.push_back(err);
  }
  CHECK(errs[0] < 1e-3);
  CHECK(errs[0] / errs[1] > 3.0);
}

TEST_CASE("weak-form integrand examples") {
  auto g = patch(9);
  const Node mid{4, 4};
  CHECK(weak_form_integrand(kGas2, ScalarField(g, 2.0), ScalarField(g, 2.2), 0.5, mid) == 0.0);

  const double f = weak_form_integrand(kGas2, ScalarField(g, 2.2), ScalarField(g, 2.0), 0.5, mid);
  const PointCoefficients c = mean_value_coefficients_at(kGas2, {0, 0, 2.2}, {0, 0, 2.0}, 8);
  CHECK(c.d < 0.0);
  CHECK(f == doctest::Approx(2 * 0.2 * (-0.5 * c.d * 0.04)).epsilon(1e-12));
  CHECK(f > 0.0);

  // beta = 1: no power prefactor.
  const double f1 = weak_form_integrand(kGas2, ScalarField(g, 2.2), ScalarField(g, 2.0), 1.0, mid);
  CHECK(f1 == doctest::Approx(-c.d * 0.04).epsilon(1e-12));
  CHECK_THROWS_AS(weak_form_integrand(kGas2, ScalarField(g, 2.2), ScalarField(g, 2.0), 0.0, mid),
                  PreconditionError);
}

TEST_CASE("weak-form integrand equals the quadratic form identity") {
  auto g = patch(17);
  const ScalarField plus = sample(g, [](double t, double p) { return 2.0 + 0.05 * std::cos(t) * std::sin(p); });
  const ScalarField minus = sample(g, [](double t, double p) { return 2.05 + 0.1 * std::sin(2 * t + p); });
  ScalarField hp(g);
  for (std::size_t k = 0; k < g->size(); ++k) hp[k] = std::max(minus[k] - plus[k], 0.0);
  const CoefficientFields c = mean_value_coefficients(kGas2, minus, plus);
  const ScalarField field = weak_form_field(kGas2, minus, plus, 0.5);
  int positive = 0;
  for (std::size_t k : g->interior_nodes()) {
    if (!(hp[k] > 0)) {
      REQUIRE(field[k] == 0.0);
      continue;
    }
    ++positive;
    const auto [e1, e2] = positive_part_gradient(hp, k);
    const double b = 0.5;
    const double q = c.a11[k] * e1 * e1 + (c.a12[k] + c.a21[k]) * e1 * e2 + c.a22[k] * e2 * e2 +
                     c.b1[k] * e1 * hp[k] + c.b2[k] * e2 * hp[k] - b * c.c1[k] * e1 * hp[k] -
                     b * c.c2[k] * e2 * hp[k] - b * c.d[k] * hp[k] * hp[k];
    REQUIRE(std::abs(q - b * field[k] * std::pow(hp[k], 1 - 1 / b)) < 1e-10);
  }
  CHECK(positive > 10);
}

TEST_CASE("positive-part gradient is one-sided at the free boundary") {
  auto g = patch(9);
  ScalarField hp(g);
  for (std::size_t k = 0; k < g->size(); ++k) hp[k] = std::max(0.0, static_cast<double>(g->node(k).i) - 3.0);
  // Row i = 4 borders the zero set at i = 3: central would halve the slope.
  const auto [t, p] = positive_part_gradient(hp, g->index(4, 4));
  CHECK(t == doctest::Approx(1.0 / g->h_theta()));
  CHECK(p == 0.0);
  CHECK(positive_part_gradient(hp, g->index(2, 4)).first == 0.0);
  CHECK(positive_part_gradient(hp, g->index(6, 4)).first == doctest::Approx(1.0 / g->h_theta()));
}

TEST_CASE("weak comparison of identical fields") {
  // A solution of N = 0 is both a sub- and a supersolution.
  const auto s = testing::make_uniform_pair(3, 3, 0.0, 17);
  const ScalarField w = solve_dirichlet({s.gas, s.boundary_plus, ScalarField(s.grid)}).solution;
  const ComparisonReport r = verify_weak_comparison(s.gas, w, w);
  CHECK(r.applicable);
  CHECK(r.ordering_pass);
  CHECK(r.interior_min_gap == 0.0);
  CHECK(r.weak_form_min == 0.0);
  REQUIRE(r.dichotomy.has_value());
  CHECK(r.dichotomy->kind == Dichotomy::Identical);
}

TEST_CASE("ordered solver pair and the swapped pair") {
  const auto s = testing::make_uniform_pair(5, 2, 0.01, 33);
  const auto p = testing::solve_pair(s);
  const ComparisonReport r = verify_weak_comparison(s.gas, p.minus, p.plus);
  for (const auto& h : r.hypotheses) CHECK_MESSAGE(h.pass, h.name);
  CHECK(r.applicable);
  CHECK(r.typo_reading_A_pass);
  CHECK(r.typo_reading_B_pass);
  CHECK(r.interior_min_gap > 0.0);
  CHECK(r.weak_form_pass);
  REQUIRE(r.dichotomy.has_value());
  CHECK(r.dichotomy->kind == Dichotomy::Strict);

  const ComparisonReport sw = verify_weak_comparison(s.gas, p.plus, p.minus);
  CHECK_FALSE(sw.applicable);
  CHECK_FALSE(sw.find("boundary_ordering")->pass);
  CHECK_FALSE(sw.dichotomy.has_value());
}

TEST_CASE("anomalous fixture is detected with its node") {
  auto g = patch(9);
  ScalarField plus(g, 2.0), minus(g, 1.99);
  minus.at(4, 5) = 2.0;  // touches at one interior node only
  ComparisonReport forced;
  forced.hypotheses = {{"subsolution", true, {}, 0.0}};
  double min_gap = 1e9;
  Node where;
  double max_abs = 0.0;
  for (std::size_t k : g->interior_nodes()) {
    const double gap = plus[k] - minus[k];
    if (gap < min_gap) {
      min_gap = gap;
      where = g->node(k);
    }
    max_abs = std::max(max_abs, std::abs(gap));
  }
  forced.interior_min_gap = min_gap;
  forced.interior_max_abs_gap = max_abs;
  forced.min_gap_node = where;
  const DichotomyVerdict v = strong_comparison_check(forced);
  CHECK(v.kind == Dichotomy::Anomalous);
  CHECK(v.node == Node{4, 5});

  forced.ordering_pass = false;
  CHECK_THROWS_AS(strong_comparison_check(forced), PreconditionError);
  CHECK(to_string(Dichotomy::Strict) == "Strict");
}

TEST_CASE("Hopf indicator: identical fields and the one-dimensional oracle") {
  auto g = patch(65);
  const auto edges = edge_midpoint_nodes(*g);
  CHECK(edges.size() == 4);
  const auto zero = hopf_indicator(kGas2, ScalarField(g, 2.0), ScalarField(g, 2.0), edges);
  for (const auto& e : zero) CHECK(e.derivative == 0.0);

  const double t0 = g->spec().theta_min, t1 = g->spec().theta_max;
  ScalarField plus(g, 2.0), minus(g);
  for (std::size_t k = 0; k < g->size(); ++k) {
    const double t = g->theta(g->node(k).i);
    minus[k] = 2.0 - 0.2 * std::sin(t - t0) * std::sin(t1 - t);
  }
  const Node bottom{0, 32};
  const auto h = hopf_indicator(kGas2, minus, plus, {bottom});
  CHECK(h.front().derivative == doctest::Approx(0.2 * std::sin(t1 - t0)).epsilon(1e-3));

  CHECK_THROWS_AS(hopf_indicator(kGas2, minus, plus, {Node{0, 0}}), PreconditionError);
  CHECK_THROWS_AS(hopf_indicator(kGas2, minus, plus, {Node{32, 0}}), PreconditionError);
  CHECK_THROWS_AS(hopf_indicator(kGas2, minus, plus, {Node{10, 10}}), PreconditionError);
}

TEST_CASE("touching solver pair has a positive Hopf derivative") {
  const auto s = testing::make_uniform_pair(5, 1, 0.0, 33);
  const auto p = testing::solve_pair(s);
  const auto h = hopf_indicator(s.gas, p.minus, p.plus, edge_midpoint_nodes(*s.grid));
  REQUIRE(h.size() == 4);
  for (const auto& e : h) CHECK(e.derivative > 1e-6);
}

TEST_CASE("edge midpoints follow the mask") {
  const std::size_t n = 9;
  std::vector<std::uint8_t> mask(n * n, 1);
  for (std::size_t j = 0; j < 3; ++j) mask[0 * n + j] = 0;  // notch in the first row
  auto g = make_grid({1.0, 2.0, 0.0, 1.0, n, n}, mask);
  const auto mids = edge_midpoint_nodes(*g);
  CHECK(mids.size() >= 4);
  for (const Node& m : mids) {
    int missing = 0;
    const std::size_t k = g->index(m);
    for (Axis a : {Axis::Theta, Axis::Phi})
      for (int s : {-1, 1}) missing += g->neighbor(k, a, s) ? 0 : 1;
    CHECK(missing == 1);
  }
}
