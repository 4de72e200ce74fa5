#include "conflow/errors.hpp"
#include "conflow/krylov.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace conflow;

TEST_CASE("identity operator converges in one iteration") {
  const std::vector<double> b{1.0, -2.0, 3.5, 0.25};
  const auto r = linear_solve([](auto x, auto y) { std::copy(x.begin(), x.end(), y.begin()); }, b);
  CHECK(r.iterations == 1);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(r.x[i] == doctest::Approx(b[i]));
}

TEST_CASE("diagonal operator has the closed-form inverse") {
  const std::size_t n = 50;
  const std::vector<double> b(n, 1.0);
  auto op = [](std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = static_cast<double>(i + 1) * x[i];
  };
  const auto r = linear_solve(op, b);
  CHECK(r.relative_residual <= 1e-12);
  for (std::size_t i = 0; i < n; ++i) {
    REQUIRE(std::abs(r.x[i] - 1.0 / static_cast<double>(i + 1)) < 1e-10);
  }

  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = static_cast<double>(i + 1);
  const auto p = linear_solve(op, b, {}, diagonal_preconditioner(diag));
  CHECK(p.iterations == 1);
}

TEST_CASE("nonsymmetric system with restarts") {
  const std::size_t n = 120;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = (i == j ? 4.0 : 0.0) + 0.3 * u(rng) / std::sqrt(n);
  std::vector<double> x_true(n), b(n, 0.0);
  for (auto& v : x_true) v = u(rng);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b[i] += a[i * n + j] * x_true[j];
  auto op = [&](std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = 0.0;
      for (std::size_t j = 0; j < n; ++j) y[i] += a[i * n + j] * x[j];
    }
  };
  KrylovOptions opts;
  opts.restart = 5;
  const auto r = linear_solve(op, b, opts);
  for (std::size_t i = 0; i < n; ++i) REQUIRE(std::abs(r.x[i] - x_true[i]) < 1e-10);

  // Same inputs, same answer.
  const auto again = linear_solve(op, b, opts);
  CHECK(again.x == r.x);
  CHECK(again.iterations == r.iterations);
}

TEST_CASE("zero right-hand side returns zero") {
  const auto r = linear_solve([](auto x, auto y) { std::copy(x.begin(), x.end(), y.begin()); },
                              std::vector<double>(5, 0.0));
  for (double v : r.x) CHECK(v == 0.0);
}

TEST_CASE("singular operator fails") {
  auto op = [](std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = i == 0 ? 0.0 : x[i];
  };
  const std::vector<double> b(6, 1.0);
  bool raised = false;
  try {
    linear_solve(op, b);
  } catch (const BreakdownError&) {
    raised = true;
  } catch (const MaxIterError&) {
    raised = true;
  }
  CHECK(raised);
}

TEST_CASE("iteration cap raises") {
  auto op = [](std::span<const double> x, std::span<double> y) {
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) y[i] = x[(i + 1) % n];  // cyclic shift
  };
  std::vector<double> b(40, 0.0);
  b[0] = 1.0;
  KrylovOptions opts;
  opts.max_iter = 10;
  opts.restart = 10;
  CHECK_THROWS_AS(linear_solve(op, b, opts), MaxIterError);
}
