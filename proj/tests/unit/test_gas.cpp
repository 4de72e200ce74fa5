#include "conflow/errors.hpp"
#include "conflow/gas.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

using namespace conflow;

namespace {

const GasModel kGas2(2.0, 1.0, 4.0);  // c0^2 = 1, B = 4
constexpr std::array<double, 6> kGammas{-1.0, 0.0, 1.0, 1.4, 2.0, 3.0};

// Random state with comfortably positive c^2.
FlowState random_admissible(const GasModel& gas, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const FlowState s{u(rng), u(rng), 1.0 + u(rng)};
    if (sound_speed_sq(gas, s) > 0.2) return s;
  }
}

double q_sq_minus_c_sq(const GasModel& gas, const Vec3& x) {
  const FlowState s{x[0], x[1], x[2]};
  return s.q_sq() - sound_speed_sq(gas, s);
}

} // namespace

TEST_CASE("gas model validation") {
  CHECK_THROWS_AS(GasModel(-1.5, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(GasModel(2.0, 0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(GasModel(2.0, 1.0, NAN), ConfigError);
  CHECK(GasModel(1.0, 3.0, 0.0).c0_sq() == 1.0);
  CHECK(GasModel(2.0, 3.0, 0.0).c0_sq() == doctest::Approx(3.0));
  CHECK(GasModel(-1.0, 2.0, 0.0).c0_sq() == doctest::Approx(0.25));
}

TEST_CASE("sound speed examples") {
  CHECK(sound_speed_sq(kGas2, {0, 0, 0}) == doctest::Approx(3.0));
  CHECK(sound_speed_sq(GasModel(1.0, 0.7, 5.0), {0.3, -0.2, 4.0}) == 1.0);
  CHECK(sound_speed_sq(GasModel(-1.0, 1.0, 0.0), {0.6, 0, 1}) == doctest::Approx(2.36));
}

TEST_CASE("density examples") {
  CHECK(density(kGas2, {0, 0, 2}) == doctest::Approx(1.0));
  CHECK(density(GasModel(-1.0, 1.0, 0.0), {0, 0, 0}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(density(kGas2, {3, 0, 0}), VacuumError);
  CHECK_THROWS_AS(density(GasModel(1.0, 1.0, 0.0), {0, 0, 40}), OverflowError);
}

TEST_CASE("density partials examples") {
  const auto p = density_partials(kGas2, {0.5, 0, 2});
  CHECK(p.dq1 == doctest::Approx(-0.5));
  CHECK(p.dq2 == doctest::Approx(0.0));
  CHECK(p.dz == doctest::Approx(-2.0));
  for (double g : kGammas) {
    const auto z = density_partials(GasModel(g, 1.0, 0.5), {0, 0, 0});
    CHECK(z.dq1 == 0.0);
    CHECK(z.dq2 == 0.0);
    CHECK(z.dz == 0.0);
  }
  const auto q = density_partials(kGas2, {0, 0, 2});
  CHECK(q.dz == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("density partials match central differences") {
  std::mt19937_64 rng(11);
  const double h = 1e-6;
  for (double g : kGammas) {
    const GasModel gas(g, 1.1, 2.0);
    for (int n = 0; n < 1000; ++n) {
      const FlowState s = random_admissible(gas, rng);
      const auto p = density_partials(gas, s);
      auto fd = [&](int axis) {
        FlowState a = s, b = s;
        double* pa = axis == 0 ? &a.q1 : axis == 1 ? &a.q2 : &a.z;
        double* pb = axis == 0 ? &b.q1 : axis == 1 ? &b.q2 : &b.z;
        *pa += h;
        *pb -= h;
        return (density(gas, a) - density(gas, b)) / (2 * h);
      };
      REQUIRE(std::abs(p.dq1 - fd(0)) < 1e-5);
      REQUIRE(std::abs(p.dq2 - fd(1)) < 1e-5);
      REQUIRE(std::abs(p.dz - fd(2)) < 1e-5);
    }
  }
}

TEST_CASE("pseudo-Mach examples") {
  CHECK(pseudo_mach_sq(kGas2, {0.5, 0, 2}) == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
  CHECK(pseudo_mach_sq(kGas2, {0, 0, 1.3}) == 0.0);
  CHECK(pseudo_mach_sq(kGas2, {1, 0, 2}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(pseudo_mach_sq(kGas2, {3, 0, 0}), VacuumError);
}

TEST_CASE("classification examples") {
  CHECK(classify_state(kGas2, {0.5, 0, 2}, 1e-10) == FlowType::Elliptic);
  CHECK(classify_state(kGas2, {1, 0, 2}, 1e-10) == FlowType::Hyperbolic);
  CHECK(classify_state(kGas2, {3, 0, 0}, 1e-10) == FlowType::Vacuum);
  // c^2 = 1 + (4 - 4 - q^2)/2 = 1 - q^2/2 equals q^2 at q^2 = 2/3.
  CHECK(classify_state(kGas2, {std::sqrt(2.0 / 3.0), 0, 2}) == FlowType::Parabolic);
  CHECK(type_code(FlowType::Hyperbolic) == 'H');
}

TEST_CASE("classification depends on |q| only") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5), ang(0.0, 6.283185307179586);
  for (double g : kGammas) {
    const GasModel gas(g, 1.0, 3.0);
    for (int n = 0; n < 500; ++n) {
      const FlowState s{u(rng), u(rng), u(rng)};
      const double a = ang(rng);
      const FlowState r{std::cos(a) * s.q1 - std::sin(a) * s.q2,
                        std::sin(a) * s.q1 + std::cos(a) * s.q2, s.z};
      const double l2 = sound_speed_sq(gas, s) > 0 ? pseudo_mach_sq(gas, s) : 0.0;
      if (std::abs(l2 - 1.0) < 1e-6) continue;  // rounding could cross the band
      REQUIRE(classify_state(gas, s) == classify_state(gas, r));
    }
  }
}

TEST_CASE("density to the gamma - 1 is the squared sound speed") {
  std::mt19937_64 rng(3);
  for (double g : kGammas) {
    if (g == 1.0) continue;
    const GasModel gas(g, 0.9, 2.5);
    for (int n = 0; n < 1000; ++n) {
      const FlowState s = random_admissible(gas, rng);
      const double c2 = sound_speed_sq(gas, s);
      REQUIRE(std::abs(std::pow(density(gas, s), g - 1.0) - c2) <= 1e-12 * c2);
    }
  }
}

TEST_CASE("density is continuous at gamma = 1") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0), r0(0.5, 2.0);
  for (int n = 0; n < 100; ++n) {
    const double rho0 = r0(rng);
    const FlowState s{u(rng), u(rng), 1.0 + 0.5 * u(rng)};
    const double rho1 = density(GasModel(1.0, rho0, 3.0), s);
    for (double g : {1.0 - 1e-4, 1.0 + 1e-4}) {
      const double rho = density(GasModel(g, rho0, 3.0), s);
      REQUIRE(std::abs(rho - rho1) / rho1 < 1e-3);
    }
  }
}

TEST_CASE("convexity Hessian against finite differences") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double h = 1e-3;
  for (double g : kGammas) {
    const GasModel gas(g, 1.0, 2.0);
    const Mat3 hess = convexity_hessian(gas);
    for (int n = 0; n < 5; ++n) {
      const Vec3 x{u(rng), u(rng), u(rng)};
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          auto shifted = [&](double sa, double sb) {
            Vec3 y = x;
            y[a] += sa;
            y[b] += sb;
            return q_sq_minus_c_sq(gas, y);
          };
          const double fd =
              (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) / (4 * h * h);
          REQUIRE(std::abs(fd - hess[a][b]) < 1e-6);
        }
      }
    }
    // Tangential block is (gamma + 1) I: nonnegative for gamma >= -1.
    CHECK(hess[0][0] == doctest::Approx(g + 1.0));
    CHECK(hess[1][1] == doctest::Approx(g + 1.0));
    CHECK(hess[0][1] == 0.0);
    CHECK(hess[2][2] == doctest::Approx(g - 1.0));
  }
  const Mat3 chaplygin = convexity_hessian(GasModel(-1.0, 1.0, 0.0));
  CHECK(chaplygin[0][0] == 0.0);
  CHECK(chaplygin[1][1] == 0.0);
}
