#pragma once

// Randomized sub/supersolution pairs built around exact uniform flows
// phi = a (n . zeta), which solve N phi = 0 with constant density.

#include "conflow/comparison.hpp"
#include "conflow/solver.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace conflow::testing {

struct PairScenario {
  GasModel gas{2.0, 1.0, 4.0};
  GridPtr grid;
  double speed = 0.0;        // a
  double sound_speed = 0.0;  // c of the unperturbed flow
  std::array<double, 3> direction{};
  ScalarField boundary_plus;
  ScalarField boundary_minus;
  ScalarField source_minus;
};

inline constexpr std::array<double, 4> kPairGammas{-1.0, 1.0, 1.4, 2.0};

inline std::array<double, 3> zeta_hat(double theta, double phi) {
  return {std::cos(theta), std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi)};
}

/// Scenario `index` of a seeded family. Gases cycle through kPairGammas.
/// margin == 0 gives identical boundary data (touching pairs).
inline PairScenario make_uniform_pair(std::uint64_t seed, std::size_t index, double margin,
                                      std::size_t n = 33) {
  std::mt19937_64 rng(seed * 1000003ULL + index);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };

  const double gamma = kPairGammas[index % kPairGammas.size()];
  const double kappa = between(0.72, 0.78);
  const double rho0 = between(0.8, 1.2);
  double a = between(1.5, 2.5);
  double c = kappa * a;
  double bernoulli = 0.0;
  if (gamma == 1.0) {
    c = 1.0;
    a = 1.0 / kappa;
    bernoulli = a * a + between(-0.5, 0.5);
  } else {
    const double c0_sq = std::pow(rho0, gamma - 1.0);
    bernoulli = a * a + 2.0 * (c * c - c0_sq) / (gamma - 1.0);
  }

  PairScenario s;
  s.gas = GasModel(gamma, rho0, bernoulli);
  s.speed = a;
  s.sound_speed = c;

  // Direction tilted slightly off the patch centre (theta, phi) = (pi/2, 0).
  const double tilt_t = between(-0.08, 0.08);
  const double tilt_p = between(-0.08, 0.08);
  s.direction = zeta_hat(std::numbers::pi / 2 + tilt_t, tilt_p);

  const double w = 0.35;
  GridSpec spec{std::numbers::pi / 2 - w, std::numbers::pi / 2 + w, -w, w, n, n};
  s.grid = make_grid(spec);

  // Smooth perturbation of the boundary datum and the gap profile.
  const double amp = 0.01 * a;
  const double k1 = between(1.0, 3.0), k2 = between(1.0, 3.0);
  const double p1 = between(0.0, 2 * std::numbers::pi), p2 = between(0.0, 2 * std::numbers::pi);
  const double gap_k = between(1.0, 4.0), gap_p = between(0.0, 2 * std::numbers::pi);
  const double source = between(0.02, 0.05) * density(s.gas, FlowState{0.0, 0.0, a});

  s.boundary_plus = ScalarField(s.grid);
  s.boundary_minus = ScalarField(s.grid);
  s.source_minus = ScalarField(s.grid, source);
  for (std::size_t k = 0; k < s.grid->size(); ++k) {
    const Node nd = s.grid->node(k);
    const double th = s.grid->theta(nd.i);
    const double ph = s.grid->phi(nd.j);
    const auto z = zeta_hat(th, ph);
    const double base = a * (s.direction[0] * z[0] + s.direction[1] * z[1] + s.direction[2] * z[2]);
    const double bump = amp * std::sin(k1 * th + p1) * std::cos(k2 * ph + p2);
    const double g = base + bump;
    const double profile = std::sin(gap_k * (th + ph) + gap_p);
    s.boundary_plus[k] = g;
    s.boundary_minus[k] = g - margin * (1.0 + 0.5 * profile * profile);
  }
  return s;
}

struct SolvedPair {
  ScalarField minus;
  ScalarField plus;
};

inline SolvedPair solve_pair(const PairScenario& s, const SolveOptions& opts = {}) {
  SolvedPair out;
  out.plus = solve_dirichlet({s.gas, s.boundary_plus, ScalarField(s.grid)}, opts).solution;
  out.minus = solve_dirichlet({s.gas, s.boundary_minus, s.source_minus}, opts).solution;
  return out;
}

} // namespace conflow::testing
