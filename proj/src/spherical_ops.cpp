#include "conflow/spherical_ops.hpp"

#include "conflow/errors.hpp"

#include <cmath>
#include <sstream>

namespace conflow {

namespace stencil {
namespace {

double one_axis(const SphericalGrid& grid, std::span<const double> u, std::size_t k, Axis axis,
                double h) {
  const auto up = grid.neighbor(k, axis, 1);
  const auto dn = grid.neighbor(k, axis, -1);
  if (up && dn) {
    return (u[*up] - u[*dn]) / (2.0 * h);
  }
  // Edges: central difference against a cubic-extrapolated ghost value
  // where four points fit. Its O(h^2) error matches the interior stencil's,
  // so a central difference of the result stays second order at the first
  // interior layer. Written on differences so constants give exactly zero.
  for (int dir : {1, -1}) {
    const auto n1 = dir > 0 ? up : dn;
    if (!n1) continue;
    const auto n2 = grid.neighbor(*n1, axis, dir);
    if (!n2) continue;
    const double d1 = u[*n1] - u[k], d2 = u[*n2] - u[k];
    if (const auto n3 = grid.neighbor(*n2, axis, dir)) {
      return dir * (7.0 * d1 - 4.0 * d2 + (u[*n3] - u[k])) / (2.0 * h);
    }
    return dir * (4.0 * d1 - d2) / (2.0 * h);
  }
  const Node n = grid.node(k);
  std::ostringstream os;
  os << "node (" << n.i << ", " << n.j << ") has no " << (axis == Axis::Theta ? "theta" : "phi")
     << " difference stencil inside the mask";
  throw GridError(os.str());
}

} // namespace

double d_theta(const SphericalGrid& grid, std::span<const double> u, std::size_t k) {
  return one_axis(grid, u, k, Axis::Theta, grid.h_theta());
}

double d_phi(const SphericalGrid& grid, std::span<const double> u, std::size_t k) {
  return one_axis(grid, u, k, Axis::Phi, grid.h_phi());
}

double weighted_laplacian(const SphericalGrid& grid, std::span<const double> weight,
                          std::span<const double> u, std::size_t k) {
  const std::size_t tp = *grid.neighbor(k, Axis::Theta, 1);
  const std::size_t tm = *grid.neighbor(k, Axis::Theta, -1);
  const std::size_t pp = *grid.neighbor(k, Axis::Phi, 1);
  const std::size_t pm = *grid.neighbor(k, Axis::Phi, -1);
  const std::size_t i = grid.node(k).i;
  const double s = grid.sin_theta(i);
  const double s_up = grid.sin_theta_half_up(i);
  const double s_dn = grid.sin_theta_half_up(i - 1);
  const double ht = grid.h_theta();
  const double hp = grid.h_phi();

  const double flux_t_up = s_up * 0.5 * (weight[k] + weight[tp]) * (u[tp] - u[k]);
  const double flux_t_dn = s_dn * 0.5 * (weight[k] + weight[tm]) * (u[k] - u[tm]);
  const double flux_p_up = 0.5 * (weight[k] + weight[pp]) * (u[pp] - u[k]);
  const double flux_p_dn = 0.5 * (weight[k] + weight[pm]) * (u[k] - u[pm]);
  return (flux_t_up - flux_t_dn) / (s * ht * ht) + (flux_p_up - flux_p_dn) / (s * s * hp * hp);
}

} // namespace stencil

VectorField gradient_sph(const ScalarField& f) {
  const SphericalGrid& grid = f.grid();
  VectorField g(f.grid_ptr());
  for (std::size_t k : grid.masked_nodes()) {
    g.v_theta[k] = stencil::d_theta(grid, f.values(), k);
    g.v_phi[k] = stencil::d_phi(grid, f.values(), k) / grid.sin_theta(grid.node(k).i);
  }
  return g;
}

ScalarField divergence_sph(const VectorField& v) {
  const SphericalGrid& grid = v.grid();
  std::vector<double> weighted(grid.size(), 0.0);
  for (std::size_t k : grid.masked_nodes()) {
    weighted[k] = grid.sin_theta(grid.node(k).i) * v.v_theta[k];
  }
  ScalarField out(v.grid_ptr());
  for (std::size_t k : grid.masked_nodes()) {
    const double s = grid.sin_theta(grid.node(k).i);
    out[k] = (stencil::d_theta(grid, weighted, k) + stencil::d_phi(grid, v.v_phi, k)) / s;
  }
  return out;
}

std::vector<FlowState> flow_states(const ScalarField& f) {
  const VectorField g = gradient_sph(f);
  std::vector<FlowState> states(f.size());
  for (std::size_t k : f.grid().masked_nodes()) {
    states[k] = {g.v_theta[k], g.v_phi[k], f[k]};
  }
  return states;
}

NodalDensity nodal_density(const GasModel& gas, const ScalarField& f) {
  const SphericalGrid& grid = f.grid();
  NodalDensity out;
  out.states = flow_states(f);
  out.rho.assign(grid.size(), 0.0);
  out.partials.assign(grid.size(), {});
  for (std::size_t k : grid.masked_nodes()) {
    try {
      out.rho[k] = density(gas, out.states[k]);
    } catch (const Error& e) {
      const Node n = grid.node(k);
      std::ostringstream os;
      os << e.what() << " at node (" << n.i << ", " << n.j << ")";
      throw VacuumError(os.str(), static_cast<std::ptrdiff_t>(n.i),
                        static_cast<std::ptrdiff_t>(n.j));
    }
    out.partials[k] = density_partials(gas, out.states[k], out.rho[k]);
  }
  return out;
}

namespace {

ScalarField residual_divergence(const GasModel& gas, const ScalarField& f) {
  const SphericalGrid& grid = f.grid();
  const NodalDensity nd = nodal_density(gas, f);
  ScalarField out(f.grid_ptr());
  for (std::size_t k : grid.interior_nodes()) {
    out[k] = stencil::weighted_laplacian(grid, nd.rho, f.values(), k) + 2.0 * nd.rho[k] * f[k];
  }
  return out;
}

ScalarField residual_expanded(const GasModel& gas, const ScalarField& f) {
  const SphericalGrid& grid = f.grid();
  const NodalDensity nd = nodal_density(gas, f);
  std::vector<double> dphi(grid.size(), 0.0);
  for (std::size_t k : grid.masked_nodes()) {
    dphi[k] = stencil::d_phi(grid, f.values(), k);
  }
  const double ht = grid.h_theta();
  const double hp = grid.h_phi();
  ScalarField out(f.grid_ptr());
  for (std::size_t k : grid.interior_nodes()) {
    const std::size_t tp = *grid.neighbor(k, Axis::Theta, 1);
    const std::size_t tm = *grid.neighbor(k, Axis::Theta, -1);
    const std::size_t pp = *grid.neighbor(k, Axis::Phi, 1);
    const std::size_t pm = *grid.neighbor(k, Axis::Phi, -1);
    const std::size_t i = grid.node(k).i;
    const double s = grid.sin_theta(i);
    const double cot = std::cos(grid.theta(i)) / s;

    const double f_tt = (f[tp] - 2.0 * f[k] + f[tm]) / (ht * ht);
    const double f_pp = (f[pp] - 2.0 * f[k] + f[pm]) / (hp * hp);
    const double f_tp = stencil::d_theta(grid, dphi, k);

    const FlowState& st = nd.states[k];
    const double c2 = sound_speed_sq(gas, st);
    const double q1 = st.q1;
    const double q2 = st.q2;
    const double expanded = (c2 - q1 * q1) * f_tt + (c2 - q2 * q2) * f_pp / (s * s) -
                            2.0 * q1 * q2 * f_tp / s + cot * (c2 + q2 * q2) * q1 +
                            (2.0 * c2 - q1 * q1 - q2 * q2) * st.z;
    out[k] = nd.rho[k] / c2 * expanded;
  }
  return out;
}

} // namespace

ScalarField residual_N(const GasModel& gas, const ScalarField& f, ResidualForm form) {
  return form == ResidualForm::Divergence ? residual_divergence(gas, f)
                                          : residual_expanded(gas, f);
}

Mat2 principal_matrix(const GasModel& gas, const FlowState& s) {
  const double c2 = sound_speed_sq(gas, s);
  return {{{c2 - s.q1 * s.q1, -s.q1 * s.q2}, {-s.q1 * s.q2, c2 - s.q2 * s.q2}}};
}

double eigen_ratio(const GasModel& gas, const FlowState& s) {
  const double c2 = sound_speed_sq(gas, s);
  if (!(c2 > 0.0)) {
    throw NotEllipticError("eigen_ratio: c^2 <= 0");
  }
  const double l2 = s.q_sq() / c2;
  if (!(l2 < 1.0)) {
    throw NotEllipticError("eigen_ratio: state is not elliptic (L^2 >= 1)");
  }
  return 1.0 / (1.0 - l2);
}

} // namespace conflow
