#pragma once

#include "conflow/gas.hpp"
#include "conflow/grid.hpp"

#include <span>
#include <vector>

namespace conflow {

namespace stencil {

/// d/dtheta of nodal values at masked node k: central where both neighbours
/// exist, otherwise second-order one-sided. Throws GridError when neither fits.
double d_theta(const SphericalGrid& grid, std::span<const double> u, std::size_t k);

/// d/dphi (no 1/sin(theta) factor), same stencil rules as d_theta.
double d_phi(const SphericalGrid& grid, std::span<const double> u, std::size_t k);

/// (1/sin) d_theta(sin w_face d_theta u) + (1/sin^2) d_phi(w_face d_phi u) at an
/// interior node, with w_face the arithmetic mean of the two nodal weights.
double weighted_laplacian(const SphericalGrid& grid, std::span<const double> weight,
                          std::span<const double> u, std::size_t k);

} // namespace stencil

/// (d_theta f, d_phi f / sin(theta)) at every masked node; zero elsewhere.
VectorField gradient_sph(const ScalarField& f);

/// (1/sin) d_theta(sin v_theta) + (1/sin) d_phi v_phi at every masked node.
ScalarField divergence_sph(const VectorField& v);

/// Flow state (D f, f) at every masked node; default states elsewhere.
std::vector<FlowState> flow_states(const ScalarField& f);

/// Flow states, densities and density gradients of a field at masked nodes.
struct NodalDensity {
  std::vector<FlowState> states;
  std::vector<double> rho;
  std::vector<DensityPartials> partials;
};

/// Throws VacuumError naming the first masked node (row-major) whose state is
/// outside the admissible set.
NodalDensity nodal_density(const GasModel& gas, const ScalarField& f);

enum class ResidualForm { Divergence, Expanded };

/// The operator N f = div(rho D f) + 2 rho f at interior nodes (zero on
/// boundary and unmasked nodes).
///
/// Divergence: node densities from (gradient_sph f, f), fluxes at half-index
/// faces with arithmetic-mean density, conservative differencing.
/// Expanded: the non-divergence second-order form with central stencils,
/// rescaled by rho / c^2 so that both forms approximate the same N f.
ScalarField residual_N(const GasModel& gas, const ScalarField& f,
                       ResidualForm form = ResidualForm::Divergence);

/// Second-order coefficients [[c^2 - q1^2, -q1 q2], [-q1 q2, c^2 - q2^2]].
Mat2 principal_matrix(const GasModel& gas, const FlowState& s);

/// lambda_max / lambda_min of the principal matrix, 1 / (1 - L^2).
/// Throws NotEllipticError unless c^2 > 0 and L^2 < 1.
double eigen_ratio(const GasModel& gas, const FlowState& s);

} // namespace conflow
