#pragma once

#include <array>

namespace conflow {

using Mat2 = std::array<std::array<double, 2>, 2>;
using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

/// Gas obeying p'(rho) = rho^(gamma-1), gamma >= -1, together with the
/// Bernoulli constant B of the conical flow.
///
/// The reference squared sound speed is always derived as
/// c0^2 = rho0^(gamma-1), which keeps density() and sound_speed_sq()
/// consistent with c^2 = rho^(gamma-1). gamma == 1 selects the isothermal
/// (logarithmic enthalpy) branch, gamma == -1 is the Chaplygin gas.
class GasModel {
public:
  /// Largest |(B - z^2 - |q|^2)/2| accepted on the isothermal branch.
  static constexpr double kIsothermalExponentCap = 700.0;

  GasModel(double gamma, double rho0, double bernoulli);

  double gamma() const { return gamma_; }
  double rho0() const { return rho0_; }
  double bernoulli() const { return bernoulli_; }
  double c0_sq() const { return c0_sq_; }
  bool isothermal() const { return gamma_ == 1.0; }

private:
  double gamma_;
  double rho0_;
  double bernoulli_;
  double c0_sq_;
};

/// Pointwise state (q1, q2, z) = (d_theta phi, d_phi phi / sin(theta), phi).
struct FlowState {
  double q1 = 0.0;
  double q2 = 0.0;
  double z = 0.0;

  double q_sq() const { return q1 * q1 + q2 * q2; }
};

enum class FlowType { Elliptic, Parabolic, Hyperbolic, Vacuum };

/// Single-letter code used in type maps: E, P, H or V.
char type_code(FlowType t);

struct DensityPartials {
  double dq1 = 0.0;
  double dq2 = 0.0;
  double dz = 0.0;
};

inline constexpr double kDefaultTypeBand = 1e-8;

/// c^2 = c0^2 + (gamma-1)/2 (B - z^2 - |q|^2); identically 1 when gamma == 1.
/// May be nonpositive; callers decide what that means.
double sound_speed_sq(const GasModel& gas, const FlowState& s);

/// rho = (c^2)^(1/(gamma-1)), or rho0 exp((B - z^2 - |q|^2)/2) when gamma == 1.
/// Throws VacuumError when c^2 <= 0 and OverflowError when the isothermal
/// exponent exceeds the cap.
double density(const GasModel& gas, const FlowState& s);

/// Gradient of density with respect to (q1, q2, z): -(q1, q2, z) rho^(2-gamma).
DensityPartials density_partials(const GasModel& gas, const FlowState& s);

/// Same as density_partials with the density already known.
DensityPartials density_partials(const GasModel& gas, const FlowState& s, double rho);

/// Pseudo-Mach number squared L^2 = |q|^2 / c^2. Throws VacuumError if c^2 <= 0.
double pseudo_mach_sq(const GasModel& gas, const FlowState& s);

FlowType classify_state(const GasModel& gas, const FlowState& s,
                        double eps_type = kDefaultTypeBand);

/// Hessian of (q, z) -> |q|^2 - c^2(q, z), the constant
/// diag(gamma + 1, gamma + 1, gamma - 1). The tangential 2x2 block is
/// (gamma + 1) I and is nonnegative for every gamma >= -1.
Mat3 convexity_hessian(const GasModel& gas);

} // namespace conflow
