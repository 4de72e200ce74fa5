#include "conflow/gas.hpp"

#include "conflow/errors.hpp"

#include <cmath>
#include <sstream>

namespace conflow {

GasModel::GasModel(double gamma, double rho0, double bernoulli)
    : gamma_(gamma), rho0_(rho0), bernoulli_(bernoulli) {
  if (!std::isfinite(gamma) || gamma < -1.0) {
    throw ConfigError("gas: gamma must be a finite number >= -1");
  }
  if (!std::isfinite(rho0) || rho0 <= 0.0) {
    throw ConfigError("gas: rho0 must be positive");
  }
  if (!std::isfinite(bernoulli)) {
    throw ConfigError("gas: bernoulli must be finite");
  }
  c0_sq_ = isothermal() ? 1.0 : std::pow(rho0, gamma - 1.0);
}

char type_code(FlowType t) {
  switch (t) {
  case FlowType::Elliptic: return 'E';
  case FlowType::Parabolic: return 'P';
  case FlowType::Hyperbolic: return 'H';
  case FlowType::Vacuum: return 'V';
  }
  return '?';
}

double sound_speed_sq(const GasModel& gas, const FlowState& s) {
  if (gas.isothermal()) {
    return 1.0;
  }
  return gas.c0_sq() +
         0.5 * (gas.gamma() - 1.0) * (gas.bernoulli() - s.z * s.z - s.q_sq());
}

double density(const GasModel& gas, const FlowState& s) {
  if (gas.isothermal()) {
    const double exponent = 0.5 * (gas.bernoulli() - s.z * s.z - s.q_sq());
    if (!(std::abs(exponent) <= GasModel::kIsothermalExponentCap)) {
      std::ostringstream os;
      os << "isothermal density exponent " << exponent << " exceeds the cap "
         << GasModel::kIsothermalExponentCap;
      throw OverflowError(os.str());
    }
    return gas.rho0() * std::exp(exponent);
  }
  const double c2 = sound_speed_sq(gas, s);
  if (!(c2 > 0.0)) {
    std::ostringstream os;
    os << "vacuum state: c^2 = " << c2 << " at (q1, q2, z) = (" << s.q1 << ", " << s.q2
       << ", " << s.z << ")";
    throw VacuumError(os.str());
  }
  return std::pow(c2, 1.0 / (gas.gamma() - 1.0));
}

DensityPartials density_partials(const GasModel& gas, const FlowState& s, double rho) {
  // rho^(2-gamma) == rho / c^2 because c^2 = rho^(gamma-1).
  const double scale = rho / sound_speed_sq(gas, s);
  return {-s.q1 * scale, -s.q2 * scale, -s.z * scale};
}

DensityPartials density_partials(const GasModel& gas, const FlowState& s) {
  return density_partials(gas, s, density(gas, s));
}

double pseudo_mach_sq(const GasModel& gas, const FlowState& s) {
  const double c2 = sound_speed_sq(gas, s);
  if (!(c2 > 0.0)) {
    throw VacuumError("pseudo-Mach number undefined: c^2 <= 0");
  }
  return s.q_sq() / c2;
}

FlowType classify_state(const GasModel& gas, const FlowState& s, double eps_type) {
  if (!(eps_type > 0.0)) {
    throw PreconditionError("classify_state: eps_type must be positive");
  }
  try {
    (void)density(gas, s);
  } catch (const Error&) {
    return FlowType::Vacuum;
  }
  const double c2 = sound_speed_sq(gas, s);
  if (!(c2 > 0.0)) {
    return FlowType::Vacuum;
  }
  const double l2 = s.q_sq() / c2;
  if (std::abs(l2 - 1.0) <= eps_type) {
    return FlowType::Parabolic;
  }
  return l2 > 1.0 ? FlowType::Hyperbolic : FlowType::Elliptic;
}

Mat3 convexity_hessian(const GasModel& gas) {
  // d^2 c^2 / dq_i dq_j = -(gamma-1) delta_ij over (q1, q2, z); |q|^2 only
  // involves q1, q2, so the z-z entry is gamma - 1, not gamma + 1.
  Mat3 h{};
  h[0][0] = gas.gamma() + 1.0;
  h[1][1] = gas.gamma() + 1.0;
  h[2][2] = gas.gamma() - 1.0;
  return h;
}

} // namespace conflow
