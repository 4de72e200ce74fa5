#pragma once

#include "conflow/gas.hpp"
#include "conflow/grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace conflow {

/// Jacobian structure of the flux pair (A, B) = (rho q, 2 rho z):
///   row r = derivative variable (q1, q2, z),
///   columns = (A1, A2, -beta B).
struct HMatrix {
  Mat3 entries{};
  double beta = 0.5;
};

HMatrix h_matrix(const GasModel& gas, const FlowState& s, double beta = 0.5);

struct FormBound {
  double form = 0.0;
  double lower_bound = 0.0;
};

/// Quadratic form xi^T H xi and its Cauchy-Schwarz lower bound
/// rho^(2-gamma) ((c^2 - |q|^2)(xi1^2 + xi2^2) + (z^2 - c^2) xi3^2).
/// The bound is only meaningful for H built at s with beta = 1/2.
FormBound form_and_bound(const HMatrix& h, const GasModel& gas, const FlowState& s,
                         const Vec3& xi);

enum class SegmentViolation {
  None,
  Vacuum,           ///< rho undefined on the segment
  NotElliptic,      ///< L^2 >= 1
  BelowSoundSpeed,  ///< z < c
  FormNegative,     ///< xi^T H xi < 0 with (xi1, xi2) == 0
  FormNotPositive,  ///< xi^T H xi <= 0 with (xi1, xi2) != 0
};

std::string to_string(SegmentViolation v);

struct SegmentOptions {
  std::size_t n_t = 9;
  std::size_t n_random = 64;
  std::uint64_t seed = 0x5eed5eedULL;
  double beta = 0.5;
  /// z >= c is accepted as z >= c - slack.
  double sound_speed_slack = 1e-12;
};

struct SegmentNodeVerdict {
  Node node;
  bool pass = true;
  SegmentViolation violation = SegmentViolation::None;
  double t = 0.0;      ///< first failing t
  double value = 0.0;  ///< offending quantity (L^2, z - c, form, ...)
};

struct SegmentReport {
  bool pass = true;
  std::size_t violation_count = 0;
  std::vector<SegmentNodeVerdict> nodes;  ///< one per interior node
};

/// Sweeps phi_t = t phi_- + (1-t) phi_+ over n_t uniformly spaced t in [0, 1]
/// at every interior node and checks rho > 0, L^2 < 1, z >= c and positivity
/// of the H-form (sampled unit xi plus signed basis vectors).
SegmentReport check_segment_conditions(const GasModel& gas, const ScalarField& f_minus,
                                       const ScalarField& f_plus,
                                       const SegmentOptions& opts = {});

struct CertificateViolation {
  Node node;
  double theta = 0.0;
  double phi = 0.0;
  double rho = 0.0;
  double l2 = 0.0;
};

struct EllipticityCertificate {
  double requested_eps = 0.0;
  double eps_rho = 0.0;    ///< min rho over masked nodes
  double eps_L = 0.0;      ///< 1 - max L^2
  double ratio_max = 1.0;  ///< 1 / (1 - max L^2); +inf when not elliptic
  bool pass = false;
  Node worst_node;         ///< node attaining max L^2
  double worst_theta = 0.0;
  double worst_phi = 0.0;
  std::vector<CertificateViolation> violations;
};

/// Uniform ellipticity margin of a field: passes iff min rho >= eps and
/// max L^2 <= 1 - eps over all masked nodes.
EllipticityCertificate certify_uniform(const GasModel& gas, const ScalarField& f, double eps);

} // namespace conflow
