#pragma once

#include "conflow/gas.hpp"
#include "conflow/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace conflow {

/// t-averaged Jacobian entries of the flux pair (A, B) = (rho q, 2 rho z)
/// along phi_t = t phi_- + (1 - t) phi_+:
///   a_ij = int dA_i/dq_j, b_i = int dA_i/dz, c_i = int dB/dq_i, d = int dB/dz.
struct PointCoefficients {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
  double b1 = 0.0, b2 = 0.0;
  double c1 = 0.0, c2 = 0.0;
  double d = 0.0;
};

struct CoefficientFields {
  ScalarField a11, a12, a21, a22, b1, b2, c1, c2, d;
};

inline constexpr std::size_t kDefaultQuadrature = 8;

/// Gauss-Legendre average over t in [0, 1]. Throws VacuumError naming t when
/// a quadrature state has no density.
PointCoefficients mean_value_coefficients_at(const GasModel& gas, const FlowState& minus,
                                             const FlowState& plus, std::size_t n_quad);

/// Coefficients at every masked node.
CoefficientFields mean_value_coefficients(const GasModel& gas, const ScalarField& f_minus,
                                          const ScalarField& f_plus,
                                          std::size_t n_quad = kDefaultQuadrature);

/// (1/sin) d_i(sin (a_ij d_j h + b_i h)) + c_i d_i h + d h at interior nodes,
/// with (d_1, d_2) = (d_theta, d_phi / sin). The flux is differenced
/// conservatively: face-averaged a_11 / a_22 act on the compact face
/// difference, the remaining flux terms are averaged from the nodes.
ScalarField linearized_apply(const CoefficientFields& coeffs, const ScalarField& h);

/// F = (1/beta) (h+)^(1/beta - 1) Q with h+ = max(phi_- - phi_+, 0) and
/// Q = a_ij d_i h+ d_j h+ + (b_i - beta c_i) h+ d_i h+ - beta d (h+)^2.
/// Zero wherever h+ == 0.
double weak_form_integrand(const GasModel& gas, const ScalarField& f_minus,
                           const ScalarField& f_plus, double beta, Node node,
                           std::size_t n_quad = kDefaultQuadrature);

/// weak_form_integrand at every interior node (zero elsewhere).
ScalarField weak_form_field(const GasModel& gas, const ScalarField& f_minus,
                            const ScalarField& f_plus, double beta,
                            std::size_t n_quad = kDefaultQuadrature);

/// (d_1 h+, d_2 h+) at node k: central differences inside {h+ > 0},
/// one-sided from the positive side next to {h+ = 0}, zero where h+ == 0.
std::pair<double, double> positive_part_gradient(const ScalarField& h_plus, std::size_t k);

struct HypothesisCheck {
  std::string name;
  bool pass = true;
  Node worst_node;
  double value = 0.0;
};

enum class Dichotomy { Strict, Identical, Anomalous };

std::string to_string(Dichotomy d);

struct DichotomyVerdict {
  Dichotomy kind = Dichotomy::Identical;
  Node node;              ///< near-touching node (min interior gap)
  double gap = 0.0;       ///< phi_+ - phi_- there
  double grad_theta = 0.0;  ///< D(phi_- - phi_+) there
  double grad_phi = 0.0;
};

struct HopfEntry {
  Node node;
  double theta = 0.0;
  double phi = 0.0;
  double derivative = 0.0;
};

struct ComparisonOptions {
  double tol_sub = 1e-9;
  double tol_order = 1e-8;
  double gap_tol = 1e-10;
  double weak_form_tol = 1e-10;
  double sound_speed_slack = 1e-12;
  double beta = 0.5;
  std::size_t n_quad = kDefaultQuadrature;
};

struct ComparisonReport {
  std::vector<HypothesisCheck> hypotheses;
  bool applicable = true;  ///< false: report is Inapplicable
  bool typo_reading_A_pass = true;  ///< L^2(|D phi_+|, phi_+) < 1
  bool typo_reading_B_pass = true;  ///< L^2(|D phi_+|, phi_-) < 1 (literal)

  double interior_min_gap = 0.0;  ///< min over interior of phi_+ - phi_-
  double interior_max_abs_gap = 0.0;
  Node min_gap_node;
  double min_gap_grad_theta = 0.0;
  double min_gap_grad_phi = 0.0;
  double tol_order = 0.0;
  bool ordering_pass = true;

  double weak_form_min = 0.0;
  Node weak_form_min_node;
  bool weak_form_pass = true;

  std::optional<DichotomyVerdict> dichotomy;
  std::vector<HopfEntry> hopf;

  const HypothesisCheck* find(const std::string& name) const;
};

/// Checks the hypotheses and conclusion of the weak comparison principle for
/// a candidate subsolution f_minus and supersolution f_plus. Failed
/// hypotheses mark the report Inapplicable; they never count as a violation.
ComparisonReport verify_weak_comparison(const GasModel& gas, const ScalarField& f_minus,
                                        const ScalarField& f_plus,
                                        const ComparisonOptions& opts = {});

/// Strict / Identical / Anomalous classification of an ordered, applicable
/// report. Throws PreconditionError otherwise.
DichotomyVerdict strong_comparison_check(const ComparisonReport& report, double gap_tol = 1e-10);

struct HopfOptions {
  double tol_touch = 1e-9;
  double tol_order = 1e-8;
};

/// Second-order one-sided outward normal derivative of phi_- - phi_+ at each
/// listed boundary node. Nodes must lie on straight mask edges (exactly one
/// missing neighbour) and touch (|phi_- - phi_+| <= tol_touch).
std::vector<HopfEntry> hopf_indicator(const GasModel& gas, const ScalarField& f_minus,
                                      const ScalarField& f_plus, const std::vector<Node>& nodes,
                                      const HopfOptions& opts = {});

/// Middle node of every maximal straight run of edge nodes.
std::vector<Node> edge_midpoint_nodes(const SphericalGrid& grid);

} // namespace conflow
