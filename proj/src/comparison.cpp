#include "conflow/comparison.hpp"

#include "conflow/errors.hpp"
#include "conflow/spherical_ops.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>
#include <algorithm>
#include <map>
#include <tuple>
#include <unordered_map>

namespace conflow {

namespace {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussRule& gauss_rule(std::size_t n) {
  static std::mutex mutex;
  static std::unordered_map<std::size_t, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) {
    return it->second;
  }
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
      table(gsl_integration_glfixed_table_alloc(n), &gsl_integration_glfixed_table_free);
  if (!table) {
    throw PreconditionError("Gauss-Legendre table allocation failed");
  }
  GaussRule rule;
  for (std::size_t m = 0; m < n; ++m) {
    double x = 0.0;
    double w = 0.0;
    gsl_integration_glfixed_point(0.0, 1.0, m, &x, &w, table.get());
    rule.nodes.push_back(x);
    rule.weights.push_back(w);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

std::string node_text(Node n) {
  std::ostringstream os;
  os << "(" << n.i << ", " << n.j << ")";
  return os.str();
}

} // namespace

PointCoefficients mean_value_coefficients_at(const GasModel& gas, const FlowState& minus,
                                             const FlowState& plus, std::size_t n_quad) {
  if (n_quad == 0) {
    throw PreconditionError("mean_value_coefficients: n_quad must be positive");
  }
  const GaussRule& rule = gauss_rule(n_quad);
  PointCoefficients out;
  for (std::size_t m = 0; m < n_quad; ++m) {
    const double t = rule.nodes[m];
    const double w = rule.weights[m];
    const FlowState s{t * minus.q1 + (1.0 - t) * plus.q1, t * minus.q2 + (1.0 - t) * plus.q2,
                      t * minus.z + (1.0 - t) * plus.z};
    double rho = 0.0;
    try {
      rho = density(gas, s);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "vacuum on segment at t = " << t << ": " << e.what();
      throw VacuumError(os.str());
    }
    const DensityPartials p = density_partials(gas, s, rho);
    out.a11 += w * (rho + s.q1 * p.dq1);
    out.a12 += w * (s.q1 * p.dq2);
    out.a21 += w * (s.q2 * p.dq1);
    out.a22 += w * (rho + s.q2 * p.dq2);
    out.b1 += w * (s.q1 * p.dz);
    out.b2 += w * (s.q2 * p.dz);
    out.c1 += w * (2.0 * s.z * p.dq1);
    out.c2 += w * (2.0 * s.z * p.dq2);
    out.d += w * (2.0 * rho + 2.0 * s.z * p.dz);
  }
  return out;
}

CoefficientFields mean_value_coefficients(const GasModel& gas, const ScalarField& f_minus,
                                          const ScalarField& f_plus, std::size_t n_quad) {
  require_same_grid(f_minus.grid(), f_plus.grid(), "mean_value_coefficients");
  const SphericalGrid& grid = f_minus.grid();
  const GridPtr& g = f_minus.grid_ptr();
  const std::vector<FlowState> sm = flow_states(f_minus);
  const std::vector<FlowState> sp = flow_states(f_plus);
  CoefficientFields out{ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g),
                        ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g),
                        ScalarField(g)};
  for (std::size_t k : grid.masked_nodes()) {
    PointCoefficients pc;
    try {
      pc = mean_value_coefficients_at(gas, sm[k], sp[k], n_quad);
    } catch (const VacuumError& e) {
      const Node n = grid.node(k);
      throw VacuumError(std::string(e.what()) + " at node " + node_text(n),
                        static_cast<std::ptrdiff_t>(n.i), static_cast<std::ptrdiff_t>(n.j));
    }
    out.a11[k] = pc.a11;
    out.a12[k] = pc.a12;
    out.a21[k] = pc.a21;
    out.a22[k] = pc.a22;
    out.b1[k] = pc.b1;
    out.b2[k] = pc.b2;
    out.c1[k] = pc.c1;
    out.c2[k] = pc.c2;
    out.d[k] = pc.d;
  }
  return out;
}

ScalarField linearized_apply(const CoefficientFields& co, const ScalarField& h) {
  require_same_grid(co.a11.grid(), h.grid(), "linearized_apply");
  const SphericalGrid& grid = h.grid();
  const VectorField dh = gradient_sph(h);

  // Non-compact parts of the node fluxes: a_12 d_2 h + b_1 h and a_21 d_1 h + b_2 h.
  std::vector<double> rest_t(grid.size(), 0.0);
  std::vector<double> rest_p(grid.size(), 0.0);
  for (std::size_t k : grid.masked_nodes()) {
    rest_t[k] = co.a12[k] * dh.v_phi[k] + co.b1[k] * h[k];
    rest_p[k] = co.a21[k] * dh.v_theta[k] + co.b2[k] * h[k];
  }

  const double ht = grid.h_theta();
  const double hp = grid.h_phi();
  ScalarField out(h.grid_ptr());
  for (std::size_t k : grid.interior_nodes()) {
    const std::size_t tp = *grid.neighbor(k, Axis::Theta, 1);
    const std::size_t tm = *grid.neighbor(k, Axis::Theta, -1);
    const std::size_t pp = *grid.neighbor(k, Axis::Phi, 1);
    const std::size_t pm = *grid.neighbor(k, Axis::Phi, -1);
    const std::size_t i = grid.node(k).i;
    const double s = grid.sin_theta(i);

    const double flux_t_up = 0.5 * (co.a11[k] + co.a11[tp]) * (h[tp] - h[k]) / ht +
                             0.5 * (rest_t[k] + rest_t[tp]);
    const double flux_t_dn = 0.5 * (co.a11[k] + co.a11[tm]) * (h[k] - h[tm]) / ht +
                             0.5 * (rest_t[k] + rest_t[tm]);
    const double flux_p_up = 0.5 * (co.a22[k] + co.a22[pp]) * (h[pp] - h[k]) / (s * hp) +
                             0.5 * (rest_p[k] + rest_p[pp]);
    const double flux_p_dn = 0.5 * (co.a22[k] + co.a22[pm]) * (h[k] - h[pm]) / (s * hp) +
                             0.5 * (rest_p[k] + rest_p[pm]);

    const double div = (grid.sin_theta_half_up(i) * flux_t_up -
                        grid.sin_theta_half_up(i - 1) * flux_t_dn) / (s * ht) +
                       (flux_p_up - flux_p_dn) / (s * hp);
    out[k] = div + co.c1[k] * dh.v_theta[k] + co.c2[k] * dh.v_phi[k] + co.d[k] * h[k];
  }
  return out;
}

std::pair<double, double> positive_part_gradient(const ScalarField& h_plus, std::size_t k) {
  const SphericalGrid& grid = h_plus.grid();
  if (!(h_plus[k] > 0.0)) {
    return {0.0, 0.0};
  }
  auto positive = [&](std::optional<std::size_t> m) { return m && h_plus[*m] > 0.0; };
  auto axis_derivative = [&](Axis axis, double h) {
    const auto up = grid.neighbor(k, axis, 1);
    const auto dn = grid.neighbor(k, axis, -1);
    if (up && dn && (positive(up) || positive(dn))) {
      if (positive(up) && positive(dn)) {
        return (h_plus[*up] - h_plus[*dn]) / (2.0 * h);
      }
    }
    if (positive(up)) {
      const auto up2 = grid.neighbor(*up, axis, 1);
      if (positive(up2)) {
        return (-3.0 * h_plus[k] + 4.0 * h_plus[*up] - h_plus[*up2]) / (2.0 * h);
      }
    }
    if (positive(dn)) {
      const auto dn2 = grid.neighbor(*dn, axis, -1);
      if (positive(dn2)) {
        return (3.0 * h_plus[k] - 4.0 * h_plus[*dn] + h_plus[*dn2]) / (2.0 * h);
      }
    }
    if (positive(up)) return (h_plus[*up] - h_plus[k]) / h;
    if (positive(dn)) return (h_plus[k] - h_plus[*dn]) / h;
    return 0.0;
  };
  const double s = grid.sin_theta(grid.node(k).i);
  return {axis_derivative(Axis::Theta, grid.h_theta()),
          axis_derivative(Axis::Phi, grid.h_phi()) / s};
}

namespace {

ScalarField positive_part(const ScalarField& f_minus, const ScalarField& f_plus) {
  ScalarField h(f_minus.grid_ptr());
  for (std::size_t k : f_minus.grid().masked_nodes()) {
    h[k] = std::max(f_minus[k] - f_plus[k], 0.0);
  }
  return h;
}

double integrand_at(const GasModel& gas, const ScalarField& h_plus,
                    const std::vector<FlowState>& sm, const std::vector<FlowState>& sp,
                    double beta, std::size_t k, std::size_t n_quad) {
  const double hp = h_plus[k];
  if (!(hp > 0.0)) {
    return 0.0;
  }
  const auto [e1, e2] = positive_part_gradient(h_plus, k);
  PointCoefficients pc;
  try {
    pc = mean_value_coefficients_at(gas, sm[k], sp[k], n_quad);
  } catch (const VacuumError& e) {
    const Node n = h_plus.grid().node(k);
    throw VacuumError(std::string(e.what()) + " at node " + node_text(n),
                      static_cast<std::ptrdiff_t>(n.i), static_cast<std::ptrdiff_t>(n.j));
  }
  const double q = pc.a11 * e1 * e1 + (pc.a12 + pc.a21) * e1 * e2 + pc.a22 * e2 * e2 +
                   (pc.b1 - beta * pc.c1) * hp * e1 + (pc.b2 - beta * pc.c2) * hp * e2 -
                   beta * pc.d * hp * hp;
  return std::pow(hp, 1.0 / beta - 1.0) * q / beta;
}

void check_beta(double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw PreconditionError("beta must lie in (0, 1]");
  }
}

} // namespace

double weak_form_integrand(const GasModel& gas, const ScalarField& f_minus,
                           const ScalarField& f_plus, double beta, Node node,
                           std::size_t n_quad) {
  require_same_grid(f_minus.grid(), f_plus.grid(), "weak_form_integrand");
  check_beta(beta);
  const SphericalGrid& grid = f_minus.grid();
  if (node.i >= grid.n_theta() || node.j >= grid.n_phi() || !grid.masked(node.i, node.j)) {
    throw PreconditionError("weak_form_integrand: node " + node_text(node) + " is not in the domain");
  }
  const ScalarField h_plus = positive_part(f_minus, f_plus);
  const std::vector<FlowState> sm = flow_states(f_minus);
  const std::vector<FlowState> sp = flow_states(f_plus);
  return integrand_at(gas, h_plus, sm, sp, beta, grid.index(node), n_quad);
}

ScalarField weak_form_field(const GasModel& gas, const ScalarField& f_minus,
                            const ScalarField& f_plus, double beta, std::size_t n_quad) {
  require_same_grid(f_minus.grid(), f_plus.grid(), "weak_form_field");
  check_beta(beta);
  const ScalarField h_plus = positive_part(f_minus, f_plus);
  const std::vector<FlowState> sm = flow_states(f_minus);
  const std::vector<FlowState> sp = flow_states(f_plus);
  ScalarField out(f_minus.grid_ptr());
  for (std::size_t k : f_minus.grid().interior_nodes()) {
    out[k] = integrand_at(gas, h_plus, sm, sp, beta, k, n_quad);
  }
  return out;
}

std::string to_string(Dichotomy d) {
  switch (d) {
  case Dichotomy::Strict: return "Strict";
  case Dichotomy::Identical: return "Identical";
  case Dichotomy::Anomalous: return "Anomalous";
  }
  return "unknown";
}

const HypothesisCheck* ComparisonReport::find(const std::string& name) const {
  for (const auto& h : hypotheses) {
    if (h.name == name) return &h;
  }
  return nullptr;
}

namespace {

/// Running extremum with row-major (i, j) tie-breaking: the first node wins.
struct Extremum {
  explicit Extremum(bool want_max)
      : want_max(want_max),
        value(want_max ? -std::numeric_limits<double>::infinity()
                       : std::numeric_limits<double>::infinity()) {}
  void offer(double v, Node n) {
    if (want_max ? v > value : v < value) {
      value = v;
      node = n;
    }
  }
  bool want_max;
  double value;
  Node node;
};

HypothesisCheck make_check(std::string name, const Extremum& e, bool pass) {
  return {std::move(name), pass, e.node, e.value};
}

} // namespace

ComparisonReport verify_weak_comparison(const GasModel& gas, const ScalarField& f_minus,
                                        const ScalarField& f_plus,
                                        const ComparisonOptions& opts) {
  require_same_grid(f_minus.grid(), f_plus.grid(), "verify_weak_comparison");
  check_beta(opts.beta);
  const SphericalGrid& grid = f_minus.grid();

  const ScalarField n_minus = residual_N(gas, f_minus);
  const ScalarField n_plus = residual_N(gas, f_plus);
  const NodalDensity dm = nodal_density(gas, f_minus);
  const NodalDensity dp = nodal_density(gas, f_plus);

  Extremum sub(false), super(true), bnd(true);
  Extremum rho_m(false), rho_p(false);
  Extremum l2_m(true), l2_a(true), l2_b(true);
  Extremum zc_m(false), zc_p(false);
  for (std::size_t k : grid.interior_nodes()) {
    const Node n = grid.node(k);
    sub.offer(n_minus[k], n);
    super.offer(n_plus[k], n);
    rho_m.offer(dm.rho[k], n);
    rho_p.offer(dp.rho[k], n);

    const double c2m = sound_speed_sq(gas, dm.states[k]);
    const double c2p = sound_speed_sq(gas, dp.states[k]);
    l2_m.offer(dm.states[k].q_sq() / c2m, n);
    l2_a.offer(dp.states[k].q_sq() / c2p, n);
    // Literal reading: gradient of phi_+, potential of phi_-.
    FlowState mixed = dp.states[k];
    mixed.z = f_minus[k];
    const double c2_mixed = sound_speed_sq(gas, mixed);
    l2_b.offer(c2_mixed > 0.0 ? mixed.q_sq() / c2_mixed : std::numeric_limits<double>::infinity(),
               n);
    zc_m.offer(f_minus[k] - std::sqrt(c2m), n);
    zc_p.offer(f_plus[k] - std::sqrt(c2p), n);
  }
  for (std::size_t k : grid.boundary_nodes()) {
    bnd.offer(f_minus[k] - f_plus[k], grid.node(k));
  }

  ComparisonReport report;
  report.tol_order = opts.tol_order;
  report.hypotheses = {
      make_check("subsolution", sub, sub.value >= -opts.tol_sub),
      make_check("supersolution", super, super.value <= opts.tol_sub),
      make_check("boundary_ordering", bnd, bnd.value <= opts.tol_order),
      make_check("density_minus", rho_m, rho_m.value > 0.0),
      make_check("density_plus", rho_p, rho_p.value > 0.0),
      make_check("elliptic_minus", l2_m, l2_m.value < 1.0),
      make_check("elliptic_plus_reading_A", l2_a, l2_a.value < 1.0),
      make_check("elliptic_plus_reading_B", l2_b, l2_b.value < 1.0),
      make_check("above_sound_speed_minus", zc_m, zc_m.value >= -opts.sound_speed_slack),
      make_check("above_sound_speed_plus", zc_p, zc_p.value >= -opts.sound_speed_slack),
  };
  report.typo_reading_A_pass = report.find("elliptic_plus_reading_A")->pass;
  report.typo_reading_B_pass = report.find("elliptic_plus_reading_B")->pass;
  for (const auto& h : report.hypotheses) {
    report.applicable = report.applicable && h.pass;
  }

  // Interior ordering and the near-touching node.
  Extremum gap(false);
  double max_abs = 0.0;
  for (std::size_t k : grid.interior_nodes()) {
    gap.offer(f_plus[k] - f_minus[k], grid.node(k));
    max_abs = std::max(max_abs, std::abs(f_minus[k] - f_plus[k]));
  }
  if (!grid.interior_nodes().empty()) {
    report.interior_min_gap = gap.value;
    report.min_gap_node = gap.node;
    const std::size_t k = grid.index(gap.node);
    std::vector<double> diff(grid.size(), 0.0);
    for (std::size_t m : grid.masked_nodes()) diff[m] = f_minus[m] - f_plus[m];
    report.min_gap_grad_theta = stencil::d_theta(grid, diff, k);
    report.min_gap_grad_phi = stencil::d_phi(grid, diff, k) / grid.sin_theta(gap.node.i);
  }
  report.interior_max_abs_gap = max_abs;
  report.ordering_pass = report.interior_min_gap >= -opts.tol_order;

  const ScalarField f = weak_form_field(gas, f_minus, f_plus, opts.beta, opts.n_quad);
  Extremum fmin(false);
  for (std::size_t k : grid.interior_nodes()) fmin.offer(f[k], grid.node(k));
  report.weak_form_min = grid.interior_nodes().empty() ? 0.0 : fmin.value;
  report.weak_form_min_node = fmin.node;
  report.weak_form_pass = report.weak_form_min >= -opts.weak_form_tol;

  if (report.applicable && report.ordering_pass) {
    report.dichotomy = strong_comparison_check(report, opts.gap_tol);
  }
  return report;
}

DichotomyVerdict strong_comparison_check(const ComparisonReport& report, double gap_tol) {
  if (!report.ordering_pass) {
    throw PreconditionError("strong_comparison_check: fields are not ordered in the interior");
  }
  for (const auto& h : report.hypotheses) {
    if (!h.pass) {
      throw PreconditionError("strong_comparison_check: hypothesis '" + h.name + "' fails");
    }
  }
  DichotomyVerdict v;
  v.node = report.min_gap_node;
  v.gap = report.interior_min_gap;
  v.grad_theta = report.min_gap_grad_theta;
  v.grad_phi = report.min_gap_grad_phi;
  if (report.interior_max_abs_gap <= gap_tol) {
    v.kind = Dichotomy::Identical;
  } else if (report.interior_min_gap > gap_tol) {
    v.kind = Dichotomy::Strict;
  } else {
    v.kind = Dichotomy::Anomalous;
  }
  return v;
}

std::vector<HopfEntry> hopf_indicator(const GasModel& gas, const ScalarField& f_minus,
                                      const ScalarField& f_plus, const std::vector<Node>& nodes,
                                      const HopfOptions& opts) {
  require_same_grid(f_minus.grid(), f_plus.grid(), "hopf_indicator");
  const SphericalGrid& grid = f_minus.grid();
  for (std::size_t k : grid.interior_nodes()) {
    if (f_minus[k] > f_plus[k] + opts.tol_order) {
      throw PreconditionError("hopf_indicator: phi_- exceeds phi_+ at interior node " +
                              node_text(grid.node(k)));
    }
  }

  std::vector<HopfEntry> out;
  for (const Node& n : nodes) {
    if (n.i >= grid.n_theta() || n.j >= grid.n_phi() || !grid.boundary(grid.index(n))) {
      throw PreconditionError("hopf_indicator: " + node_text(n) + " is not a boundary node");
    }
    const std::size_t k = grid.index(n);
    int missing = 0;
    Axis axis = Axis::Theta;
    int outward = 0;
    for (Axis a : {Axis::Theta, Axis::Phi}) {
      for (int step : {-1, 1}) {
        if (!grid.neighbor(k, a, step)) {
          ++missing;
          axis = a;
          outward = step;
        }
      }
    }
    if (missing != 1) {
      throw PreconditionError("hopf_indicator: " + node_text(n) +
                              " is a corner node; the interior sphere condition is unverifiable");
    }
    if (std::abs(f_minus[k] - f_plus[k]) > opts.tol_touch) {
      throw PreconditionError("hopf_indicator: fields do not touch at " + node_text(n));
    }
    for (const ScalarField* f : {&f_minus, &f_plus}) {
      const FlowState s = flow_states(*f)[k];
      const double c2 = sound_speed_sq(gas, s);
      double rho = 0.0;
      try {
        rho = density(gas, s);
      } catch (const Error&) {
      }
      if (!(rho > 0.0) || !(s.q_sq() < c2)) {
        throw PreconditionError("hopf_indicator: strict ellipticity fails at " + node_text(n));
      }
    }
    const auto in1 = grid.neighbor(k, axis, -outward);
    const auto in2 = in1 ? grid.neighbor(*in1, axis, -outward) : std::nullopt;
    if (!in2) {
      throw PreconditionError("hopf_indicator: " + node_text(n) + " lacks two inward neighbours");
    }
    const double g0 = f_minus[k] - f_plus[k];
    const double g1 = f_minus[*in1] - f_plus[*in1];
    const double g2 = f_minus[*in2] - f_plus[*in2];
    const double length = axis == Axis::Theta ? grid.h_theta() : grid.h_phi() * grid.sin_theta(n.i);
    const double inward = (-3.0 * g0 + 4.0 * g1 - g2) / (2.0 * length);
    out.push_back({n, grid.theta(n.i), grid.phi(n.j), -inward});
  }
  return out;
}

std::vector<Node> edge_midpoint_nodes(const SphericalGrid& grid) {
  // Flat edge nodes grouped by (normal axis, outward sign, line index).
  struct Key {
    int axis;
    int sign;
    std::size_t line;
    bool operator<(const Key& o) const {
      return std::tie(axis, sign, line) < std::tie(o.axis, o.sign, o.line);
    }
  };
  std::map<Key, std::vector<Node>> groups;
  for (std::size_t k : grid.boundary_nodes()) {
    int missing = 0;
    Axis axis = Axis::Theta;
    int sign = 0;
    for (Axis a : {Axis::Theta, Axis::Phi}) {
      for (int step : {-1, 1}) {
        if (!grid.neighbor(k, a, step)) {
          ++missing;
          axis = a;
          sign = step;
        }
      }
    }
    if (missing != 1) continue;
    const Node n = grid.node(k);
    const Key key{axis == Axis::Theta ? 0 : 1, sign, axis == Axis::Theta ? n.i : n.j};
    groups[key].push_back(n);
  }
  std::vector<Node> out;
  for (auto& [key, members] : groups) {
    // Members arrive row-major, i.e. sorted along the tangential index.
    std::size_t start = 0;
    for (std::size_t m = 1; m <= members.size(); ++m) {
      const bool split =
          m == members.size() ||
          (key.axis == 0 ? members[m].j != members[m - 1].j + 1 : members[m].i != members[m - 1].i + 1);
      if (split) {
        out.push_back(members[start + (m - start - 1) / 2]);
        start = m;
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Node& a, const Node& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  return out;
}

} // namespace conflow
