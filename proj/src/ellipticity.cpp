#include "conflow/ellipticity.hpp"

#include "conflow/errors.hpp"
#include "conflow/spherical_ops.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace conflow {

HMatrix h_matrix(const GasModel& gas, const FlowState& s, double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw PreconditionError("h_matrix: beta must lie in (0, 1]");
  }
  const double rho = density(gas, s);
  const DensityPartials dr = density_partials(gas, s, rho);
  const double q[2] = {s.q1, s.q2};
  const double grad[3] = {dr.dq1, dr.dq2, dr.dz};

  HMatrix h;
  h.beta = beta;
  for (int r = 0; r < 3; ++r) {
    for (int col = 0; col < 2; ++col) {
      // d A_col / d var_r with A = rho q.
      h.entries[r][col] = q[col] * grad[r] + (r == col ? rho : 0.0);
    }
    // -beta d B / d var_r with B = 2 rho z.
    const double d_b = 2.0 * s.z * grad[r] + (r == 2 ? 2.0 * rho : 0.0);
    h.entries[r][2] = -beta * d_b;
  }
  return h;
}

FormBound form_and_bound(const HMatrix& h, const GasModel& gas, const FlowState& s,
                         const Vec3& xi) {
  FormBound out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      out.form += h.entries[r][c] * xi[r] * xi[c];
    }
  }
  const double c2 = sound_speed_sq(gas, s);
  const double scale = density(gas, s) / c2;
  out.lower_bound = scale * ((c2 - s.q_sq()) * (xi[0] * xi[0] + xi[1] * xi[1]) +
                             (s.z * s.z - c2) * xi[2] * xi[2]);
  return out;
}

std::string to_string(SegmentViolation v) {
  switch (v) {
  case SegmentViolation::None: return "none";
  case SegmentViolation::Vacuum: return "vacuum";
  case SegmentViolation::NotElliptic: return "not_elliptic";
  case SegmentViolation::BelowSoundSpeed: return "below_sound_speed";
  case SegmentViolation::FormNegative: return "form_negative";
  case SegmentViolation::FormNotPositive: return "form_not_positive";
  }
  return "unknown";
}

namespace {

std::vector<Vec3> probe_directions(const SegmentOptions& opts) {
  std::vector<Vec3> dirs;
  for (int a = 0; a < 3; ++a) {
    for (double sign : {1.0, -1.0}) {
      Vec3 e{};
      e[a] = sign;
      dirs.push_back(e);
    }
  }
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  while (dirs.size() < 6 + opts.n_random) {
    Vec3 v{normal(rng), normal(rng), normal(rng)};
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (n < 1e-8) continue;
    dirs.push_back({v[0] / n, v[1] / n, v[2] / n});
  }
  return dirs;
}

// Returns the first violation at a single state, with the offending value.
std::pair<SegmentViolation, double> check_state(const GasModel& gas, const FlowState& s,
                                                const std::vector<Vec3>& dirs,
                                                const SegmentOptions& opts) {
  try {
    (void)density(gas, s);
  } catch (const Error&) {
    return {SegmentViolation::Vacuum, sound_speed_sq(gas, s)};
  }
  const double c2 = sound_speed_sq(gas, s);
  const double l2 = s.q_sq() / c2;
  if (!(l2 < 1.0)) {
    return {SegmentViolation::NotElliptic, l2};
  }
  const double c = std::sqrt(c2);
  if (s.z < c - opts.sound_speed_slack) {
    return {SegmentViolation::BelowSoundSpeed, s.z - c};
  }
  const HMatrix h = h_matrix(gas, s, opts.beta);
  for (const Vec3& xi : dirs) {
    double form = 0.0;
    for (int r = 0; r < 3; ++r) {
      for (int col = 0; col < 3; ++col) {
        form += h.entries[r][col] * xi[r] * xi[col];
      }
    }
    const bool tangential = xi[0] != 0.0 || xi[1] != 0.0;
    if (tangential && !(form > 0.0)) {
      return {SegmentViolation::FormNotPositive, form};
    }
    if (!tangential && form < -opts.sound_speed_slack) {
      return {SegmentViolation::FormNegative, form};
    }
  }
  return {SegmentViolation::None, 0.0};
}

} // namespace

SegmentReport check_segment_conditions(const GasModel& gas, const ScalarField& f_minus,
                                       const ScalarField& f_plus, const SegmentOptions& opts) {
  require_same_grid(f_minus.grid(), f_plus.grid(), "check_segment_conditions");
  if (opts.n_t < 2) {
    throw PreconditionError("check_segment_conditions: n_t must be at least 2");
  }
  const SphericalGrid& grid = f_minus.grid();
  const std::vector<FlowState> sm = flow_states(f_minus);
  const std::vector<FlowState> sp = flow_states(f_plus);
  const std::vector<Vec3> dirs = probe_directions(opts);

  SegmentReport report;
  report.nodes.reserve(grid.interior_nodes().size());
  for (std::size_t k : grid.interior_nodes()) {
    SegmentNodeVerdict verdict;
    verdict.node = grid.node(k);
    for (std::size_t m = 0; m < opts.n_t; ++m) {
      const double t = static_cast<double>(m) / static_cast<double>(opts.n_t - 1);
      const FlowState st{t * sm[k].q1 + (1.0 - t) * sp[k].q1, t * sm[k].q2 + (1.0 - t) * sp[k].q2,
                         t * sm[k].z + (1.0 - t) * sp[k].z};
      const auto [violation, value] = check_state(gas, st, dirs, opts);
      if (violation != SegmentViolation::None) {
        verdict.pass = false;
        verdict.violation = violation;
        verdict.t = t;
        verdict.value = value;
        break;
      }
    }
    if (!verdict.pass) {
      report.pass = false;
      ++report.violation_count;
    }
    report.nodes.push_back(verdict);
  }
  return report;
}

EllipticityCertificate certify_uniform(const GasModel& gas, const ScalarField& f, double eps) {
  const SphericalGrid& grid = f.grid();
  const NodalDensity nd = nodal_density(gas, f);

  EllipticityCertificate cert;
  cert.requested_eps = eps;
  double min_rho = std::numeric_limits<double>::infinity();
  double max_l2 = -std::numeric_limits<double>::infinity();
  for (std::size_t k : grid.masked_nodes()) {
    const double rho = nd.rho[k];
    const double l2 = nd.states[k].q_sq() / sound_speed_sq(gas, nd.states[k]);
    min_rho = std::min(min_rho, rho);
    if (l2 > max_l2) {
      max_l2 = l2;
      cert.worst_node = grid.node(k);
    }
    if (rho < eps || l2 > 1.0 - eps) {
      const Node n = grid.node(k);
      cert.violations.push_back({n, grid.theta(n.i), grid.phi(n.j), rho, l2});
    }
  }
  cert.eps_rho = min_rho;
  cert.eps_L = 1.0 - max_l2;
  cert.ratio_max =
      max_l2 < 1.0 ? 1.0 / (1.0 - max_l2) : std::numeric_limits<double>::infinity();
  cert.worst_theta = grid.theta(cert.worst_node.i);
  cert.worst_phi = grid.phi(cert.worst_node.j);
  cert.pass = cert.eps_rho >= eps && cert.eps_L >= eps;
  return cert;
}

} // namespace conflow
