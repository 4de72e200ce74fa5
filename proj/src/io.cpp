#include "conflow/io.hpp"

#include "conflow/errors.hpp"
#include "conflow/spherical_ops.hpp"
#include "json_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace conflow {

namespace {

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) {
    throw Error("cannot open '" + path.string() + "' for writing");
  }
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) {
    throw Error("cannot open '" + path.string() + "' for reading");
  }
  return is;
}

double parse_double(const std::string& s, std::size_t line) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw ParseError("line " + std::to_string(line) + ": malformed number '" + s + "'", line);
  }
  return v;
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

} // namespace

void write_field_csv(std::ostream& os, const ScalarField& f) {
  const SphericalGrid& grid = f.grid();
  os << "theta,phi,value\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Node n = grid.node(k);
    os << format17(grid.theta(n.i)) << ',' << format17(grid.phi(n.j)) << ',' << format17(f[k])
       << '\n';
  }
}

void write_field_csv(const std::filesystem::path& path, const ScalarField& f) {
  auto os = open_out(path);
  write_field_csv(os, f);
}

ScalarField read_field_csv(std::istream& is, const GridPtr& grid) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("theta,phi,value", 0) != 0) {
    throw ParseError("field CSV must start with the header 'theta,phi,value'", 1);
  }
  ScalarField f(grid);
  std::size_t k = 0;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<std::string, 3> cols;
    std::size_t start = 0;
    for (std::size_t c = 0; c < 3; ++c) {
      const std::size_t comma = line.find(',', start);
      if ((c < 2) == (comma == std::string::npos)) {
        throw ParseError("line " + std::to_string(lineno) + ": expected 3 columns", lineno);
      }
      cols[c] = line.substr(start, c < 2 ? comma - start : std::string::npos);
      start = comma + 1;
    }
    if (k >= grid->size()) {
      throw GridMismatchError("field CSV has more rows than the grid has nodes");
    }
    const Node n = grid->node(k);
    if (!near(parse_double(cols[0], lineno), grid->theta(n.i)) ||
        !near(parse_double(cols[1], lineno), grid->phi(n.j))) {
      throw GridMismatchError("line " + std::to_string(lineno) +
                              ": node coordinates do not match the grid");
    }
    f[k++] = parse_double(cols[2], lineno);
  }
  if (k != grid->size()) {
    throw GridMismatchError("field CSV has " + std::to_string(k) + " rows, grid has " +
                            std::to_string(grid->size()) + " nodes");
  }
  return f;
}

ScalarField read_field_csv(const std::filesystem::path& path, const GridPtr& grid) {
  auto is = open_in(path);
  try {
    return read_field_csv(is, grid);
  } catch (const Error& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

std::string grid_json(const SphericalGrid& grid) { return detail::grid_to_json(grid).dump(2); }

std::vector<std::uint8_t> read_mask(std::istream& is, const GridSpec& spec) {
  std::vector<std::uint8_t> mask;
  mask.reserve(spec.n_theta * spec.n_phi);
  std::string line;
  std::size_t rows = 0;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = line.substr(0, line.find('#'));
    std::size_t count = 0;
    for (char c : line) {
      if (c == '0' || c == '1') {
        mask.push_back(static_cast<std::uint8_t>(c - '0'));
        ++count;
      } else if (!std::isspace(static_cast<unsigned char>(c))) {
        throw ParseError("mask line " + std::to_string(lineno) + ": unexpected character '" +
                             std::string(1, c) + "'",
                         lineno);
      }
    }
    if (count == 0) continue;
    if (count != spec.n_phi) {
      throw ParseError("mask line " + std::to_string(lineno) + ": expected " +
                           std::to_string(spec.n_phi) + " entries, found " + std::to_string(count),
                       lineno);
    }
    ++rows;
  }
  if (rows != spec.n_theta) {
    throw ParseError("mask has " + std::to_string(rows) + " rows, expected " +
                         std::to_string(spec.n_theta),
                     lineno);
  }
  return mask;
}

std::vector<std::uint8_t> read_mask(const std::filesystem::path& path, const GridSpec& spec) {
  auto is = open_in(path);
  return read_mask(is, spec);
}

void write_type_map_csv(std::ostream& os, const GasModel& gas, const ScalarField& f,
                        double eps_type) {
  const SphericalGrid& grid = f.grid();
  const std::vector<FlowState> states = flow_states(f);
  os << "i,j,theta,phi,type\n";
  for (std::size_t k : grid.masked_nodes()) {
    const Node n = grid.node(k);
    os << n.i << ',' << n.j << ',' << format17(grid.theta(n.i)) << ','
       << format17(grid.phi(n.j)) << ',' << type_code(classify_state(gas, states[k], eps_type))
       << '\n';
  }
}

ScalarField pseudo_mach_field(const GasModel& gas, const ScalarField& f) {
  const SphericalGrid& grid = f.grid();
  const std::vector<FlowState> states = flow_states(f);
  ScalarField out(f.grid_ptr(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k : grid.masked_nodes()) {
    const double c2 = sound_speed_sq(gas, states[k]);
    out[k] = c2 > 0.0 ? states[k].q_sq() / c2 : std::numeric_limits<double>::infinity();
  }
  return out;
}

void write_pgm(const std::filesystem::path& path, const ScalarField& f) {
  const SphericalGrid& grid = f.grid();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : f.values()) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const double span = hi > lo ? hi - lo : 1.0;
  auto os = open_out(path, true);
  os << "P5\n" << grid.n_phi() << ' ' << grid.n_theta() << "\n255\n";
  for (double v : f.values()) {
    const double level = std::isfinite(v) ? std::round(255.0 * (v - lo) / span) : 0.0;
    os.put(static_cast<char>(static_cast<unsigned char>(level)));
  }
}

std::string certificate_json(const EllipticityCertificate& cert) {
  return detail::to_json(cert).dump(2);
}

std::string solve_report_json(const SolveReport& report) {
  return detail::to_json(report).dump(2);
}

std::string comparison_report_json(const ComparisonReport& report, const SphericalGrid& grid) {
  return detail::to_json(report, grid).dump(2);
}

namespace detail {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json node_json(const SphericalGrid& grid, Node n) {
  Json j;
  j["i"] = n.i;
  j["j"] = n.j;
  if (n.i < grid.n_theta() && n.j < grid.n_phi()) {
    j["theta"] = grid.theta(n.i);
    j["phi"] = grid.phi(n.j);
  }
  return j;
}

Json grid_to_json(const SphericalGrid& grid) {
  const GridSpec& s = grid.spec();
  Json j;
  j["theta_min"] = s.theta_min;
  j["theta_max"] = s.theta_max;
  j["phi_min"] = s.phi_min;
  j["phi_max"] = s.phi_max;
  j["n_theta"] = s.n_theta;
  j["n_phi"] = s.n_phi;
  j["phi_periodic"] = s.phi_periodic;
  if (grid.has_mask()) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < s.n_theta; ++i) {
      std::string row;
      for (std::size_t j2 = 0; j2 < s.n_phi; ++j2) row += grid.masked(i, j2) ? '1' : '0';
      rows.push_back(row);
    }
    j["mask"] = rows;
  }
  return j;
}

Json to_json(const EllipticityCertificate& cert) {
  Json j;
  j["pass"] = cert.pass;
  j["eps"] = cert.requested_eps;
  j["eps_rho"] = number(cert.eps_rho);
  j["eps_L"] = number(cert.eps_L);
  j["ratio_max"] = number(cert.ratio_max);
  Json worst;
  worst["i"] = cert.worst_node.i;
  worst["j"] = cert.worst_node.j;
  worst["theta"] = cert.worst_theta;
  worst["phi"] = cert.worst_phi;
  j["worst_node"] = worst;
  Json violations = Json::array();
  for (const auto& v : cert.violations) {
    Json e;
    e["i"] = v.node.i;
    e["j"] = v.node.j;
    e["theta"] = v.theta;
    e["phi"] = v.phi;
    e["rho"] = number(v.rho);
    e["l2"] = number(v.l2);
    violations.push_back(e);
  }
  j["violations"] = violations;
  return j;
}

Json to_json(const SolveReport& report) {
  Json j;
  j["converged"] = report.converged;
  j["iterations"] = report.iterations;
  Json residuals = Json::array();
  for (double r : report.residual_history) residuals.push_back(number(r));
  j["residuals"] = residuals;
  Json steps = Json::array();
  for (StepKind s : report.steps) steps.push_back(s == StepKind::Newton ? "newton" : "picard");
  j["steps"] = steps;
  j["linear_iterations"] = report.linear_iterations;
  j["warnings"] = report.warnings;
  j["certificate"] = report.has_certificate ? to_json(report.certificate) : Json(nullptr);
  return j;
}

Json to_json(const std::vector<HopfEntry>& hopf) {
  Json arr = Json::array();
  for (const auto& h : hopf) {
    Json e;
    e["i"] = h.node.i;
    e["j"] = h.node.j;
    e["theta"] = h.theta;
    e["phi"] = h.phi;
    e["derivative"] = number(h.derivative);
    arr.push_back(e);
  }
  return arr;
}

Json to_json(const ComparisonReport& report, const SphericalGrid& grid) {
  Json j;
  Json hyps = Json::object();
  for (const auto& h : report.hypotheses) {
    Json e;
    e["pass"] = h.pass;
    e["worst_node"] = node_json(grid, h.worst_node);
    e["value"] = number(h.value);
    hyps[h.name] = e;
  }
  j["hypotheses"] = hyps;
  j["applicable"] = report.applicable;
  j["typo_reading_A_pass"] = report.typo_reading_A_pass;
  j["typo_reading_B_pass"] = report.typo_reading_B_pass;
  j["interior_min_gap"] = number(report.interior_min_gap);
  j["interior_max_abs_gap"] = number(report.interior_max_abs_gap);
  j["min_gap_node"] = node_json(grid, report.min_gap_node);
  j["tol_order"] = report.tol_order;
  j["ordering_pass"] = report.ordering_pass;
  j["weak_form_min"] = number(report.weak_form_min);
  j["weak_form_min_node"] = node_json(grid, report.weak_form_min_node);
  j["weak_form_pass"] = report.weak_form_pass;
  if (report.dichotomy) {
    const DichotomyVerdict& d = *report.dichotomy;
    j["dichotomy"] = to_string(d.kind);
    Json detail;
    detail["node"] = node_json(grid, d.node);
    detail["gap"] = number(d.gap);
    detail["grad_theta"] = number(d.grad_theta);
    detail["grad_phi"] = number(d.grad_phi);
    j["dichotomy_detail"] = detail;
  } else {
    j["dichotomy"] = nullptr;
  }
  j["hopf"] = to_json(report.hopf);
  return j;
}

} // namespace detail

} // namespace conflow
