#include "conflow/comparison.hpp"
#include "conflow/ellipticity.hpp"
#include "conflow/errors.hpp"
#include "conflow/expression.hpp"
#include "conflow/gas.hpp"
#include "conflow/io.hpp"
#include "conflow/scenario.hpp"
#include "conflow/solver.hpp"
#include "conflow/spherical_ops.hpp"
#include "conflow/version.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <iostream>
#include <sstream>

namespace py = pybind11;
using namespace conflow;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

ScalarField to_field(const GridPtr& grid, const Array& a) {
  if (a.ndim() != 2 || static_cast<std::size_t>(a.shape(0)) != grid->n_theta() ||
      static_cast<std::size_t>(a.shape(1)) != grid->n_phi()) {
    throw py::value_error("field must have shape (n_theta, n_phi)");
  }
  return ScalarField(grid, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const ScalarField& f) {
  const auto& g = f.grid();
  Array out({g.n_theta(), g.n_phi()});
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

std::vector<std::uint8_t> to_mask(const py::object& mask, std::size_t n) {
  if (mask.is_none()) return {};
  auto a = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>::ensure(mask);
  if (!a || static_cast<std::size_t>(a.size()) != n) {
    throw py::value_error("mask must hold n_theta * n_phi entries");
  }
  return {a.data(), a.data() + a.size()};
}

} // namespace

PYBIND11_MODULE(_conflow, m) {
  m.doc() = "Conical potential flow on the unit sphere";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<VacuumError>(m, "VacuumError", m.attr("Error"));
  py::register_exception<NotEllipticError>(m, "NotEllipticError", m.attr("Error"));
  py::register_exception<ParseError>(m, "ParseError", m.attr("Error"));
  py::register_exception<ConfigError>(m, "ConfigError", m.attr("Error"));

  py::class_<GasModel>(m, "GasModel")
      .def(py::init<double, double, double>(), py::arg("gamma"), py::arg("rho0"), py::arg("bernoulli"))
      .def_property_readonly("gamma", &GasModel::gamma)
      .def_property_readonly("rho0", &GasModel::rho0)
      .def_property_readonly("bernoulli", &GasModel::bernoulli)
      .def_property_readonly("c0_sq", &GasModel::c0_sq);

  py::class_<FlowState>(m, "FlowState")
      .def(py::init<double, double, double>(), py::arg("q1"), py::arg("q2"), py::arg("z"))
      .def_readwrite("q1", &FlowState::q1)
      .def_readwrite("q2", &FlowState::q2)
      .def_readwrite("z", &FlowState::z);

  m.def("sound_speed_sq", &sound_speed_sq, py::arg("gas"), py::arg("state"));
  m.def("density", &density, py::arg("gas"), py::arg("state"));
  m.def("density_partials", [](const GasModel& g, const FlowState& s) {
    const DensityPartials p = density_partials(g, s);
    return py::make_tuple(p.dq1, p.dq2, p.dz);
  }, py::arg("gas"), py::arg("state"));
  m.def("pseudo_mach_sq", &pseudo_mach_sq, py::arg("gas"), py::arg("state"));
  m.def("classify_state", [](const GasModel& g, const FlowState& s, double eps) {
    return std::string(1, type_code(classify_state(g, s, eps)));
  }, py::arg("gas"), py::arg("state"), py::arg("eps_type") = kDefaultTypeBand);
  m.def("convexity_hessian", &convexity_hessian, py::arg("gas"));
  m.def("h_matrix", [](const GasModel& g, const FlowState& s, double beta) {
    return h_matrix(g, s, beta).entries;
  }, py::arg("gas"), py::arg("state"), py::arg("beta") = 0.5);
  m.def("eigen_ratio", &eigen_ratio, py::arg("gas"), py::arg("state"));

  py::class_<SphericalGrid, std::shared_ptr<SphericalGrid>>(m, "Grid")
      .def(py::init([](double t0, double t1, double p0, double p1, std::size_t nt, std::size_t np,
                       bool periodic, const py::object& mask) {
             GridSpec spec{t0, t1, p0, p1, nt, np, periodic};
             return std::make_shared<SphericalGrid>(spec, to_mask(mask, nt * np));
           }),
           py::arg("theta_min"), py::arg("theta_max"), py::arg("phi_min"), py::arg("phi_max"),
           py::arg("n_theta"), py::arg("n_phi"), py::arg("phi_periodic") = false,
           py::arg("mask") = py::none())
      .def_property_readonly("shape", [](const SphericalGrid& g) {
        return py::make_tuple(g.n_theta(), g.n_phi());
      })
      .def_property_readonly("theta", [](const SphericalGrid& g) {
        std::vector<double> v(g.n_theta());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = g.theta(i);
        return v;
      })
      .def_property_readonly("phi", [](const SphericalGrid& g) {
        std::vector<double> v(g.n_phi());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = g.phi(j);
        return v;
      })
      .def("interior", [](const SphericalGrid& g, std::size_t i, std::size_t j) {
        return g.interior(g.index(i, j));
      });

  m.def("eval_expression", [](const std::string& text, const std::shared_ptr<SphericalGrid>& g) {
    return to_array(eval_expression(text, g));
  }, py::arg("text"), py::arg("grid"));

  m.def("residual", [](const GasModel& gas, const std::shared_ptr<SphericalGrid>& g, const Array& f,
                       const std::string& form) {
    if (form != "divergence" && form != "expanded") {
      throw py::value_error("form must be 'divergence' or 'expanded'");
    }
    return to_array(residual_N(gas, to_field(g, f),
                               form == "divergence" ? ResidualForm::Divergence : ResidualForm::Expanded));
  }, py::arg("gas"), py::arg("grid"), py::arg("field"), py::arg("form") = "divergence");

  m.def("_certify", [](const GasModel& gas, const std::shared_ptr<SphericalGrid>& g, const Array& f,
                       double eps) { return certificate_json(certify_uniform(gas, to_field(g, f), eps)); },
        py::arg("gas"), py::arg("grid"), py::arg("field"), py::arg("eps"));

  m.def("_solve", [](const GasModel& gas, const std::shared_ptr<SphericalGrid>& g,
                     const Array& boundary, const py::object& source, double newton_tol) {
    SolveOptions o;
    o.newton_tol = newton_tol;
    const ScalarField src = source.is_none() ? ScalarField(g) : to_field(g, source.cast<Array>());
    SolveResult r;
    {
      py::gil_scoped_release release;
      r = solve_dirichlet({gas, to_field(g, boundary), src}, o);
    }
    return py::make_tuple(to_array(r.solution), solve_report_json(r.report));
  }, py::arg("gas"), py::arg("grid"), py::arg("boundary"), py::arg("source") = py::none(),
     py::arg("newton_tol") = 1e-10);

  m.def("_compare", [](const GasModel& gas, const std::shared_ptr<SphericalGrid>& g,
                       const Array& minus, const Array& plus) {
    return comparison_report_json(verify_weak_comparison(gas, to_field(g, minus), to_field(g, plus)), *g);
  }, py::arg("gas"), py::arg("grid"), py::arg("minus"), py::arg("plus"));

  m.def("run_scenario", [](const std::string& path, const std::string& out, bool quiet) {
    RunOptions o;
    o.out_dir = out;
    o.quiet = quiet;
    std::ostringstream log;
    const int code = run_scenario(path, o, log, std::cerr);
    if (!quiet) py::print(log.str(), py::arg("end") = "");
    return code;
  }, py::arg("scenario"), py::arg("out"), py::arg("quiet") = true);
}
