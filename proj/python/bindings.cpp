#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rbd/errors.hpp"
#include "rbd/experiment.hpp"
#include "rbd/problems.hpp"
#include "rbd/spectral_validation.hpp"

namespace py = pybind11;

namespace {

py::dict row_dict(const rbd::ExperimentRow& r) {
  py::dict d;
  d["gamma"] = r.gamma;
  d["h"] = r.h;
  d["dof"] = r.dof;
  d["iterations"] = r.iterations;
  d["cpu_seconds"] = r.cpu_seconds;
  d["e_h"] = r.e_h ? py::cast(*r.e_h) : py::none();
  d["converged"] = r.converged;
  d["epsilon"] = r.epsilon;
  return d;
}

py::dict solve(const std::string& example, const std::string& h, double gamma,
               const std::string& inner, const std::string& epsilon, double tol, int maxit,
               int pre_smooth, int post_smooth, bool conjugacy) {
  rbd::ExperimentSpec spec;
  spec.example = example;
  spec.h_values = {rbd::parse_h(h)};
  spec.gammas = {gamma};
  spec.solver.inner = rbd::parse_inner_solver(inner);
  spec.solver.epsilon = rbd::parse_epsilon_policy(epsilon);
  spec.solver.tolerance = tol;
  spec.solver.max_iterations = maxit;
  spec.solver.mg.pre_smooth = pre_smooth;
  spec.solver.mg.post_smooth = post_smooth;
  spec.solver.exploit_conjugacy = conjugacy;
  rbd::validate_spec(spec);

  rbd::ProblemSolution sol;
  rbd::TimeSpaceGrid grid = rbd::make_experiment_grid(spec.h_values[0], spec.T);
  {
    py::gil_scoped_release release;
    sol = rbd::solve_problem(rbd::make_problem(example, gamma), grid, spec.solver);
  }
  py::dict d;
  d["iterations"] = sol.report.iterations;
  d["converged"] = sol.report.converged;
  d["e_h"] = sol.report.e_h ? py::cast(*sol.report.e_h) : py::none();
  d["epsilon"] = sol.epsilon;
  d["dof"] = grid.dof();
  d["residual_history"] = sol.report.residual_history;
  d["cpu_seconds"] = sol.report.wall_time;
  d["y"] = std::vector<double>(sol.y.data(), sol.y.data() + sol.y.size());
  d["p"] = std::vector<double>(sol.p.data(), sol.p.data() + sol.p.size());
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "ε-circulant RBD preconditioned all-at-once solver for parabolic optimal control";

  auto base = py::register_exception<rbd::Error>(m, "RbdError");
  py::register_exception<rbd::ConfigurationError>(m, "ConfigurationError", base.ptr());
  py::register_exception<rbd::DomainError>(m, "DomainError", base.ptr());
  py::register_exception<rbd::DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<rbd::UnsupportedError>(m, "UnsupportedError", base.ptr());
  py::register_exception<rbd::SolverError>(m, "SolverError", base.ptr());

  m.def("parse_h", &rbd::parse_h, py::arg("text"));
  m.def("format_sci3", &rbd::format_sci3, py::arg("value"));
  m.def("problems", &rbd::registered_problems);

  m.def("solve", &solve, py::arg("example") = "1", py::arg("h") = "2^-5", py::arg("gamma") = 1e-10,
        py::arg("inner") = "dst", py::arg("epsilon") = "paper", py::arg("tol") = 1e-6,
        py::arg("maxit") = 200, py::arg("pre_smooth") = 1, py::arg("post_smooth") = 1,
        py::arg("conjugacy") = true,
        "Solve one (example, h, gamma) cell. y and p are flat, time-major.");

  m.def(
      "run_experiment_json",
      [](const std::string& config) {
        rbd::ExperimentSpec spec;
        rbd::apply_config_json(config, spec);
        std::vector<rbd::ExperimentRow> rows;
        {
          py::gil_scoped_release release;
          rows = rbd::run_experiment(spec);
        }
        py::list out;
        for (const auto& r : rows) out.append(row_dict(r));
        return py::make_tuple(out, rbd::format_table(rows, spec.format));
      },
      py::arg("config"));

  m.def(
      "validate_json",
      [](bool quick) {
        rbd::ValidationSuiteOptions opts;
        if (quick) {
          opts.m1_values = {1};
          opts.n_values = {2, 4};
          opts.gammas = {1e-4};
        }
        py::gil_scoped_release release;
        return rbd::run_validation_suite(opts).to_json();
      },
      py::arg("quick") = false);
}
