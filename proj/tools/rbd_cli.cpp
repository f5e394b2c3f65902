// rbd: solve the parabolic control benchmarks or run the dense spectral suite.
//
//   rbd solve --example 1 --h 2^-5,2^-6 --gamma 1e-10,1e-6,1e-2,1 --inner dst --out results.csv
//   rbd validate --json report.json

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "rbd/errors.hpp"
#include "rbd/experiment.hpp"
#include "rbd/spectral_validation.hpp"

namespace {

int run_solve(const rbd::ExperimentSpec& base, const std::vector<std::string>& h_text,
              const std::string& eps_text, const std::string& inner_text,
              const std::string& config_path) {
  rbd::ExperimentSpec spec = base;
  if (!h_text.empty()) {
    spec.h_values.clear();
    for (const auto& h : h_text) spec.h_values.push_back(rbd::parse_h(h));
  }
  spec.solver.epsilon = rbd::parse_epsilon_policy(eps_text);
  spec.solver.inner = rbd::parse_inner_solver(inner_text);
  if (!config_path.empty()) rbd::load_config(config_path, spec);

  const auto rows = rbd::run_experiment(spec);
  rbd::emit_output(rows, spec.format, spec.output_path);
  int failed = 0;
  for (const auto& r : rows) {
    if (!r.converged) {
      ++failed;
      std::cerr << "not converged: gamma=" << r.gamma << " h=" << r.h << " after " << r.iterations
                << " iterations\n";
    }
  }
  return failed == 0 ? 0 : 1;
}

int run_validate(const std::string& json_path, bool quick, bool verbose) {
  rbd::ValidationSuiteOptions opts;
  if (quick) {
    opts.m1_values = {1};
    opts.n_values = {2, 4};
    opts.gammas = {1e-4};
  }
  const auto report = rbd::run_validation_suite(opts);
  for (const auto& c : report.checks) {
    if (!c.passed || verbose) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.check << "  [" << c.config << "]\n";
      for (const auto& f : c.failures) std::cout << "    " << f << '\n';
    }
  }
  std::cout << report.checks.size() - report.failure_count() << "/" << report.checks.size()
            << " checks passed\n";
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    if (!out) throw rbd::Error("cannot open '" + json_path + "' for writing");
    out << report.to_json() << '\n';
  }
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel-in-time RBD/eps-circulant solver for parabolic optimal control"};
  app.require_subcommand(1);
  // --h is the mesh size, so help is long-form only
  app.set_help_flag("--help", "print this help");
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (0 keeps the runtime default)");

  rbd::ExperimentSpec spec;
  std::vector<std::string> h_text;
  std::string eps_text = "paper";
  std::string inner_text = "dst";
  std::string config_path;
  bool no_conjugacy = false;

  auto* solve = app.add_subcommand("solve", "run GMRES-P_eps over a (gamma, h) table");
  solve->set_help_flag("--help", "print this help");
  solve->add_option("--example", spec.example, "problem: 1 or 2")->capture_default_str();
  solve->add_option("--h", h_text, "mesh sizes, e.g. 2^-5,2^-6")->delimiter(',');
  solve->add_option("--gamma", spec.gammas, "regularization values")->delimiter(',');
  solve->add_option("--inner", inner_text, "inner solver: dst or mg")->capture_default_str();
  solve->add_option("--eps", eps_text, "paper, c_tau(delta) or fixed(value)")->capture_default_str();
  solve->add_option("--tol", spec.solver.tolerance, "relative tolerance")->capture_default_str();
  solve->add_option("--maxit", spec.solver.max_iterations, "iteration cap")->capture_default_str();
  solve->add_option("--pre-smooth", spec.solver.mg.pre_smooth, "multigrid pre-smoothing sweeps");
  solve->add_option("--post-smooth", spec.solver.mg.post_smooth, "multigrid post-smoothing sweeps");
  solve->add_flag("--no-conjugacy", no_conjugacy, "solve all n frequencies");
  solve->add_option("--out", spec.output_path, "output file (stdout if omitted)");
  solve->add_option("--format", spec.format, "csv or text")->capture_default_str();
  solve->add_flag("--large", spec.allow_large, "allow h below 2^-6");
  solve->add_flag("--parallel", spec.parallel_cells, "run table cells concurrently");
  solve->add_option("--config", config_path, "JSON config; its keys override flags");

  std::string json_path;
  bool quick = false;
  bool verbose = false;
  auto* validate = app.add_subcommand("validate", "dense checks of the spectral theory");
  validate->add_option("--json", json_path, "write the full report as JSON");
  validate->add_flag("--quick", quick, "small grid only");
  validate->add_flag("-v,--verbose", verbose, "list passing checks too");

  CLI11_PARSE(app, argc, argv);
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  try {
    if (solve->parsed()) {
      spec.solver.exploit_conjugacy = !no_conjugacy;
      return run_solve(spec, h_text, eps_text, inner_text, config_path);
    }
    return run_validate(json_path, quick, verbose);
  } catch (const rbd::ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const rbd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
